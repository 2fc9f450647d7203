"""Correlated binary triples via thresholded multivariate Gaussians.

Pairwise dependence is parameterized by the Pearson correlation of the
binary indicators, which for marginals (m1, m2) pins the pair joint
completely (see `pair_joint`). At 50% marginals this coincides with the
match-minus-mismatch statistic P(11) + P(00) - P(10) - P(01) used in the
glossary-style checks. For triples, pairwise (marginal, rho) targets are
mapped to a latent Gaussian correlation matrix; the latent model fixes the
three-way interaction consistently between sampling and the analytic
eight-outcome weights.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np
from scipy import optimize, stats


def pair_joint(m1: float, m2: float, rho: float) -> np.ndarray:
    """2x2 joint of two binaries with given marginals and Pearson correlation.

    Returns [[P00, P01], [P10, P11]] (first index = first variable).
    """
    p11 = m1 * m2 + rho * np.sqrt(m1 * (1 - m1) * m2 * (1 - m2))
    p10 = m1 - p11
    p01 = m2 - p11
    p00 = 1.0 - m1 - m2 + p11
    joint = np.array([[p00, p01], [p10, p11]])
    if (joint < -1e-12).any():
        raise ValueError(
            f"infeasible (marginals, rho) combination: m=({m1},{m2}), rho={rho}"
        )
    return np.clip(joint, 0.0, 1.0)


def glossary_corr_from_joint(joint: np.ndarray) -> float:
    """Match-minus-mismatch statistic P11 + P00 - P10 - P01 from a 2x2 joint."""
    return float(joint[1, 1] + joint[0, 0] - joint[1, 0] - joint[0, 1])


def _bvn_upper(t1: float, t2: float, r: float) -> float:
    """P(Z1 > t1, Z2 > t2) for standard bivariate normal with correlation r."""
    if abs(r) < 1e-14:
        return float(stats.norm.sf(t1) * stats.norm.sf(t2))
    cdf = stats.multivariate_normal(mean=[0.0, 0.0], cov=[[1.0, r], [r, 1.0]]).cdf(
        [t1, t2]
    )
    return float(1.0 - stats.norm.cdf(t1) - stats.norm.cdf(t2) + cdf)


@lru_cache(maxsize=4096)
def latent_corr_for_binary(m1: float, m2: float, rho: float) -> float:
    """Latent Gaussian correlation inducing binary correlation `rho`.

    Solved by bisection against the closed-form bivariate-normal orthant
    probability (X_i = 1{Z_i > Phi^-1(1 - m_i)}).
    """
    if rho == 0.0:
        return 0.0
    target11 = pair_joint(m1, m2, rho)[1, 1]
    t1 = stats.norm.isf(m1)
    t2 = stats.norm.isf(m2)

    def gap(r: float) -> float:
        return _bvn_upper(t1, t2, r) - target11

    lo, hi = -0.999999, 0.999999
    # targets at the Frechet bounds map to the degenerate latent extremes
    if gap(hi) < 0:
        return 1.0
    if gap(lo) > 0:
        return -1.0
    return float(optimize.brentq(gap, lo, hi, xtol=1e-12))


def latent_matrix(means: np.ndarray, rho_pairs: np.ndarray) -> np.ndarray:
    """3x3 latent correlation matrix from marginals and pairwise binary rhos.

    `rho_pairs` is symmetric with zero diagonal. Raises if the implied latent
    matrix is not positive semidefinite.
    """
    latent = np.eye(3)
    for i in range(3):
        for j in range(i + 1, 3):
            r = latent_corr_for_binary(
                round(float(means[i]), 12), round(float(means[j]), 12),
                round(float(rho_pairs[i, j]), 12),
            )
            latent[i, j] = latent[j, i] = r
    eigmin = np.linalg.eigvalsh(latent).min()
    if eigmin < -1e-10:
        raise ValueError(f"implied latent correlation matrix not PSD (min eig {eigmin:.2e})")
    return latent


def symmetric_rho_matrix(rho_humans: float, bot_index: int | None = None) -> np.ndarray:
    """Pairwise rho matrix: `rho_humans` between humans, 0 on bot pairs."""
    m = np.full((3, 3), rho_humans)
    np.fill_diagonal(m, 0.0)
    if bot_index is not None:
        m[bot_index, :] = 0.0
        m[:, bot_index] = 0.0
    return m


def _cholesky_psd(latent: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(latent)
    except np.linalg.LinAlgError:
        # nudge a semidefinite matrix (e.g. rho exactly 1) onto the PD cone
        w, v = np.linalg.eigh(latent)
        w = np.clip(w, 1e-12, None)
        a = v @ np.diag(np.sqrt(w))
        return a


def draw_correlated_binary(
    means, rho_pairs, rng: np.random.Generator, size: int | None = None
) -> np.ndarray:
    """Sample binary triples with the given marginals and pairwise correlations.

    Returns a boolean array of shape (3,) or (size, 3).
    """
    means = np.asarray(means, dtype=float)
    rho_pairs = np.asarray(rho_pairs, dtype=float)
    if ((means < 0) | (means > 1)).any():
        raise ValueError("means must lie in [0, 1]")
    latent = latent_matrix(means, rho_pairs)
    chol = _cholesky_psd(latent)
    n = 1 if size is None else size
    z = rng.standard_normal((n, 3)) @ chol.T
    thresholds = stats.norm.isf(means)
    out = z > thresholds
    return out[0] if size is None else out


_TRIPLE_CACHE: dict = {}


def triple_outcome_distribution(means, rho_pairs) -> np.ndarray:
    """Exact probabilities of the 8 binary triples under the latent model.

    Returns an array of shape (2, 2, 2); entry [x0, x1, x2] is
    P(X0=x0, X1=x1, X2=x2). Marginals and pairwise binary correlations match
    the inputs; trivariate rectangle probabilities come from the Gaussian
    latent via numerical integration. Results are cached: the integrator
    uses randomized quadrature, and downstream paired comparisons rely on a
    single weight set per parameter combination.
    """
    means = np.asarray(means, dtype=float)
    rho_pairs = np.asarray(rho_pairs, dtype=float)
    key = (tuple(np.round(means, 12)), tuple(np.round(rho_pairs.ravel(), 12)))
    cached = _TRIPLE_CACHE.get(key)
    if cached is not None:
        return cached
    # degenerate marginals make Gaussian thresholds infinite; peel them off
    for i in range(3):
        if means[i] in (0.0, 1.0):
            sub = [j for j in range(3) if j != i]
            m2 = means[sub]
            rho = float(rho_pairs[sub[0], sub[1]])
            joint2 = _pair_outcome_distribution(m2[0], m2[1], rho)
            out = np.zeros((2, 2, 2))
            xi = int(means[i])
            idx: list = [slice(None)] * 3
            idx[i] = xi
            out[tuple(idx)] = joint2
            out.setflags(write=False)
            _TRIPLE_CACHE[key] = out
            return out
    latent = latent_matrix(means, rho_pairs)
    thresholds = stats.norm.isf(means)
    out = np.zeros((2, 2, 2))
    mvn = stats.multivariate_normal(mean=np.zeros(3), cov=latent, allow_singular=True)
    # P(all above) etc. via inclusion-exclusion over the CDF at mixed corners
    for signs in itertools.product((0, 1), repeat=3):
        # survival-side rectangle: X_i = 1 means Z_i > t_i
        lower = np.where(np.array(signs) == 1, thresholds, -np.inf)
        upper = np.where(np.array(signs) == 1, np.inf, thresholds)
        out[signs] = _mvn_rect(mvn, lower, upper)
    out = np.clip(out, 0.0, 1.0)
    out /= out.sum()
    out.setflags(write=False)
    _TRIPLE_CACHE[key] = out
    return out


def _pair_outcome_distribution(m1: float, m2: float, rho: float) -> np.ndarray:
    if m1 in (0.0, 1.0) or m2 in (0.0, 1.0):
        out = np.outer(
            [1.0 - m1, m1],
            [1.0 - m2, m2],
        )
        return out
    return pair_joint(m1, m2, rho)


def _mvn_rect(mvn, lower: np.ndarray, upper: np.ndarray) -> float:
    """P(lower < Z <= upper) by inclusion-exclusion on the trivariate CDF."""
    total = 0.0
    for picks in itertools.product((0, 1), repeat=3):
        corner = np.where(np.array(picks) == 1, upper, lower)
        if np.isneginf(corner).any():
            continue
        sign = (-1) ** (3 - sum(picks))
        point = np.where(np.isposinf(corner), 12.0, corner)
        total += sign * float(mvn.cdf(point))
    return max(total, 0.0)


def empirical_binary_corr(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation of paired binary samples."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.corrcoef(x, y)[0, 1])


def empirical_glossary_corr(x: np.ndarray, y: np.ndarray) -> float:
    """Match-minus-mismatch statistic from paired binary samples."""
    x = np.asarray(x, dtype=bool)
    y = np.asarray(y, dtype=bool)
    p11 = np.mean(x & y)
    p00 = np.mean(~x & ~y)
    p10 = np.mean(x & ~y)
    p01 = np.mean(~x & y)
    return float(p11 + p00 - p10 - p01)
