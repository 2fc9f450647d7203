"""Threshold-Beta confidence models and the correlated-confidence copula.

A contestant privately draws a confidence c in [0, 1], attempts to buzz iff
c exceeds a fixed threshold, and answers correctly with probability c. The
Beta shape and threshold are fitted so that the buzz mass equals the target
attempt rate b and the conditional mean above the threshold equals the
target precision p. Correlated confidences (and correlated right/wrong
noise) come from a Gaussian copula.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats

from .correlated import _cholesky_psd, empirical_binary_corr


@dataclass(frozen=True)
class ConfidenceModel:
    beta_alpha: float
    beta_beta: float
    buzz_threshold: float
    confidence_correlation: float = 0.0
    precision_noise_correlation: float = 0.0

    @property
    def attempt_rate(self) -> float:
        return float(stats.beta(self.beta_alpha, self.beta_beta).sf(self.buzz_threshold))

    @property
    def precision(self) -> float:
        a, b, t = self.beta_alpha, self.beta_beta, self.buzz_threshold
        mass = stats.beta(a, b).sf(t)
        if mass <= 0:
            return 1.0
        return float((a / (a + b)) * stats.beta(a + 1, b).sf(t) / mass)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return stats.beta(self.beta_alpha, self.beta_beta).rvs(size=size, random_state=rng)


def _upper_mean(a: float, b: float, t: float) -> float:
    """E[X | X > t] for Beta(a, b)."""
    mass = stats.beta(a, b).sf(t)
    if mass <= 0:
        return 1.0
    return (a / (a + b)) * stats.beta(a + 1, b).sf(t) / mass


def _lower_mean(a: float, b: float, t: float) -> float:
    """E[X | X <= t] for Beta(a, b)."""
    mass = stats.beta(a, b).cdf(t)
    if mass <= 0:
        return 0.0
    return (a / (a + b)) * stats.beta(a + 1, b).cdf(t) / mass


# concentration (alpha + beta) of the published Average-contestant fit,
# Beta(0.69, 0.40); pinning it closes the one-parameter fit family
AVERAGE_FIT_CONCENTRATION = 1.09


def fit_confidence_beta(b: float, p: float) -> ConfidenceModel:
    """Fit (alpha, beta, threshold) so P(X > t) = b and E[X | X > t] = p.

    The two moment conditions leave a one-parameter family; the member is
    pinned by holding the Beta concentration alpha + beta at the published
    Average-contestant value, so shapes stay comparably dispersed across
    parameter sets. The moment residuals of the returned fit are below 1e-4.
    """
    if not (0.0 < b < 1.0):
        raise ValueError(f"attempt rate must be in (0, 1), got {b}")
    if not (0.0 < p < 1.0 and p > 0.5):
        raise ValueError(f"precision {p} infeasible for attempt rate {b}")

    def beta_for_alpha(a: float) -> tuple[float, float]:
        # solve the precision condition for beta at this alpha
        def gap(bb: float) -> float:
            t = stats.beta(a, bb).isf(b)
            return _upper_mean(a, bb, t) - p

        lo, hi = 1e-3, 200.0
        glo, ghi = gap(lo), gap(hi)
        if glo * ghi > 0:
            raise ValueError(f"no Beta fit at alpha={a} for (b={b}, p={p})")
        bb = optimize.brentq(gap, lo, hi, xtol=1e-13)
        t = float(stats.beta(a, bb).isf(b))
        return bb, t

    def concentration_gap(a: float) -> float:
        bb, _ = beta_for_alpha(a)
        return a + bb - AVERAGE_FIT_CONCENTRATION

    alphas = np.geomspace(0.05, 30.0, 50)
    vals = []
    for a in alphas:
        try:
            vals.append(concentration_gap(a))
        except ValueError:
            vals.append(np.nan)
    vals = np.array(vals)
    idx = np.where(~np.isnan(vals))[0]
    if len(idx) == 0:
        raise ValueError(f"no Beta fit for ({b}, {p})")
    bracket = None
    for i, j in zip(idx[:-1], idx[1:]):
        if vals[i] == 0 or vals[i] * vals[j] < 0:
            bracket = (alphas[i], alphas[j])
            break
    if bracket is None:
        # concentration target unreachable: take the nearest feasible member
        a = float(alphas[idx[np.argmin(np.abs(vals[idx]))]])
    else:
        a = float(optimize.brentq(concentration_gap, *bracket, xtol=1e-10))
    bb, t = beta_for_alpha(a)
    if abs(stats.beta(a, bb).sf(t) - b) > 1e-4 or abs(_upper_mean(a, bb, t) - p) > 1e-4:
        raise ValueError(f"Beta fit failed to meet moment tolerances for ({b}, {p})")
    return ConfidenceModel(beta_alpha=a, beta_beta=bb, buzz_threshold=t)


def fit_confidence_beta_fixed_threshold(b: float, p: float, t: float) -> ConfidenceModel:
    """Fit (alpha, beta) with the buzz threshold pinned (the bot's 0.5 default).

    Two conditions, two unknowns: P(X > t) = b and E[X | X > t] = p.
    """
    if not (0 < b < 1 and t < 1):
        raise ValueError("infeasible attempt rate / threshold")

    def eqs(x):
        a, bb = np.exp(x)
        d = stats.beta(a, bb)
        return [d.sf(t) - b, _upper_mean(a, bb, t) - p]

    sol = optimize.root(eqs, x0=[0.0, -0.5], method="hybr", tol=1e-12)
    if not sol.success:
        raise ValueError(f"no Beta fit at fixed threshold {t} for ({b}, {p})")
    a, bb = np.exp(sol.x)
    return ConfidenceModel(beta_alpha=float(a), beta_beta=float(bb), buzz_threshold=t)


def copula_confidence_draw(
    models: list[ConfidenceModel],
    conf_latent_corr: np.ndarray,
    noise_latent_corr: np.ndarray,
    rng: np.random.Generator,
    size: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw correlated confidences and right/wrong outcomes for three players.

    Returns (confidences, rights) of shapes (size, 3). Right/wrong compares
    the player's confidence to a correlated uniform: right iff U < c, so
    precision given a buzz matches the fitted conditional mean.
    """
    cz = rng.standard_normal((size, 3)) @ _cholesky_psd(conf_latent_corr).T
    cu = stats.norm.cdf(cz)
    conf = np.column_stack(
        [stats.beta(m.beta_alpha, m.beta_beta).ppf(cu[:, i]) for i, m in enumerate(models)]
    )
    nz = rng.standard_normal((size, 3)) @ _cholesky_psd(noise_latent_corr).T
    nu = stats.norm.cdf(nz)
    rights = nu < conf
    return conf, rights


def _pair_latent(corr: float) -> np.ndarray:
    m = np.full((3, 3), corr)
    np.fill_diagonal(m, 1.0)
    return m


def calibrate_copula(
    model: ConfidenceModel,
    rho_buzz: float,
    rho_precision: float,
    n: int = 400_000,
    seed: int = 20130322,
) -> ConfidenceModel:
    """Tune latent copula correlations to hit binary buzz/precision targets.

    The confidence-copula correlation is inverted by bisection on the
    simulated buzz correlation; the precision-noise correlation then targets
    the right/wrong correlation among buzzing pairs. Deterministic for a
    fixed seed.
    """
    t = model.buzz_threshold

    def buzz_corr(latent: float) -> float:
        rng = np.random.default_rng(seed)
        conf, _ = copula_confidence_draw(
            [model] * 3, _pair_latent(latent), np.eye(3), rng, n
        )
        attempts = conf > t
        return empirical_binary_corr(attempts[:, 0], attempts[:, 1])

    if rho_buzz == 0.0:
        conf_latent = 0.0
    else:
        conf_latent = float(
            optimize.brentq(lambda r: buzz_corr(r) - rho_buzz, -0.95, 0.95, xtol=2e-3)
        )

    def precision_corr(noise_latent: float) -> float:
        rng = np.random.default_rng(seed + 1)
        conf, rights = copula_confidence_draw(
            [model] * 3,
            _pair_latent(conf_latent),
            _pair_latent(noise_latent),
            rng,
            n,
        )
        return empirical_binary_corr(rights[:, 0], rights[:, 1])

    if rho_precision == 0.0:
        noise_latent = 0.0
    else:
        noise_latent = float(
            optimize.brentq(
                lambda r: precision_corr(r) - rho_precision, -0.95, 0.95, xtol=2e-3
            )
        )
    return ConfidenceModel(
        beta_alpha=model.beta_alpha,
        beta_beta=model.beta_beta,
        buzz_threshold=model.buzz_threshold,
        confidence_correlation=conf_latent,
        precision_noise_correlation=noise_latent,
    )
