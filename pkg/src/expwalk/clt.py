"""Headline quantities: variance formulas, error metrics, rate fits, constants.

Every finite-t reference normal uses the analytic limit sigma^2 (never a
finite-t variance estimate), matching how the limiting variance enters the
statements being verified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import dist, spectral, walks
from .errors import InvalidParameterError, OutOfHypothesisError
from .graph import Labelling, RegularGraph
from .report import BoundReport

GENERAL_LCLT_CONSTANT = 6983.0  # constant in the generic Markov-chain bound
THETA0_DENOMINATOR = 2708.0


@dataclass(frozen=True)
class ExplicitConstants:
    """Every explicit constant of the quantitative statements, evaluated.

    ``c1_small_lambda`` is populated only under its hypothesis lambda <= 1/5.
    Balanced inputs (alpha = 1/2) use the balanced forms of delta, the
    sigma/eta lower bounds, and the b_t coefficient; other alpha use the
    extended forms.
    """

    lam: float
    d: int
    alpha: float
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    c6: float
    c1_small_lambda: float | None
    m_defect: float
    delta: float
    sigma_lower: float
    theta0: float
    eta_lower: float
    bt_lower_coeff: float


def explicit_constants(lam: float, d: int, alpha: float = 0.5) -> ExplicitConstants:
    if not 0.0 <= lam < 1.0:
        raise InvalidParameterError(f"lambda must lie in [0, 1), got {lam}")
    if d < 3:
        raise InvalidParameterError(f"degree must be >= 3, got {d}")
    if not 0.0 < alpha < 1.0:
        raise InvalidParameterError(f"alpha must lie in (0, 1), got {alpha}")
    gap = 1.0 - lam
    balanced = alpha == 0.5
    c1 = 2e13 * d**9 / gap**10
    c2 = 1e14 * d**9 / gap ** (41.0 / 4.0)
    c3 = 2e23 * d**24 / gap**16
    c5 = 4e12 * d**9 / (alpha**3 * (1.0 - alpha) ** 6 * gap**10)
    c6 = 2e13 * d**9 / (alpha**3 * (1.0 - alpha) ** 6 * gap ** (41.0 / 4.0))
    if balanced:
        delta = gap**2 / 3.0
        sigma_lower = gap / (10.0 * d**1.5)
        eta_lower = gap**8 / (8e11 * d**7)
        bt_lower_coeff = gap**2 / (48.0 * d**2)
    else:
        delta = 0.25 * gap**2 * alpha * (1.0 - alpha)
        sigma_lower = math.sqrt(alpha * (1.0 - alpha) ** 2 * gap**2 / (64.0 * d**3))
        eta_lower = alpha**2 * (1.0 - alpha) ** 4 * gap**8 / (3.1e11 * d**7)
        bt_lower_coeff = alpha * (1.0 - alpha) ** 2 * gap**2 / (32.0 * d**2)
    return ExplicitConstants(
        lam=lam,
        d=d,
        alpha=alpha,
        c1=c1,
        c2=c2,
        c3=c3,
        c4=GENERAL_LCLT_CONSTANT,
        c5=c5,
        c6=c6,
        c1_small_lambda=(4e11 * d**3) if lam <= 0.2 else None,
        m_defect=1e10 * d**3 / gap**4,
        delta=delta,
        sigma_lower=sigma_lower,
        theta0=gap**2 * sigma_lower**2 / THETA0_DENOMINATOR,
        eta_lower=eta_lower,
        bt_lower_coeff=bt_lower_coeff,
    )


# ---------------------------------------------------------------------------
# Variance identities.
# ---------------------------------------------------------------------------


def _alpha_weights(g: RegularGraph, lab: Labelling, s: spectral.Spectrum):
    if lab.alpha in (Fraction(0), Fraction(1)):
        raise OutOfHypothesisError("labelling must take both values")
    mask = np.zeros(g.n, dtype=bool)
    mask[lab.one_set] = True
    return float(lab.alpha), spectral.set_projection_weights(s, mask)


def spectral_autocovariance(
    g: RegularGraph, lab: Labelling, k: int, s: spectral.Spectrum | None = None
) -> float:
    """Cov of the labels seen at times 0 and k under the stationary walk."""
    if k < 1:
        raise InvalidParameterError("k must be >= 1")
    s = s or spectral.spectrum(g)
    alpha, w = _alpha_weights(g, lab, s)
    return float(alpha**2 * np.dot(w[1:], s.eigenvalues[1:] ** k))


def variance_formula(
    g: RegularGraph, lab: Labelling, t: int, s: spectral.Spectrum | None = None
) -> float:
    """Spectral form of Var(Z_t); equals the exact-law variance to 1e-10."""
    if t < 1:
        raise InvalidParameterError("t must be >= 1")
    s = s or spectral.spectrum(g)
    alpha, w = _alpha_weights(g, lab, s)
    lam = s.eigenvalues[1:]
    ks = np.arange(1, t, dtype=np.float64)
    powers = lam[None, :] ** ks[:, None]  # (t-1, n-1)
    inner = powers @ w[1:]
    series = math.fsum(((t - ks) * inner).tolist())
    return alpha * (1.0 - alpha) * t + 2.0 * alpha**2 * series


def variance_bound_check(
    g: RegularGraph, lab: Labelling, t: int, s: spectral.Spectrum | None = None
) -> BoundReport:
    """|Var(Z_t) - alpha(1-alpha)t| (exact-law value) against its spectral bound."""
    s = s or spectral.spectrum(g)
    if s.lambda_star >= 1.0 - 1e-12:
        raise OutOfHypothesisError("bound needs lambda* < 1 (graph must not be bipartite)")
    alpha = float(lab.alpha)
    if not 0.0 < alpha < 1.0:
        raise OutOfHypothesisError("labelling must take both values")
    _, var = dist.moments(walks.exact_weight_law(walks.walk_chain(g, lab), t))
    base = alpha * (1.0 - alpha) * t
    return BoundReport(
        lhs=abs(var - base),
        rhs=2.0 * base * s.lambda_star / (1.0 - s.lambda_star),
        context=f"variance deviation bound at t={t}",
    )


def asymptotic_sigma2(
    g: RegularGraph, lab: Labelling, s: spectral.Spectrum | None = None
) -> float:
    """Limit of Var(Z_t)/t: termwise limit of the spectral variance formula."""
    s = s or spectral.spectrum(g)
    if s.lambda_star >= 1.0 - 1e-12:
        raise OutOfHypothesisError("sigma^2 limit needs lambda* < 1")
    alpha, w = _alpha_weights(g, lab, s)
    lam = s.eigenvalues[1:]
    series = float(np.dot(w[1:], lam / (1.0 - lam)))
    return alpha * (1.0 - alpha) + 2.0 * alpha**2 * series


# ---------------------------------------------------------------------------
# Error metrics against normal references.
# ---------------------------------------------------------------------------


def lclt_error_from_law(law: dist.IntDistribution, mu: float, var: float) -> float:
    if var <= 0.0:
        raise InvalidParameterError("variance must be positive")
    dens = dist.normal_density_at_integers(mu, var, law.lo, law.hi)
    return float(np.abs(law.probabilities - dens).max())


def lclt_error(c: walks.FiniteChain, t: int, sigma2: float, mean_rate: float) -> float:
    """Sup over the support of |P(Z_t = k) - matching normal density|."""
    law = walks.exact_weight_law(c, t)
    return lclt_error_from_law(law, t * mean_rate, t * sigma2)


def tv_to_discretized_normal_from_law(
    law: dist.IntDistribution, mu: float, var: float
) -> float:
    return dist.tv_distance(law, dist.discretized_normal(mu, var).law)


def tv_to_discretized_normal(
    c: walks.FiniteChain, t: int, sigma2: float, mean_rate: float
) -> float:
    """TV distance between the law of Z_t and the discretized normal match."""
    if sigma2 <= 0.0:
        raise InvalidParameterError("sigma2 must be positive")
    law = walks.exact_weight_law(c, t)
    return tv_to_discretized_normal_from_law(law, t * mean_rate, t * sigma2)


def matching_sticky_p(sigma2: float) -> float:
    """Sticky parameter whose asymptotic variance rate is exactly sigma2."""
    if sigma2 <= 0.0:
        raise InvalidParameterError(f"sigma2 must be positive, got {sigma2}")
    return (4.0 * sigma2 - 1.0) / (4.0 * sigma2 + 1.0)


def tv_to_sticky(
    g: RegularGraph, lab: Labelling, t: int, s: spectral.Spectrum | None = None
) -> float:
    """TV distance between Z_t and the variance-matched sticky weight R_t."""
    if not lab.balanced:
        raise OutOfHypothesisError("sticky matching is stated for balanced labellings")
    s = s or spectral.spectrum(g)
    sigma2 = asymptotic_sigma2(g, lab, s)
    p = matching_sticky_p(sigma2)
    walk_law = walks.exact_weight_law(walks.walk_chain(g, lab), t)
    sticky_law = walks.exact_weight_law(walks.sticky_chain(p), t)
    return dist.tv_distance(walk_law, sticky_law)


def tv_to_iid(g: RegularGraph, lab: Labelling, t: int) -> float:
    """TV distance between Z_t and the weight of i.i.d. uniform vertex draws."""
    alpha = float(lab.alpha)
    if not 0.0 < alpha < 1.0:
        raise OutOfHypothesisError("labelling must take both values")
    law = walks.exact_weight_law(walks.walk_chain(g, lab), t)
    return dist.tv_distance(law, dist.binomial_law(t, alpha))


# ---------------------------------------------------------------------------
# Tail inequality checks.
# ---------------------------------------------------------------------------


def walk_chernoff_check(
    g: RegularGraph, a, t: int, gamma: float, s: spectral.Spectrum | None = None
) -> BoundReport:
    """Exact two-sided visit-count tail against the expander Chernoff bound."""
    if not 0.0 < gamma <= t:
        raise InvalidParameterError(f"gamma must lie in (0, t], got {gamma}")
    subset = sorted(set(int(v) for v in a))
    indicator = np.zeros(g.n, dtype=np.int64)
    indicator[subset] = 1
    chain = walks.FiniteChain(
        transition=g.transition(),
        initial=np.full(g.n, 1.0 / g.n),
        valuation=indicator,
    )
    law = walks.exact_weight_law(chain, t)
    mean_visits = t * len(subset) / g.n
    ks = law.support()
    tail_mask = np.abs(ks - mean_visits) >= gamma
    lhs = math.fsum(law.probabilities[tail_mask].tolist())
    s = s or spectral.spectrum(g)
    rhs = 4.0 * math.exp(-(gamma**2) * (1.0 - s.lambda_star) / (20.0 * t))
    return BoundReport(lhs=lhs, rhs=rhs, context=f"walk Chernoff t={t}, gamma={gamma}")


def binomial_tail_check(n: int, p: float, x: float) -> BoundReport:
    """Exact Bin(n, p) lower tail against exp(-mu * (1 - a + a log a))."""
    mu = n * p
    if not 0.0 < x <= mu:
        raise InvalidParameterError(f"x must lie in (0, mu={mu}], got {x}")
    law = dist.binomial_law(n, p)
    ks = law.support()
    lhs = math.fsum(law.probabilities[ks <= x].tolist())
    a = x / mu
    rhs = math.exp(-mu * (1.0 - a + a * math.log(a)))
    return BoundReport(lhs=lhs, rhs=rhs, context=f"binomial tail Bin({n},{p}) at x={x}")


# ---------------------------------------------------------------------------
# Rate fitting.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceCurve:
    """An error metric on a t grid with its fitted log-log slope."""

    t_grid: tuple
    values: tuple
    loglog_slope: float
    slope_stderr: float


def convergence_curve(metric, t_grid) -> ConvergenceCurve:
    """Evaluate ``metric`` on the grid and fit log(value) vs log(t)."""
    grid = [int(t) for t in t_grid]
    if len(grid) < 4 or any(t < 16 for t in grid):
        raise InvalidParameterError("need a grid of >= 4 points, each >= 16")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidParameterError("t grid must be strictly increasing")
    values = [float(metric(t)) for t in grid]
    if any((not math.isfinite(v)) or v <= 0.0 for v in values):
        raise InvalidParameterError("degenerate curve: metric returned a value <= 0")
    slope, stderr = loglog_fit(grid, values)
    return ConvergenceCurve(
        t_grid=tuple(grid), values=tuple(values), loglog_slope=slope, slope_stderr=stderr
    )


def loglog_fit(ts, values) -> tuple[float, float]:
    """Unweighted least-squares slope of log(value) against log(t)."""
    x = np.log(np.asarray(ts, dtype=np.float64))
    y = np.log(np.asarray(values, dtype=np.float64))
    x_c = x - x.mean()
    sxx = float(np.dot(x_c, x_c))
    slope = float(np.dot(x_c, y) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    dof = len(x) - 2
    stderr = math.sqrt(float(np.dot(resid, resid)) / dof / sxx) if dof > 0 else 0.0
    return slope, stderr
