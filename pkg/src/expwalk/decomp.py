"""The 2-cycle decomposition of the walk weight and its concentration checks.

Writing X^2 for the walk watched at even times, the construction counts the
2-step indices i < floor(t/2) whose vertex lies in the selected class
(N_t of them), the subset that close a 2-cycle X_{2i} = X_{2i+2} (Ntilde_t),
and reads off each closed cycle's middle-vertex label V_i.  The first
min(b_t, Ntilde_t) of those labels form S'_t; topping up with independent
Bernoulli draws of the same parameter (d - k*) / d gives S_t, a sum of
exactly b_t i.i.d. indicators.  Y_t = Z_t - S'_t, so Z_t = S'_t + Y_t
identically and Z_t = S_t + Y_t whenever Ntilde_t >= b_t.

Each 2-step index is counted on its own; overlapping bookkeeping windows are
not excluded, which is what makes the cycle indicators an i.i.d. sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import spectral, walks
from .clt import explicit_constants
from .dist import binomial_law
from .errors import InvalidParameterError, OutOfHypothesisError, TheoremViolationError
from .graph import Labelling, RegularGraph, label_classes
from .report import BoundReport


@dataclass(frozen=True)
class KStarResult:
    """A class index guaranteed to be large by the class-size dichotomy.

    ``side`` records whether A_{k*} (labels 0) or B_{k*} (labels 1) met its
    threshold; ``threshold`` and ``delta`` are the values used.
    """

    k_star: int
    side: str
    class_size: int
    threshold: float
    delta: float


@dataclass(frozen=True)
class ExpectedVisits:
    expected: float
    lower_bound: float


@dataclass(frozen=True)
class DecompositionTrace:
    """All counters of one sampled decomposition.

    Invariants: z = s_prime + y identically; z = s_full + y whenever
    n_tilde >= b_t; 0 <= n_tilde <= n_t <= floor(t/2).
    """

    t: int
    n_t: int
    n_tilde: int
    b_t: int
    s_prime: int
    s_full: int
    y: int
    z: int

    def __post_init__(self) -> None:
        if self.z != self.s_prime + self.y:
            raise TheoremViolationError("bookkeeping identity z = s_prime + y failed")
        if self.n_tilde >= self.b_t and self.z != self.s_full + self.y:
            raise TheoremViolationError("z = s_full + y failed despite n_tilde >= b_t")
        if not 0 <= self.n_tilde <= self.n_t <= self.t // 2:
            raise TheoremViolationError("visit counters out of range")


def find_kstar(
    g: RegularGraph,
    lab: Labelling,
    balanced: bool | None = None,
    s: spectral.Spectrum | None = None,
) -> KStarResult:
    """Locate k* in 1..d-1 with |A_{k*}| or |B_{k*}| above its threshold.

    ``balanced`` selects the threshold family (default: inferred from the
    labelling): delta = (1-lambda)^2 / 3 for balanced labellings, else
    delta = (1-lambda)^2 alpha (1-alpha) / 4.  Among qualifying classes the
    largest wins, ties to the smaller k, then to side A.
    """
    alpha = float(lab.alpha)
    if not 0.0 < alpha < 1.0:
        raise OutOfHypothesisError("labelling must take both values")
    if balanced is None:
        balanced = lab.balanced
    if balanced and not lab.balanced:
        raise OutOfHypothesisError("balanced thresholds need a balanced labelling")
    s = s or spectral.spectrum(g)
    lam = s.lambda_star
    if lam >= 1.0 - 1e-12:
        raise OutOfHypothesisError("class dichotomy needs lambda* < 1")
    gap = 1.0 - lam
    delta = gap**2 / 3.0 if balanced else 0.25 * gap**2 * alpha * (1.0 - alpha)
    classes = label_classes(g, lab)
    thr_a = delta * len(lab.zero_set) / (g.d - 1)
    thr_b = delta * len(lab.one_set) / (g.d - 1)
    best: KStarResult | None = None
    for k in range(1, g.d):
        for side, size, thr in (
            ("A", int(classes.a_sizes[k]), thr_a),
            ("B", int(classes.b_sizes[k]), thr_b),
        ):
            if size >= thr - 1e-12:
                if best is None or size > best.class_size:
                    best = KStarResult(
                        k_star=k, side=side, class_size=size, threshold=thr, delta=delta
                    )
    if best is None:
        raise TheoremViolationError(
            "no class met its guaranteed threshold; this contradicts the dichotomy"
        )
    return best


def chosen_class(g: RegularGraph, lab: Labelling, ks: KStarResult) -> np.ndarray:
    classes = label_classes(g, lab)
    members = classes.a_members if ks.side == "A" else classes.b_members
    return members[ks.k_star]


def cycle_success_probability(g: RegularGraph, ks: KStarResult) -> float:
    """Chance that a closed 2-cycle from the class contributes a 1-label."""
    return (g.d - ks.k_star) / g.d


def expected_visits(g: RegularGraph, lab: Labelling, ks: KStarResult, t: int) -> ExpectedVisits:
    """E_pi of the class-visit count N_t, with its guaranteed lower bound."""
    if t < 2:
        raise InvalidParameterError("t must be >= 2")
    expected = (t // 2) * ks.class_size / g.n
    frac = len(lab.zero_set if ks.side == "A" else lab.one_set) / g.n
    lower = (t - 2) * ks.delta * frac / (2.0 * (g.d - 1))
    if expected < lower - 1e-12:
        raise TheoremViolationError("expected visit count fell below its lower bound")
    return ExpectedVisits(expected=expected, lower_bound=lower)


def b_t_exact(g: RegularGraph, ks: KStarResult, t: int) -> int:
    """floor(E_pi(Ntilde_t) / 4) from the exact expectation (never estimated)."""
    return ((t // 2) * ks.class_size) // (4 * g.d * g.n)


def _counters_from_paths(
    paths: np.ndarray,
    class_mask: np.ndarray,
    values: np.ndarray,
    b_t: int,
    t: int,
) -> dict[str, np.ndarray]:
    half = t // 2
    even = 2 * np.arange(half)
    starts = paths[:, even]
    in_class = class_mask[starts]
    closes = paths[:, even] == paths[:, even + 2]
    cycles = in_class & closes
    order = np.cumsum(cycles, axis=1)
    mids_one = values[paths[:, even + 1]] == 1
    taken = cycles & (order <= b_t)
    z = values[paths[:, :t]].sum(axis=1)
    s_prime = (taken & mids_one).sum(axis=1)
    return {
        "n_t": in_class.sum(axis=1),
        "n_tilde": cycles.sum(axis=1),
        "s_prime": s_prime,
        "z": z,
        "y": z - s_prime,
    }


def decomposition_sample(
    g: RegularGraph, lab: Labelling, ks: KStarResult, t: int, seed: int
) -> DecompositionTrace:
    """Simulate one walk of length t and record every decomposition counter."""
    if t < 4:
        raise InvalidParameterError("t must be >= 4")
    batch = decomposition_batch(g, lab, ks, t, samples=1, seed=seed)
    return DecompositionTrace(
        t=t,
        n_t=int(batch["n_t"][0]),
        n_tilde=int(batch["n_tilde"][0]),
        b_t=int(batch["b_t"]),
        s_prime=int(batch["s_prime"][0]),
        s_full=int(batch["s_full"][0]),
        y=int(batch["y"][0]),
        z=int(batch["z"][0]),
    )


def decomposition_batch(
    g: RegularGraph, lab: Labelling, ks: KStarResult, t: int, samples: int, seed: int
) -> dict:
    """Vectorized decomposition counters for ``samples`` independent walks.

    The walk stream and the Bernoulli top-up stream are independent children
    of one seed; results are reproducible and order-independent to aggregate.
    """
    if t < 4:
        raise InvalidParameterError("t must be >= 4")
    if samples < 1:
        raise InvalidParameterError("samples must be >= 1")
    root = np.random.SeedSequence(seed)
    walk_seed, topup_seed = root.spawn(2)
    chain = walks.walk_chain(g, lab)
    # t+1 vertices: index 2*floor(t/2) is needed to close the last 2-cycle
    paths = walks.sample_walks_matrix(chain, t + 1, samples, walk_seed)
    class_mask = np.zeros(g.n, dtype=bool)
    class_mask[chosen_class(g, lab, ks)] = True
    b_t = b_t_exact(g, ks, t)
    counters = _counters_from_paths(paths, class_mask, lab.values, b_t, t)
    rng = np.random.Generator(np.random.Philox(topup_seed))
    deficit = np.maximum(b_t - counters["n_tilde"], 0)
    extra = rng.binomial(deficit, cycle_success_probability(g, ks))
    counters["s_full"] = counters["s_prime"] + extra
    counters["b_t"] = b_t
    return counters


def _se(p_hat: float, n: int) -> float:
    return math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n)


def concentration_check(
    g: RegularGraph,
    lab: Labelling,
    ks: KStarResult,
    t: int,
    samples: int,
    seed: int,
    s: spectral.Spectrum | None = None,
) -> BoundReport:
    """Empirical P(Ntilde_t <= E(Ntilde_t)/4) against its exponential bound.

    The reported rhs already includes three binomial standard errors of
    slack for the Monte Carlo estimate.
    """
    _require_mc_size(t, samples)
    s = s or spectral.spectrum(g)
    batch = decomposition_batch(g, lab, ks, t, samples, seed)
    # exact rational threshold: E(Ntilde)/4 = floor(t/2) * |class| / (4 d n)
    num = (t // 2) * ks.class_size
    den = 4 * g.d * g.n
    freq = float(np.mean(batch["n_tilde"] * den <= num))
    gap = 1.0 - s.lambda_star
    bound = 5.0 * math.exp(-(gap**5) * (t - 4) / (11520.0 * g.d**2))
    return BoundReport(
        lhs=freq,
        rhs=bound + 3.0 * _se(freq, samples),
        context=f"low-cycle-count frequency, bound {bound:.6g} plus 3 standard errors",
    )


def defect_estimate(
    g: RegularGraph,
    lab: Labelling,
    ks: KStarResult,
    t: int,
    samples: int,
    seed: int,
    s: spectral.Spectrum | None = None,
) -> BoundReport:
    """Empirical mean |Z_t - S_t - Y_t| against M / t, with 3-sigma slack."""
    _require_mc_size(t, samples)
    s = s or spectral.spectrum(g)
    batch = decomposition_batch(g, lab, ks, t, samples, seed)
    defects = np.abs(batch["z"] - batch["s_full"] - batch["y"]).astype(np.float64)
    lhs = float(defects.mean())
    spread = float(defects.std(ddof=1)) if samples > 1 else 0.0
    m_defect = explicit_constants(s.lambda_star, g.d, float(lab.alpha)).m_defect
    return BoundReport(
        lhs=lhs,
        rhs=m_defect / t + 3.0 * spread / math.sqrt(samples),
        context=f"mean decomposition defect, bound {m_defect / t:.6g} plus 3 standard errors",
    )


def sfull_distribution_check(
    g: RegularGraph,
    lab: Labelling,
    ks: KStarResult,
    t: int,
    samples: int,
    seed: int,
) -> tuple[BoundReport, BoundReport]:
    """S_t should be Bin(b_t, (d-k*)/d) and independent of Y_t.

    Returns two reports: the Pearson chi-square statistic of the empirical
    S_t histogram against the 99.9% quantile at its degrees of freedom, and
    |corr(S_t, Y_t)| against 0.02.
    """
    _require_mc_size(t, samples)
    batch = decomposition_batch(g, lab, ks, t, samples, seed)
    b_t = int(batch["b_t"])
    if b_t < 1:
        raise OutOfHypothesisError("b_t = 0: the chain is too short for this check")
    counts = np.bincount(batch["s_full"], minlength=b_t + 1).astype(np.float64)
    expected = binomial_law(b_t, cycle_success_probability(g, ks)).padded(0, b_t) * samples
    obs_pooled, exp_pooled = _pool_bins(counts, expected)
    chi2_stat = float(np.sum((obs_pooled - exp_pooled) ** 2 / exp_pooled))
    dof = len(exp_pooled) - 1
    quantile = float(stats.chi2.ppf(0.999, dof))
    chi_report = BoundReport(
        lhs=chi2_stat,
        rhs=quantile,
        context=f"chi-square vs Bin({b_t}, {cycle_success_probability(g, ks):.6g}), dof={dof}",
    )
    s_full = batch["s_full"].astype(np.float64)
    y = batch["y"].astype(np.float64)
    if s_full.std() == 0.0 or y.std() == 0.0:
        corr = 0.0
    else:
        corr = float(np.corrcoef(s_full, y)[0, 1])
    corr_report = BoundReport(
        lhs=abs(corr), rhs=0.02, context="independence proxy |corr(S_t, Y_t)|"
    )
    return chi_report, corr_report


def _pool_bins(obs: np.ndarray, exp: np.ndarray, min_expected: float = 5.0):
    """Merge adjacent low-expectation bins so the chi-square reference applies."""
    obs_pool, exp_pool = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(obs, exp):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            obs_pool.append(acc_o)
            exp_pool.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0.0:
        if exp_pool:
            obs_pool[-1] += acc_o
            exp_pool[-1] += acc_e
        else:
            obs_pool.append(acc_o)
            exp_pool.append(acc_e)
    return np.array(obs_pool), np.array(exp_pool)


def _require_mc_size(t: int, samples: int) -> None:
    if t < 8:
        raise InvalidParameterError("t must be >= 8")
    if samples < 10_000:
        raise InvalidParameterError("Monte Carlo checks need at least 10^4 samples")


def bernoulli_eta(p_success: float, theta0: float, grid_points: int = 200) -> float:
    """Nonlattice margin eta = p(1-p)(1 - cos theta0) of a Bernoulli(p) variable.

    Also verifies numerically that |E e^{i theta V}| <= 1 - eta on a grid of
    theta with theta0 <= |theta| <= pi, which is the defining property.
    """
    if not 0.0 < p_success < 1.0:
        raise InvalidParameterError(f"p must lie in (0,1), got {p_success}")
    if not 0.0 < theta0 <= math.pi:
        raise InvalidParameterError(f"theta0 must lie in (0, pi], got {theta0}")
    eta = p_success * (1.0 - p_success) * (1.0 - math.cos(theta0))
    thetas = np.linspace(theta0, math.pi, grid_points)
    moduli = np.abs((1.0 - p_success) + p_success * np.exp(1j * thetas))
    if moduli.max() > 1.0 - eta + 1e-12:
        raise TheoremViolationError("characteristic-function modulus exceeded 1 - eta")
    return eta


def traces_csv_rows(batch: dict) -> list[str]:
    """One CSV row per sample: seed_index,n_t,n_tilde,b_t,s_prime,s_full,y,z."""
    b_t = int(batch["b_t"])
    rows = []
    for i in range(len(batch["n_t"])):
        rows.append(
            f"{i},{batch['n_t'][i]},{batch['n_tilde'][i]},{b_t},"
            f"{batch['s_prime'][i]},{batch['s_full'][i]},{batch['y'][i]},{batch['z'][i]}"
        )
    return rows
