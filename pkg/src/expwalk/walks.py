"""Finite Markov chains, exact laws of additive functionals, and walk sampling.

The exact law of Z_t = sum_{i=0}^{t-1} f(X_i) is computed by transfer-matrix
dynamic programming over (state, partial sum) pairs: after processing X_0
the mass sits at (v, f(v)); each further step moves mass (v, s) to
(v', s + f(v')).  Monte Carlo sampling uses the Philox counter-based
generator, seeded explicitly; there is no global randomness anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .dist import IntDistribution
from .errors import InvalidParameterError, OutOfHypothesisError, ResourceBudgetError
from .graph import Labelling, RegularGraph

DEFAULT_MEMORY_BUDGET = 2 * 1024**3  # bytes, for the two DP tables together


@dataclass(frozen=True, eq=False)
class FiniteChain:
    """A finite Markov chain with an integer valuation of its states.

    Parameters
    ----------
    transition : ndarray of shape (m, m)
        Row-stochastic matrix.
    initial : ndarray of shape (m,)
        Initial distribution.
    valuation : ndarray of shape (m,)
        Integer value carried by each state.
    """

    transition: np.ndarray
    initial: np.ndarray
    valuation: np.ndarray

    def __post_init__(self) -> None:
        p = np.ascontiguousarray(self.transition, dtype=np.float64)
        mu = np.ascontiguousarray(self.initial, dtype=np.float64)
        f = np.ascontiguousarray(self.valuation, dtype=np.int64)
        m = p.shape[0]
        if p.shape != (m, m) or mu.shape != (m,) or f.shape != (m,):
            raise InvalidParameterError("transition/initial/valuation shapes disagree")
        if p.min() < 0.0 or mu.min() < 0.0:
            raise InvalidParameterError("probabilities must be nonnegative")
        if np.abs(p.sum(axis=1) - 1.0).max() > 1e-12:
            raise InvalidParameterError("transition rows must sum to 1 within 1e-12")
        if abs(mu.sum() - 1.0) > 1e-12:
            raise InvalidParameterError("initial distribution must sum to 1 within 1e-12")
        for name, arr in (("transition", p), ("initial", mu), ("valuation", f)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def m(self) -> int:
        return self.transition.shape[0]


@dataclass(frozen=True, eq=False)
class WalkSample:
    """One sampled trajectory: a sequence of state indices plus its seed."""

    vertices: np.ndarray
    seed: int


def walk_chain(g: RegularGraph, lab: Labelling) -> FiniteChain:
    """Simple random walk on g with uniform start, valued by the labelling."""
    if lab.n != g.n:
        raise InvalidParameterError("labelling length does not match the graph")
    return FiniteChain(
        transition=g.transition(),
        initial=np.full(g.n, 1.0 / g.n),
        valuation=lab.values,
    )


def sticky_chain(p: float) -> FiniteChain:
    """Two-state chain staying with probability (1+p)/2, uniform start."""
    if not -1.0 < p < 1.0:
        raise OutOfHypothesisError(f"sticky parameter must satisfy |p| < 1, got {p}")
    stay, move = (1.0 + p) / 2.0, (1.0 - p) / 2.0
    return FiniteChain(
        transition=np.array([[stay, move], [move, stay]]),
        initial=np.array([0.5, 0.5]),
        valuation=np.array([0, 1]),
    )


def two_step_chain(c: FiniteChain) -> FiniteChain:
    """The chain watched every other step: transition P^2, same valuation."""
    return FiniteChain(
        transition=c.transition @ c.transition,
        initial=c.initial,
        valuation=c.valuation,
    )


def _sum_bounds(c: FiniteChain, t: int) -> tuple[int, int]:
    smin = int(c.valuation.min())
    smax = int(c.valuation.max())
    return min(smin, t * smin), max(smax, t * smax)


def exact_weight_laws(
    c: FiniteChain,
    t_grid,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> dict[int, IntDistribution]:
    """Exact laws of Z_t for every t in ``t_grid``, in one DP pass.

    Returns a dict mapping t to the law of sum_{i<t} f(X_i).  Cost is a
    single propagation to max(t_grid) with snapshots at the grid points.

    Raises
    ------
    ResourceBudgetError
        If the two DP tables would exceed ``memory_budget`` bytes.
    """
    grid = sorted(set(int(t) for t in t_grid))
    if not grid or grid[0] < 1:
        raise InvalidParameterError("t grid must contain integers >= 1")
    t_max = grid[-1]
    low, high = _sum_bounds(c, t_max)
    rows = high - low + 1
    need = 2 * rows * c.m * 8
    if need > memory_budget:
        raise ResourceBudgetError(
            f"DP tables need {need} bytes, budget is {memory_budget}"
        )
    mass = np.zeros((rows, c.m))
    scratch = np.zeros((rows, c.m))
    f = c.valuation
    for v in range(c.m):
        mass[f[v] - low, v] += c.initial[v]
    lo = int(f.min()) - low
    hi = int(f.max()) - low

    out: dict[int, IntDistribution] = {}
    done = 1  # vertices consumed so far
    for t in grid:
        if t > done:
            lo, hi = kernels.dp_advance(
                mass, scratch, c.transition, f, lo, hi, t - done
            )
            done = t
        marginal = mass[lo : hi + 1].sum(axis=1)
        out[t] = IntDistribution.from_values(low + lo, marginal)
    return out


def exact_weight_law(
    c: FiniteChain, t: int, memory_budget: int = DEFAULT_MEMORY_BUDGET
) -> IntDistribution:
    """Exact law of Z_t = sum_{i=0}^{t-1} f(X_i) with X_0 ~ initial."""
    if t < 1:
        raise InvalidParameterError(f"t must be >= 1, got {t}")
    return exact_weight_laws(c, [t], memory_budget=memory_budget)[t]


def sticky_variance_closed_form(p: float, t: int) -> float:
    """Closed-form Var of the sticky weight after t steps.

    Algebraically equal to (p^{t+1} - p(t+1) + t) / (2(1-p)^2) - t/4; the
    regrouped form below avoids the cancellation that loses digits as
    |p| approaches 1.
    """
    if not -1.0 < p < 1.0:
        raise OutOfHypothesisError(f"need |p| < 1, got {p}")
    if t < 1:
        raise InvalidParameterError(f"t must be >= 1, got {t}")
    return t * (1.0 + p) / (4.0 * (1.0 - p)) + p * (p**t - 1.0) / (2.0 * (1.0 - p) ** 2)


def sticky_variance_rate(p: float) -> float:
    """Limit of Var(R_t)/t for the sticky chain: (1+p) / (4(1-p))."""
    if not -1.0 < p < 1.0:
        raise OutOfHypothesisError(f"need |p| < 1, got {p}")
    return (1.0 + p) / (4.0 * (1.0 - p))


def sample_walk(c: FiniteChain, t: int, seed: int) -> WalkSample:
    """Sample one trajectory of t states by per-step inverse-CDF draws."""
    if t < 1:
        raise InvalidParameterError(f"t must be >= 1, got {t}")
    rng = np.random.Generator(np.random.Philox(seed))
    cum_init = np.cumsum(c.initial)
    cum_rows = np.cumsum(c.transition, axis=1)
    states = np.empty(t, dtype=np.int64)
    states[0] = np.searchsorted(cum_init, rng.random(), side="right")
    for i in range(1, t):
        u = rng.random()
        states[i] = np.searchsorted(cum_rows[states[i - 1]], u, side="right")
    states = np.minimum(states, c.m - 1)
    sample = WalkSample(vertices=states, seed=seed)
    _check_transitions(c, states)
    return sample


def sample_walks_matrix(c: FiniteChain, t: int, count: int, seed: int) -> np.ndarray:
    """Sample ``count`` trajectories at once; row i is one walk of t states.

    Same per-step inverse-CDF scheme as sample_walk, vectorized across
    trajectories from a single Philox stream.
    """
    if t < 1 or count < 1:
        raise InvalidParameterError("t and count must be >= 1")
    rng = np.random.Generator(np.random.Philox(seed))
    cum_init = np.cumsum(c.initial)
    cum_rows = np.cumsum(c.transition, axis=1)
    walks = np.empty((count, t), dtype=np.int32)
    walks[:, 0] = np.searchsorted(cum_init, rng.random(count), side="right")
    np.minimum(walks[:, 0], c.m - 1, out=walks[:, 0])
    for i in range(1, t):
        u = rng.random(count)
        rows = cum_rows[walks[:, i - 1]]
        walks[:, i] = (rows <= u[:, None]).sum(axis=1)
    np.minimum(walks, c.m - 1, out=walks)
    return walks


def _check_transitions(c: FiniteChain, states: np.ndarray) -> None:
    probs = c.transition[states[:-1], states[1:]]
    if len(probs) and probs.min() <= 0.0:
        raise InvalidParameterError("sampled walk contains an impossible transition")


def empirical_law(samples, valuation) -> IntDistribution:
    """Normalized counts of the weight sums of the given walk samples."""
    vals = np.asarray(valuation, dtype=np.int64)
    if isinstance(samples, np.ndarray):
        sums = vals[samples].sum(axis=1)
    else:
        sums = np.array([int(vals[s.vertices].sum()) for s in samples], dtype=np.int64)
    if sums.size == 0:
        raise InvalidParameterError("need at least one sample")
    lo, hi = int(sums.min()), int(sums.max())
    counts = np.bincount(sums - lo, minlength=hi - lo + 1).astype(np.float64)
    return IntDistribution.from_values(lo, counts / sums.size)
