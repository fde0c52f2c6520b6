"""Integer-supported probability laws, distances, and characteristic functions.

Sums that feed tight tolerances (moments, normalizing constants, total
variation over long supports) go through math.fsum so that accumulation
error stays below the 1e-10 .. 1e-12 checks downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, OutOfHypothesisError
from .report import BoundReport

SQRT_TWO_PI = math.sqrt(2.0 * math.pi)
NORMAL_WINDOW_SIGMAS = 12.0  # neglected mass < 1e-30, far below every tolerance
WRAP_CUTOFF = 1e-18
SIMPSON_PANELS = 2**14


@dataclass(frozen=True, eq=False)
class IntDistribution:
    """A probability law on a contiguous integer range.

    ``probabilities[i]`` is the mass at ``offset + i``; the ends of the
    vector are nonzero (trimmed support) and the total mass is 1 within
    1e-12.
    """

    offset: int
    probabilities: np.ndarray

    @classmethod
    def from_values(cls, offset: int, values) -> "IntDistribution":
        vals = np.ascontiguousarray(values, dtype=np.float64)
        if vals.ndim != 1 or vals.size == 0:
            raise InvalidParameterError("probability vector must be 1-d and nonempty")
        if vals.min() < 0.0:
            raise InvalidParameterError("probabilities must be nonnegative")
        nz = np.flatnonzero(vals)
        if nz.size == 0:
            raise InvalidParameterError("distribution has no mass")
        vals = vals[nz[0] : nz[-1] + 1].copy()
        total = math.fsum(vals.tolist())
        if abs(total - 1.0) > 1e-12:
            raise InvalidParameterError(f"mass sums to {total!r}, not 1 within 1e-12")
        vals.setflags(write=False)
        return cls(offset=int(offset + nz[0]), probabilities=vals)

    @classmethod
    def point_mass(cls, k: int) -> "IntDistribution":
        return cls.from_values(k, [1.0])

    @property
    def lo(self) -> int:
        return self.offset

    @property
    def hi(self) -> int:
        return self.offset + len(self.probabilities) - 1

    def support(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def pmf(self, k: int) -> float:
        if self.lo <= k <= self.hi:
            return float(self.probabilities[k - self.offset])
        return 0.0

    def padded(self, lo: int, hi: int) -> np.ndarray:
        """Probability vector on [lo, hi], zero outside the support."""
        out = np.zeros(hi - lo + 1)
        out[self.lo - lo : self.hi - lo + 1] = self.probabilities
        return out


def tv_distance(p: IntDistribution, q: IntDistribution) -> float:
    """Total variation distance, half the L1 distance of the mass functions."""
    lo = min(p.lo, q.lo)
    hi = max(p.hi, q.hi)
    diff = np.abs(p.padded(lo, hi) - q.padded(lo, hi))
    return 0.5 * math.fsum(diff.tolist())


def moments(p: IntDistribution) -> tuple[float, float]:
    """Mean and variance (central second moment).

    Normalizes by the actual total mass: the stored law may carry ~1e-14 of
    accumulated rounding, which would otherwise leak into the variance at
    the 1e-11 level on wide supports.
    """
    ks = p.support().astype(np.float64)
    w = p.probabilities
    total = math.fsum(w.tolist())
    mean = math.fsum((w * ks).tolist()) / total
    var = math.fsum((w * (ks - mean) ** 2).tolist()) / total
    return mean, var


def convolve(p: IntDistribution, q: IntDistribution) -> IntDistribution:
    """Law of the sum of independent variables with laws p and q."""
    vals = np.convolve(p.probabilities, q.probabilities)
    return IntDistribution.from_values(p.lo + q.lo, vals / math.fsum(vals.tolist()))


def binomial_law(n: int, alpha: float) -> IntDistribution:
    """Bin(n, alpha) built by iterated convolution of the single-trial law."""
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    if not 0.0 < alpha < 1.0:
        raise OutOfHypothesisError(f"success probability must lie in (0,1), got {alpha}")
    step = np.array([1.0 - alpha, alpha])
    vals = step.copy()
    for _ in range(n - 1):
        vals = np.convolve(vals, step)
    return IntDistribution.from_values(0, vals / math.fsum(vals.tolist()))


def _phi(x: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * np.square(x)) / SQRT_TWO_PI


def normal_density_at_integers(mu: float, sigma2: float, lo: int, hi: int) -> np.ndarray:
    sigma = math.sqrt(sigma2)
    ks = np.arange(lo, hi + 1, dtype=np.float64)
    return _phi((ks - mu) / sigma) / sigma


@dataclass(frozen=True, eq=False)
class DiscretizedNormal:
    """Integer-lattice law proportional to a normal density.

    ``normalizer`` is the lattice sum of the density; ``law`` holds the
    normalized masses over a window of +-12 sigma around the mean.
    """

    mu: float
    sigma2: float
    normalizer: float
    law: IntDistribution


def discretized_normal(mu: float, sigma2: float) -> DiscretizedNormal:
    if sigma2 <= 0.0:
        raise InvalidParameterError(f"sigma2 must be positive, got {sigma2}")
    sigma = math.sqrt(sigma2)
    lo = math.ceil(mu - NORMAL_WINDOW_SIGMAS * sigma)
    hi = math.floor(mu + NORMAL_WINDOW_SIGMAS * sigma)
    if hi < lo:  # degenerate only for sigma ~ 0; keep the nearest lattice point
        lo = hi = round(mu)
    dens = normal_density_at_integers(mu, sigma2, lo, hi)
    normalizer = math.fsum(dens.tolist())
    law = IntDistribution.from_values(lo, dens / normalizer)
    return DiscretizedNormal(mu=mu, sigma2=sigma2, normalizer=normalizer, law=law)


def normalizer_bound_check(mu: float, sigma2: float) -> BoundReport:
    """|1 - D(mu, sigma2)| against (2*pi)^{-1/2} / sigma, valid for sigma2 >= 1."""
    if sigma2 < 1.0:
        raise OutOfHypothesisError(f"normalizer bound needs sigma2 >= 1, got {sigma2}")
    d = discretized_normal(mu, sigma2).normalizer
    sigma = math.sqrt(sigma2)
    return BoundReport(
        lhs=abs(1.0 - d),
        rhs=1.0 / (SQRT_TWO_PI * sigma),
        context=f"normalizer bound at mu={mu}, sigma2={sigma2}",
    )


def char_fn(p: IntDistribution, theta: float) -> complex:
    """E exp(i * theta * W) for theta in [-pi, pi]."""
    if abs(theta) > math.pi + 1e-12:
        raise InvalidParameterError(f"theta must lie in [-pi, pi], got {theta}")
    ks = p.support()
    return complex(np.dot(p.probabilities, np.exp(1j * theta * ks)))


def wrapped_normal_char(mu: float, sigma2: float, theta: float) -> complex:
    """Sum over k of the normal characteristic function at theta + 2*pi*k.

    Terms are added outward from k = 0 until they fall below 1e-18 in
    modulus.
    """
    if abs(theta) > math.pi + 1e-12:
        raise InvalidParameterError(f"theta must lie in [-pi, pi], got {theta}")
    total = 0.0 + 0.0j
    for direction in (1, -1):
        k = 0 if direction == 1 else -1
        while True:
            shifted = theta + 2.0 * math.pi * k
            mag = math.exp(-0.5 * sigma2 * shifted * shifted)
            if mag < WRAP_CUTOFF and not (direction == 1 and k == 0):
                break
            total += mag * complex(math.cos(mu * shifted), math.sin(mu * shifted))
            k += direction
    return total


def l2_char_distance(p: IntDistribution, mu: float, sigma2: float) -> float:
    """sqrt of sum over k of |p(k) - normal density at k|^2."""
    if sigma2 <= 0.0:
        raise InvalidParameterError(f"sigma2 must be positive, got {sigma2}")
    sigma = math.sqrt(sigma2)
    lo = min(p.lo, math.ceil(mu - NORMAL_WINDOW_SIGMAS * sigma))
    hi = max(p.hi, math.floor(mu + NORMAL_WINDOW_SIGMAS * sigma))
    dens = normal_density_at_integers(mu, sigma2, lo, hi)
    diff = p.padded(lo, hi) - dens
    return math.sqrt(math.fsum(np.square(diff).tolist()))


def _char_fn_on_grid(p: IntDistribution, panels: int) -> np.ndarray:
    """Characteristic function at theta_m = -pi + 2*pi*m/panels, m = 0..panels.

    Uses the FFT identity: with q_j = p_j * (-1)^j zero-padded to ``panels``,
    sum_j p_j e^{i theta_m j} equals panels * ifft(q)[m]; the offset enters
    as the phase e^{i theta_m offset}.
    """
    probs = p.probabilities
    if len(probs) > panels:
        raise InvalidParameterError(
            f"support of length {len(probs)} exceeds the {panels}-point grid"
        )
    q = np.zeros(panels, dtype=np.complex128)
    signs = np.where(np.arange(len(probs)) % 2 == 0, 1.0, -1.0)
    q[: len(probs)] = probs * signs
    base = panels * np.fft.ifft(q)
    thetas = -math.pi + 2.0 * math.pi * np.arange(panels + 1) / panels
    vals = np.empty(panels + 1, dtype=np.complex128)
    vals[:panels] = base
    vals[panels] = base[0]  # char fn of a lattice law agrees at -pi and pi
    return vals * np.exp(1j * thetas * p.offset)


def _wrapped_char_on_grid(mu: float, sigma2: float, thetas: np.ndarray) -> np.ndarray:
    vals = np.zeros(len(thetas), dtype=np.complex128)
    for direction in (1, -1):
        k = 0 if direction == 1 else -1
        while True:
            shifted = thetas + 2.0 * math.pi * k
            mags = np.exp(-0.5 * sigma2 * np.square(shifted))
            if mags.max() < WRAP_CUTOFF and not (direction == 1 and k == 0):
                break
            vals += mags * np.exp(1j * mu * shifted)
            k += direction
    return vals


def parseval_check(p: IntDistribution, mu: float, sigma2: float) -> BoundReport:
    """Sum-form L2 distance against its quadrature form.

    The quadrature side integrates |char_fn(P) - wrapped normal char|^2 over
    [-pi, pi] with Simpson's rule on 2^14 panels; by Parseval both forms
    express the same quantity, and they must agree within 1e-6.
    """
    if sigma2 <= 0.0:
        raise InvalidParameterError(f"sigma2 must be positive, got {sigma2}")
    sum_form = l2_char_distance(p, mu, sigma2)
    panels = SIMPSON_PANELS
    thetas = -math.pi + 2.0 * math.pi * np.arange(panels + 1) / panels
    integrand = np.abs(_char_fn_on_grid(p, panels) - _wrapped_char_on_grid(mu, sigma2, thetas)) ** 2
    h = 2.0 * math.pi / panels
    simpson = (
        integrand[0]
        + integrand[-1]
        + 4.0 * integrand[1:-1:2].sum()
        + 2.0 * integrand[2:-1:2].sum()
    ) * h / 3.0
    quad_form = math.sqrt(simpson / (2.0 * math.pi))
    return BoundReport(
        lhs=abs(sum_form - quad_form),
        rhs=1e-6,
        context=f"Parseval consistency at mu={mu}, sigma2={sigma2}",
    )


def to_csv_rows(p: IntDistribution) -> list[str]:
    """Rows 'k,probability' over the full support, sorted by k."""
    return [
        f"{k},{v:.17g}" for k, v in zip(p.support().tolist(), p.probabilities.tolist())
    ]
