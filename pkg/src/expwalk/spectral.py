"""Eigendecomposition of the walk operator and the spectral formulas built on it.

The transition matrix P = A/d of a regular graph is symmetric, so a cyclic
Jacobi eigensolver (off-diagonal tolerance 1e-12, at most 10^4 sweeps)
produces the full spectrum.  Eigenvectors are normalized under the
pi-weighted inner product <f, g>_pi = (1/n) * sum_x f(x) g(x), which makes
the top eigenvector the constant-one vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidParameterError, NumericFailureError
from .graph import RegularGraph
from .report import BoundReport

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 10_000
_TIE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues (descending) and pi-orthonormal eigenvectors of P.

    Column j of ``eigenvectors`` is the eigenvector of ``eigenvalues[j]``;
    ``lambda_star`` is the largest modulus among eigenvalues after the
    first.  Construction validates: top eigenvalue 1 with constant
    eigenvector, pi-orthonormality, the eigenequation, and |lambda| <= 1,
    all at 1e-10.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    lambda_star: float

    @property
    def n(self) -> int:
        return len(self.eigenvalues)


def spectrum(g: RegularGraph) -> Spectrum:
    """Full eigendecomposition of the walk transition operator of g."""
    n = g.n
    p = g.transition()
    a = p.copy()
    vecs = np.eye(n)
    _, off = kernels.jacobi_sweeps(a, vecs, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    if off > JACOBI_TOL:
        raise NumericFailureError(
            f"Jacobi sweeps did not reach off-diagonal {JACOBI_TOL} "
            f"within {JACOBI_MAX_SWEEPS} sweeps (residual {off})"
        )
    lam = np.diag(a).copy()
    vecs = vecs * math.sqrt(n)  # orthonormal under the pi-weighted product
    for j in range(n):
        col = vecs[:, j]
        anchor = np.flatnonzero(np.abs(col) > 1e-8)
        pivot = anchor[0] if anchor.size else int(np.argmax(np.abs(col)))
        if col[pivot] < 0:
            vecs[:, j] = -col
    order = _sorted_order(lam, vecs)
    lam = lam[order]
    vecs = np.ascontiguousarray(vecs[:, order])
    spect = Spectrum(
        eigenvalues=lam,
        eigenvectors=vecs,
        lambda_star=float(np.abs(lam[1:]).max()) if n > 1 else 0.0,
    )
    _validate(spect, p)
    return spect


def _sorted_order(lam: np.ndarray, vecs: np.ndarray) -> list[int]:
    # descending eigenvalues; near-ties ordered by eigenvector lexicographic
    # order so repeated eigenvalues come out reproducibly
    order = sorted(range(len(lam)), key=lambda j: -lam[j])
    result: list[int] = []
    group: list[int] = []
    for j in order:
        if group and lam[group[0]] - lam[j] > _TIE_TOL:
            result.extend(sorted(group, key=lambda i: tuple(vecs[:, i])))
            group = []
        group.append(j)
    result.extend(sorted(group, key=lambda i: tuple(vecs[:, i])))
    return result


def _validate(s: Spectrum, p: np.ndarray) -> None:
    n = s.n
    lam, vecs = s.eigenvalues, s.eigenvectors
    if abs(lam[0] - 1.0) > 1e-10:
        raise NumericFailureError(f"top eigenvalue is {lam[0]!r}, expected 1")
    if np.abs(vecs[:, 0] - 1.0).max() > 1e-10:
        raise NumericFailureError("top eigenvector is not the constant-one vector")
    if np.abs(lam).max() > 1.0 + 1e-10:
        raise NumericFailureError("eigenvalue outside [-1, 1]")
    gram = vecs.T @ vecs / n
    if np.abs(gram - np.eye(n)).max() > 1e-10:
        raise NumericFailureError("eigenvectors are not pi-orthonormal")
    residual = p @ vecs - vecs * lam
    if np.abs(residual).max() > 1e-10:
        raise NumericFailureError("eigenequation residual exceeds 1e-10")


def lambda_star(s: Spectrum) -> float:
    return s.lambda_star


def is_expander(s: Spectrum, lam: float) -> bool:
    return s.lambda_star <= lam


def spectral_apply(s: Spectrum, f, t: int) -> np.ndarray:
    """P^t f computed through the eigenbasis."""
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (s.n,):
        raise InvalidParameterError(f"vector length {f.shape} != n={s.n}")
    if t < 0:
        raise InvalidParameterError("t must be >= 0")
    coeffs = (f @ s.eigenvectors) / s.n
    return s.eigenvectors @ (coeffs * s.eigenvalues**t)


def _subset_indicator(g: RegularGraph, subset) -> np.ndarray:
    idx = np.asarray(sorted(set(int(v) for v in subset)), dtype=np.int64)
    if idx.size and (idx[0] < 0 or idx[-1] >= g.n):
        raise InvalidParameterError("subset contains out-of-range vertices")
    mask = np.zeros(g.n, dtype=bool)
    mask[idx] = True
    return mask


def set_projection_weights(s: Spectrum, b_mask: np.ndarray) -> np.ndarray:
    """Squared unweighted inner products <pi_B, f_j> for every eigenvector.

    pi_B is the uniform distribution on B.  With pi-orthonormal f_j these
    weights are basis-independent within each eigenspace, which keeps every
    formula summing over j well defined for repeated eigenvalues.
    """
    size = int(b_mask.sum())
    if size == 0:
        raise InvalidParameterError("subset must be nonempty")
    pi_b = b_mask.astype(np.float64) / size
    return np.square(pi_b @ s.eigenvectors)


def return_to_set_probability(
    g: RegularGraph, b, k: int, s: Spectrum | None = None
) -> float:
    """P(X_k in B) for the walk started uniformly on B, by the spectral formula."""
    if k < 0:
        raise InvalidParameterError("k must be >= 0")
    mask = _subset_indicator(g, b)
    if not mask.any():
        raise InvalidParameterError("B must be nonempty")
    s = s or spectrum(g)
    w = set_projection_weights(s, mask)
    pi_b = mask.sum() / g.n
    return float(pi_b * (1.0 + np.dot(w[1:], s.eigenvalues[1:] ** k)))


def return_to_set_direct(g: RegularGraph, b, k: int) -> float:
    """Oracle for return_to_set_probability: propagate pi_B for k steps."""
    mask = _subset_indicator(g, b)
    if not mask.any():
        raise InvalidParameterError("B must be nonempty")
    dist = mask.astype(np.float64) / mask.sum()
    p = g.transition()
    for _ in range(k):
        dist = dist @ p
    return float(dist[mask].sum())


def ordered_cross_edges(g: RegularGraph, f1_mask: np.ndarray, f2_mask: np.ndarray) -> int:
    """|{(x, y) in F1 x F2 : {x,y} is an edge}|; edges inside the
    intersection are counted from both sides."""
    rows = np.flatnonzero(f1_mask)
    if rows.size == 0:
        return 0
    return int(f2_mask[g.adjacency[rows]].sum())


def mixing_lemma_check(
    g: RegularGraph, f1, f2, s: Spectrum | None = None
) -> BoundReport:
    """Expander mixing deviation |E(F1,F2)| vs its spectral bound."""
    m1 = _subset_indicator(g, f1)
    m2 = _subset_indicator(g, f2)
    s = s or spectrum(g)
    n, d = g.n, g.d
    a, b = int(m1.sum()), int(m2.sum())
    count = ordered_cross_edges(g, m1, m2)
    lhs = abs(count - d * a * b / n)
    rhs = s.lambda_star * d * math.sqrt((a - a * a / n) * (b - b * b / n))
    return BoundReport(lhs=lhs, rhs=rhs, context=f"mixing lemma |F1|={a}, |F2|={b}")


def mixing_corollary_check(g: RegularGraph, f1, s: Spectrum | None = None) -> BoundReport:
    """Guaranteed edge count toward the complement of F1."""
    m1 = _subset_indicator(g, f1)
    m2 = ~m1
    s = s or spectrum(g)
    a, b = int(m1.sum()), int(m2.sum())
    count = ordered_cross_edges(g, m1, m2)
    lhs = 0.5 * (1.0 - s.lambda_star) * g.d * min(a, b)
    return BoundReport(
        lhs=lhs, rhs=float(count), context=f"mixing corollary |F1|={a}"
    )
