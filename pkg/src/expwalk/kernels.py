"""Hot numeric kernels with a compiled core and a pure-numpy fallback.

The two implementations are drop-in equivalent:

* ``expwalk._core`` -- Cython extension, used when it imported cleanly and
  ``EXPWALK_DISABLE_EXT`` is not set;
* the numpy routines below otherwise.

``BACKEND`` records which one is active.  ``benchmarks/bench_kernels.py``
times both on the same inputs.
"""

from __future__ import annotations

import os

import numpy as np

if os.environ.get("EXPWALK_DISABLE_EXT", "") == "1":
    _core = None
else:
    try:
        from expwalk import _core  # type: ignore[attr-defined]
    except ImportError:
        _core = None

BACKEND = "compiled" if _core is not None else "python"


# ---------------------------------------------------------------------------
# Mass-propagation kernel for exact laws of additive functionals.
#
# ``mass[r, v]`` is the probability of being at state v with partial sum
# r + row_offset.  One step moves mass (r, v) -> (r + shift[w], w) with
# weight transition[v, w].  Only rows [lo, hi] are nonzero on entry; the
# kernel returns the new active row window.
# ---------------------------------------------------------------------------


def dp_advance_py(
    mass: np.ndarray,
    scratch: np.ndarray,
    transition: np.ndarray,
    shifts: np.ndarray,
    lo: int,
    hi: int,
    steps: int,
) -> tuple[int, int]:
    smin = int(shifts.min())
    smax = int(shifts.max())
    uniq = [(int(u), shifts == u) for u in np.unique(shifts)]
    for _ in range(steps):
        moved = mass[lo : hi + 1] @ transition
        nlo, nhi = lo + smin, hi + smax
        block = scratch[nlo : nhi + 1]
        block[:] = 0.0
        width = hi - lo + 1
        for u, cols in uniq:
            off = (lo + u) - nlo
            block[off : off + width, cols] += moved[:, cols]
        mass[nlo : nhi + 1] = block
        if nlo > lo:
            mass[lo:nlo] = 0.0
        if nhi < hi:
            mass[nhi + 1 : hi + 1] = 0.0
        lo, hi = nlo, nhi
    return lo, hi


def dp_advance(mass, scratch, transition, shifts, lo, hi, steps):
    if _core is not None:
        return _core.dp_advance(mass, scratch, transition, shifts, lo, hi, steps)
    return dp_advance_py(mass, scratch, transition, shifts, lo, hi, steps)


# ---------------------------------------------------------------------------
# Cyclic Jacobi rotations for a dense symmetric matrix.
#
# ``a`` is destroyed (diagonal ends up holding the eigenvalues), ``v``
# accumulates the rotations (columns end up as orthonormal eigenvectors).
# Returns (sweeps_used, max_offdiagonal); convergence is max |offdiag| <= tol.
# ---------------------------------------------------------------------------


def jacobi_sweeps_py(
    a: np.ndarray, v: np.ndarray, tol: float, max_sweeps: int
) -> tuple[int, float]:
    n = a.shape[0]
    for sweep in range(1, max_sweeps + 1):
        off = _max_offdiag(a, n)
        if off <= tol:
            return sweep - 1, off
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= tol * 1e-2:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rot = np.array([[c, -s], [s, c]])
                a[[p, q], :] = rot @ a[[p, q], :]
                a[:, [p, q]] = a[:, [p, q]] @ rot.T
                v[:, [p, q]] = v[:, [p, q]] @ rot.T
        # symmetrize to keep rounding from accumulating asymmetry
        a += a.T
        a *= 0.5
    return max_sweeps, _max_offdiag(a, n)


def _max_offdiag(a: np.ndarray, n: int) -> float:
    if n < 2:
        return 0.0
    mask = ~np.eye(n, dtype=bool)
    return float(np.abs(a[mask]).max())


def jacobi_sweeps(a, v, tol, max_sweeps):
    if _core is not None:
        return _core.jacobi_sweeps(a, v, tol, max_sweeps)
    return jacobi_sweeps_py(a, v, tol, max_sweeps)
