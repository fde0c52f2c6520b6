"""Construction, validation, and serialization of d-regular graphs and 0/1 labellings.

Vertices are 0-based integer indices everywhere; names only exist inside
files.  All containers are immutable after construction, so values can be
shared freely across threads.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import GenerationFailureError, InvalidParameterError

PAIRING_BUDGET = 10_000


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class RegularGraph:
    """A finite connected d-regular simple graph.

    Parameters
    ----------
    n : int
        Vertex count.
    d : int
        Degree of every vertex.
    adjacency : ndarray of shape (n, d)
        Row ``v`` lists the d distinct neighbors of ``v`` in increasing
        order.  The relation is symmetric and the graph is connected;
        both are enforced at construction time.
    """

    n: int
    d: int
    adjacency: np.ndarray

    def __post_init__(self) -> None:
        adj = np.asarray(self.adjacency, dtype=np.int64)
        if self.n < 1 or self.d < 1:
            raise InvalidParameterError("n and d must be positive")
        if adj.shape != (self.n, self.d):
            raise InvalidParameterError(
                f"adjacency must have shape ({self.n}, {self.d}), got {adj.shape}"
            )
        if adj.min() < 0 or adj.max() >= self.n:
            raise InvalidParameterError("neighbor index out of range")
        for v in range(self.n):
            row = adj[v]
            if np.any(row == v):
                raise InvalidParameterError(f"vertex {v} has a self-loop")
            if np.any(np.diff(row) <= 0):
                raise InvalidParameterError(
                    f"vertex {v}: neighbors must be distinct and sorted"
                )
        mat = self.matrix()
        if not np.array_equal(mat, mat.T):
            raise InvalidParameterError("adjacency is not symmetric")
        if not _connected(adj, self.n):
            raise InvalidParameterError("graph is not connected")
        object.__setattr__(self, "adjacency", _frozen(adj))

    def matrix(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix."""
        mat = np.zeros((self.n, self.n), dtype=np.int64)
        rows = np.repeat(np.arange(self.n), self.d)
        mat[rows, self.adjacency.ravel()] = 1
        return mat

    def transition(self) -> np.ndarray:
        """Transition matrix of the simple random walk, A / d."""
        return self.matrix().astype(np.float64) / self.d

    def edges(self) -> list[tuple[int, int]]:
        """Undirected edges as sorted (u, v) pairs with u < v."""
        out = []
        for v in range(self.n):
            for w in self.adjacency[v]:
                if v < w:
                    out.append((v, int(w)))
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RegularGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.d == other.d
            and np.array_equal(self.adjacency, other.adjacency)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.d, self.adjacency.tobytes()))


def _connected(adj: np.ndarray, n: int) -> bool:
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if not seen[w]:
                seen[w] = True
                queue.append(int(w))
    return bool(seen.all())


@dataclass(frozen=True, eq=False)
class Labelling:
    """A 0/1 vertex valuation with its density and level sets.

    ``alpha`` is the exact rational density of ones, ``one_set`` the sorted
    indices labelled 1 (the set B), ``zero_set`` its complement (A).
    """

    values: np.ndarray
    alpha: Fraction
    one_set: np.ndarray
    zero_set: np.ndarray

    @classmethod
    def from_bits(cls, bits) -> "Labelling":
        vals = np.asarray(bits, dtype=np.int64)
        if vals.ndim != 1 or vals.size == 0:
            raise InvalidParameterError("labelling must be a nonempty 1-d bit sequence")
        if not np.isin(vals, (0, 1)).all():
            raise InvalidParameterError("labelling values must be 0 or 1")
        ones = np.flatnonzero(vals == 1)
        zeros = np.flatnonzero(vals == 0)
        return cls(
            values=_frozen(vals),
            alpha=Fraction(len(ones), len(vals)),
            one_set=_frozen(ones),
            zero_set=_frozen(zeros),
        )

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def balanced(self) -> bool:
        return self.alpha == Fraction(1, 2)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Labelling):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash(self.values.tobytes())


@dataclass(frozen=True, eq=False)
class LabelClasses:
    """Per-vertex zero-neighbor counts and the classes A_j, B_j.

    ``q[x]`` is the number of neighbors of x labelled 0.  ``a_members[j]``
    lists the vertices of A (labelled 0) with q = j, for j = 0..d;
    ``b_members[j]`` the same within B.  Every vertex appears in exactly
    one class.
    """

    q: np.ndarray
    a_members: tuple
    b_members: tuple

    @property
    def a_sizes(self) -> np.ndarray:
        return np.array([len(m) for m in self.a_members])

    @property
    def b_sizes(self) -> np.ndarray:
        return np.array([len(m) for m in self.b_members])


def build_complete(n: int) -> RegularGraph:
    """Complete graph K_n, an (n-1)-regular graph."""
    if n < 3:
        raise InvalidParameterError(f"complete graph needs n >= 3, got {n}")
    adj = np.array([[w for w in range(n) if w != v] for v in range(n)])
    return RegularGraph(n=n, d=n - 1, adjacency=adj)


def build_cycle(n: int) -> RegularGraph:
    """Cycle C_n, a 2-regular graph (bipartite when n is even)."""
    if n < 3:
        raise InvalidParameterError(f"cycle needs n >= 3, got {n}")
    adj = np.array([sorted(((v - 1) % n, (v + 1) % n)) for v in range(n)])
    return RegularGraph(n=n, d=2, adjacency=adj)


def build_random_regular(n: int, d: int, seed: int) -> RegularGraph:
    """Random d-regular simple connected graph via the pairing model.

    Whole matchings with self-loops, multi-edges, or a disconnected result
    are rejected and resampled; deterministic given ``seed``.

    Raises
    ------
    InvalidParameterError
        If n * d is odd or d >= n.
    GenerationFailureError
        If no valid graph is found within the rejection budget.
    """
    if d >= n:
        raise InvalidParameterError(f"need d < n, got d={d}, n={n}")
    if (n * d) % 2 != 0:
        raise InvalidParameterError(f"n*d must be even, got n={n}, d={d}")
    if d < 1:
        raise InvalidParameterError("degree must be positive")
    rng = np.random.Generator(np.random.Philox(seed))
    stubs = np.repeat(np.arange(n), d)
    for _ in range(PAIRING_BUDGET):
        perm = rng.permutation(stubs)
        u, w = perm[0::2], perm[1::2]
        if np.any(u == w):
            continue
        lo, hi = np.minimum(u, w), np.maximum(u, w)
        pairs = set(zip(lo.tolist(), hi.tolist()))
        if len(pairs) != len(lo):
            continue  # multi-edge
        neighbors = [[] for _ in range(n)]
        for a, b in pairs:
            neighbors[a].append(b)
            neighbors[b].append(a)
        adj = np.array([sorted(ns) for ns in neighbors])
        if not _connected(adj, n):
            continue
        return RegularGraph(n=n, d=d, adjacency=adj)
    raise GenerationFailureError(
        f"pairing model failed for n={n}, d={d} within {PAIRING_BUDGET} attempts"
    )


def random_balanced_labelling(g: RegularGraph, seed: int) -> Labelling:
    """Uniformly random labelling with exactly n/2 ones; deterministic per seed."""
    if g.n % 2 != 0:
        raise InvalidParameterError(f"balanced labelling needs even n, got {g.n}")
    rng = np.random.Generator(np.random.Philox(seed))
    ones = rng.permutation(g.n)[: g.n // 2]
    bits = np.zeros(g.n, dtype=np.int64)
    bits[ones] = 1
    return Labelling.from_bits(bits)


def random_labelling(g: RegularGraph, ones: int, seed: int) -> Labelling:
    """Uniformly random labelling with exactly ``ones`` ones."""
    if not 0 <= ones <= g.n:
        raise InvalidParameterError(f"ones must lie in [0, {g.n}], got {ones}")
    rng = np.random.Generator(np.random.Philox(seed))
    chosen = rng.permutation(g.n)[:ones]
    bits = np.zeros(g.n, dtype=np.int64)
    bits[chosen] = 1
    return Labelling.from_bits(bits)


def label_classes(g: RegularGraph, lab: Labelling) -> LabelClasses:
    """Compute q(x) and the partition of A and B into the classes A_j, B_j."""
    if lab.n != g.n:
        raise InvalidParameterError(
            f"labelling length {lab.n} does not match vertex count {g.n}"
        )
    zero = lab.values == 0
    q = zero[g.adjacency].sum(axis=1).astype(np.int64)
    a_members = tuple(
        _frozen(np.flatnonzero(zero & (q == j))) for j in range(g.d + 1)
    )
    b_members = tuple(
        _frozen(np.flatnonzero(~zero & (q == j))) for j in range(g.d + 1)
    )
    return LabelClasses(q=_frozen(q), a_members=a_members, b_members=b_members)


# ---------------------------------------------------------------------------
# File formats.
#
# Graph file: first data line "n d", then one "u v" line per undirected edge
# (0-based, each edge once).  Labelling file: first data line "n", second a
# string of n characters from {0,1}.  Lines starting with '#' and blank
# lines are ignored in both.
# ---------------------------------------------------------------------------


def _data_lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield i, line


def save_graph(g: RegularGraph, path) -> None:
    lines = [f"{g.n} {g.d}"]
    lines += [f"{u} {v}" for u, v in g.edges()]
    Path(path).write_text("\n".join(lines) + "\n")


def load_graph(path) -> RegularGraph:
    entries = list(_data_lines(Path(path).read_text()))
    if not entries:
        raise InvalidParameterError(f"{path}: empty graph file")
    lineno, header = entries[0]
    parts = header.split()
    if len(parts) != 2:
        raise InvalidParameterError(f"{path}:{lineno}: header must be 'n d'")
    try:
        n, d = int(parts[0]), int(parts[1])
    except ValueError:
        raise InvalidParameterError(f"{path}:{lineno}: header must be two integers")
    neighbors = [[] for _ in range(n)]
    for lineno, line in entries[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise InvalidParameterError(f"{path}:{lineno}: edge line must be 'u v'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise InvalidParameterError(f"{path}:{lineno}: edge endpoints must be integers")
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidParameterError(f"{path}:{lineno}: vertex out of range")
        if u == v:
            raise InvalidParameterError(f"{path}:{lineno}: self-loop")
        neighbors[u].append(v)
        neighbors[v].append(u)
    for v, ns in enumerate(neighbors):
        if len(ns) != d:
            raise InvalidParameterError(
                f"{path}: vertex {v} has degree {len(ns)}, declared d={d}"
            )
        if len(set(ns)) != d:
            raise InvalidParameterError(f"{path}: vertex {v} has a repeated edge")
    adj = np.array([sorted(ns) for ns in neighbors]) if n else np.empty((0, d))
    return RegularGraph(n=n, d=d, adjacency=adj)


def save_labelling(lab: Labelling, path) -> None:
    bits = "".join(str(int(b)) for b in lab.values)
    Path(path).write_text(f"{lab.n}\n{bits}\n")


def load_labelling(path) -> Labelling:
    entries = list(_data_lines(Path(path).read_text()))
    if len(entries) < 2:
        raise InvalidParameterError(f"{path}: labelling file needs a count line and a bit line")
    lineno, header = entries[0]
    try:
        n = int(header)
    except ValueError:
        raise InvalidParameterError(f"{path}:{lineno}: first line must be the vertex count")
    lineno, bits = entries[1]
    if len(bits) != n:
        raise InvalidParameterError(
            f"{path}:{lineno}: expected {n} bits, got {len(bits)}"
        )
    if set(bits) - {"0", "1"}:
        raise InvalidParameterError(f"{path}:{lineno}: bits must be 0 or 1")
    return Labelling.from_bits([int(c) for c in bits])
