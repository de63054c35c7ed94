"""Finite windows of discrete metric spaces and their scale calculus.

A :class:`FiniteSpace` is a finite sample of a (conceptually infinite)
discrete metric space: points, a symmetric distance matrix in which
``inf`` is a legal value, a basepoint, and a ``window_radius`` giving the
largest radius around the basepoint that is certified free of truncation
artifacts.  A :class:`Family` is a finite list of point subsets, the
computational stand-in for a uniformly bounded family.  Scales interact
through the star operation; iterating stars builds a tower of
progressively coarser families from which an infinity-valued metric can
be read off (:func:`tower_metrize`).

All values are immutable after construction and every operation here is
a pure function, so concurrent read-only use is safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import MalformedFamilyError, ParameterError

INF = float("inf")

#: tolerance used for all composite real-valued comparisons; integer-valued
#: metrics are exact and never need it
TOL = 1e-9


def _sort_key(pid):
    # stable ordering for mixed id types (ints sort among ints, strings
    # among strings) without relying on cross-type comparison
    return (type(pid).__name__, pid)


class FiniteSpace:
    """A finite window of a discrete infinity-metric space.

    Parameters
    ----------
    points : sequence of hashable ids
    dmat : (n, n) array of nonnegative reals, ``inf`` allowed
    basepoint : point id, must be listed in ``points``
    window_radius : largest r such that the ball around the basepoint of
        radius r is complete, i.e. contains no truncation artifacts
    validate : run the metric-axiom suite on construction
    """

    def __init__(self, points, dmat, basepoint, window_radius, validate=True):
        self.points = tuple(points)
        if len(set(self.points)) != len(self.points):
            raise ParameterError("duplicate point ids")
        self.index = {p: i for i, p in enumerate(self.points)}
        mat = np.asarray(dmat, dtype=float)
        if mat.shape != (len(self.points), len(self.points)):
            raise ParameterError(
                f"distance matrix shape {mat.shape} does not match {len(self.points)} points"
            )
        mat = mat.copy()
        mat.setflags(write=False)
        self.dmat = mat
        if basepoint not in self.index:
            raise ParameterError(f"basepoint {basepoint!r} not among points")
        self.basepoint = basepoint
        self.window_radius = float(window_radius)
        if validate:
            problems = metric_axiom_violations(self)
            if problems:
                raise ParameterError("metric axioms fail: " + "; ".join(problems[:3]))

    # -- basic queries ---------------------------------------------------

    def __len__(self):
        return len(self.points)

    def dist(self, x, y) -> float:
        return float(self.dmat[self.index[x], self.index[y]])

    def base_distances(self) -> np.ndarray:
        """Distances from the basepoint, indexed like ``points``."""
        return self.dmat[self.index[self.basepoint]]

    def ball(self, center, r) -> frozenset:
        """Closed ball ``{y : d(center, y) <= r}``."""
        row = self.dmat[self.index[center]]
        return frozenset(self.points[i] for i in np.flatnonzero(row <= r))

    def diameter(self, subset: Iterable) -> float:
        idx = [self.index[p] for p in subset]
        if len(idx) <= 1:
            return 0.0
        return float(self.dmat[np.ix_(idx, idx)].max())

    def core(self) -> frozenset:
        """The certified ball around the basepoint."""
        return self.ball(self.basepoint, self.window_radius)

    def core_indices(self) -> np.ndarray:
        return np.flatnonzero(self.base_distances() <= self.window_radius)

    def sorted_points(self):
        return sorted(self.points, key=_sort_key)

    def __repr__(self):
        return (
            f"FiniteSpace({len(self.points)} points, basepoint={self.basepoint!r}, "
            f"window_radius={self.window_radius:g})"
        )


def metric_axiom_violations(space: FiniteSpace, tol: float = TOL) -> list[str]:
    """All infinity-metric axiom violations of a space, as human-readable strings.

    Checks nonnegativity, zero self-distance, symmetry, and the triangle
    inequality (``inf`` absorbing) within ``tol``.  Empty list means the
    space passes. The triangle scan is exhaustive but vectorized one
    midpoint at a time, so windows of a few hundred points stay fast.
    """
    d = space.dmat
    out = []
    if np.any(d < -tol):
        i, j = np.argwhere(d < -tol)[0]
        out.append(f"negative distance d({space.points[i]!r},{space.points[j]!r})")
    diag = np.abs(np.diagonal(d))
    if np.any(diag > tol):
        i = int(np.argmax(diag))
        out.append(f"nonzero self-distance at {space.points[i]!r}")
    finite = np.isfinite(d)
    both = finite & finite.T
    asym = np.zeros_like(d)
    asym[both] = np.abs(d[both] - d.T[both])
    if (finite != finite.T).any():
        i, j = np.argwhere(finite != finite.T)[0]
        out.append(f"asymmetric finiteness at ({space.points[i]!r},{space.points[j]!r})")
    elif np.any(asym > tol):
        i, j = np.argwhere(asym > tol)[0]
        out.append(f"asymmetry at ({space.points[i]!r},{space.points[j]!r})")
    for k in range(len(space.points)):
        # d[i,j] <= d[i,k] + d[k,j]; inf on the right absorbs automatically
        bound = d[:, k][:, None] + d[k, :][None, :]
        bad = d > bound + tol
        if bad.any():
            i, j = np.argwhere(bad)[0]
            out.append(
                f"triangle fails: d({space.points[i]!r},{space.points[j]!r}) > "
                f"via {space.points[k]!r}"
            )
            break
    bd = space.base_distances()
    finite_bd = bd[np.isfinite(bd)]
    max_from_base = float(finite_bd.max()) if finite_bd.size else 0.0
    if space.window_radius > max_from_base + tol:
        out.append(
            f"window_radius {space.window_radius:g} exceeds max finite distance "
            f"{max_from_base:g} from basepoint"
        )
    if space.window_radius < 0:
        out.append("negative window_radius")
    return out


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class Family:
    """A finite list of nonempty point subsets (a bounded-family candidate).

    The family is plain data; it does not hold a space reference. When a
    family is used as a cover it is always implicitly extended by all
    singletons, so partial covers never need special casing.
    """

    members: tuple[frozenset, ...]

    @classmethod
    def of(cls, members: Iterable[Iterable]) -> "Family":
        return cls(tuple(frozenset(m) for m in members))

    @classmethod
    def singletons(cls, space: FiniteSpace) -> "Family":
        return cls(tuple(frozenset([p]) for p in space.points))

    def validate_over(self, space: FiniteSpace) -> None:
        for m in self.members:
            if not m:
                raise MalformedFamilyError("empty family member")
            for p in m:
                if p not in space.index:
                    raise MalformedFamilyError(f"unknown point id {p!r} in family member")

    def is_cover_of(self, space: FiniteSpace) -> bool:
        """Literal coverage, before the implicit singleton extension."""
        covered = set().union(*self.members) if self.members else set()
        return covered >= set(space.points)

    def __len__(self):
        return len(self.members)


def mesh(f: Family, s: FiniteSpace) -> float:
    """Supremum of member diameters; 0 for the empty family by convention."""
    f.validate_over(s)
    best = 0.0
    for m in f.members:
        d = s.diameter(m)
        if d > best:
            best = d
    return best


def star(targets: Family, wrt: Family, space: FiniteSpace) -> Family:
    """Star each target member against a family treated as a cover.

    Output member i is target member i unioned with every ``wrt`` member
    that intersects it.  The implicit singleton extension of ``wrt`` means
    each target member is always contained in its star.
    """
    targets.validate_over(space)
    wrt.validate_over(space)
    out = []
    for m in targets.members:
        grown = set(m)
        for w in wrt.members:
            if w & m:
                grown |= w
        out.append(frozenset(grown))
    return Family(tuple(out))


def refines(u: Family, v: Family) -> bool:
    """True when every member of u with at least two points lies in some
    member of v.  Singleton members are exempt, so the singleton cover
    refines everything."""
    for m in u.members:
        if len(m) < 2:
            continue
        if not any(m <= w for w in v.members):
            return False
    return True


def co_membership_matrix(f: Family, space: FiniteSpace) -> np.ndarray:
    """Boolean matrix C with C[i, j] true iff points i and j are contained
    together in some member of f, or i == j (singleton extension)."""
    f.validate_over(space)
    n = len(space.points)
    c = np.eye(n, dtype=bool)
    for m in f.members:
        idx = [space.index[p] for p in m]
        c[np.ix_(idx, idx)] = True
    return c


# ---------------------------------------------------------------------------
# chain components at a scale


class UnionFind:
    """Union by rank with path compression over an arbitrary finite item set."""

    def __init__(self, items: Iterable):
        self._parent = {x: x for x in items}
        self._rank = {x: 0 for x in self._parent}

    def find(self, x):
        root = x
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[x] != root:
            self._parent[x], x = root, self._parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self._rank[ra] < self._rank[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        if self._rank[ra] == self._rank[rb]:
            self._rank[ra] += 1

    def groups(self) -> list[set]:
        out = {}
        for x in self._parent:
            out.setdefault(self.find(x), set()).add(x)
        return list(out.values())


def u_components(a: Iterable, u: Family) -> tuple[frozenset, ...]:
    """Partition of the point set ``a`` into chain components at scale u.

    Two points of ``a`` land in the same block when a finite chain inside
    ``a`` joins them with every consecutive pair co-contained in some
    member of u.  Returned blocks are ordered by their smallest element.
    """
    pts = set(a)
    if not pts:
        return ()
    uf = UnionFind(pts)
    for m in u.members:
        common = [p for p in m if p in pts]
        for p in common[1:]:
            uf.union(common[0], p)
    groups = uf.groups()
    groups.sort(key=lambda g: _sort_key(min(g, key=_sort_key)))
    return tuple(frozenset(g) for g in groups)


# ---------------------------------------------------------------------------
# scale towers and the tower metric


@dataclass(frozen=True)
class ScaleTower:
    """Families indexed 0..k with st(levels[i], levels[i]) refining levels[i+1]."""

    levels: tuple[Family, ...] = field(default_factory=tuple)

    def __len__(self):
        return len(self.levels)


def tower_metrize(seed: Sequence[Family], depth: int, space: FiniteSpace):
    """Iterate stars from seed families and read off the scale metric.

    Level 0 is the union of the seeds plus all singletons; level i+1 is
    the star of level i against itself; ``depth + 1`` levels are built in
    total. The returned metric gives distance 0 on the diagonal, i + 1 to a
    distinct pair whose smallest co-containing level is i, and ``inf`` to
    pairs not resolved within the tower.  The one-step shift keeps the
    triangle inequality exact: overlapping members at level i merge by
    level i + 1, so d(x, z) <= max(d(x, y), d(y, z)) + 1 <= d(x, y) + d(y, z)
    once distinct points cost at least 1.

    Returns ``(ScaleTower, FiniteSpace)`` where the space carries the
    derived metric over the original points.
    """
    if depth < 1:
        raise ParameterError("tower depth must be at least 1")
    members = []
    seen = set()
    for fam in seed:
        fam.validate_over(space)
        for m in fam.members:
            if m not in seen:
                seen.add(m)
                members.append(m)
    for p in space.points:
        s = frozenset([p])
        if s not in seen:
            seen.add(s)
            members.append(s)
    levels = [Family(tuple(members))]
    for _ in range(depth):
        levels.append(star(levels[-1], levels[-1], space))

    n = len(space.points)
    d = np.full((n, n), INF)
    for i in range(len(levels) - 1, -1, -1):
        c = co_membership_matrix(levels[i], space)
        d[c] = i + 1
    np.fill_diagonal(d, 0.0)

    bd = d[space.index[space.basepoint]]
    finite = bd[np.isfinite(bd)]
    max_from_base = float(finite.max()) if finite.size else 0.0
    # pairs unresolved at the top level sit strictly beyond depth + 1 in any
    # deeper tower, so balls of radius <= depth + 1 are already complete
    wr = min(float(depth) + 1.0, max_from_base)
    tower = ScaleTower(tuple(levels))
    derived = FiniteSpace(space.points, d, space.basepoint, wr, validate=False)
    return tower, derived


def ball_cover(s: FiniteSpace, r: float) -> Family:
    """The cover by closed balls of radius r, one member per point."""
    if r < 0:
        raise ParameterError("ball cover radius must be nonnegative")
    members = []
    for i in range(len(s.points)):
        idx = np.flatnonzero(s.dmat[i] <= r)
        members.append(frozenset(s.points[j] for j in idx))
    return Family(tuple(members))
