"""Generators for the standard example windows.

Integer segments and rays, k-pod axes spaces, weighted cones over a
finite base, and towers of cyclic quotients glued into a box space.
Every generator returns a validated-shape :class:`FiniteSpace`; the
axiom suite itself is cheap to run on the result via
:func:`coarselab.lscore.metric_axiom_violations`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._shortest import closure
from .action import GroupAction
from .errors import ParameterError, SpaceSpecError
from .lscore import INF, TOL, FiniteSpace


def segment_space(lo: int, hi: int) -> FiniteSpace:
    """Integers lo..hi with the absolute-difference metric.

    A window starting at 0 samples the ray, so every ball around 0 up to
    radius hi is complete; a window straddling 0 samples the line and is
    complete up to min(-lo, hi).  Windows not anchored at 0 carry no
    certified radius.
    """
    if lo > hi:
        raise ParameterError(f"segment bounds out of order: {lo} > {hi}")
    pts = list(range(lo, hi + 1))
    xs = np.array(pts, dtype=float)
    dmat = np.abs(xs[:, None] - xs[None, :])
    if lo == 0:
        base, wr = 0, float(hi)
    elif lo < 0 <= hi:
        base, wr = 0, float(min(-lo, hi))
    else:
        base, wr = lo, 0.0
    return FiniteSpace(pts, dmat, base, wr, validate=False)


def axes_space(arms: int, length: int) -> FiniteSpace:
    """A k-pod: ``arms`` rays of ``length`` integer points glued at an origin.

    Point ids are ``"o"`` for the origin and ``"a:t"`` for position t on
    arm a.  Distances follow the paths through the origin.
    """
    if arms < 1 or length < 1:
        raise ParameterError("axes space needs arms >= 1 and length >= 1")
    pts = ["o"] + [f"{a}:{t}" for a in range(arms) for t in range(1, length + 1)]
    arm = np.array([-1] + [a for a in range(arms) for _ in range(1, length + 1)])
    t = np.array([0] + [tt for _ in range(arms) for tt in range(1, length + 1)], dtype=float)
    same = arm[:, None] == arm[None, :]
    dmat = np.where(same, np.abs(t[:, None] - t[None, :]), t[:, None] + t[None, :])
    # the origin has arm -1, so its row falls into the "different arm" branch
    # and correctly reads t + 0
    return FiniteSpace(pts, dmat, "o", float(length), validate=False)


# ---------------------------------------------------------------------------
# cones


@dataclass(frozen=True)
class ConeSpec:
    """A finite sample of a weighted cone over a compact base.

    ``levels`` must ascend and contain 0 (the apex); ``weight`` scales the
    base metric at each level and must vanish exactly at 0.
    """

    base: FiniteSpace
    levels: tuple
    weight: Callable[[float], float]

    def __post_init__(self):
        lv = tuple(float(t) for t in self.levels)
        if list(lv) != sorted(set(lv)):
            raise SpaceSpecError("cone levels must be strictly ascending")
        if 0.0 not in lv:
            raise SpaceSpecError("cone levels must contain 0")
        if any(t < 0 for t in lv):
            raise SpaceSpecError("cone levels must be nonnegative")
        if abs(self.weight(0.0)) > TOL:
            raise SpaceSpecError("cone weight must vanish at 0")
        for t in lv:
            if t > 0 and self.weight(t) <= 0:
                raise SpaceSpecError(f"cone weight must be positive at level {t:g}")


def cone_space(spec: ConeSpec) -> FiniteSpace:
    """Shortest-path metric on the sampled cone.

    All level-0 copies of the base collapse to a single apex point.  The
    edge between two sampled points costs the level gap plus the base
    distance scaled by the larger level weight; the path infimum is taken
    over the sampled points only, which is exact for the sample itself and
    an upper bound for the ideal cone.
    """
    base = spec.base
    levels = [float(t) for t in spec.levels if float(t) > 0]
    pts = ["apex"] + [f"{b}@{t:g}" for t in levels for b in base.points]
    coords = [(None, 0.0)] + [(bi, t) for t in levels for bi in range(len(base.points))]
    n = len(pts)
    w = np.full((n, n), INF)
    np.fill_diagonal(w, 0.0)
    phi = {t: float(spec.weight(t)) for t in levels}
    for i in range(n):
        bi, ti = coords[i]
        for j in range(i + 1, n):
            bj, tj = coords[j]
            if bi is None:
                w[i, j] = w[j, i] = tj  # apex to (x, t) costs t along the same ray
                continue
            scale = max(phi[ti], phi[tj])
            db = base.dmat[bi, bj]
            w[i, j] = w[j, i] = abs(ti - tj) + scale * db
    dmat = closure(w)
    wr = max(levels) if levels else 0.0
    return FiniteSpace(pts, dmat, "apex", wr, validate=False)


# ---------------------------------------------------------------------------
# box spaces


@dataclass(frozen=True)
class QuotientLevel:
    """One explicit finite quotient in a tower.

    ``dist`` is the quotient word metric on the level, ``projection`` maps
    onto the previous (coarser) level and must be 1-Lipschitz, ``shift`` is
    the image of the group generator and must be an isometry commuting with
    the projection.
    """

    size: int
    dist: np.ndarray
    projection: tuple | None
    shift: tuple


def cyclic_level(n: int, prev: int | None) -> QuotientLevel:
    """The cyclic quotient of order n with the cycle metric."""
    a = np.arange(n)
    diff = np.abs(a[:, None] - a[None, :])
    dist = np.minimum(diff, n - diff).astype(float)
    proj = None if prev is None else tuple(int(x % prev) for x in a)
    return QuotientLevel(n, dist, proj, tuple(int((x + 1) % n) for x in a))


@dataclass(frozen=True)
class BoxSpec:
    """A tower of finite quotients, either cyclic (``moduli``) or explicit."""

    moduli: tuple | None = None
    levels: tuple | None = None

    def __post_init__(self):
        if (self.moduli is None) == (self.levels is None):
            raise SpaceSpecError("give exactly one of moduli or explicit levels")
        if self.moduli is not None:
            mods = tuple(int(n) for n in self.moduli)
            if len(mods) < 1 or any(n < 1 for n in mods):
                raise SpaceSpecError("box moduli must be positive")
            for a, b in zip(mods, mods[1:]):
                if b <= a or b % a != 0:
                    raise SpaceSpecError(
                        f"box tower must ascend by divisibility: {a} before {b}"
                    )

    def build_levels(self) -> list[QuotientLevel]:
        if self.moduli is not None:
            mods = [int(n) for n in self.moduli]
            return [
                cyclic_level(n, mods[i - 1] if i > 0 else None)
                for i, n in enumerate(mods)
            ]
        return list(self.levels)


def _validate_levels(levels: Sequence[QuotientLevel]) -> None:
    prev = None
    for li, lv in enumerate(levels):
        d = np.asarray(lv.dist, dtype=float)
        if d.shape != (lv.size, lv.size):
            raise SpaceSpecError(f"level {li + 1}: dist shape mismatch")
        if np.abs(d - d.T).max() > TOL or np.abs(np.diagonal(d)).max() > TOL:
            raise SpaceSpecError(f"level {li + 1}: dist is not a metric")
        shift = np.asarray(lv.shift, dtype=np.intp)
        if sorted(shift.tolist()) != list(range(lv.size)):
            raise SpaceSpecError(f"level {li + 1}: shift is not a bijection")
        if np.abs(d[shift][:, shift] - d).max() > TOL:
            raise SpaceSpecError(f"level {li + 1}: shift is not an isometry")
        if li == 0:
            if lv.projection is not None:
                raise SpaceSpecError("first level must not have a projection")
        else:
            proj = np.asarray(lv.projection, dtype=np.intp)
            if proj.shape != (lv.size,) or proj.min() < 0 or proj.max() >= prev.size:
                raise SpaceSpecError(f"level {li + 1}: projection out of range")
            pd = np.asarray(prev.dist, dtype=float)
            if np.any(pd[np.ix_(proj, proj)] > d + TOL):
                raise SpaceSpecError(f"level {li + 1}: projection is not 1-Lipschitz")
            prev_shift = np.asarray(prev.shift, dtype=np.intp)
            if not np.array_equal(proj[shift], prev_shift[proj]):
                raise SpaceSpecError(
                    f"level {li + 1}: shift does not commute with the projection"
                )
        prev = lv


def box_space(spec: BoxSpec):
    """Disjoint union of the tower's quotients with a separating glue metric.

    Within a level the metric is exactly the level's own quotient metric.
    Each class at level i+1 is joined to its projection at level i by an
    edge of weight ``w_i = max(2i + 2, diam(level i+1))``: the first term
    keeps levels i and j at distance greater than i + j, the second stops
    shortest paths from shortcutting through a coarser level, and the
    edges respect the shift, so the translation action is an isometry.

    Returns ``(FiniteSpace, GroupAction)`` with the translation generator
    named ``t``.
    """
    levels = spec.build_levels()
    _validate_levels(levels)
    pts = []
    offsets = []
    for i, lv in enumerate(levels):
        offsets.append(len(pts))
        pts.extend(f"L{i + 1}:{a}" for a in range(lv.size))
    n = len(pts)
    w = np.full((n, n), INF)
    np.fill_diagonal(w, 0.0)
    glue = []
    for i, lv in enumerate(levels):
        o = offsets[i]
        w[o : o + lv.size, o : o + lv.size] = np.asarray(lv.dist, dtype=float)
        if i > 0:
            wi = max(2.0 * i + 2.0, float(np.asarray(lv.dist).max()))
            glue.append(wi)
            po = offsets[i - 1]
            for a in range(lv.size):
                j, k = o + a, po + lv.projection[a]
                w[j, k] = w[k, j] = min(w[j, k], wi)
    dmat = closure(w)
    base = pts[0]
    bd = dmat[0]
    max_from_base = float(bd[np.isfinite(bd)].max()) if n > 1 else 0.0
    # distance to the first unsampled level is at least sum(glue) + 2L + 2
    wr = min(sum(glue) + 2.0 * len(levels) + 1.0, max_from_base)
    space = FiniteSpace(pts, dmat, base, wr, validate=False)

    table = {}
    for i, lv in enumerate(levels):
        for a in range(lv.size):
            table[f"L{i + 1}:{a}"] = f"L{i + 1}:{lv.shift[a]}"
    action = GroupAction(space, {"t": table})
    return space, action
