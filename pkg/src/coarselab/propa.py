"""Partitions of unity, their variation across scales, and group averaging.

A partition of unity assigns every window point a finitely supported
probability vector over an abstract vertex set.  Its variation at a scale
is the largest l1 distance between the vectors of two co-contained
points; averaging the partition over a finite element set with small
symmetric-difference defect flattens the variation in the group
directions at the cost of spreading supports, which is the computational
content of the exactness transfer for quotient structures.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .action import GroupAction, GroupElement
from .errors import ParameterError
from .invariants import FAILS, HOLDS, WindowVerdict
from .lscore import TOL, Family, FiniteSpace, mesh


class PartitionOfUnity:
    """Rows of simplex weights, one row per window point.

    Stored densely (window times vertex set); the invariants are checked
    on construction: weights nonnegative and each row summing to 1 within
    1e-9.
    """

    def __init__(self, space: FiniteSpace, vertices: Sequence, weights):
        self.space = space
        self.vertices = tuple(vertices)
        w = np.asarray(weights, dtype=float)
        if w.shape != (len(space.points), len(self.vertices)):
            raise ParameterError(
                f"weights shape {w.shape} does not match "
                f"({len(space.points)}, {len(self.vertices)})"
            )
        if w.min() < -TOL:
            raise ParameterError("negative partition weight")
        sums = w.sum(axis=1)
        if np.abs(sums - 1.0).max() > TOL:
            bad = int(np.argmax(np.abs(sums - 1.0)))
            raise ParameterError(
                f"weights at point {space.points[bad]!r} sum to {sums[bad]!r}"
            )
        w = w.copy()
        w.setflags(write=False)
        self.weights = w

    def row(self, point) -> np.ndarray:
        return self.weights[self.space.index[point]]

    def supports(self) -> list[frozenset]:
        """Per vertex, the set of points carrying positive weight."""
        out = []
        for j in range(len(self.vertices)):
            idx = np.flatnonzero(self.weights[:, j] > 0)
            out.append(frozenset(self.space.points[i] for i in idx))
        return out

    def support_family(self) -> Family:
        return Family(tuple(s for s in self.supports() if s))


def hat_partition(space: FiniteSpace, pitch: int) -> PartitionOfUnity:
    """Tent functions with nodes at multiples of ``pitch`` on an integer window.

    The standard low-variation witness on line-like windows: each point
    splits its mass between the two nearest nodes, so the l1 variation of
    neighbours is 2/pitch per unit step.
    """
    if pitch < 1:
        raise ParameterError("hat pitch must be a positive integer")
    pts = space.points
    if not all(isinstance(p, (int, np.integer)) for p in pts):
        raise ParameterError("hat partitions need integer point ids")
    lo, hi = min(pts), max(pts)
    nodes = list(range((lo // pitch) * pitch, ((hi // pitch) + 1) * pitch + 1, pitch))
    w = np.zeros((len(pts), len(nodes)))
    for i, p in enumerate(pts):
        k = (p - nodes[0]) // pitch
        left = nodes[k]
        frac = (p - left) / pitch
        w[i, k] = 1.0 - frac
        if frac > 0:
            w[i, k + 1] = frac
    return PartitionOfUnity(space, nodes, w)


def block_partition(space: FiniteSpace, length: int) -> PartitionOfUnity:
    """Indicator functions of aligned blocks of the given length."""
    if length < 1:
        raise ParameterError("block length must be a positive integer")
    pts = space.points
    if not all(isinstance(p, (int, np.integer)) for p in pts):
        raise ParameterError("block partitions need integer point ids")
    blocks = sorted(set(p // length for p in pts))
    col = {b: j for j, b in enumerate(blocks)}
    w = np.zeros((len(pts), len(blocks)))
    for i, p in enumerate(pts):
        w[i, col[p // length]] = 1.0
    return PartitionOfUnity(space, blocks, w)


def variation(phi: PartitionOfUnity, u: Family) -> float:
    """Largest l1 distance between weight rows of two points co-contained
    in a member of u; 0 when no member has two points."""
    u.validate_over(phi.space)
    sp = phi.space
    best = 0.0
    for m in u.members:
        idx = [sp.index[p] for p in m]
        if len(idx) < 2:
            continue
        rows = phi.weights[idx]
        diffs = np.abs(rows[:, None, :] - rows[None, :, :]).sum(axis=2)
        best = max(best, float(diffs.max()))
    return best


@dataclass(frozen=True)
class FolnerSet:
    """A finite set of group elements, distinct as core bijections."""

    elements: tuple

    def __post_init__(self):
        if not self.elements:
            raise ParameterError("a Folner set must be nonempty")
        keys = [g.core_key() for g in self.elements]
        if len(set(keys)) != len(keys):
            raise ParameterError("Folner set elements must be distinct on the core")

    def __len__(self):
        return len(self.elements)


def folner_defect(E: FolnerSet, g: GroupElement) -> Fraction:
    """|E symmetric-difference E.g| / |E| as an exact fraction in [0, 2]."""
    a = E.elements[0].action
    keys = {k.core_key() for k in E.elements}
    moved = {a.compose(k, g).core_key() for k in E.elements}
    return Fraction(len(keys ^ moved), len(E.elements))


def folner_average(phi: PartitionOfUnity, E: FolnerSet, a: GroupAction) -> PartitionOfUnity:
    """Average the partition over the element set:
    psi_i(x) = mean over k in E of phi_i(k.x)."""
    if phi.space is not a.space:
        raise ParameterError("partition and action live on different spaces")
    acc = np.zeros_like(phi.weights)
    for k in E.elements:
        acc += phi.weights[k.perm]
    return PartitionOfUnity(a.space, phi.vertices, acc / len(E.elements))


def exactness_witness_check(
    phi: PartitionOfUnity, u: Family, epsilon: float
) -> WindowVerdict:
    """Check one (scale, epsilon) pair of the exactness definition.

    Verifies that the vertex supports form a family of finite mesh small
    enough for the window (at most the certified radius, since a support
    swallowing the window can never witness uniform boundedness on larger
    samples) and that the variation at scale u stays below epsilon.
    """
    if epsilon <= 0:
        raise ParameterError("epsilon must be positive")
    sp = phi.space
    supp = phi.support_family()
    supp_mesh = mesh(supp, sp) if supp.members else 0.0
    var = variation(phi, u)
    support_ok = supp_mesh <= sp.window_radius
    variation_ok = var < epsilon
    witness = {
        "support_mesh": supp_mesh,
        "support_bound": sp.window_radius,
        "variation": var,
        "epsilon": float(epsilon),
    }
    return WindowVerdict(HOLDS if support_ok and variation_ok else FAILS, witness)
