"""Group actions on finite windows and the quotient metrics they induce.

A group is given concretely: each generator is a bijection of the
window's points, and the generating set is closed under formal inverses.
Elements are the bijections reachable by composing generators; two
elements compare equal when their actions agree on the certified core
ball, since the window boundary is where truncation artifacts live.

The metric constructions all return new :class:`~coarselab.lscore.FiniteSpace`
values: the infimum-over-group metric that collapses each orbit direction
(:func:`xg_metric`), orbit-space metrics for finite groups
(:func:`orbit_metric`), and fiber-chain quotient metrics
(:func:`quotient_pseudometric`).
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from ._shortest import closure, minplus
from .errors import (
    ActionTableError,
    ModeError,
    NotFiniteGroupError,
    ParameterError,
)
from .lscore import INF, TOL, FiniteSpace, _sort_key

DEFAULT_GROUP_CAP = 10**6


class GroupElement:
    """A realized group element: a word in generator symbols together with
    the bijection of the window it induces.

    Equality and hashing use the action restricted to the certified core,
    so elements that differ only by boundary artifacts are identified.
    """

    __slots__ = ("action", "word", "perm", "_key")

    def __init__(self, action: "GroupAction", word: tuple, perm: np.ndarray):
        self.action = action
        self.word = tuple(word)
        perm = np.asarray(perm, dtype=np.intp)
        perm.setflags(write=False)
        self.perm = perm
        self._key = perm[action._core_idx].tobytes()

    def core_key(self) -> bytes:
        return self._key

    def apply(self, point):
        sp = self.action.space
        return sp.points[self.perm[sp.index[point]]]

    def is_identity_on_core(self) -> bool:
        return self._key == self.action.identity()._key

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        w = "*".join(self.word) if self.word else "e"
        return f"<element {w}>"


class GroupAction:
    """A finitely generated group acting on a finite window.

    Parameters
    ----------
    space : the window acted on
    tables : symbol -> bijection, each given as a mapping point -> point
        or as a sequence of images aligned with ``space.points``
    inverses : symbol -> symbol of its inverse; pairs not declared are
        matched automatically, and a fresh ``<s>_inv`` table is added when
        no existing table realizes the inverse
    """

    def __init__(self, space: FiniteSpace, tables: Mapping, inverses=None):
        self.space = space
        self._core_idx = space.core_indices()
        n = len(space.points)
        perms: dict[str, np.ndarray] = {}
        for sym, table in tables.items():
            perms[str(sym)] = self._normalize_table(str(sym), table, n)
        inverses = dict(inverses or {})
        # validate declared pairs, then complete the set
        for sym, inv_sym in list(inverses.items()):
            if sym not in perms or inv_sym not in perms:
                raise ActionTableError(f"inverse declaration {sym!r}->{inv_sym!r} names unknown table")
            if not np.array_equal(perms[sym][perms[inv_sym]], np.arange(n)):
                raise ActionTableError(f"tables {sym!r} and {inv_sym!r} do not compose to the identity")
            inverses.setdefault(inv_sym, sym)
        for sym in list(perms):
            if sym in inverses:
                continue
            inv_perm = np.argsort(perms[sym])
            match = next(
                (s for s, p in perms.items() if np.array_equal(p, inv_perm)), None
            )
            if match is None:
                match = f"{sym}_inv"
                perms[match] = inv_perm
            inverses[sym] = match
            inverses.setdefault(match, sym)
        self.perms = perms
        self.inverses = inverses
        self.control_values = {s: self._control(p) for s, p in perms.items()}
        self._group_cache: list[GroupElement] | None = None

    def _normalize_table(self, sym, table, n) -> np.ndarray:
        sp = self.space
        if isinstance(table, Mapping):
            if set(table) != set(sp.points):
                raise ActionTableError(f"table {sym!r} is not total on the window")
            images = [table[p] for p in sp.points]
        else:
            images = list(table)
            if len(images) != n:
                raise ActionTableError(f"table {sym!r} has {len(images)} entries for {n} points")
        try:
            perm = np.array([sp.index[q] for q in images], dtype=np.intp)
        except KeyError as exc:
            raise ActionTableError(f"table {sym!r} maps to unknown point {exc.args[0]!r}") from None
        if len(set(perm.tolist())) != n:
            raise ActionTableError(f"table {sym!r} is not a bijection of the window")
        return perm

    def _control(self, perm) -> float:
        # c(s) = max over pairs of d(s.x, s.y) - d(x, y), recorded for reports;
        # a finite pair pushed to infinite distance records inf
        d = self.space.dmat
        moved = d[perm][:, perm]
        both = np.isfinite(d) & np.isfinite(moved)
        if np.any(np.isfinite(d) & ~np.isfinite(moved)):
            return INF
        if not both.any():
            return 0.0
        return float((moved[both] - d[both]).max())

    def distortion(self, sym: str) -> float:
        """max |d(s.x, s.y) - d(x, y)|; zero exactly for isometries."""
        perm = self.perms[sym]
        d = self.space.dmat
        moved = d[perm][:, perm]
        both = np.isfinite(d) & np.isfinite(moved)
        if (np.isfinite(d) != np.isfinite(moved)).any():
            return INF
        if not both.any():
            return 0.0
        return float(np.abs(moved[both] - d[both]).max())

    def is_isometric(self, tol: float = TOL) -> bool:
        return all(self.distortion(s) <= tol for s in self.perms)

    # -- elements ---------------------------------------------------------

    def identity(self) -> GroupElement:
        return GroupElement(self, (), np.arange(len(self.space.points)))

    def generator(self, sym: str) -> GroupElement:
        return GroupElement(self, (sym,), self.perms[sym])

    def element(self, word: Iterable[str]) -> GroupElement:
        """Compose a word of generator symbols, leftmost applied last
        (the word s1 s2 acts by x -> s1(s2(x)))."""
        word = tuple(word)
        perm = np.arange(len(self.space.points))
        for sym in reversed(word):
            if sym not in self.perms:
                raise ParameterError(f"unknown generator symbol {sym!r}")
            perm = self.perms[sym][perm]
        return GroupElement(self, word, perm)

    def compose(self, g: GroupElement, h: GroupElement) -> GroupElement:
        """Product g*h, acting by x -> g(h(x))."""
        return GroupElement(self, g.word + h.word, g.perm[h.perm])

    def inverse(self, g: GroupElement) -> GroupElement:
        word = tuple(self.inverses[s] for s in reversed(g.word))
        return GroupElement(self, word, np.argsort(g.perm))

    def sorted_generators(self) -> list[str]:
        return sorted(self.perms)

    def realized_group(self, cap: int = DEFAULT_GROUP_CAP) -> list[GroupElement]:
        """BFS closure of the generators, deduplicated by full window action,
        in word-length order.  Raises when the closure exceeds ``cap``."""
        if self._group_cache is not None:
            if len(self._group_cache) > cap:
                raise NotFiniteGroupError(
                    f"group closure exceeded cap of {cap} elements"
                )
            return self._group_cache
        ident = self.identity()
        seen = {ident.perm.tobytes()}
        out = [ident]
        frontier = [ident]
        while frontier:
            nxt = []
            for g in frontier:
                for sym in self.sorted_generators():
                    h = GroupElement(self, g.word + (sym,), g.perm[self.perms[sym]])
                    key = h.perm.tobytes()
                    if key in seen:
                        continue
                    seen.add(key)
                    out.append(h)
                    nxt.append(h)
                    if len(out) > cap:
                        raise NotFiniteGroupError(
                            f"group closure exceeded cap of {cap} elements"
                        )
            frontier = nxt
        self._group_cache = out
        return out


def load_action(space: FiniteSpace, tables: Mapping, inverses=None) -> GroupAction:
    """Validate generator tables and build the action.  Records the control
    value c(s) of every generator for reporting."""
    return GroupAction(space, tables, inverses)


def word_length(a: GroupAction, g: GroupElement, bound: int) -> float:
    """Length of the shortest generator word realizing g on the certified
    core, or ``inf`` when no word within ``bound`` does."""
    if bound < 0:
        raise ParameterError("word length bound must be nonnegative")
    target = g.core_key()
    ident = a.identity()
    if ident.core_key() == target:
        return 0
    seen = {ident.perm.tobytes()}
    frontier = [ident.perm]
    for length in range(1, bound + 1):
        nxt = []
        for perm in frontier:
            for sym in a.sorted_generators():
                q = perm[a.perms[sym]]
                key = q.tobytes()
                if key in seen:
                    continue
                seen.add(key)
                if q[a._core_idx].tobytes() == target:
                    return length
                nxt.append(q)
        frontier = nxt
        if not frontier:
            break
    return INF


# ---------------------------------------------------------------------------
# standard actions on generated windows


def negation_action(space: FiniteSpace) -> GroupAction:
    """x -> -x on a window of integers symmetric around 0."""
    table = {}
    for p in space.points:
        if -p not in space.index:
            raise ParameterError(f"window is not symmetric: {-p} missing")
        table[p] = -p
    return GroupAction(space, {"gamma": table}, {"gamma": "gamma"})


def translation_action(space: FiniteSpace) -> GroupAction:
    """x -> x+1 on a window of consecutive integers, wrapping at the edge.

    The wrap keeps the table a bijection of the window; the seam pair is a
    boundary artifact and sits at the window edge by construction.
    """
    pts = sorted(space.points)
    if pts != list(range(pts[0], pts[-1] + 1)):
        raise ParameterError("translation needs a window of consecutive integers")
    table = {p: (pts[0] if p == pts[-1] else p + 1) for p in pts}
    return GroupAction(space, {"t": table})


def axes_rotation_action(space: FiniteSpace, arms: int) -> GroupAction:
    """Cyclically permute the arms of an axes window (ids ``o`` and ``a:t``)."""
    table = {}
    for p in space.points:
        if p == "o":
            table[p] = p
        else:
            a, t = p.split(":")
            table[p] = f"{(int(a) + 1) % arms}:{t}"
    return GroupAction(space, {"r": table})


def orbit_family(a: GroupAction, elements: Sequence[GroupElement]):
    """The family {F.x : x in window} for a finite element set F."""
    from .lscore import Family

    members = []
    seen = set()
    for i, p in enumerate(a.space.points):
        orbit = frozenset(a.space.points[g.perm[i]] for g in elements)
        if orbit not in seen:
            seen.add(orbit)
            members.append(orbit)
    return Family(tuple(members))


def pair_family(a: GroupAction, elements: Sequence[GroupElement]):
    """The family of closeness pairs {x, g.x} over the given elements."""
    from .lscore import Family

    members = []
    seen = set()
    for g in elements:
        for i, p in enumerate(a.space.points):
            m = frozenset((p, a.space.points[g.perm[i]]))
            if m not in seen:
                seen.add(m)
                members.append(m)
    return Family(tuple(members))


def translate_family(a: GroupAction, g: GroupElement, fam):
    """Image family {g.U : U in fam}."""
    from .lscore import Family

    sp = a.space
    return Family(
        tuple(
            frozenset(sp.points[g.perm[sp.index[p]]] for p in m) for m in fam.members
        )
    )


# ---------------------------------------------------------------------------
# the collapsed metric


def xg_metric(a: GroupAction, mode: str = "isometric") -> FiniteSpace:
    """Metric on the window that makes every group element's action cheap.

    ``isometric`` computes ``d(x, x') = min over elements g of
    d_X(x, g.x') + |g|`` by breadth-first enumeration of the realized
    group, abandoning a word-length level once it alone exceeds every
    current candidate value (d_X is nonnegative, so longer words cannot
    improve).  Requires every generator to act by isometries.

    ``general`` computes the chain infimum
    ``n + sum d_X(a_i, b_i)`` over chains with ``x in S^2.a_1``,
    ``x' in S^2.b_n`` and ``b_i in S^4.a_{i+1}``, where S is the symmetric
    generator set with the identity; realized as a shortest-path problem
    with zero-cost set-membership links.
    """
    if mode == "isometric":
        return _xg_isometric(a)
    if mode == "general":
        return _xg_general(a)
    raise ParameterError(f"unknown xg_metric mode {mode!r}")


def _derived_space(base: FiniteSpace, dmat: np.ndarray) -> FiniteSpace:
    bd = dmat[base.index[base.basepoint]]
    finite = bd[np.isfinite(bd)]
    max_from_base = float(finite.max()) if finite.size else 0.0
    wr = min(base.window_radius, max_from_base)
    return FiniteSpace(base.points, dmat, base.basepoint, wr, validate=False)


def _xg_isometric(a: GroupAction, cap: int = DEFAULT_GROUP_CAP) -> FiniteSpace:
    bad = [s for s in a.perms if a.distortion(s) > TOL]
    if bad:
        raise ModeError(f"generators {bad} do not act by isometries")
    d = a.space.dmat
    best = d.copy()
    seen = {a.identity().perm.tobytes()}
    frontier = [a.identity().perm]
    length = 0
    count = 1
    while frontier:
        length += 1
        finite = best[np.isfinite(best)]
        if not np.isinf(best).any() and finite.size and length >= finite.max():
            break  # every later candidate costs at least its word length
        nxt = []
        for perm in frontier:
            for sym in a.sorted_generators():
                q = perm[a.perms[sym]]
                key = q.tobytes()
                if key in seen:
                    continue
                seen.add(key)
                count += 1
                if count > cap:
                    raise NotFiniteGroupError("group closure exceeded cap")
                np.minimum(best, d[:, q] + length, out=best)
                nxt.append(q)
        frontier = nxt
    return _derived_space(a.space, best)


def _membership_matrix(a: GroupAction, perms: list[np.ndarray]) -> np.ndarray:
    """M[x, y] true iff y = u.x for some u among the given permutations."""
    n = len(a.space.points)
    m = np.zeros((n, n), dtype=bool)
    rows = np.arange(n)
    for p in perms:
        m[rows, p] = True
    return m


def _xg_general(a: GroupAction) -> FiniteSpace:
    n = len(a.space.points)
    s1 = {np.arange(n).tobytes(): np.arange(n)}
    for p in a.perms.values():
        s1[p.tobytes()] = p
    s2 = {}
    for p in s1.values():
        for q in s1.values():
            r = p[q]
            s2[r.tobytes()] = r
    s4 = {}
    for p in s2.values():
        for q in s2.values():
            r = p[q]
            s4[r.tobytes()] = r
    m2 = _membership_matrix(a, list(s2.values()))
    m4 = _membership_matrix(a, list(s4.values()))
    d = a.space.dmat

    # m2 and m4 are symmetric matrices because S is closed under inverses
    link = np.where(m4, 0.0, INF)  # b -> a' allowed when b in S^4.a'
    pair_then_link = minplus(1.0 + d, link)  # one (a_i, b_i) pair, then a link
    inner = closure(pair_then_link)  # zero or more linked pairs
    chains = minplus(inner, 1.0 + d)  # ... then the final pair (a_n, b_n)
    entry = np.where(m2, 0.0, INF)  # x -> a_1 when x in S^2.a_1
    dist = minplus(entry, minplus(chains, entry))  # b_n -> x' when x' in S^2.b_n
    dist = np.minimum(dist, dist.T)
    np.fill_diagonal(dist, 0.0)
    return _derived_space(a.space, dist)


# ---------------------------------------------------------------------------
# orbit metrics for finite groups


def orbit_metric(a: GroupAction, kind: str = "hausdorff", cap: int = DEFAULT_GROUP_CAP):
    """Metric on orbit classes of a finite realized group.

    ``hausdorff`` is the min of the two directed sup-inf distances (the
    default), ``hausdorff_classical`` the usual max variant, and ``min``
    the smallest distance between orbit representatives; ``min``
    additionally requires an isometric action.  Orbit classes are labelled
    by their smallest member.

    Returns ``(FiniteSpace over labels, point -> label mapping)``.
    """
    if kind not in ("hausdorff", "hausdorff_classical", "min"):
        raise ParameterError(f"unknown orbit metric kind {kind!r}")
    if kind == "min" and not a.is_isometric():
        raise ModeError("the min orbit metric requires an isometric action")
    a.realized_group(cap)  # raises if the closure is not finite within cap

    sp = a.space
    from .lscore import UnionFind

    uf = UnionFind(range(len(sp.points)))
    for perm in a.perms.values():
        for i in range(len(sp.points)):
            uf.union(i, int(perm[i]))
    orbits = uf.groups()
    orbits.sort(key=lambda g: _sort_key(min((sp.points[i] for i in g), key=_sort_key)))
    labels = [min((sp.points[i] for i in g), key=_sort_key) for g in orbits]
    to_label = {}
    for lab, g in zip(labels, orbits):
        for i in g:
            to_label[sp.points[i]] = lab

    k = len(orbits)
    out = np.zeros((k, k))
    idx = [np.fromiter(g, dtype=np.intp) for g in orbits]
    for i in range(k):
        for j in range(i + 1, k):
            block = sp.dmat[np.ix_(idx[i], idx[j])]
            if kind == "min":
                val = block.min()
            else:
                forward = block.min(axis=1).max()  # sup over [x] of inf over [y]
                backward = block.min(axis=0).max()
                val = min(forward, backward) if kind == "hausdorff" else max(forward, backward)
            out[i, j] = out[j, i] = val
    base_label = to_label[sp.basepoint]
    space = FiniteSpace(
        labels,
        out,
        base_label,
        _max_finite_from(out, labels.index(base_label)),
        validate=False,
    )
    return space, to_label


def _max_finite_from(dmat, i) -> float:
    row = dmat[i]
    finite = row[np.isfinite(row)]
    return float(finite.max()) if finite.size else 0.0


# ---------------------------------------------------------------------------
# quotient pseudometrics along a fiber map


def quotient_pseudometric(
    space: FiniteSpace,
    fiber_map: Mapping | Callable,
    variant: str = "chain",
) -> FiniteSpace:
    """Quotient metric on fiber labels.

    ``classical`` is the infimum over fiber-linked chains of
    ``sum d_X(a_i, b_i)`` (a pseudometric in general); ``chain`` charges
    an extra 1 per chain link, ``n + sum d_X(a_i, b_i)``, and is always a
    metric.  Both reduce to shortest paths over the label graph whose edge
    weight is the smallest distance between two fibers.
    """
    if variant not in ("classical", "chain"):
        raise ParameterError(f"unknown quotient variant {variant!r}")
    get = fiber_map.__getitem__ if isinstance(fiber_map, Mapping) else fiber_map
    try:
        assign = [get(p) for p in space.points]
    except KeyError as exc:
        raise ParameterError(f"fiber map is not total: missing {exc.args[0]!r}") from None
    labels = sorted(set(assign), key=_sort_key)
    lab_index = {l: i for i, l in enumerate(labels)}
    fibers = [[] for _ in labels]
    for i, lab in enumerate(assign):
        fibers[lab_index[lab]].append(i)
    k = len(labels)
    w = np.full((k, k), INF)
    for i in range(k):
        for j in range(i, k):
            block = space.dmat[np.ix_(fibers[i], fibers[j])]
            w[i, j] = w[j, i] = block.min()
    np.fill_diagonal(w, 0.0)
    if variant == "chain":
        edges = w + 1.0
        np.fill_diagonal(edges, 0.0)
    else:
        edges = w
    dist = closure(edges)
    base_label = assign[space.index[space.basepoint]]
    return FiniteSpace(
        labels,
        dist,
        base_label,
        _max_finite_from(dist, lab_index[base_label]),
        validate=False,
    )
