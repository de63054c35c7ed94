"""Windowed verification of coarse invariants.

Asymptotic definitions quantify over unbounded sets, so a finite window
can never certify them outright.  Every check here therefore returns a
:class:`WindowVerdict`: ``holds_on_window`` when the data inside the
certified core behaves as the infinite statement predicts, ``fails``
with a concrete counterexample from the core, and ``inconclusive`` when
the window is too small to say anything.  Reports always carry the
certified radius they were computed at.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .action import GroupAction, GroupElement, orbit_family, translate_family
from .errors import ParameterError, PreconditionError
from .lscore import (
    INF,
    Family,
    FiniteSpace,
    co_membership_matrix,
    mesh,
    star,
    u_components,
)

HOLDS = "holds_on_window"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class WindowVerdict:
    """Outcome of a windowed check plus the evidence it rests on."""

    status: str
    witness: Mapping[str, Any] = field(default_factory=dict)

    def holds(self) -> bool:
        return self.status == HOLDS

    def failed(self) -> bool:
        return self.status == FAILS


@dataclass(frozen=True)
class DisplacementProfile:
    """Rows (radius r, min displacement over points at base distance >= r)."""

    rows: tuple


# ---------------------------------------------------------------------------
# coarse discontinuity


def discontinuity_profile(a: GroupAction, g: GroupElement, radii: Sequence[float]):
    """Displacement profile of a group element and per-radius verdicts.

    For each radius R the set ``K_R = {x : d(x, g.x) < R}`` is computed;
    the window certifies discontinuity at scale R when K_R sits inside the
    ball of radius ``window_radius - R`` around the basepoint, since only
    there is the displacement of every farther point trustworthy.
    """
    if g.is_identity_on_core():
        raise PreconditionError("discontinuity is quantified over non-identity elements")
    sp = a.space
    n = len(sp.points)
    disp = sp.dmat[np.arange(n), g.perm]
    bd = sp.base_distances()

    rows = []
    for r in sorted(set(float(r) for r in radii)):
        m = bd >= r
        if m.any():
            rows.append((r, float(disp[m].min())))
    profile = DisplacementProfile(tuple(rows))

    verdicts = {}
    for r in radii:
        r = float(r)
        if r > sp.window_radius:
            verdicts[r] = WindowVerdict(
                INCONCLUSIVE,
                {"reason": "radius exceeds the certified window", "R": r},
            )
            continue
        k_idx = np.flatnonzero(disp < r)
        bound = sp.window_radius - r
        escapers = [sp.points[i] for i in k_idx if bd[i] > bound]
        k_set = sorted((sp.points[i] for i in k_idx), key=lambda p: (type(p).__name__, p))
        if escapers:
            verdicts[r] = WindowVerdict(
                FAILS,
                {
                    "R": r,
                    "K": k_set,
                    "bound": bound,
                    "small_displacement_far_out": escapers[:10],
                },
            )
        else:
            verdicts[r] = WindowVerdict(HOLDS, {"R": r, "K": k_set, "bound": bound})
    return profile, verdicts


# ---------------------------------------------------------------------------
# the separation bound behind unique identification


def _dedupe_elements(elements: Sequence[GroupElement]) -> list[GroupElement]:
    best: dict[bytes, GroupElement] = {}
    for g in elements:
        k = g.core_key()
        if k not in best or (len(g.word), g.word) < (len(best[k].word), best[k].word):
            best[k] = g
    return sorted(best.values(), key=lambda g: (len(g.word), g.word))


def separation_bound(
    a: GroupAction, F: Sequence[GroupElement], u: Family, v: Family
):
    """Smallest basepoint ball K outside which distinct elements of F
    separate pairs: for x, y not in K that are co-contained in a member of
    u, no pair {g1.x, g2.y} with g1 != g2 in F lies in a member of v.

    Returns ``(K, verdict)``.  K is the smallest basepoint ball containing
    every point of every violating pair, so the separation condition is
    re-checkable by scanning all pairs outside K, which is exactly its
    definition.  The verdict fails when violating pairs persist within a
    mesh margin of the window boundary, the window-scale signature of an
    action that is not coarsely discontinuous at these scales.
    """
    sp = a.space
    els = _dedupe_elements(F)
    cu = co_membership_matrix(u, sp)
    cv = co_membership_matrix(v, sp)
    n = len(sp.points)
    viol = np.zeros((n, n), dtype=bool)
    for g1 in els:
        for g2 in els:
            if g1.core_key() == g2.core_key():
                continue
            viol |= cu & cv[g1.perm][:, g2.perm]
    if not viol.any():
        return frozenset(), WindowVerdict(HOLDS, {"violations": 0, "radius": None})

    endpoints = np.flatnonzero(viol.any(axis=0) | viol.any(axis=1))
    bd = sp.base_distances()
    r_k = float(bd[endpoints].max())
    k_set = frozenset(sp.points[i] for i in np.flatnonzero(bd <= r_k))
    margin = max(mesh(u, sp), mesh(v, sp))
    far = int(endpoints[int(np.argmax(bd[endpoints]))])
    partner = int(np.flatnonzero(viol[far] | viol[:, far])[0])
    witness = {
        "radius": r_k,
        "violating_pairs": int(viol.sum()) // 2,
        "farthest_pair": [sp.points[far], sp.points[partner]],
    }
    if r_k <= sp.window_radius - margin:
        return k_set, WindowVerdict(HOLDS, witness)
    return k_set, WindowVerdict(FAILS, witness)


# ---------------------------------------------------------------------------
# coarse one-endedness


def one_ended_check(s: FiniteSpace, u: Family, hole_radii: Sequence[float]):
    """For each radius r, search for the smallest r' >= r whose complement
    inside the certified core is chain-connected at scale u.

    Complements are only trusted up to two mesh lengths short of the core
    boundary; a complement that stays disconnected all the way out is a
    failure, with sample points from two components as the counterexample.
    """
    u.validate_over(s)
    m = mesh(u, s)
    margin = 2.0 * m
    bd = s.base_distances()
    limit = s.window_radius - margin
    out = {}
    for r in hole_radii:
        r = float(r)
        if r > limit:
            out[r] = WindowVerdict(
                INCONCLUSIVE,
                {"r": r, "reason": "no candidate radius fits inside the core margin"},
            )
            continue
        candidates = [r] + sorted(
            float(x) for x in np.unique(bd[(bd > r) & (bd <= limit) & np.isfinite(bd)])
        )
        verdict = None
        last_components = None
        for rp in candidates:
            comp_pts = [s.points[i] for i in np.flatnonzero((bd > rp) & (bd <= s.window_radius))]
            if not comp_pts:
                continue
            comps = u_components(comp_pts, u)
            if len(comps) <= 1:
                verdict = WindowVerdict(
                    HOLDS, {"r": r, "r_prime": rp, "complement_size": len(comp_pts)}
                )
                break
            last_components = (rp, comps)
        if verdict is None:
            if last_components is None:
                verdict = WindowVerdict(
                    INCONCLUSIVE, {"r": r, "reason": "complement empty at every candidate"}
                )
            else:
                rp, comps = last_components
                samples = [sorted(c, key=lambda p: (type(p).__name__, p))[0] for c in comps]
                verdict = WindowVerdict(
                    FAILS,
                    {
                        "r": r,
                        "last_radius": rp,
                        "component_count": len(comps),
                        "separated_points": samples,
                    },
                )
        out[r] = verdict
    return out


# ---------------------------------------------------------------------------
# coarse lightness


def coarsely_light_check(
    domain: FiniteSpace,
    codomain: FiniteSpace,
    f: Mapping,
    u: Family,
    v: Family,
):
    """Max diameter of chain components of member preimages.

    A single window cannot witness uniform boundedness, so the verdict is
    inconclusive and carries the raw maximum; use
    :func:`coarsely_light_growth` over nested windows for a growth verdict.
    """
    _validate_point_map(domain, codomain, f)
    u.validate_over(domain)
    v.validate_over(codomain)
    best = 0.0
    detail = []
    for mem in v.members:
        pre = [p for p in domain.points if f[p] in mem]
        if not pre:
            continue
        comps = u_components(pre, u)
        d = max(domain.diameter(c) for c in comps)
        detail.append((len(pre), len(comps), d))
        best = max(best, d)
    verdict = WindowVerdict(
        INCONCLUSIVE,
        {"max_component_diameter": best, "members_scanned": len(detail)},
    )
    return best, verdict


def coarsely_light_growth(cases: Sequence[tuple]):
    """Compare max component diameters across an ascending run of windows.

    ``cases`` holds (domain, codomain, f, u, v) tuples ordered by window
    size.  Strict growth across every step fails; no net growth holds;
    anything else (including a single case) is inconclusive.
    """
    diams = [coarsely_light_check(*case)[0] for case in cases]
    if len(diams) < 2:
        return diams, WindowVerdict(INCONCLUSIVE, {"diameters": diams})
    if all(b > a for a, b in zip(diams, diams[1:])):
        return diams, WindowVerdict(FAILS, {"diameters": diams})
    if diams[-1] <= diams[0]:
        return diams, WindowVerdict(HOLDS, {"diameters": diams})
    return diams, WindowVerdict(INCONCLUSIVE, {"diameters": diams})


def _validate_point_map(domain, codomain, f):
    for p in domain.points:
        if p not in f:
            raise ParameterError(f"point map is not total: missing {p!r}")
        if f[p] not in codomain.index:
            raise ParameterError(f"point map sends {p!r} outside the codomain")


# ---------------------------------------------------------------------------
# weak coarse quotient certificates


@dataclass(frozen=True)
class WeakQuotientResult:
    verdict: WindowVerdict
    rows: tuple = ()
    chains: Mapping[float, Any] = field(default_factory=dict)


def weak_quotient_certificate(
    domain: FiniteSpace,
    codomain: FiniteSpace,
    f: Mapping,
    T: float,
    radii: Sequence[float],
    n_budget: int,
    S_budget: float,
) -> WeakQuotientResult:
    """Search for the chain data certifying a map as a weak coarse quotient.

    For each R the certificate needs an n(R) and S(R) such that every
    codomain pair at distance <= R is joined by a chain of at most n(R)
    domain pairs, each of length <= S(R), with consecutive images and the
    endpoints within T.  The search minimizes n first, then S.  A map that
    is not coarsely surjective at tolerance T fails immediately with an
    uncovered point.
    """
    if n_budget < 1 or S_budget < 0 or T < 0:
        raise ParameterError("budgets and tolerance must be positive")
    _validate_point_map(domain, codomain, f)
    nx, ny = len(domain.points), len(codomain.points)
    fidx = np.array([codomain.index[f[p]] for p in domain.points])
    dy = codomain.dmat
    dx = domain.dmat

    # coarse surjectivity at tolerance T
    to_image = dy[:, fidx]  # [y, x] = d_Y(y, f(x))
    nearest = to_image.min(axis=1)
    if nearest.max() > T:
        worst = int(np.argmax(nearest))
        return WeakQuotientResult(
            WindowVerdict(
                FAILS,
                {
                    "reason": "not coarsely surjective at tolerance T",
                    "uncovered_point": codomain.points[worst],
                    "distance_to_image": float(nearest[worst]),
                },
            )
        )

    start = to_image <= T  # [y, a]: a can open a chain for y
    img_close = dy[fidx][:, fidx] <= T  # [b, a']: images within T

    s_candidates = sorted(set(map(float, dx[np.isfinite(dx) & (dx <= S_budget)].ravel())))
    if not s_candidates:
        s_candidates = [0.0]

    def pair_cover(n_pairs: int, s: float) -> np.ndarray:
        """Boolean [y, y'] matrix of pairs joined within (n_pairs, s)."""
        hop = dx <= s
        fin = (hop.astype(np.uint8) @ start.T.astype(np.uint8)) > 0  # [a, y']
        step = (hop.astype(np.uint8) @ img_close.astype(np.uint8)) > 0  # [a, a']
        reach = start.copy()
        done = (reach.astype(np.uint8) @ fin.astype(np.uint8)) > 0
        for _ in range(n_pairs - 1):
            if done.all():
                break
            reach = (reach.astype(np.uint8) @ step.astype(np.uint8)) > 0
            done |= (reach.astype(np.uint8) @ fin.astype(np.uint8)) > 0
        return done

    rows = []
    chains = {}
    for r in radii:
        r = float(r)
        need = dy <= r
        cover_full = pair_cover(n_budget, float(S_budget))
        if not (need <= cover_full).all():
            bad = np.argwhere(need & ~cover_full)[0]
            return WeakQuotientResult(
                WindowVerdict(
                    FAILS,
                    {
                        "R": r,
                        "failing_pair": [codomain.points[bad[0]], codomain.points[bad[1]]],
                        "n_budget": n_budget,
                        "S_budget": float(S_budget),
                    },
                ),
                tuple(rows),
                chains,
            )
        n_r = next(
            n for n in range(1, n_budget + 1) if (need <= pair_cover(n, float(S_budget))).all()
        )
        lo, hi = 0, len(s_candidates) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if (need <= pair_cover(n_r, s_candidates[mid])).all():
                hi = mid
            else:
                lo = mid + 1
        s_r = s_candidates[lo]
        rows.append((r, n_r, s_r))
        chains[r] = _witness_chain(domain, codomain, f, fidx, start, img_close, dx, dy, r, n_r, s_r)
    return WeakQuotientResult(
        WindowVerdict(HOLDS, {"T": float(T), "rows": [list(t) for t in rows]}),
        tuple(rows),
        chains,
    )


def _witness_chain(domain, codomain, f, fidx, start, img_close, dx, dy, r, n_r, s_r):
    """A stored chain for the farthest pair within distance r, found by
    breadth-first layers with parent links."""
    masked = np.where(dy <= r, dy, -INF)
    yi, yj = np.unravel_index(int(np.argmax(masked)), dy.shape)
    hop = dx <= s_r
    layers = [np.flatnonzero(start[yi])]
    parents = []
    found = None
    for k in range(n_r):
        for aa in layers[-1]:
            bs = np.flatnonzero(hop[aa] & start[yj])
            if bs.size:
                found = (k, int(aa), int(bs[0]))
                break
        if found:
            break
        nxt = {}
        for aa in layers[-1]:
            for b in np.flatnonzero(hop[aa]):
                for a2 in np.flatnonzero(img_close[b]):
                    if a2 not in nxt:
                        nxt[a2] = (int(aa), int(b))
        parents.append(nxt)
        layers.append(np.fromiter(nxt.keys(), dtype=int) if nxt else np.array([], dtype=int))
    if found is None:
        return None
    k, a_last, b_last = found
    pairs = [(domain.points[a_last], domain.points[b_last])]
    a = a_last
    for layer in reversed(parents[:k]):
        pa, pb = layer[a]
        pairs.insert(0, (domain.points[pa], domain.points[pb]))
        a = pa
    return {
        "pair": [codomain.points[int(yi)], codomain.points[int(yj)]],
        "chain": pairs,
    }


# ---------------------------------------------------------------------------
# identifying a group element from a close self-map


@dataclass(frozen=True)
class IdentificationResult:
    status: str  # "identified" | "ambiguous"
    element: GroupElement | None
    candidates: tuple
    exceptional: frozenset
    K: frozenset
    K_prime: frozenset
    one_ended: bool
    verdict: WindowVerdict


def identify_group_element(
    f: Mapping,
    a: GroupAction,
    v: Family,
    F: Sequence[GroupElement],
    u: Family,
) -> IdentificationResult:
    """Recover which group element a close-to-identity self-map acts by.

    The candidate set of each point x collects the elements h of F.F^-1
    carrying x next to f(x) at the coarsened scale; outside the separation
    ball K at most one candidate survives, and chain-connectivity outside
    a slightly larger ball K' forces all surviving candidates to agree.
    On windows whose complement splits into several chain components the
    components vote and must be unanimous; otherwise the result is
    ambiguous.  The exceptional set collects the core points where f
    differs pointwise from the recovered element's action.
    """
    sp = a.space
    n = len(sp.points)
    _validate_point_map(sp, sp, f)
    fidx = np.array([sp.index[f[p]] for p in sp.points])

    f_els = _dedupe_elements(F)
    if not f_els:
        raise PreconditionError("F must contain at least one element")
    prods = []
    for g in f_els:
        for h in f_els:
            prods.append(a.compose(g, a.inverse(h)))
    ff = _dedupe_elements(prods)

    # closeness of f to the identity at scale st(v, F-orbits), checked first
    of = orbit_family(a, f_els)
    witness_family = star(v, of, sp)
    cw = co_membership_matrix(witness_family, sp)
    missed = np.flatnonzero(~cw[np.arange(n), fidx])
    if missed.size:
        raise PreconditionError(
            f"closeness witness fails at point {sp.points[int(missed[0])]!r}"
        )

    # internal scales: u folded into v keeps chain steps inside the
    # separation pattern without extra preconditions
    v_star = _dedupe_family(Family(tuple(u.members) + tuple(v.members)))
    v_prime = _dedupe_family(
        Family(
            tuple(
                m
                for h in ff
                for m in translate_family(a, h, v_star).members
            )
        )
    )
    cvp = co_membership_matrix(v_prime, sp)

    alpha = {h.core_key(): cvp[h.perm, fidx] for h in ff}  # [x] -> h candidate?

    # pattern co-membership for st(f(u), v'): p is in st(f(U), v') iff p is
    # v'-co-contained with some image point of U
    img = np.zeros((len(u.members), n), dtype=np.float32)
    for k, mem in enumerate(u.members):
        img[k, [fidx[sp.index[p]] for p in mem]] = 1.0
    st_ind = (img @ cvp.astype(np.float32)) > 0.5  # [U, p]
    cp = (st_ind.T.astype(np.float32) @ st_ind.astype(np.float32)) > 0.5

    cu = co_membership_matrix(v_star, sp)
    viol = np.zeros((n, n), dtype=bool)
    for g1 in ff:
        for g2 in ff:
            if g1.core_key() == g2.core_key():
                continue
            viol |= cu & cp[g1.perm][:, g2.perm]
    bd = sp.base_distances()
    if viol.any():
        endpoints = np.flatnonzero(viol.any(axis=0) | viol.any(axis=1))
        r_k = float(bd[endpoints].max())
    else:
        r_k = -1.0
    k_mask = bd <= r_k
    k_set = frozenset(sp.points[i] for i in np.flatnonzero(k_mask))

    # grow K' until the complement is chain-connected at scale u; when no
    # radius connects it (a multi-ended window), keep the smallest ball and
    # let the components vote
    m_u = mesh(u, sp)
    limit = sp.window_radius - 2.0 * m_u
    adj = sparse.csr_matrix(co_membership_matrix(u, sp))
    candidates_r = [r_k] + sorted(
        float(x) for x in np.unique(bd[(bd > r_k) & (bd <= limit) & np.isfinite(bd)])
    )
    r_prime = r_k
    one_ended = False
    comp_labels = None
    for rp in candidates_r:
        mask = (bd > rp) & (bd <= sp.window_radius)
        if not mask.any():
            break
        idx = np.flatnonzero(mask)
        ncomp, labels = connected_components(adj[idx][:, idx], directed=False)
        if comp_labels is None:
            r_prime, comp_labels = rp, (idx, labels)
        if ncomp <= 1:
            r_prime, one_ended, comp_labels = rp, True, (idx, labels)
            break
    if comp_labels is None:
        return IdentificationResult(
            "ambiguous",
            None,
            tuple(ff),
            frozenset(),
            k_set,
            k_set,
            False,
            WindowVerdict(INCONCLUSIVE, {"reason": "no usable complement in the window"}),
        )
    idx, labels = comp_labels
    kp_mask = (bd <= r_prime)
    kp_set = frozenset(sp.points[i] for i in np.flatnonzero(kp_mask))

    # per-component vote, unanimity required
    votes = []
    for c in range(labels.max() + 1):
        pts = idx[labels == c]
        seen = [h for h in ff if alpha[h.core_key()][pts].any()]
        if seen:
            votes.append(seen)
    flat = {h.core_key() for vs in votes for h in vs}
    if not votes or len(flat) != 1:
        cands = _dedupe_elements([h for vs in votes for h in vs]) or ff
        return IdentificationResult(
            "ambiguous",
            None,
            tuple(cands),
            frozenset(),
            k_set,
            kp_set,
            one_ended,
            WindowVerdict(
                FAILS,
                {
                    "reason": "candidates do not stabilize",
                    "candidates": ["*".join(h.word) or "e" for h in cands],
                },
            ),
        )
    key = flat.pop()
    h = next(g for g in ff if g.core_key() == key)

    core_mask = bd <= sp.window_radius
    mism = np.flatnonzero(core_mask & (fidx != h.perm))
    exceptional = frozenset(sp.points[i] for i in mism)
    inside = exceptional <= kp_set
    verdict = WindowVerdict(
        HOLDS if inside else FAILS,
        {
            "element": "*".join(h.word) or "e",
            "exceptional_size": len(exceptional),
            "K_radius": r_k if r_k >= 0 else None,
            "K_prime_radius": r_prime,
            "one_ended": one_ended,
            **(
                {}
                if inside
                else {"escaping": sorted(exceptional - kp_set, key=repr)[:10]}
            ),
        },
    )
    return IdentificationResult(
        "identified", h, (h,), exceptional, k_set, kp_set, one_ended, verdict
    )


def _dedupe_family(fam: Family) -> Family:
    seen = set()
    out = []
    for m in fam.members:
        if m not in seen:
            seen.add(m)
            out.append(m)
    return Family(tuple(out))
