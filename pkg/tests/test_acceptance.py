"""Acceptance suite.

One test per criterion; each prints a single pass line on success (run
with ``pytest tests/test_acceptance.py -v -s`` to see them).  Tolerances
are fixed here and nowhere else: exact equality for integer-valued data,
1e-9 for composite real arithmetic.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

import coarselab as cl
from coarselab.invariants import FAILS, HOLDS
from coarselab.lscore import metric_axiom_violations

from conftest import cycle_space

TOL = 1e-9


def report(n, text):
    print(f"[criterion {n:2d}] PASS  {text}")


@pytest.fixture(scope="module")
def z401():
    return cl.segment_space(-200, 200)


@pytest.fixture(scope="module")
def z801():
    return cl.segment_space(-400, 400)


def random_partition(space, vertices, rng):
    w = rng.random((len(space.points), vertices))
    w /= w.sum(axis=1, keepdims=True)
    return cl.PartitionOfUnity(space, list(range(vertices)), w)


def random_cross_band_operator(space, rng):
    entries = []
    for x in space.points:
        for y in space.points:
            if (abs(x - y) <= 1 or abs(x + y) <= 1) and rng.random() < 0.4:
                entries.append((x, y, complex(rng.normal(), rng.normal())))
    return cl.BandOperator.from_entries(space, entries)


# ---------------------------------------------------------------------------


def test_criterion_1_metric_axiom_suite():
    z101 = cl.segment_space(-50, 50)
    z201 = cl.segment_space(-100, 100)
    neg = cl.negation_action(z201)
    rot = cl.axes_rotation_action(cl.axes_space(3, 40), 3)

    produced = {}
    _, produced["tower"] = cl.tower_metrize([cl.ball_cover(z101, 1)], 6, z101)
    produced["xg isometric"] = cl.xg_metric(neg, "isometric")
    produced["xg general"] = cl.xg_metric(neg, "general")
    for kind in ("hausdorff", "hausdorff_classical", "min"):
        produced[f"orbit {kind} (negation)"] = cl.orbit_metric(neg, kind)[0]
        produced[f"orbit {kind} (rotation)"] = cl.orbit_metric(rot, kind)[0]
    produced["quotient chain"] = cl.quotient_pseudometric(
        cl.segment_space(0, 100), lambda p: p % 5, "chain"
    )
    produced["cone"] = cl.cone_space(cl.ConeSpec(cycle_space(6), (0, 1, 2, 3, 4, 5), lambda t: t))
    produced["box"] = cl.box_space(cl.BoxSpec(moduli=(3, 9, 27)))[0]

    for name, space in produced.items():
        assert len(space) <= 500
        problems = metric_axiom_violations(space, tol=TOL)
        assert problems == [], f"{name}: {problems}"
    report(1, f"symmetry/identity/triangle exact on {len(produced)} constructed metrics")


def test_criterion_2_collapsed_metric_formula(z401):
    neg = cl.negation_action(z401)
    d = cl.xg_metric(neg, "isometric").dmat
    xs = np.array(z401.points, dtype=float)
    expected = np.minimum(np.abs(xs[:, None] - xs[None, :]),
                          np.abs(xs[:, None] + xs[None, :]) + 1.0)
    np.fill_diagonal(expected, 0.0)
    assert np.array_equal(d, expected)

    ray_dist = np.abs(np.abs(xs[:, None]) - np.abs(xs[None, :]))
    assert np.abs(d - ray_dist).max() <= 1.0
    report(2, "collapsed metric equals min(|x-x'|, |x+x'|+1); within 1 of the ray metric")


def test_criterion_3_discontinuity_dichotomy():
    n = 100
    z = cl.segment_space(-n, n)
    neg = cl.negation_action(z)
    gamma = neg.generator("gamma")
    radii = list(range(1, n // 2 + 1))
    _, verdicts = cl.discontinuity_profile(neg, gamma, radii)
    for r in radii:
        v = verdicts[float(r)]
        assert v.status == HOLDS, r
        rad = (r + 1) // 2 - 1  # exact from 2|x| >= R
        assert v.witness["K"] == list(range(-rad, rad + 1))

    for m in (2, 5, 50, 100):
        zz = cl.segment_space(-m, m)
        t = cl.translation_action(zz)
        _, tv = cl.discontinuity_profile(t, t.generator("t"), [2.0])
        assert tv[2.0].status == FAILS, m
    report(3, "negation certified for R <= N/2 with exact K_R; translation fails at R=2")


def test_criterion_4_one_endedness():
    ray = cl.segment_space(0, 200)
    u = cl.ball_cover(ray, 1)
    margin = 200 - 2 * 2
    out = cl.one_ended_check(ray, u, [1.0, 10.0, 100.0, float(margin)])
    assert all(v.status == HOLDS for v in out.values())

    line = cl.segment_space(-200, 200)
    out = cl.one_ended_check(line, cl.ball_cover(line, 1), [1.0, 10.0, 50.0])
    assert all(v.status == FAILS for v in out.values())

    ax = cl.axes_space(3, 100)
    out = cl.one_ended_check(ax, cl.ball_cover(ax, 1), [1.0, 10.0, 50.0])
    assert all(v.status == FAILS for v in out.values())
    assert all(v.witness["component_count"] == 3 for v in out.values())
    report(4, "ray one-ended to the margin; line and tripod fail at every tested radius")


def test_criterion_5_element_recovery(z801):
    neg = cl.negation_action(z801)
    e, gamma = neg.identity(), neg.generator("gamma")
    v = cl.ball_cover(z801, 5)
    ball = [x for x in z801.points if abs(x) <= 5]
    recovered = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        f = {x: -x for x in z801.points}
        for x, y in zip(ball, rng.permutation(ball)):
            f[x] = int(y)
        res = cl.identify_group_element(f, neg, v, [e, gamma], v)
        assert res.status == "identified" and res.element == gamma, seed
        assert res.exceptional <= res.K, seed
        recovered += 1
    assert recovered == 100
    report(5, "100/100 seeded recoveries of the flip, exceptional sets inside the separation ball")


def test_criterion_6_averaging_inequality():
    z = cl.segment_space(-100, 100)
    neg = cl.negation_action(z)
    t = cl.translation_action(z)
    e, gamma = neg.identity(), neg.generator("gamma")
    e_t, step = t.identity(), t.generator("t")
    e_neg = cl.FolnerSet((e, gamma))
    windows = {
        n: cl.FolnerSet(tuple(t.element(["t"] * k) for k in range(n))) for n in (5, 10, 50)
    }
    for n, E in windows.items():
        assert cl.folner_defect(E, step) == Fraction(2, n)

    for seed in range(100):
        rng = np.random.default_rng(1000 + seed)
        phi = random_partition(z, 8, rng)
        psi = cl.folner_average(phi, e_neg, neg)
        for g, h in ((e, gamma), (gamma, e)):
            lhs = np.abs(psi.weights[g.perm] - psi.weights[h.perm]).sum(axis=1)
            eg = {neg.compose(k, g).core_key() for k in e_neg.elements}
            eh = {neg.compose(k, h).core_key() for k in e_neg.elements}
            assert lhs.max() <= len(eg ^ eh) / len(e_neg.elements) + TOL
        for n, E in windows.items():
            psi = cl.folner_average(phi, E, t)
            for g, h in ((e_t, step), (step, e_t)):
                lhs = np.abs(psi.weights[g.perm] - psi.weights[h.perm]).sum(axis=1)
                eg = {t.compose(k, g).core_key() for k in E.elements}
                eh = {t.compose(k, h).core_key() for k in E.elements}
                bound = len(eg ^ eh) / len(E.elements)
                assert lhs.max() <= bound + TOL
                assert bound == float(Fraction(2, n)) or g == h
    report(6, "averaged moves bounded by symmetric-difference defects; defect exactly 2/n")


def test_criterion_7_decomposition_round_trip():
    z = cl.segment_space(-50, 50)
    neg = cl.negation_action(z)
    e, gamma = neg.identity(), neg.generator("gamma")
    K, _ = cl.separation_bound(
        neg, [e, gamma], cl.Family.singletons(z), cl.ball_cover(z, 1)
    )
    for seed in range(100):
        rng = np.random.default_rng(2000 + seed)
        op = random_cross_band_operator(z, rng)
        d1 = cl.decompose(op, neg, 1.0, [e, gamma])
        assert d1.recombination_defect() == 0.0, seed
        d2 = cl.decompose(op, neg, 1.0, [e, gamma], order=[gamma, e])
        assert d2.recombination_defect() == 0.0, seed
        diffs, verdict = cl.uniqueness_defect(d1, d2)
        assert verdict.status == HOLDS, seed
        for supp in diffs.values():
            for (x, y) in supp:
                assert x in K and y in K, seed
    report(7, "100/100 exact recombinations; tie-breaking differences confined to the separation ball")


def test_criterion_8_homomorphism_identity():
    z = cl.segment_space(-50, 50)
    neg = cl.negation_action(z)
    t = cl.translation_action(z)
    for seed in range(100):
        rng = np.random.default_rng(3000 + seed)
        op1 = random_cross_band_operator(z, rng)
        op2 = random_cross_band_operator(z, rng)
        if seed % 2 == 0:
            a = neg
            g = a.generator("gamma") if rng.random() < 0.7 else a.identity()
            h = a.generator("gamma") if rng.random() < 0.7 else a.identity()
        else:
            a = t
            g = a.element(["t"] * int(rng.integers(0, 4)))
            h = a.element(["t_inv"] * int(rng.integers(0, 4)))
        assert cl.homomorphism_check(op1, op2, a, g, h, tol=TOL), seed
    report(8, "covariance identity holds for 100 seeded operator/element samples")


def test_criterion_9_quotient_metric_comparison():
    s = cl.segment_space(0, 100)  # uniformly discrete with constant 1
    d_f = cl.quotient_pseudometric(s, lambda p: p % 5, "classical")
    d_fp = cl.quotient_pseudometric(s, lambda p: p % 5, "chain")
    assert (d_f.dmat <= d_fp.dmat + 1e-12).all()
    assert (d_fp.dmat <= 2.0 * d_f.dmat + TOL).all()
    assert d_fp.dist(0, 1) == 2.0
    report(9, "d_f <= d'_f <= 2 d_f pointwise and d'_f([0],[1]) = 2")


def test_criterion_10_box_space():
    space, action = cl.box_space(cl.BoxSpec(moduli=(3, 9, 27)))
    for li, n in ((1, 3), (2, 9), (3, 27)):
        for a in range(n):
            for b in range(n):
                cyc = min(abs(a - b), n - abs(a - b))
                assert space.dist(f"L{li}:{a}", f"L{li}:{b}") == cyc

    sizes = {1: 3, 2: 9, 3: 27}
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            if i >= j:
                continue
            cross = min(
                space.dist(f"L{i}:{a}", f"L{j}:{b}")
                for a in range(sizes[i])
                for b in range(sizes[j])
            )
            assert cross > i + j, (i, j, cross)

    perm = action.perms["t"]
    assert np.array_equal(space.dmat[perm][:, perm], space.dmat)
    report(10, "cycle metrics exact within levels, set distances exceed i+j, translation isometric")
