import numpy as np
import pytest
from scipy import sparse

import coarselab as cl
from coarselab.errors import NotDecomposableError, ParameterError, PreconditionError
from coarselab.invariants import HOLDS


@pytest.fixture(scope="module")
def z101():
    return cl.segment_space(-50, 50)


@pytest.fixture(scope="module")
def neg101(z101):
    return cl.negation_action(z101)


def random_band_operator(space, rng, band=lambda x, y: abs(x - y) <= 1 or abs(x + y) <= 1):
    entries = []
    for x in space.points:
        for y in space.points:
            if band(x, y) and rng.random() < 0.4:
                entries.append((x, y, complex(rng.normal(), rng.normal())))
    return cl.BandOperator.from_entries(space, entries)


# ---------------------------------------------------------------------------
# propagation


def test_propagation_examples(z101, neg101):
    diag = cl.BandOperator.from_entries(z101, [(x, x, 1.0) for x in z101.points])
    assert cl.propagation(diag) == 0.0

    tri = cl.BandOperator.from_entries(
        z101,
        [(x, y, 1.0) for x in z101.points for y in z101.points if abs(x - y) <= 1],
    )
    assert cl.propagation(tri) == 1.0

    mg = cl.translation_operator(neg101, neg101.generator("gamma"))
    assert cl.propagation(mg) == 100.0  # the pair (-50, 50)
    dxg = cl.xg_metric(neg101, "isometric")
    assert cl.propagation(mg, dxg) <= 1.0


def test_propagation_needs_matching_points(z101, neg101):
    other = cl.segment_space(0, 10)
    op = cl.BandOperator.from_entries(z101, [(0, 0, 1.0)])
    with pytest.raises(ParameterError):
        cl.propagation(op, other)


# ---------------------------------------------------------------------------
# translation operators


def test_translation_operator_identities(z101, neg101):
    e, gamma = neg101.identity(), neg101.generator("gamma")
    me = cl.translation_operator(neg101, e)
    n = len(z101.points)
    assert (me.mat != sparse.identity(n, format="csr")).nnz == 0

    mg = cl.translation_operator(neg101, gamma)
    assert ((mg.mat @ mg.mat) != me.mat).nnz == 0  # gamma squared is e

    t = cl.translation_action(z101)
    mt = cl.translation_operator(t, t.generator("t"))
    mtinv = cl.translation_operator(t, t.generator("t_inv"))
    assert (mt.adjoint().mat != mtinv.mat).nnz == 0


def test_translation_operator_is_multiplicative(z101):
    t = cl.translation_action(z101)
    rng = np.random.default_rng(2)
    for _ in range(10):
        w1 = ["t"] * rng.integers(0, 4) + ["t_inv"] * rng.integers(0, 4)
        w2 = ["t"] * rng.integers(0, 4)
        g, h = t.element(w1), t.element(w2)
        lhs = cl.translation_operator(t, g).mat @ cl.translation_operator(t, h).mat
        rhs = cl.translation_operator(t, t.compose(g, h)).mat
        assert (lhs != rhs).nnz == 0


# ---------------------------------------------------------------------------
# conjugation


def test_conjugate_by_identity(z101, neg101):
    rng = np.random.default_rng(3)
    op = random_band_operator(z101, rng)
    out = cl.conjugate(op, neg101, neg101.identity())
    assert (out.mat != op.mat).nnz == 0


def test_conjugate_permutes_diagonals(z101, neg101):
    gamma = neg101.generator("gamma")
    diag = cl.BandOperator.from_entries(z101, [(x, x, float(x)) for x in z101.points])
    out = cl.conjugate(diag, neg101, gamma)
    for x in z101.points:
        assert out.entry(x, x) == complex(-x)  # value moved from gamma^-1 x


def test_conjugate_is_an_action(z101):
    t = cl.translation_action(z101)
    rng = np.random.default_rng(4)
    op = random_band_operator(z101, rng)
    g, h = t.element(["t", "t"]), t.element(["t_inv"])
    lhs = cl.conjugate(op, t, t.compose(g, h))
    rhs = cl.conjugate(cl.conjugate(op, t, h), t, g)
    assert (lhs.mat != rhs.mat).nnz == 0


# ---------------------------------------------------------------------------
# decomposition


def test_decompose_diagonal_with_identity_only(z101, neg101):
    diag = cl.BandOperator.from_entries(z101, [(x, x, 2.0) for x in z101.points])
    dec = cl.decompose(diag, neg101, 0.0, [neg101.identity()])
    assert set(dec.terms) == {neg101.identity()}
    assert dec.recombination_defect() == 0.0


def test_decompose_flip_operator_at_radius_zero(z101, neg101):
    e, gamma = neg101.identity(), neg101.generator("gamma")
    mg = cl.translation_operator(neg101, gamma)
    # away from 0 each support pair (-y, y) matches only gamma; with gamma
    # preferred the flip term is exactly the identity matrix
    dec = cl.decompose(mg, neg101, 0.0, [e, gamma], order=[gamma, e])
    assert set(dec.terms) == {gamma}
    n = len(z101.points)
    assert (dec.terms[gamma].mat != sparse.identity(n, format="csr")).nnz == 0
    # the default order gives the tie at 0 to the identity element instead
    dec2 = cl.decompose(mg, neg101, 0.0, [e, gamma])
    assert dec2.terms[e].support() == frozenset({(0, 0)})
    assert dec2.recombination_defect() == 0.0


def test_decompose_random_operators_recombine_exactly(z101, neg101):
    e, gamma = neg101.identity(), neg101.generator("gamma")
    rng = np.random.default_rng(8)
    for _ in range(20):
        op = random_band_operator(z101, rng)
        dec = cl.decompose(op, neg101, 1.0, [e, gamma])
        assert dec.recombination_defect() == 0.0
        for term in dec.terms.values():
            assert cl.propagation(term) <= 1.0


def test_decompose_error_names_the_uncovered_pair(z101, neg101):
    op = cl.BandOperator.from_entries(z101, [(-30, 30, 1.0)])
    with pytest.raises(NotDecomposableError) as err:
        cl.decompose(op, neg101, 1.0, [neg101.identity()])
    assert err.value.pair == (-30, 30)


def test_decompose_order_must_enumerate_f(z101, neg101):
    op = cl.BandOperator.from_entries(z101, [(0, 0, 1.0)])
    with pytest.raises(ParameterError):
        cl.decompose(op, neg101, 0.0, [neg101.identity()], order=[neg101.generator("gamma")])


# ---------------------------------------------------------------------------
# uniqueness up to finite corrections


def test_uniqueness_defect_of_identical_decompositions(z101, neg101):
    e, gamma = neg101.identity(), neg101.generator("gamma")
    rng = np.random.default_rng(21)
    op = random_band_operator(z101, rng)
    dec = cl.decompose(op, neg101, 1.0, [e, gamma])
    diffs, verdict = cl.uniqueness_defect(dec, dec)
    assert all(not s for s in diffs.values())
    assert verdict.status == HOLDS


def test_uniqueness_defect_between_tie_breakings(z101, neg101):
    e, gamma = neg101.identity(), neg101.generator("gamma")
    singles = cl.Family.singletons(z101)
    K, _ = cl.separation_bound(neg101, [e, gamma], singles, cl.ball_cover(z101, 1))
    rng = np.random.default_rng(22)
    for _ in range(10):
        op = random_band_operator(z101, rng)
        d1 = cl.decompose(op, neg101, 1.0, [e, gamma])
        d2 = cl.decompose(op, neg101, 1.0, [e, gamma], order=[gamma, e])
        diffs, verdict = cl.uniqueness_defect(d1, d2)
        assert verdict.status == HOLDS
        for supp in diffs.values():
            for (x, y) in supp:
                assert x in K and y in K


def test_uniqueness_defect_preconditions(z101, neg101):
    e, gamma = neg101.identity(), neg101.generator("gamma")
    op1 = cl.BandOperator.from_entries(z101, [(0, 0, 1.0)])
    op2 = cl.BandOperator.from_entries(z101, [(1, 1, 1.0)])
    d1 = cl.decompose(op1, neg101, 0.0, [e, gamma])
    d2 = cl.decompose(op2, neg101, 0.0, [e, gamma])
    with pytest.raises(PreconditionError):
        cl.uniqueness_defect(d1, d2)
    d3 = cl.decompose(op1, neg101, 0.0, [e])
    with pytest.raises(PreconditionError):
        cl.uniqueness_defect(d1, d3)


# ---------------------------------------------------------------------------
# the covariance identity


def test_homomorphism_check_trivial_cases(z101, neg101):
    e = neg101.identity()
    ident = cl.BandOperator.from_entries(z101, [(x, x, 1.0) for x in z101.points])
    assert cl.homomorphism_check(ident, ident, neg101, e, e)
    gamma = neg101.generator("gamma")
    assert cl.homomorphism_check(ident, ident, neg101, gamma, gamma)


def test_homomorphism_check_random(z101, neg101):
    rng = np.random.default_rng(31)
    gamma, e = neg101.generator("gamma"), neg101.identity()
    t = cl.translation_action(z101)
    for _ in range(20):
        op1 = random_band_operator(z101, rng)
        op2 = random_band_operator(z101, rng)
        assert cl.homomorphism_check(op1, op2, neg101, gamma, gamma)
        assert cl.homomorphism_check(op1, op2, neg101, gamma, e)
        g = t.element(["t"] * rng.integers(0, 4))
        h = t.element(["t_inv"] * rng.integers(0, 4))
        assert cl.homomorphism_check(op1, op2, t, g, h)


# ---------------------------------------------------------------------------
# operators bounded in the collapsed metric decompose


def word_ball(action, radius):
    """All elements of word length at most radius, by breadth-first search."""
    out = {action.identity().core_key(): action.identity()}
    frontier = [action.identity()]
    for _ in range(int(radius)):
        nxt = []
        for g in frontier:
            for s in action.sorted_generators():
                h = action.compose(g, action.generator(s))
                if h.core_key() not in out:
                    out[h.core_key()] = h
                    nxt.append(h)
        frontier = nxt
    return list(out.values())


def test_collapsed_propagation_implies_decomposable(z101, neg101):
    # an operator with small propagation in the collapsed metric always
    # splits over the word ball of that radius: the minimizing element of
    # the collapsed distance certifies the class membership
    dxg = cl.xg_metric(neg101, "isometric")
    rng = np.random.default_rng(41)
    P = 3.0
    entries = []
    for x in z101.points:
        for y in z101.points:
            if dxg.dist(x, y) <= P and rng.random() < 0.2:
                entries.append((x, y, complex(rng.normal(), 0)))
    op = cl.BandOperator.from_entries(z101, entries)
    F = word_ball(neg101, P)
    dec = cl.decompose(op, neg101, P, F)
    assert dec.recombination_defect() == 0.0
    for term in dec.terms.values():
        assert cl.propagation(term) <= P
