import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hambraid.gf2 import (
    DimensionError,
    GF2Matrix,
    NotAnIsomorphismError,
    Pairing,
    TransversalityError,
    exhaustive_pairings,
    in_span,
    pairing_from_maps,
    random_instance,
    rank_of,
    run_corpus,
    transverse_selection,
    verify_pairing,
)


@st.composite
def matrices(draw, rows=None, cols=None):
    r = rows or draw(st.integers(1, 6))
    c = cols or draw(st.integers(1, 6))
    data = draw(st.lists(st.integers(0, (1 << c) - 1), min_size=r, max_size=r))
    return GF2Matrix(r, c, tuple(data))


@st.composite
def invertible_pairs(draw):
    n = draw(st.integers(1, 5))
    m = draw(st.integers(n, 6))
    F = draw(matrices(m, n))
    G = draw(matrices(n, m))
    assume((G @ F).is_invertible())
    return F, G


def test_basic_linear_algebra():
    ones = GF2Matrix.from_array([[1, 1], [1, 1]])
    assert ones.rank() == 1 and not ones.is_invertible()
    I = GF2Matrix.identity(3)
    assert (I @ I).data == I.data and I.inverse().data == I.data
    assert GF2Matrix.parse(ones.format()).data == ones.data
    with pytest.raises(DimensionError):
        GF2Matrix(2, 2, (1,))
    assert rank_of([0b011, 0b101, 0b110]) == 2
    assert in_span(0b110, [0b011, 0b101]) and not in_span(0b100, [0b011])


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_rank_nullity(A):
    ker = A.kernel_basis()
    assert A.rank() + len(ker) == A.cols
    assert all(A.apply(v) == 0 for v in ker)
    assert A.transpose().rank() == A.rank()


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: matrices(n, n)))
def test_inverse(A):
    if A.is_invertible():
        assert (A @ A.inverse()).data == GF2Matrix.identity(A.rows).data
    else:
        with pytest.raises(ValueError):
            A.inverse()


def test_selection_oracles():
    assert transverse_selection([0b1], [], 1) == (0,)
    assert transverse_selection([0b01], [0b11], 2) == (0,)
    with pytest.raises(TransversalityError):
        transverse_selection([0b01, 0b01], [], 2)
    with pytest.raises(TransversalityError):
        transverse_selection([0b01], [0b01], 2)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6).flatmap(lambda d: st.tuples(st.just(d), st.lists(st.integers(1, (1 << d) - 1),
                                                                           min_size=1, max_size=d))))
def test_selection_is_transverse(case):
    dim, ws = case
    assume(rank_of(ws) == len(ws))
    iota = transverse_selection(ws, [], dim)
    assert len(set(iota)) == len(ws)
    assert all(ws[j] >> iota[j] & 1 for j in range(len(ws)))


def test_pairing_oracles():
    I = GF2Matrix.identity(3)
    p = pairing_from_maps(I, I)
    assert verify_pairing(I, I, p)
    F = GF2Matrix.from_array([[1], [1]])           # v1 -> r1 + r2
    G = GF2Matrix.from_array([[1, 0]])             # r1 -> v1, r2 -> 0
    p = pairing_from_maps(F, G)
    assert p.one_based() == {"f": [1], "g": [1]}
    assert not verify_pairing(F, G, Pairing((1,), (0,)))
    with pytest.raises(NotAnIsomorphismError):
        pairing_from_maps(F, GF2Matrix.zeros(1, 2))


@settings(max_examples=60, deadline=None)
@given(invertible_pairs())
def test_pairing_verifies_and_matches_oracle(pair):
    F, G = pair
    p = pairing_from_maps(F, G)
    assert verify_pairing(F, G, p)
    assert exhaustive_pairings(F, G)


@settings(max_examples=30, deadline=None)
@given(invertible_pairs())
def test_tampering_breaks_verification(pair):
    F, G = pair
    p = pairing_from_maps(F, G)
    n = len(p.f)
    if n >= 2:
        bad_g = (p.g[0],) * n
        assert not verify_pairing(F, G, Pairing(p.f, bad_g))
    assert not verify_pairing(F, G, Pairing(p.f + (0,), p.g))


def test_random_instances_are_valid():
    rng = np.random.default_rng(0)
    for _ in range(20):
        F, G = random_instance(rng, 6)
        assert (G @ F).is_invertible() and F.rows <= 6 and F.cols <= F.rows


def test_small_corpus():
    rep = run_corpus(100, seed=1, max_dim=5)
    assert rep.passed and rep.failures == []
