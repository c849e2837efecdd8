import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hambraid.symbolic import (
    SymbolWord,
    build_Q,
    henon_isotopy,
    henon_orbit,
    primitive_root,
    q_braid_gamma_demo,
    q_position,
    shift_and_decode,
    verify_Q_structure,
)


def test_q_words():
    assert build_Q(4).word == (4, 2, 1, 2, 1, 2, 4, 2, 4, 3, 1, 3, 1, 3, 4, 3)
    assert build_Q(3).word == (3, 2, 1, 2, 1, 2, 3, 2)
    with pytest.raises(ValueError):
        build_Q(2)


@pytest.mark.parametrize("m", [3, 4, 7, 10, 12])
def test_structure_passes(m):
    rep = verify_Q_structure(m)
    assert rep.passed and rep.period == 8 * (m - 2)
    assert len(rep.rows) == 8 * (m - 2)


def test_first_one_of_block_two():
    Q = build_Q(4)
    pos = q_position(4, 2, 1)
    d = shift_and_decode(Q, 0, pos)
    assert (d["V"], d["H"], d["image_H"]) == (1, 2, 4)
    assert Q.in_V(1, pos) and Q.in_H(2, pos) and Q.in_image_H(4, pos)


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 9), st.data())
def test_tampering_is_caught(m, data):
    Q = build_Q(m)
    i = data.draw(st.integers(0, Q.period - 1))
    new = data.draw(st.integers(1, m).filter(lambda a: a != Q.word[i]))
    bad = SymbolWord(m, Q.word[:i] + (new,) + Q.word[i + 1:])
    assert not verify_Q_structure(m, bad).passed


@given(st.lists(st.integers(1, 5), min_size=1, max_size=12), st.integers(-30, 30), st.integers(0, 11))
def test_theta_is_periodic(word, k, pos):
    w = SymbolWord(5, tuple(word))
    assert w.theta(k, pos) == w.theta(k + w.period, pos)
    assert w.shift(w.period) == w


def test_primitive_root():
    assert primitive_root((1, 2, 1, 2)) == (1, 2)
    assert SymbolWord(3, (1, 1, 1)).period == 1
    with pytest.raises(ValueError):
        SymbolWord(3, (4,))


def test_henon_realization_is_coded():
    real = henon_orbit(build_Q(4))
    assert real.coding_ok and real.residual < 1e-9
    braid = henon_isotopy(real)
    assert braid.n == 16
    assert sorted(braid.permutation) == list(range(16))


def test_demo_bound_m4():
    d = q_braid_gamma_demo(4, N=10)
    assert d.holds and d.bound == pytest.approx(math.log(2))
    assert d.braid.n == 16
    with pytest.raises(ValueError):
        q_braid_gamma_demo(7)
