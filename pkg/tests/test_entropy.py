import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hambraid.braidword import BraidWord
from hambraid.entropy import (
    FreeGroupEndo,
    artin_action,
    cyclic_reduce,
    free_reduce,
    gamma_estimate,
    generator_action,
    invert,
)

letters = st.lists(st.integers(1, 4).flatmap(lambda i: st.sampled_from([i, -i])), max_size=20)


def braid_words(n=4, size=6):
    return st.lists(st.integers(1, n - 1).flatmap(lambda i: st.sampled_from([i, -i])), max_size=size).map(
        lambda ls: BraidWord(n, tuple(ls)))


@given(letters)
def test_free_reduce_is_reduced_and_idempotent(w):
    r = free_reduce(w)
    assert all(a != -b for a, b in zip(r, r[1:]))
    assert free_reduce(r) == r
    assert free_reduce(w + invert(w)) == []


@given(letters)
def test_cyclic_reduce(w):
    c = cyclic_reduce(w)
    assert len(c) <= len(free_reduce(w))
    if c:
        assert c[0] != -c[-1]


def test_generator_images():
    f = generator_action(2, 1)
    assert f.images == ((1, 2, -1), (1,))
    assert artin_action(BraidWord(3)).is_identity()
    assert artin_action(BraidWord(3, (1, -1))).is_identity()
    assert f.format() == ["x1 -> x1 x2 x1^-1", "x2 -> x1"]


@settings(max_examples=50, deadline=None)
@given(braid_words())
def test_word_and_inverse_cancel(w):
    assert artin_action(w * w.inverse()).is_identity()
    assert artin_action(w.inverse() * w).is_identity()


@settings(max_examples=50, deadline=None)
@given(braid_words(), braid_words())
def test_action_is_compatible_with_concatenation(a, b):
    assert artin_action(a * b) == artin_action(a).then(artin_action(b))


@settings(max_examples=30, deadline=None)
@given(braid_words())
def test_boundary_loop_fixed(w):
    # the product x1 x2 ... xn goes around all punctures and is fixed by every braid
    f = artin_action(w)
    assert f.apply([1, 2, 3, 4]) == [1, 2, 3, 4]


def test_endo_validation():
    with pytest.raises(ValueError):
        FreeGroupEndo(2, ((1,),))
    with pytest.raises(ValueError):
        FreeGroupEndo(2, ((3,), (1,)))


def test_golden_rate():
    est = gamma_estimate(BraidWord(3, (1, -2)), 18)
    assert est.rate == pytest.approx(math.log((3 + math.sqrt(5)) / 2), abs=0.01)
    assert not est.saturated
    assert "lower bound" in est.label or "lower-bound" in est.label


def test_periodic_braid_has_no_growth():
    assert gamma_estimate(BraidWord(3, (1, 2)), 18).rate <= 0.05
    assert gamma_estimate(BraidWord(4), 8).rate == 0.0


def test_cap_saturates():
    est = gamma_estimate(BraidWord(3, (1, -2)), 40, cap=1 << 12)
    assert est.saturated and est.iterations_used < 40
    assert est.rate == pytest.approx(0.9624, abs=0.05)


def test_rejects_short_runs():
    with pytest.raises(ValueError):
        gamma_estimate(BraidWord(3, (1, -2)), 2)


def test_as_row_round_trip():
    row = gamma_estimate(BraidWord(3, (1, -2)), 8).as_row()
    assert set(row) >= {"word", "rate", "saturated"}
    assert np.isfinite(row["rate"])
