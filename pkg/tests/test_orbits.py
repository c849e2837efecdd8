import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hambraid import presets
from hambraid.hamiltonian import integrate_flow
from hambraid.orbits import (
    ClassMismatchError,
    UnsupportedClassError,
    action_gaps_and_isolation,
    build_orbit,
    classify_multipliers,
    distinct_cycles,
    find_periodic_points,
    free_homotopy_class,
    minimal_period,
    orbit_action,
    time_k_map_with_jacobian,
)


def test_rotation_time_map():
    c = 0.7
    end, J = time_k_map_with_jacobian(presets.rotation(c), np.array([0.3, 0.1]), 1)
    R = np.array([[math.cos(c), math.sin(c)], [-math.sin(c), math.cos(c)]])
    assert np.allclose(end, R @ [0.3, 0.1], atol=1e-8)
    assert np.allclose(J, R, atol=1e-8) and abs(np.linalg.det(J) - 1) < 1e-8
    end, J = time_k_map_with_jacobian(presets.zero(), np.array([0.3, 0.1]), 2)
    assert np.allclose(end, [0.3, 0.1]) and np.allclose(J, np.eye(2))


def test_identity_map_has_no_nondegenerate_points():
    S = find_periodic_points(presets.zero(), 1, 6, step=0.1)
    assert len(S) == 0 and S.diagnostics["degenerate_roots"] == S.diagnostics["seeds"]


def test_multiplier_classes():
    assert classify_multipliers(np.array([2.0, 0.5])) == (True, "hyperbolic")
    assert classify_multipliers(np.exp([0.3j, -0.3j])) == (True, "elliptic")
    assert classify_multipliers(np.array([1.0, 1.0]))[0] is False


def test_constant_orbit_actions():
    c = 2.0
    o = build_orbit(presets.rotation(c, admissible=True), np.zeros(2), 1, 1e-2)
    assert o.action == pytest.approx(-c / 2, abs=1e-12)
    P = find_periodic_points(presets.pendulum(), 1, 8)
    H = presets.pendulum()
    for orb in P:
        assert orb.action == pytest.approx(float(H.value(0.0, orb.seed)), abs=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 0.9))
def test_circle_action(r):
    H = presets.rotation(2 * math.pi)
    o = build_orbit(H, np.array([r, 0.0]), 1, 1e-3)
    assert orbit_action(H, o) == pytest.approx(2 * math.pi * r * r, abs=1e-5)
    # variational sign convention: the area term flips
    assert orbit_action(H, o, variational=True) == pytest.approx(0.0, abs=1e-5)


def test_isolation_oracles():
    rep = action_gaps_and_isolation([0.0, 1.0], 0.5)
    assert rep.isolated and np.allclose(rep.gaps, [[0, 1], [1, 0]])
    assert action_gaps_and_isolation([0.7, 0.7, 0.7], 0.5).isolated
    assert not action_gaps_and_isolation([0.0, 0.3], 0.5).isolated
    assert not action_gaps_and_isolation([0.0, 0.0, 1.0], 0.5, subset=[0]).isolated
    with pytest.raises(ClassMismatchError):
        action_gaps_and_isolation([0.0, 1.0], 0.5, classes=[(0, 0), (1, 0)])


def test_homotopy_classes():
    tr = integrate_flow(presets.shear(), [0.0, 0.25], 0.0, 1.0, 1e-3)
    assert free_homotopy_class(tr) == (-1, 0)
    P = find_periodic_points(presets.pendulum(), 1, 8)
    assert all(o.homotopy_class == (0, 0) for o in P)
    o = build_orbit(presets.rotation(1.0), np.zeros(2), 1, 1e-2)
    assert o.homotopy_class == "trivial"


def test_noncontractible_action_unsupported():
    H = presets.shear()
    o = build_orbit(H, np.array([0.0, 0.25]), 1, 1e-3)
    with pytest.raises(UnsupportedClassError):
        orbit_action(H, o)


def test_cycles_and_minimal_period():
    H = presets.resonant_twist()
    S = find_periodic_points(H, 3, 12, step=2e-3 / 3 * 3, coarse_step=8e-3)
    keep = distinct_cycles(S)
    assert len(keep) <= len(S)
    reduced = [minimal_period(S[i]) for i in keep]
    assert sum(o.period for o in reduced) == len(S)
    centre = [o for o in reduced if np.hypot(*o.seed) < 1e-6]
    assert centre and centre[0].period == 1
