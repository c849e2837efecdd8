import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hambraid import presets
from hambraid.hamiltonian import (
    ConstructionError,
    NumericDomainError,
    Surface,
    SurfacePoint,
    TimePeriodicHamiltonian,
    hamiltonian_vector_field,
    hofer_norm,
    integrate_flow,
    make_admissible_disk_hamiltonian,
    reduce_torus,
)

disk_points = st.tuples(st.floats(0, 0.95), st.floats(0, 2 * math.pi)).map(
    lambda ra: np.array([ra[0] * math.cos(ra[1]), ra[0] * math.sin(ra[1])]))
torus_points = st.tuples(st.floats(-3, 3), st.floats(-3, 3)).map(np.array)


def test_gradient_of_quadratics():
    H = presets.rotation(2 * math.pi)
    assert np.allclose(H.gradient(0.0, [1.0, 0.0]), [2 * math.pi, 0.0])
    assert np.allclose(hamiltonian_vector_field(H, 0.0, [1.0, 0.0]), [0.0, -2 * math.pi])
    assert np.allclose(presets.constant(3.0).gradient(0.4, [0.2, 0.1]), 0.0)


def test_xy_vector_field():
    # H = x y at (2, 3): X_H = (H_y, -H_x) = (2, -3); the point is off the disk so use the torus
    xy = TimePeriodicHamiltonian(Surface.TORUS, lambda t, x, y: x * y)
    assert np.allclose(hamiltonian_vector_field(xy, 0.0, [2.0, 3.0]), [2.0, -3.0], atol=1e-6)


def test_non_finite_gradient_raises():
    bad = TimePeriodicHamiltonian(Surface.DISK, lambda t, x, y: np.full_like(x, np.nan))
    with pytest.raises(NumericDomainError):
        bad.gradient(0.0, [0.1, 0.1])


def test_quarter_turn_closed_form():
    H = presets.rotation(math.pi / 2)
    end = integrate_flow(H, [1.0, 0.0], 0.0, 1.0, 1e-3).lifts[-1]
    assert np.allclose(end, [0.0, -1.0], atol=1e-6)


def test_torus_shear_unwraps():
    tr = integrate_flow(presets.shear(), [0.0, 0.25], 0.0, 1.0, 1e-3)
    assert np.allclose(tr.lifts[-1], [-1.0, 0.25], atol=1e-9)
    assert np.allclose(tr.points[-1], [0.0, 0.25], atol=1e-9)


def test_zero_hamiltonian_is_identity():
    res = presets.zero().flow(np.array([[0.3, -0.2]]), 0.0, 1.0, 1e-2, jacobian=True)
    assert np.allclose(res.end, [[0.3, -0.2]])
    assert np.allclose(res.jacobian, np.eye(2))


@settings(max_examples=25, deadline=None)
@given(p=disk_points, name=st.sampled_from(["rotation", "bump", "resonant-twist", "bump-perturbed"]))
def test_disk_flows_preserve_area(p, name):
    H = presets.from_config(name)
    res = H.flow(p[None], 0.0, 1.0, 1e-2, jacobian=True)
    assert abs(np.linalg.det(res.jacobian[0]) - 1.0) < 1e-9


@settings(max_examples=25, deadline=None)
@given(p=torus_points, name=st.sampled_from(["pendulum", "forced-pendulum", "shear"]))
def test_torus_flows_roundtrip(p, name):
    H = presets.from_config(name)
    fwd = H.flow(p[None], 0.0, 1.0, 1e-2)
    back = H.flow(fwd.end, 1.0, 0.0, 1e-2)
    assert np.allclose(back.end[0], p, atol=1e-9)


@given(torus_points)
def test_reduce_torus_idempotent(p):
    q = reduce_torus(p)
    assert np.all((0 <= q) & (q < 1))
    assert np.array_equal(reduce_torus(q), q)


def test_surface_point_checks():
    with pytest.raises(ValueError):
        SurfacePoint(1.0, 1.0)
    sp = SurfacePoint.on_torus(1.25, -0.5)
    assert (sp.x, sp.y) == (0.25, 0.5)
    assert np.allclose(sp.as_array(), [1.25, -0.5])


def test_hofer_norm_oracles():
    B = presets.bump((0.0, 0.0), 0.4, 1.0, "const")
    assert hofer_norm(B, 8, 65).value == pytest.approx(1.0, abs=2e-3)
    assert hofer_norm(presets.zero(), 4, 9).value == 0.0
    S = presets.bump((0.0, 0.0), 0.4, 1.0, "sine")
    assert hofer_norm(S, 4096, 17).value == pytest.approx(2 / math.pi, abs=1e-4)


def test_admissible_rotation_values():
    c = 1.7
    H = presets.rotation(c, admissible=True)
    assert H.value(0.0, [1.0, 0.0]) == pytest.approx(0.0)
    assert H.value(0.0, [0.0, 0.0]) == pytest.approx(-c / 2)


def test_admissible_gluing_mismatch():
    with pytest.raises(ConstructionError):
        make_admissible_disk_hamiltonian(1.0, lambda t, x, y: x * x + y * y, 0.6)
