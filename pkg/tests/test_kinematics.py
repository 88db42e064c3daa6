import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rotordyn import kinematics as kin
from conftest import random_attitudes

ANGLES = st.floats(-math.pi, math.pi, allow_nan=False)
SAFE_PITCH = st.floats(-1.3, 1.3, allow_nan=False)


@given(st.lists(st.floats(-10, 10), min_size=3, max_size=3),
       st.lists(st.floats(-10, 10), min_size=3, max_size=3))
def test_skew_matches_cross_product(a, b):
    assert np.allclose(kin.skew(a) @ b, np.cross(a, b), atol=1e-12)


def test_skew_is_antisymmetric():
    s = kin.skew([1.0, -2.0, 3.0])
    assert np.array_equal(s, -s.T)
    assert np.trace(s) == 0.0


@given(st.integers(1, 3), ANGLES)
def test_elem_rotation_is_orthonormal(axis, angle):
    r = kin.elem_rotation(axis, angle)
    assert np.allclose(r @ r.T, np.eye(3), atol=1e-12)
    assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-12)


def test_elem_rotation_rejects_bad_axis():
    with pytest.raises(ValueError):
        kin.elem_rotation(0, 0.3)
    with pytest.raises(ValueError):
        kin.elem_rotation(4, 0.3)


def test_rotation_composition_examples():
    # pure roll by pi/2: body y maps to inertial z
    r = kin.rotation([math.pi / 2, 0.0, 0.0])
    assert np.allclose(r, [[1, 0, 0], [0, 0, -1], [0, 1, 0]], atol=1e-12)
    # pure yaw by pi/2: body x maps to inertial y
    r = kin.rotation([0.0, 0.0, math.pi / 2])
    assert np.allclose(r @ [1, 0, 0], [0, 1, 0], atol=1e-12)


def test_rotation_rejects_bad_sequence():
    with pytest.raises(ValueError):
        kin.rotation([0.1, 0.2, 0.3], seq=(3, 3, 1))
    with pytest.raises(ValueError):
        kin.rotation([0.1, 0.2, 0.3], seq=(0, 2, 1))


def test_w_matrix_closed_form_321():
    phi, theta = 0.3, -0.5
    sf, cf = math.sin(phi), math.cos(phi)
    st_, ct = math.sin(theta), math.cos(theta)
    expected = np.array([[1.0, 0.0, -st_],
                         [0.0, cf, sf * ct],
                         [0.0, -sf, cf * ct]])
    assert np.allclose(kin.w_matrix([phi, theta, 1.1]), expected, atol=1e-12)


def test_w_matrix_pure_roll_example():
    w = kin.w_matrix([math.pi / 2, 0.0, 0.0])
    assert np.allclose(w, [[1, 0, 0], [0, 0, 1], [0, -1, 0]], atol=1e-12)


@given(ANGLES, ANGLES, ANGLES)
def test_w_det_is_cos_pitch_for_321(phi, theta, psi):
    assert kin.w_det([phi, theta, psi]) == pytest.approx(math.cos(theta),
                                                         abs=1e-12)


@pytest.mark.parametrize("seq", [(3, 2, 1), (1, 2, 3), (3, 1, 3)])
def test_w_matrix_matches_rotation_kinematics(seq, rng):
    """omega from W must equal vee(R^T R_dot) for any sequence."""
    h = 1e-6
    for _ in range(20):
        eta = rng.uniform(-1.2, 1.2, 3)
        eta_dot = rng.uniform(-2.0, 2.0, 3)
        if seq == (3, 1, 3):
            eta[1] += 1.5  # proper Euler sequences are singular at eta1 = 0
        rp = kin.rotation(eta + h * eta_dot, seq)
        rm = kin.rotation(eta - h * eta_dot, seq)
        r_dot = (rp - rm) / (2.0 * h)
        omega_skew = kin.rotation(eta, seq).T @ r_dot
        omega_fd = np.array([omega_skew[2, 1], omega_skew[0, 2],
                             omega_skew[1, 0]])
        assert np.allclose(kin.w_matrix(eta, seq) @ eta_dot, omega_fd,
                           atol=1e-6)


@given(ANGLES, SAFE_PITCH, ANGLES)
def test_w_inverse_inverts(phi, theta, psi):
    eta = [phi, theta, psi]
    assert np.allclose(kin.w_inverse(eta) @ kin.w_matrix(eta), np.eye(3),
                       atol=1e-9)


def test_w_inverse_raises_at_gimbal_lock():
    with pytest.raises(kin.SingularConfiguration):
        kin.w_inverse([0.2, math.pi / 2, -0.7])
    with pytest.raises(kin.SingularConfiguration):
        kin.w_inverse([0.0, -math.pi / 2 + 1e-9, 0.0])


def test_w_partials_match_finite_differences(rng):
    h = 1e-6
    etas, _ = random_attitudes(rng, 25)
    for eta in etas:
        dw = kin.w_partials(eta)
        for k in range(3):
            step = np.zeros(3)
            step[k] = h
            fd = (kin.w_matrix(eta + step) - kin.w_matrix(eta - step)) / (2 * h)
            assert np.allclose(dw[k], fd, atol=1e-8)


def test_w_is_independent_of_yaw():
    dw = kin.w_partials([0.4, -0.8, 2.0])
    assert np.array_equal(dw[2], np.zeros((3, 3)))


def test_w_inverse_partials_match_finite_differences(rng):
    h = 1e-6
    etas, _ = random_attitudes(rng, 25, pitch_bound=1.2)
    for eta in etas:
        dwi = kin.w_inverse_partials(eta)
        for k in range(3):
            step = np.zeros(3)
            step[k] = h
            fd = (kin.w_inverse(eta + step)
                  - kin.w_inverse(eta - step)) / (2 * h)
            assert np.allclose(dwi[k], fd, atol=1e-6)


def test_w_dot_is_directional_derivative(rng):
    h = 1e-6
    etas, eta_dots = random_attitudes(rng, 25)
    for eta, eta_dot in zip(etas, eta_dots):
        fd = (kin.w_matrix(eta + h * eta_dot)
              - kin.w_matrix(eta - h * eta_dot)) / (2 * h)
        assert np.allclose(kin.w_dot(eta, eta_dot), fd, atol=1e-8)
        fd_inv = (kin.w_inverse(eta + h * eta_dot)
                  - kin.w_inverse(eta - h * eta_dot)) / (2 * h)
        assert np.allclose(kin.w_inverse_dot(eta, eta_dot), fd_inv, atol=1e-6)


def test_row_jacobians_index_convention():
    eta = np.array([0.3, -0.4, 0.9])
    dwi = kin.w_inverse_partials(eta)
    p = kin.row_jacobians(eta)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                assert p[i][j, k] == dwi[k][i, j]


def test_sigma_blocks_collapse_to_skew_rows(rng):
    etas, _ = random_attitudes(rng, 25, pitch_bound=1.2)
    for eta in etas:
        winv = kin.w_inverse(eta)
        for i, block in enumerate(kin.sigma_w_inv(eta)):
            assert np.allclose(block, kin.skew(winv[i]), atol=1e-10)
