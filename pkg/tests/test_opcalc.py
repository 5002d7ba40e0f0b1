import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isotower import facial, opcalc
from isotower.facial import INFINITY, FacialMap
from isotower.opcalc import dagger
from isotower.selftest import cubic_map, planted_hermitian

SWAP = np.array([[0, 1], [1, 0]], dtype=complex)


def rng_for(seed):
    return np.random.default_rng(seed)


# --- eigen-synthesis ----------------------------------------------------

def test_eig_sorted_examples():
    assert opcalc.eig_sorted(np.diag([3.0, 1.0]))[0].entries == pytest.approx((1.0, 3.0))
    assert opcalc.eig_sorted(SWAP)[0].entries == pytest.approx((-1.0, 1.0))
    assert opcalc.eig_sorted(np.zeros((3, 3)))[0].entries == (0.0, 0.0, 0.0)


def test_eig_sorted_rejects_non_hermitian():
    with pytest.raises(opcalc.NotSelfAdjointError):
        opcalc.eig_sorted(np.array([[0, 1], [0, 0]]))
    with pytest.raises(opcalc.NotSelfAdjointError):
        opcalc.eig_sorted(np.ones((2, 3)))


def test_synth_examples():
    assert np.allclose(opcalc.synth(np.eye(2), (1, 2)), np.diag([1, 2]))
    assert np.allclose(opcalc.synth(SWAP, (1, 2)), np.diag([2, 1]))
    th = opcalc.random_isometry(rng_for(0), 3, 3)
    assert np.allclose(opcalc.synth(th, (4, 4, 4)), 4 * np.eye(3))
    with pytest.raises(opcalc.NotIsometryError):
        opcalc.synth(2 * np.eye(2), (1, 2))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_synth_eig_roundtrip(d, seed):
    rng = rng_for(seed)
    a = opcalc.random_hermitian(rng, d, 3.0)
    e, v = opcalc.eig_sorted(a)
    assert np.max(np.abs(opcalc.synth(v, e) - a)) <= 1e-9 * (1 + opcalc.opnorm(a))


def test_exp_log():
    assert np.allclose(opcalc.op_exp(np.zeros((2, 2))), np.eye(2))
    assert np.allclose(opcalc.op_log(np.diag([1, math.e])), np.diag([0, 1]))
    a = opcalc.random_hermitian(rng_for(1), 4)
    assert np.max(np.abs(opcalc.op_log(opcalc.op_exp(a)) - a)) <= 1e-9
    with pytest.raises(ValueError):
        opcalc.op_log(np.diag([1.0, 0.0]))


# --- polar data ---------------------------------------------------------

def test_polar_examples():
    assert np.allclose(opcalc.polar_rho([[3]]), [[3]])
    assert np.allclose(opcalc.polar_rho(np.zeros((2, 2))), 0)
    col = np.array([[0], [5]], dtype=complex)
    assert np.allclose(opcalc.polar_rho(col), [[5]])
    assert np.allclose(opcalc.polar_sigma(np.diag([2, 3])), np.eye(2))
    assert np.allclose(opcalc.polar_sigma(col), [[0], [1]])
    assert np.allclose(opcalc.polar_sigma(np.zeros((2, 2))), 0)


def test_polar_rank_deficient():
    rng = rng_for(2)
    g = opcalc.random_linear(rng, 4, 3)
    g[:, 2] = g[:, 0] + 2 * g[:, 1]
    rho, sig = opcalc.polar_rho(g), opcalc.polar_sigma(g)
    assert np.allclose(rho @ rho, dagger(g) @ g, atol=1e-9)
    assert np.allclose(sig @ rho, g, atol=1e-9)
    assert opcalc.numerical_rank(rho) == opcalc.numerical_rank(g) == 2
    # sigma is a partial isometry onto the coimage
    assert np.allclose(dagger(sig) @ sig @ dagger(sig) @ sig, dagger(sig) @ sig, atol=1e-9)


def test_lambda_k_examples():
    rng = rng_for(3)
    assert np.allclose(opcalc.lambda_k(opcalc.random_hermitian(rng, 2), 0, 2), 0)
    assert np.allclose(opcalc.lambda_k(np.diag([-1.0, 4.0]), 1, 2), np.diag([0, 5]))
    assert np.allclose(opcalc.lambda_k(2.5 * np.eye(3), 2, 3), 0)
    with pytest.raises(ValueError):
        opcalc.lambda_k(np.eye(2), 2, 2)


def test_lambda_k_rank():
    a = np.diag([0.0, 1.0, 1.0, 3.0])
    assert opcalc.numerical_rank(opcalc.lambda_k(a, 1, 4)) == 1
    assert opcalc.numerical_rank(opcalc.lambda_k(a, 2, 4)) == 1  # tie: rank drops below k
    assert opcalc.numerical_rank(opcalc.lambda_k(a, 3, 4)) == 3


# --- functional calculus ------------------------------------------------

def test_apply_A_examples():
    rng = rng_for(4)
    a = opcalc.random_hermitian(rng, 3)
    assert np.allclose(opcalc.apply_A(facial.identity_map(3), a), a)
    assert np.allclose(opcalc.apply_A(facial.shift_map(3, 2.0), a), a + 2 * np.eye(3))
    bottom = FacialMap(3, 3, "D", lambda t: (t[0],) * 3)
    assert np.allclose(opcalc.apply_A(bottom, a), np.linalg.eigvalsh(a)[0] * np.eye(3))
    assert opcalc.apply_A(facial.constant_infinity_map(3), a) is INFINITY


def test_apply_A_detects_non_facial_maps():
    bump = FacialMap(2, 2, "D", lambda t: (t[0], t[1] + 1.0))
    with pytest.raises(facial.FacialityError):
        opcalc.apply_A(bump, np.eye(2))


def test_apply_A_smash_tag():
    f = FacialMap(2, 2, "D", lambda t: facial.Smash((0.0, t[1] - t[0]), t[0]))
    out = opcalc.apply_A(f, np.diag([1.0, 4.0]))
    assert isinstance(out, opcalc.Tagged)
    assert out.tag == pytest.approx(1.0)
    assert np.allclose(out.op, np.diag([0, 3]))


def test_apply_B_examples():
    rng = rng_for(5)
    g = opcalc.random_linear(rng, 5, 3)
    assert np.allclose(opcalc.apply_B(facial.identity_map(3, "D+"), g), g)
    double = FacialMap(3, 3, "D+", lambda t: tuple(2 * x for x in t))
    assert np.allclose(opcalc.apply_B(double, g), 2 * g)
    square = FacialMap(3, 3, "D+", lambda t: tuple(x * x for x in t))
    assert np.allclose(opcalc.apply_B(square, g), g @ opcalc.polar_rho(g))


def test_apply_B_rejects_leaving_the_cone():
    neg = FacialMap(2, 2, "D+", lambda t: tuple(x - 5.0 for x in t))
    with pytest.raises(facial.FacialityError):
        opcalc.apply_B(neg, np.eye(2))


@pytest.mark.parametrize("seed", range(20))
def test_basis_independence_with_planted_degeneracy(seed):
    rng = rng_for(seed)
    alpha, u = planted_hermitian(rng, 5)
    assert np.allclose(u @ alpha @ dagger(u), alpha, atol=1e-10)
    out = opcalc.apply_A(cubic_map(5), alpha)
    assert np.max(np.abs(out - u @ out @ dagger(u))) <= 1e-8


@pytest.mark.parametrize("seed", range(20))
def test_defining_square(seed):
    rng = rng_for(100 + seed)
    g = opcalc.random_linear(rng, 6, 4)
    f = facial.hat(facial.dplus2_homotopy(0.4), 4)
    b = opcalc.apply_B(f, g)
    if b is INFINITY:
        pytest.skip("map sent the point to the basepoint")
    assert np.max(np.abs(opcalc.polar_rho(b) - opcalc.apply_A(f, opcalc.polar_rho(g)))) <= 1e-8


# --- kappa and conjugation ----------------------------------------------

def test_kappa_examples():
    assert np.allclose(opcalc.kappa(np.zeros((1, 1)), np.eye(1)), [[-1]])
    inv = opcalc.kappa_inv(np.array([[2], [0]], dtype=complex))
    assert np.allclose(inv.alpha, [[math.log(2)]])
    assert np.allclose(inv.theta, [[-1], [0]])
    with pytest.raises(opcalc.NotInjectiveError):
        opcalc.kappa_inv(np.zeros((2, 1)))


def test_kappa_roundtrip():
    rng = rng_for(6)
    for _ in range(50):
        a = opcalc.random_hermitian(rng, 3)
        th = opcalc.random_isometry(rng, 5, 3)
        back = opcalc.kappa_inv(opcalc.kappa(a, th))
        assert np.max(np.abs(back.alpha - a)) <= 1e-8
        assert np.max(np.abs(back.theta - th)) <= 1e-8


def test_conjugate():
    a = np.diag([1.0, 2.0])
    assert np.allclose(opcalc.conjugate(a, np.eye(2)), a)
    assert np.allclose(opcalc.conjugate(a, SWAP), np.diag([2, 1]))
    with pytest.raises(ValueError):
        opcalc.conjugate(a, np.eye(3))
