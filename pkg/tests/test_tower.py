import math

import numpy as np
import pytest

from isotower import facial, opcalc, tower
from isotower.facial import INFINITY
from isotower.opcalc import dagger
from isotower.selftest import point_dev
from isotower.tower import ThomPoint, TowerPoint

E1 = np.array([[1], [0]], dtype=complex)
E2 = np.array([[0], [1]], dtype=complex)
P2 = E2 @ dagger(E2)  # projector onto span(e2)
P1 = E1 @ dagger(E1)


def level_one_point(alpha, w):
    """d0 = 2, k = 1, theta(e2) = w."""
    return tower.sample_tower_point(alpha, np.hstack([_perp(w), w]), 1)


def _perp(w):
    # a unit vector orthogonal to w in C^2, so that (perp, w) is a full isometry
    v = np.array([[-np.conj(w[1, 0])], [np.conj(w[0, 0])]])
    return v / np.linalg.norm(v)


W = np.array([[1], [1j]], dtype=complex) / math.sqrt(2)


# --- spectral subspaces -------------------------------------------------

def test_pk_projector_examples():
    a = np.diag([1.0, 5.0])
    assert np.allclose(tower.pk_projector(a, 2).projector, np.eye(2))
    assert np.allclose(tower.pk_projector(a, 0).projector, 0)
    assert np.allclose(tower.pk_projector(a, 1).projector, P2)
    under = tower.pk_projector(np.eye(2), 1)
    assert isinstance(under, tower.UnderRank) and under.rank == 0


def test_pk_matches_sign_formula():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = opcalc.random_hermitian(rng, 5)
        for k in range(6):
            assert np.allclose(tower.pk_projector(a, k).projector, tower.pk_by_sign(a, k), atol=1e-9)


def test_pk_out_of_range():
    with pytest.raises(ValueError):
        tower.pk_projector(np.eye(2), 3)


# --- tower maps ---------------------------------------------------------

def test_pi_k_examples():
    a = np.diag([1.0, 3.0])
    top = TowerPoint(2, a, np.eye(2, dtype=complex))
    one = tower.pi_k(top)
    assert one.k == 1 and np.allclose(one.theta, P2)
    zero = tower.pi_k(one)
    assert zero.k == 0 and np.allclose(zero.theta, 0)
    assert tower.pi_k(INFINITY) is INFINITY


def test_sample_restriction_composes():
    rng = np.random.default_rng(1)
    a = opcalc.random_hermitian(rng, 4)
    th = opcalc.random_isometry(rng, 6, 4)
    assert np.allclose(tower.sample_tower_point(a, th, 4).theta, th)
    assert np.allclose(tower.sample_tower_point(a, th, 0).theta, 0)
    for k in range(1, 5):
        assert point_dev(tower.pi_k(tower.sample_tower_point(a, th, k)), tower.sample_tower_point(a, th, k - 1)) < 1e-12


def test_tau_examples():
    t, m = tower.tau_map(TowerPoint(1, 2.0 * np.eye(2), P2.astype(complex)))
    assert t == pytest.approx(2.0) and np.allclose(m, 0)
    t, m = tower.tau_map(TowerPoint(1, np.diag([1.0, 3.0]), P2.astype(complex)))
    assert t == pytest.approx(1.0)
    assert np.allclose(m @ E2, -2 * E2) and np.allclose(m @ E1, 0)
    assert tower.tau_map(INFINITY) is INFINITY


def test_chi_examples():
    t, m = tower.chi_map(np.diag([1.0, math.e]))
    assert t == pytest.approx(0.0, abs=1e-14) and np.allclose(m, np.diag([0, 1]))
    th = opcalc.random_isometry(np.random.default_rng(2), 4, 3)
    t, m = tower.chi_map(3.0 * th)
    assert t == pytest.approx(math.log(3)) and np.allclose(m, 0, atol=1e-12)
    with pytest.raises(opcalc.NotInjectiveError):
        tower.chi_map(np.diag([1.0, 0.0]))


def test_qk_worked_example():
    a = np.diag([0.0, math.log(2)])
    p = level_one_point(a, W)
    q = tower.qk_map(p)
    assert np.allclose(q.W, P2)
    assert np.allclose(q.gamma @ E2, -2 * W) and np.allclose(q.gamma @ E1, 0)
    assert np.allclose(q.psi, -math.log(math.log(2)) * P1)
    assert point_dev(tower.rk_map(q), p) < 1e-12


def test_qk_degenerate_gap():
    p = TowerPoint(1, np.eye(2), np.zeros((2, 2), complex))
    with pytest.raises(tower.DegenerateGapError):
        tower.qk_map(p)
    with pytest.raises(tower.DegenerateGapError):
        tower.fk_map(TowerPoint(0, np.eye(2), np.zeros((2, 2), complex)), 1)


def test_fk_and_delta_worked_example():
    a = np.diag([1.0, 3.0])
    p = TowerPoint(0, a, np.zeros((2, 2), complex))
    t, q = tower.fk_map(p, 1)
    assert t == pytest.approx(3.0)
    assert np.allclose(q.W, P2) and np.allclose(q.gamma, 0)
    assert np.allclose(q.psi, -math.log(2) * P1)
    d = tower.delta_k(p, 1)
    assert d.suspension == pytest.approx(-3.0)
    assert d.kind == "Z" and np.allclose(d.psi, q.psi)
    assert point_dev(tower.gk_map(t, q), p) < 1e-12


def test_delta_collapse():
    assert tower.delta_k(TowerPoint(0, 2 * np.eye(2), np.zeros((2, 2), complex)), 1) is INFINITY
    assert tower.delta_k(INFINITY, 1) is INFINITY


def test_phi_worked_example():
    c = 0.7
    q = ThomPoint("I", P1.astype(complex), 2 * P1.astype(complex), c * P2.astype(complex))
    p = tower.phi_k(q)
    assert np.allclose(p.alpha, np.diag([c + 2, c]))
    assert np.allclose(p.theta, -P1)
    assert tower.tower_point_defect(p) < 1e-12


def test_phi_is_calculus_of_splice():
    rng = np.random.default_rng(3)
    for k in (1, 2, 3):
        for kind in ("I", "J"):
            q = tower.random_thom_point(rng, 3, 5, k, kind)
            assert point_dev(tower.phi_k(q), tower.apply_C(facial.canonical_splice(3, k), q)) < 1e-8


def test_apply_C_constant_infinity():
    q = tower.random_thom_point(np.random.default_rng(4), 3, 4, 2)
    g = facial.FacialMap(3, 3, "D^D+", lambda st: INFINITY, split=1)
    assert tower.apply_C(g, q) is INFINITY


def test_apply_C_top_level_is_kappa_inverse():
    rng = np.random.default_rng(5)
    for _ in range(20):
        q = tower.random_thom_point(rng, 3, 5, 3)
        p = tower.apply_C(facial.canonical_splice(3, 3), q)
        # with no psi factor the result is (rho, -sigma); feeding the log of rho to kappa recovers gamma
        assert np.max(np.abs(opcalc.kappa(opcalc.op_log(p.alpha), p.theta) - q.gamma)) < 1e-8


def test_embed_coords_examples():
    a = np.diag([1.0, 3.0])
    p = level_one_point(a, W)
    alpha, beta = tower.embed_coords(p)
    assert np.allclose(beta @ E2, -2 * W) and np.allclose(beta @ E1, 0)
    z = TowerPoint(0, a, np.zeros((2, 2), complex))
    assert np.allclose(tower.embed_coords(z)[1], 0)
    with pytest.raises(ValueError):
        tower.embed_coords(TowerPoint(2, a, np.eye(2, dtype=complex)))


def test_miller_rank_examples():
    inc = np.eye(4, 3, dtype=complex)
    assert tower.miller_rank(inc, inc) == 0
    flip = inc @ np.diag([-1, 1, 1])
    assert tower.miller_rank(flip, inc) == 1
    th = opcalc.random_isometry(np.random.default_rng(6), 4, 3)
    assert tower.miller_rank(th, inc) == 3
    with pytest.raises(ValueError):
        tower.miller_rank(th, np.eye(3))


@pytest.mark.parametrize("d0, k", [(2, 1), (3, 1), (3, 2), (5, 3)])
def test_roundtrips(d0, k):
    rng = np.random.default_rng(10 * d0 + k)
    for _ in range(20):
        p = tower.random_tower_point(rng, d0, d0 + 2, k)
        assert point_dev(tower.rk_map(tower.qk_map(p)), p) < 1e-8
        pm = tower.random_tower_point(rng, d0, d0 + 2, k - 1)
        t, q = tower.fk_map(pm, k)
        assert point_dev(tower.gk_map(t, q), pm) < 1e-8


def test_random_points_satisfy_invariants():
    rng = np.random.default_rng(7)
    for k in range(4):
        assert tower.tower_point_defect(tower.random_tower_point(rng, 3, 4, k)) < 1e-10


def test_grass_point_validation():
    assert tower.GrassPoint(P1).rank == 1
    with pytest.raises(ValueError):
        tower.GrassPoint(2 * P1)
