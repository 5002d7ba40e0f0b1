"""Point-level evaluators for the tower over the space of isometries V0 -> V1.

A point of the level-k space is a pair ``(alpha, theta)``: ``alpha`` is
self-adjoint on V0 and ``theta`` is an isometry defined on the top-k
spectral subspace P_k(alpha), stored as a full ``dim V1 x dim V0`` matrix
that vanishes on the orthocomplement.  Thom-space points ``(W, gamma, psi)``
are stored the same way: ``W`` as its orthogonal projector, ``gamma``
vanishing on W-perp and ``psi`` supported on W-perp.

The basepoint of every compactified space is :data:`INFINITY`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import opcalc
from .facial import INFINITY, FacialityError, FacialMap, canonical_splice, image_point
from .opcalc import (NotInjectiveError, dagger, lambda_k, op_exp, opnorm,
                     polar_rho, polar_sigma, rank_threshold, svd_sorted,
                     tie_groups, tie_threshold)


class DegenerateGapError(ValueError):
    """e_{d0-k-1}(alpha) and e_{d0-k}(alpha) coincide, so P_k(alpha) has rank < k."""


@dataclass(frozen=True)
class GrassPoint:
    """A rank-k orthogonal projector on V0."""

    projector: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.projector, dtype=complex)
        dev = max(np.max(np.abs(p @ p - p)), np.max(np.abs(p - dagger(p)))) if p.size else 0.0
        if dev > 1e-8:
            raise ValueError(f"not an orthogonal projector (deviation {dev:.3g})")
        object.__setattr__(self, "projector", p)

    @property
    def rank(self) -> int:
        return int(round(float(np.trace(self.projector).real)))


@dataclass(frozen=True)
class UnderRank:
    """P_k(alpha) has rank below k: the point lies in the collapsed locus."""

    rank: int
    projector: np.ndarray


@dataclass(frozen=True)
class TowerPoint:
    k: int
    alpha: np.ndarray
    theta: np.ndarray

    @property
    def d0(self) -> int:
        return self.alpha.shape[0]


@dataclass(frozen=True)
class ThomPoint:
    """``kind`` is "Z" (any gamma), "I" (gamma injective on W) or "J" (not)."""

    kind: str
    W: np.ndarray
    gamma: np.ndarray
    psi: np.ndarray
    suspension: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("Z", "I", "J"):
            raise ValueError(f"unknown Thom point kind {self.kind!r}")

    @property
    def k(self) -> int:
        return int(round(float(np.trace(self.W).real)))


# -- spectral subspaces --------------------------------------------------

def top_projector(alpha, k: int):
    """Projector onto P_k(alpha) and its rank (which may be below k)."""
    w, v = np.linalg.eigh(opcalc.as_hermitian(alpha))
    d0 = len(w)
    if not 0 <= k <= d0:
        raise ValueError(f"k must lie in [0, {d0}], got {k}")
    if k == d0:
        return np.eye(d0, dtype=complex), d0
    keep = w > w[d0 - k - 1] + tie_threshold(w)
    basis = v[:, keep]
    return basis @ dagger(basis), int(np.sum(keep))


def pk_projector(alpha, k: int):
    """GrassPoint for P_k(alpha), or an UnderRank signal carrying the actual rank."""
    proj, rank = top_projector(alpha, k)
    if rank == k:
        return GrassPoint(proj)
    return UnderRank(rank, proj)


def pk_by_sign(alpha, k: int) -> np.ndarray:
    """P_k(alpha) as the positive-part indicator of alpha minus a gap midpoint."""
    a = opcalc.as_hermitian(alpha)
    d0 = a.shape[0]
    if k == d0:
        return np.eye(d0, dtype=complex)
    if k == 0:
        return np.zeros((d0, d0), dtype=complex)
    w = np.linalg.eigvalsh(a)
    mid = 0.5 * (w[d0 - k - 1] + w[d0 - k])
    return opcalc.spectral(a - mid * np.eye(d0), lambda x: (x > 0).astype(float))


def has_gap(alpha, k: int) -> bool:
    d0 = np.asarray(alpha).shape[0]
    if k in (0, d0):
        return True
    w = np.linalg.eigvalsh(opcalc.as_hermitian(alpha))
    return w[d0 - k] - w[d0 - k - 1] > tie_threshold(w)


def _split_basis(W):
    """Orthonormal bases (Z of W, Y of W-perp) from a projector."""
    w, v = np.linalg.eigh(np.asarray(W, dtype=complex))
    inside = w > 0.5
    return v[:, inside], v[:, ~inside]


def _check_support(q: ThomPoint, tol=1e-8):
    p = q.W
    d0 = p.shape[0]
    if np.max(np.abs(q.gamma @ (np.eye(d0) - p)), initial=0.0) > tol * (1 + opnorm(q.gamma)):
        raise ValueError("gamma does not vanish on W-perp")
    if np.max(np.abs(q.psi @ p), initial=0.0) > tol * (1 + opnorm(q.psi)):
        raise ValueError("psi does not vanish on W")


def _lower_log_block(w, v, k):
    """-log((e_{d0-k} - alpha) restricted to P_k-perp), as a full matrix."""
    d0 = len(w)
    if k == d0:
        return np.zeros((d0, d0), dtype=complex)
    low = v[:, : d0 - k]
    return (low * -np.log(w[d0 - k] - w[: d0 - k])) @ dagger(low)


def _is_basepoint(p) -> bool:
    return p is INFINITY or (isinstance(p, TowerPoint) and p.theta is INFINITY)


# -- tower maps ----------------------------------------------------------

def sample_tower_point(alpha, theta_full, k: int) -> TowerPoint:
    """Restrict a full isometry to P_k(alpha)."""
    a = opcalc.as_hermitian(alpha)
    proj, _ = top_projector(a, k)
    return TowerPoint(k, a, np.asarray(theta_full, dtype=complex) @ proj)


def pi_k(p):
    """Drop one level: theta restricted to P_{k-1}(alpha)."""
    if _is_basepoint(p):
        return INFINITY
    if p.k < 1:
        raise ValueError("pi_k needs k >= 1")
    proj, _ = top_projector(p.alpha, p.k - 1)
    return TowerPoint(p.k - 1, p.alpha, p.theta @ proj)


def tau_map(p):
    """(alpha, theta) -> (e_0(alpha), -theta . (alpha - e_0(alpha)))."""
    if _is_basepoint(p):
        return INFINITY
    if p.k != p.d0 - 1:
        raise ValueError(f"tau is defined on level d0-1 = {p.d0 - 1}, got {p.k}")
    e0 = float(np.linalg.eigvalsh(p.alpha)[0])
    return e0, -p.theta @ (p.alpha - e0 * np.eye(p.d0))


def chi_map(gamma):
    """gamma -> (e_0(log rho), sigma . (log rho - e_0(log rho)))."""
    if gamma is INFINITY:
        return INFINITY
    g = np.asarray(gamma, dtype=complex)
    e = opcalc.singular_values_sorted(g)
    if len(e) and e[0] <= rank_threshold(g):
        raise NotInjectiveError("chi is defined on injective maps")
    log_rho = opcalc.op_log(polar_rho(g))
    e0 = float(np.linalg.eigvalsh(log_rho)[0])
    return e0, polar_sigma(g) @ (log_rho - e0 * np.eye(g.shape[1]))


def chi_calculus_map(d0: int) -> FacialMap:
    """t -> (log t_0) ^ (0, log t_1 - log t_0, ...); D0 goes to the basepoint."""
    from .facial import Smash

    def ev(t):
        if t[0] <= 0:
            return INFINITY
        logs = np.log(np.asarray(t))
        return Smash(tuple(logs - logs[0]), float(logs[0]))

    return FacialMap(d0, d0, "D+/D0", ev, label="log-suspension")


def qk_map(p: TowerPoint) -> ThomPoint:
    """(alpha, theta) -> (P_k, -theta . Exp(alpha|P_k), -log((e_{d0-k} - alpha)|P_k-perp))."""
    if _is_basepoint(p):
        raise ValueError("q_k is not defined at the basepoint")
    a = p.alpha
    w, v = np.linalg.eigh(a)
    proj, rank = top_projector(a, p.k)
    if rank != p.k:
        raise DegenerateGapError(f"P_{p.k}(alpha) has rank {rank}")
    gamma = -p.theta @ op_exp(a) @ proj
    return ThomPoint("I", proj, gamma, _lower_log_block(w, v, p.k))


def rk_map(q: ThomPoint) -> TowerPoint:
    """Inverse of :func:`qk_map`."""
    _check_support(q)
    Z, Y = _split_basis(q.W)
    k = Z.shape[1]
    g0 = q.gamma @ Z
    e = opcalc.singular_values_sorted(g0)
    if k and e[0] <= rank_threshold(g0):
        raise NotInjectiveError("r_k needs gamma injective on W")
    alpha = np.zeros_like(q.W)
    if k:
        alpha = alpha + Z @ opcalc.op_log(polar_rho(g0)) @ dagger(Z)
    if Y.shape[1]:
        low = np.log(e[0]) * np.eye(Y.shape[1]) - op_exp(-(dagger(Y) @ q.psi @ Y))
        alpha = alpha + Y @ low @ dagger(Y)
    theta = -polar_sigma(g0) @ dagger(Z)
    return TowerPoint(k, 0.5 * (alpha + dagger(alpha)), theta)


def fk_map(p: TowerPoint, k: Optional[int] = None):
    """Level k-1 point -> (e_{d0-k}, (P_k, -theta . lambda_{k-1}(alpha)|P_k, -log(...)))."""
    if _is_basepoint(p):
        raise ValueError("f_k is not defined at the basepoint")
    k = p.k + 1 if k is None else k
    if p.k != k - 1:
        raise ValueError(f"f_{k} takes level {k - 1} points, got level {p.k}")
    a = p.alpha
    w, v = np.linalg.eigh(a)
    d0 = len(w)
    proj, rank = top_projector(a, k)
    if rank != k:
        raise DegenerateGapError(f"P_{k}(alpha) has rank {rank}")
    delta = -p.theta @ lambda_k(a, k - 1, d0) @ proj
    return float(w[d0 - k]), ThomPoint("J", proj, delta, _lower_log_block(w, v, k))


def gk_map(t: float, q: ThomPoint) -> TowerPoint:
    """Inverse of :func:`fk_map`."""
    _check_support(q)
    Z, Y = _split_basis(q.W)
    k = Z.shape[1]
    d0 = q.W.shape[0]
    g0 = q.gamma @ Z
    e = opcalc.singular_values_sorted(g0)
    if k and e[0] > rank_threshold(g0):
        raise ValueError("g_k needs gamma non-injective on W")
    alpha = np.zeros((d0, d0), dtype=complex)
    if k:
        alpha = alpha + Z @ (polar_rho(g0) + t * np.eye(k)) @ dagger(Z)
    if Y.shape[1]:
        low = t * np.eye(Y.shape[1]) - op_exp(-(dagger(Y) @ q.psi @ Y))
        alpha = alpha + Y @ low @ dagger(Y)
    theta = -polar_sigma(g0) @ dagger(Z)
    return TowerPoint(k - 1, 0.5 * (alpha + dagger(alpha)), theta)


def delta_k(p, k: Optional[int] = None):
    """Connecting map: collapse the rank-deficient locus, then f_k, negating the suspension."""
    if _is_basepoint(p):
        return INFINITY
    k = p.k + 1 if k is None else k
    if not has_gap(p.alpha, k):
        return INFINITY
    t, q = fk_map(p, k)
    return ThomPoint("Z", q.W, q.gamma, q.psi, suspension=-t)


def _top_of_psi(q: ThomPoint, Y) -> float:
    if Y.shape[1] == 0:
        return 0.0
    return float(np.linalg.eigvalsh(dagger(Y) @ q.psi @ Y)[-1])


def phi_k(q):
    """(W, gamma, psi) -> (psi + (rho(gamma) + e_top(psi)) on W, -sigma(gamma))."""
    if q is INFINITY:
        return INFINITY
    _check_support(q)
    Z, Y = _split_basis(q.W)
    k = Z.shape[1]
    top = _top_of_psi(q, Y)
    alpha = q.psi + polar_rho(q.gamma) + top * q.W
    alpha = 0.5 * (alpha + dagger(alpha))
    theta = -polar_sigma(q.gamma)
    proj, _ = top_projector(alpha, k)
    return TowerPoint(k, alpha, theta @ proj)


def apply_C(g: FacialMap, q):
    """Calculus on Thom points: eigenvalues of psi and singular values of gamma fed through g."""
    if q is INFINITY:
        return INFINITY
    _check_support(q)
    Z, Y = _split_basis(q.W)
    k = Z.shape[1]
    d0 = q.W.shape[0]
    if g.split is not None and g.split != d0 - k:
        raise ValueError(f"map expects a D({g.split}) factor, Thom point has {d0 - k}")
    if Y.shape[1]:
        s, vs = np.linalg.eigh(dagger(Y) @ q.psi @ Y)
    else:
        s, vs = np.zeros(0), np.zeros((0, 0), complex)
    e, _, ve = svd_sorted(q.gamma @ Z)
    img = g((tuple(s), tuple(e)))
    if img is INFINITY:
        return INFINITY
    out = np.array(image_point(img), dtype=float)
    spliced = np.array(canonical_splice(d0, k)((tuple(s), tuple(e))))
    tol = opcalc.IMAGE_TOL * (1.0 + float(np.max(np.abs(out))))
    for group in tie_groups(spliced, tie_threshold(spliced)):
        idx = list(group)
        if np.ptp(out[idx]) > tol:
            raise FacialityError(f"{g.label or 'map'} separates tied entries {spliced[idx]} -> {out[idx]}")
        out[idx] = out[idx].mean()
    basis = np.hstack([Y @ vs, Z @ ve])
    alpha = (basis * out) @ dagger(basis)
    alpha = 0.5 * (alpha + dagger(alpha))
    proj, _ = top_projector(alpha, k)
    return TowerPoint(k, alpha, -polar_sigma(q.gamma) @ proj)


def embed_coords(p: TowerPoint):
    """(alpha, theta) -> (alpha, -theta . lambda_k(alpha)); needs k < d0."""
    if p.k >= p.d0:
        raise ValueError("the top level has no lambda coordinate; use kappa")
    return p.alpha, -p.theta @ lambda_k(p.alpha, p.k, p.d0)


def miller_rank(theta, inclusion) -> int:
    """Numerical rank of theta - I; theta is in the Miller filtration F_k iff this is <= k."""
    th = np.asarray(theta, dtype=complex)
    inc = np.asarray(inclusion, dtype=complex)
    if th.shape != inc.shape:
        raise ValueError(f"dimension mismatch: {th.shape} vs {inc.shape}")
    return opcalc.numerical_rank(th - inc)


def tower_point_defect(p: TowerPoint) -> float:
    """Worst deviation from the two defining identities of a tower point."""
    proj, _ = top_projector(p.alpha, p.k)
    dev = float(np.max(np.abs(dagger(p.theta) @ p.theta - proj), initial=0.0))
    if p.k < p.d0:
        _, beta = embed_coords(p)
        dev = max(dev, float(np.max(np.abs(polar_rho(beta) - lambda_k(p.alpha, p.k, p.d0)), initial=0.0)))
    return dev


def conjugate_point(p, u0, u1):
    """The group action on tower and Thom points by block unitaries."""
    if p is INFINITY:
        return INFINITY
    if isinstance(p, TowerPoint):
        return TowerPoint(p.k, u0 @ p.alpha @ dagger(u0), u1 @ p.theta @ dagger(u0))
    if isinstance(p, ThomPoint):
        return ThomPoint(p.kind, u0 @ p.W @ dagger(u0), u1 @ p.gamma @ dagger(u0),
                         u0 @ p.psi @ dagger(u0), p.suspension)
    raise TypeError(f"cannot conjugate {type(p).__name__}")


# -- random valid points -------------------------------------------------

def random_tower_point(rng, d0: int, d1: int, k: int, spread: float = 1.0) -> TowerPoint:
    alpha = opcalc.random_hermitian(rng, d0, spread)
    return sample_tower_point(alpha, opcalc.random_isometry(rng, d1, d0), k)


def random_thom_point(rng, d0: int, d1: int, k: int, kind: str = "I") -> ThomPoint:
    """A Thom point over a random k-plane; kind "J" plants a kernel vector in W."""
    u = opcalc.random_unitary(rng, d0)
    Z, Y = u[:, :k], u[:, k:]
    g0 = opcalc.random_linear(rng, d1, k)
    if kind == "J" and k:
        _, _, v = svd_sorted(g0)
        g0 = g0 - np.outer(g0 @ v[:, 0], np.conj(v[:, 0]))
    psi0 = opcalc.random_hermitian(rng, d0 - k)
    psi = Y @ psi0 @ dagger(Y) if d0 - k else np.zeros((d0, d0), complex)
    return ThomPoint(kind, Z @ dagger(Z), g0 @ dagger(Z), psi)
