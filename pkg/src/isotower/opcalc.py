"""Spectral calculus on complex matrices.

Self-adjoint operators and linear maps are plain ``numpy`` complex arrays;
the helpers below validate them where a construction needs it.  Eigen- and
singular values are always reported in ascending order, matching the
ordering of points of D(d).
"""
from __future__ import annotations

from collections import namedtuple

import numpy as np

from .facial import (INFINITY, EigenTuple, FacialityError, FacialMap, Smash,
                     image_point)

HERMITIAN_TOL = 1e-12
TIE_TOL = 1e-9
RANK_TOL = 1e-8
# images of tied eigenvalues may differ by the round-off of the map itself
IMAGE_TOL = 1e-7

# A calculus result paired with the smash coordinate of its facial map.
Tagged = namedtuple("Tagged", ["op", "tag"])


class NotSelfAdjointError(ValueError):
    pass


class NotIsometryError(ValueError):
    pass


class NotInjectiveError(ValueError):
    pass


def opnorm(a) -> float:
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def dagger(a) -> np.ndarray:
    return np.conj(np.asarray(a)).T


def as_hermitian(alpha) -> np.ndarray:
    a = np.asarray(alpha, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSelfAdjointError(f"expected a square matrix, got shape {a.shape}")
    dev = np.max(np.abs(a - dagger(a))) if a.size else 0.0
    if dev > HERMITIAN_TOL * (1.0 + opnorm(a)):
        raise NotSelfAdjointError(f"matrix is not self-adjoint (deviation {dev:.3g})")
    return 0.5 * (a + dagger(a))


def is_isometry(theta, tol: float = 1e-8) -> bool:
    t = np.asarray(theta, dtype=complex)
    return t.shape[0] >= t.shape[1] and np.allclose(dagger(t) @ t, np.eye(t.shape[1]), atol=tol)


def tie_threshold(values, scale: float | None = None) -> float:
    if scale is None:
        scale = float(np.max(np.abs(values))) if len(values) else 0.0
    return TIE_TOL * (1.0 + scale)


def tie_groups(values, threshold: float):
    """Index runs of a sorted array whose consecutive gaps are <= threshold."""
    groups = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > threshold:
            groups.append(range(start, i))
            start = i
    return groups


def eig_sorted(alpha):
    """Ascending eigenvalues and an orthonormal eigenbasis (as columns)."""
    a = as_hermitian(alpha)
    w, v = np.linalg.eigh(a)
    return EigenTuple(w), v


def _eigh(alpha):
    w, v = np.linalg.eigh(as_hermitian(alpha))
    return w, v


def spectral(alpha, fn) -> np.ndarray:
    """Apply a scalar function through the spectral decomposition."""
    w, v = _eigh(alpha)
    return (v * fn(w)) @ dagger(v)


def synth(theta, t) -> np.ndarray:
    """theta . diag(t) . theta^dagger for an isometry theta: C^d -> V."""
    th = np.asarray(theta, dtype=complex)
    t = np.asarray(list(t), dtype=float)
    if th.shape[1] != len(t):
        raise ValueError(f"isometry has {th.shape[1]} columns but {len(t)} eigenvalues were given")
    if not is_isometry(th):
        raise NotIsometryError("synth needs theta^dagger theta = 1")
    return (th * t) @ dagger(th)


def op_exp(alpha) -> np.ndarray:
    return spectral(alpha, np.exp)


def op_log(beta) -> np.ndarray:
    w, v = _eigh(beta)
    if len(w) and w[0] <= 0:
        raise ValueError(f"log needs a positive operator, smallest eigenvalue is {w[0]:.3g}")
    return (v * np.log(w)) @ dagger(v)


def svd_sorted(gamma):
    """gamma = U diag(e) V^dagger with e ascending.

    ``V`` is d x d, ``U`` holds d orthonormal columns in the target (the
    images ``m_i``; for zero singular values these are an arbitrary
    orthonormal completion).
    """
    g = np.asarray(gamma, dtype=complex)
    d_out, d = g.shape
    if d == 0:
        return np.zeros(0), np.zeros((d_out, 0), complex), np.zeros((0, 0), complex)
    if d_out < d:
        raise ValueError("the source dimension must not exceed the target dimension")
    u, s, vh = np.linalg.svd(g, full_matrices=True)
    order = np.arange(d)[::-1]
    return s[order], u[:, order], dagger(vh)[:, order]


def singular_values_sorted(gamma) -> np.ndarray:
    g = np.asarray(gamma, dtype=complex)
    if g.shape[1] == 0:
        return np.zeros(0)
    return np.sort(np.linalg.svd(g, compute_uv=False)[: g.shape[1]])


def rank_threshold(gamma) -> float:
    return RANK_TOL * (1.0 + opnorm(gamma))


def numerical_rank(a) -> int:
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > rank_threshold(a)))


def polar_rho(gamma) -> np.ndarray:
    """(gamma^dagger gamma)^(1/2)."""
    e, _, v = svd_sorted(gamma)
    return (v * e) @ dagger(v)


def polar_sigma(gamma) -> np.ndarray:
    """gamma . rho(gamma)^-1 on (Ker gamma)^perp, extended by zero on Ker gamma."""
    g = np.asarray(gamma, dtype=complex)
    e, u, v = svd_sorted(g)
    keep = e > rank_threshold(g)
    return u[:, keep] @ dagger(v[:, keep])


def lambda_k(alpha, k: int, d0: int | None = None) -> np.ndarray:
    """max(alpha - e_{d0-k-1}(alpha), 0) spectrally."""
    w, v = _eigh(alpha)
    if d0 is None:
        d0 = len(w)
    if d0 != len(w):
        raise ValueError(f"alpha has dimension {len(w)}, expected {d0}")
    if not 0 <= k <= d0 - 1:
        raise ValueError(f"lambda_k needs 0 <= k <= d0-1 = {d0 - 1}, got {k}")
    shifted = np.maximum(w - w[d0 - k - 1], 0.0)
    shifted[np.abs(w - w[d0 - k - 1]) <= tie_threshold(w)] = 0.0
    return (v * shifted) @ dagger(v)


def _facial_values(f, e, ties, nonneg=False):
    """Evaluate f on sorted values e; returns (values or INFINITY, tag)."""
    img = f(tuple(float(x) for x in e))
    if img is INFINITY:
        return INFINITY, None
    tag = img.tag if isinstance(img, Smash) else None
    s = np.array(image_point(img), dtype=float)
    if len(s) != len(e):
        raise ValueError(f"map returned {len(s)} values for {len(e)} eigenvalues")
    tol = IMAGE_TOL * (1.0 + float(np.max(np.abs(s)))) if len(s) else 0.0
    for group in ties:
        if len(group) > 1:
            block = s[list(group)]
            if np.ptp(block) > tol:
                raise FacialityError(f"{f.label or 'map'} separates tied eigenvalues {e[list(group)]} -> {block}")
            s[list(group)] = block.mean()
    if nonneg and len(s) and s[0] < -tol:
        raise FacialityError(f"{f.label or 'map'} leaves the nonnegative cone: {s}")
    return s, tag


def apply_A(f: FacialMap, alpha):
    """The eigenvalue calculus: same eigenvectors, eigenvalues f(e).

    Returns a matrix, :data:`INFINITY`, or ``Tagged(matrix, tag)`` when f
    has a smash coordinate.
    """
    w, v = _eigh(alpha)
    ties = tie_groups(w, tie_threshold(w))
    s, tag = _facial_values(f, w, ties)
    if s is INFINITY:
        return INFINITY
    out = (v * s) @ dagger(v)
    return out if tag is None else Tagged(out, tag)


def apply_B(f: FacialMap, gamma):
    """The singular-value calculus: v_i -> s_i m_i where gamma v_i = e_i m_i."""
    g = np.asarray(gamma, dtype=complex)
    e, u, v = svd_sorted(g)
    thr = tie_threshold(e, opnorm(g))
    ties = tie_groups(e, thr)
    s, tag = _facial_values(f, e, ties, nonneg=True)
    if s is INFINITY:
        return INFINITY
    zero = e <= thr
    tol = IMAGE_TOL * (1.0 + float(np.max(np.abs(s)))) if len(s) else 0.0
    if np.any(np.abs(s[zero]) > tol):
        raise FacialityError(f"{f.label or 'map'} does not preserve D0: kernel directions map to {s[zero]}")
    s[zero] = 0.0
    out = (u * s) @ dagger(v)
    return out if tag is None else Tagged(out, tag)


def kappa(alpha, theta) -> np.ndarray:
    """(alpha, theta) -> -theta . Exp(alpha)."""
    th = np.asarray(theta, dtype=complex)
    if not is_isometry(th):
        raise NotIsometryError("kappa needs a full isometry")
    return -th @ op_exp(alpha)


KappaInverse = namedtuple("KappaInverse", ["alpha", "theta"])


def kappa_inv(gamma) -> KappaInverse:
    g = np.asarray(gamma, dtype=complex)
    e = singular_values_sorted(g)
    if len(e) and e[0] <= rank_threshold(g):
        raise NotInjectiveError(f"kappa_inv needs an injective map (smallest singular value {e[0]:.3g})")
    return KappaInverse(op_log(polar_rho(g)), -polar_sigma(g))


def conjugate(m, u_in, u_out=None) -> np.ndarray:
    """u_out . m . u_in^dagger; u_out defaults to u_in."""
    m = np.asarray(m, dtype=complex)
    u_in = np.asarray(u_in, dtype=complex)
    u_out = u_in if u_out is None else np.asarray(u_out, dtype=complex)
    if u_in.shape != (m.shape[1], m.shape[1]) or u_out.shape != (m.shape[0], m.shape[0]):
        raise ValueError(f"unitaries of shapes {u_in.shape}, {u_out.shape} do not fit a {m.shape} matrix")
    return u_out @ m @ dagger(u_in)


# -- random inputs for property checks ---------------------------------

def random_hermitian(rng, d: int, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * 0.5 * (a + dagger(a))


def random_unitary(rng, d: int) -> np.ndarray:
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r)
    ph = ph / np.where(np.abs(ph) == 0, 1, np.abs(ph))
    return q * ph


def random_isometry(rng, d_out: int, d_in: int) -> np.ndarray:
    return random_unitary(rng, d_out)[:, :d_in]


def random_linear(rng, d_out: int, d_in: int) -> np.ndarray:
    return rng.normal(size=(d_out, d_in)) + 1j * rng.normal(size=(d_out, d_in))
