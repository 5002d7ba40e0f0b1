"""Ordered-eigenvalue spaces D(d), D+(d), their faces and facial maps.

Points of D(d) are weakly increasing real tuples together with the
compactification point :data:`INFINITY`.  Maps between these spaces are
plain callables on tuples of floats; :class:`FacialMap` wraps one with the
bookkeeping needed by the functional calculus in :mod:`isotower.opcalc`.

Also here: the hat construction extending facial maps of D+(2) to D+(d),
the conformal chart of D+(2) onto the closed upper half disc, the NDR data
built from it, and degree computations for self-maps of the compactified
line and plane.
"""
from __future__ import annotations

import math
import os
from collections import namedtuple
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np


class _Infinity:
    """The added point of a one-point compactification."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())

    def __bool__(self):
        return True


INFINITY = _Infinity()
# every compactified space in the package shares the same basepoint tag
BASEPOINT = INFINITY


def is_infinity(x) -> bool:
    return x is INFINITY


def default_tol() -> float:
    """Base relative tolerance; ISOTOWER_TOL overrides the 1e-9 default."""
    value = os.environ.get("ISOTOWER_TOL")
    if value is None:
        return 1e-9
    tol = float(value)
    if not tol > 0:
        raise ValueError(f"ISOTOWER_TOL must be positive, got {value!r}")
    return tol


class FacialityError(ValueError):
    """A map sent a point of some face outside that face."""


class DegreeError(RuntimeError):
    """Adaptive sampling could not resolve a degree."""


# A point of a smash product X ^ Y with X facial: ``point`` carries the faces.
Smash = namedtuple("Smash", ["point", "tag"])

VARIANTS = ("plain", "nonneg", "zero")


@dataclass(frozen=True)
class EigenTuple:
    """A finite point of D(d), D+(d) or D0(d)."""

    entries: tuple
    variant: str = "plain"

    def __post_init__(self):
        entries = tuple(float(t) for t in self.entries)
        object.__setattr__(self, "entries", entries)
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if not all(math.isfinite(t) for t in entries):
            raise ValueError("entries must be finite; use INFINITY for the basepoint")
        tol = _face_tol(entries)
        if any(b < a - tol for a, b in zip(entries, entries[1:])):
            raise ValueError(f"entries are not weakly increasing: {entries}")
        if entries and self.variant == "nonneg" and entries[0] < -tol:
            raise ValueError("D+ points need t0 >= 0")
        if entries and self.variant == "zero" and abs(entries[0]) > tol:
            raise ValueError("D0 points need t0 = 0")

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def array(self) -> np.ndarray:
        return np.array(self.entries)


def _face_tol(entries, tol=None) -> float:
    base = default_tol() if tol is None else tol
    scale = max((abs(t) for t in entries), default=0.0)
    return base * (1.0 + scale)


def as_point(p):
    """Normalise a point to INFINITY or a tuple of floats."""
    if p is INFINITY:
        return INFINITY
    if isinstance(p, EigenTuple):
        return p.entries
    values = tuple(float(t) for t in p)
    if not all(math.isfinite(t) for t in values):
        return INFINITY
    return values


def face_member(p, i: int, tol: Optional[float] = None) -> bool:
    """True iff ``p`` lies on the face ``t_i = t_{i+1}``.

    The basepoint lies on every face.  ``tol`` is the relative tolerance;
    the comparison is ``|t_i - t_{i+1}| <= tol * (1 + max|t_j|)``.
    """
    if p is INFINITY:
        return True
    t = as_point(p)
    if t is INFINITY:
        return True
    if not 0 <= i <= len(t) - 2:
        raise IndexError(f"face index {i} out of range for a point of D({len(t)})")
    return abs(t[i] - t[i + 1]) <= _face_tol(t, tol)


SPACE_KINDS = ("D", "D+", "D+/D0", "D^D+")


@dataclass(frozen=True)
class FacialMap:
    """A based map between facial spaces.

    ``eval`` receives a tuple of floats (for ``space_kind == "D^D+"`` a pair
    ``(s, t)`` of tuples, ``split`` giving ``len(s)``) and returns a tuple,
    :data:`INFINITY`, or a :class:`Smash` whose ``point`` is the facial part.
    Non-finite output coordinates are read as the basepoint.
    """

    dim_in: int
    dim_out: int
    space_kind: str
    eval: Callable[[Any], Any]
    label: str = ""
    split: Optional[int] = None

    def __post_init__(self):
        if self.space_kind not in SPACE_KINDS:
            raise ValueError(f"unknown space kind {self.space_kind!r}")
        if self.space_kind == "D^D+" and self.split is None:
            raise ValueError("smash-product domains need split = dim of the D factor")

    def __call__(self, p):
        if p is INFINITY:
            return INFINITY
        if self.space_kind == "D^D+":
            s, t = p
            arg = (tuple(float(x) for x in s), tuple(float(x) for x in t))
        else:
            arg = as_point(p)
            if arg is INFINITY:
                return INFINITY
        return normalize_image(self.eval(arg))


def normalize_image(img):
    if img is INFINITY or img is None:
        return INFINITY
    if isinstance(img, Smash):
        point = normalize_image(img.point)
        tag = img.tag
        if point is INFINITY or tag is INFINITY:
            return INFINITY
        if isinstance(tag, (float, int)) and not math.isfinite(tag):
            return INFINITY
        return Smash(point, tag)
    return as_point(img)


def image_point(img):
    """Facial part of an image (drops a smash tag)."""
    if isinstance(img, Smash):
        return img.point
    return img


# -- builtin facial maps -------------------------------------------------

def identity_map(d: int, space_kind: str = "D") -> FacialMap:
    return FacialMap(d, d, space_kind, lambda t: t, label="identity")


def shift_map(d: int, c: float) -> FacialMap:
    return FacialMap(d, d, "D", lambda t: tuple(x + c for x in t), label=f"shift:{c}")


def constant_infinity_map(d: int, space_kind: str = "D") -> FacialMap:
    return FacialMap(d, d, space_kind, lambda t: INFINITY, label="constant-infinity")


def reversal_map(d: int) -> FacialMap:
    """(t_0, ..., t_{d-1}) -> (-t_{d-1}, ..., -t_0)."""
    return FacialMap(d, d, "D", lambda t: tuple(-x for x in reversed(t)), label="reversal")


def canonical_splice(d0: int, k: int) -> FacialMap:
    """The homeomorphism D(d0-k) ^ D+(k) -> D(d0), (s, t) -> (s, s_top + t).

    With no ``s`` factor (k = d0) the top is taken as 0.
    """

    def ev(st):
        s, t = st
        top = s[-1] if s else 0.0
        return tuple(s) + tuple(top + x for x in t)

    return FacialMap(d0, d0, "D^D+", ev, label="canonical-splice", split=d0 - k)


# -- faciality check -----------------------------------------------------

@dataclass
class FacialReport:
    violations: list = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def _random_face_point(rng, d, i, kind):
    t = np.sort(rng.normal(scale=3.0, size=d))
    if kind in ("D+", "D+/D0"):
        t = np.sort(np.abs(t))
    if i == "D0":
        t[0] = 0.0
    else:
        t[i + 1] = t[i]
    return tuple(float(x) for x in t)


def verify_facial(f: FacialMap, samples: int = 1000, seed: int = 0, tol: Optional[float] = None) -> FacialReport:
    """Sample every face and record images that leave it.

    For maps out of D+(d) the face D0(d) is checked too: its image must have
    vanishing first coordinate, or be the basepoint (always the case for the
    quotient kind ``"D+/D0"``).  Smash-product domains are sampled by pulling
    the faces of D(d0) back along :func:`canonical_splice`.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    report = FacialReport()
    if f(INFINITY) is not INFINITY:
        report.violations.append({"face": "basepoint", "point": "INFINITY", "image": repr(f(INFINITY))})
    d = f.dim_in
    faces: list = list(range(d - 1))
    if f.space_kind in ("D+", "D+/D0"):
        faces.append("D0")
    if not faces:
        return report
    sample_kind = "D" if f.space_kind == "D^D+" else f.space_kind
    for n in range(samples):
        face = faces[n % len(faces)]
        p = _random_face_point(rng, d, face, sample_kind)
        if f.space_kind == "D^D+":
            a = f.split
            s = p[:a]
            top = s[-1] if s else 0.0
            arg = (s, tuple(x - top for x in p[a:]))
        else:
            arg = p
        img = image_point(f(arg))
        report.checked += 1
        if img is INFINITY:
            continue
        if face == "D0":
            if f.space_kind == "D+/D0":
                bad = True
            else:
                bad = abs(img[0]) > _face_tol(img, tol)
        else:
            bad = not face_member(img, face, tol)
        if bad:
            report.violations.append({"face": face, "point": p, "image": img})
    return report


# -- hat construction ----------------------------------------------------

def _hat_eval(f, t):
    t0, tl = t[0], t[-1]
    img = image_point(f((t0, tl)))
    if img is INFINITY:
        return INFINITY
    g, top = img
    d = len(t)
    if not t0 < tl:
        return (g,) * d
    h = top - g
    out = [g + (ti - t0) / (tl - t0) * h for ti in t]
    out[0], out[-1] = g, top
    return tuple(out)


def hat(f: FacialMap, d: int) -> FacialMap:
    """Extend a facial self-map of D+(2) to D+(d).

    Writing ``f(t0, t1) = (g, g + h)``, coordinate ``i`` of the output is
    ``g + (t_i - t0) / (t_{d-1} - t0) * h`` evaluated at ``(t0, t_{d-1})``,
    and ``g`` on the diagonal.
    """
    if d < 2:
        raise ValueError(f"hat needs d >= 2, got {d}")
    return FacialMap(d, d, "D+", lambda t: _hat_eval(f, t), label=f"hat({f.label})")


# -- conformal chart and NDR data ---------------------------------------

def conformal(p) -> complex:
    """phi(t0, t1) = (i - (t1 + i t0)^2) / (i + (t1 + i t0)^2); INFINITY -> -1."""
    if p is INFINITY:
        return complex(-1.0, 0.0)
    t0, t1 = as_point(p)
    w = complex(t1, t0) ** 2
    return (1j - w) / (1j + w)


def conformal_inv(z: complex):
    """Inverse of :func:`conformal` on the closed upper half disc."""
    z = complex(z)
    if z == -1:
        return INFINITY
    w = 1j * (1 - z) / (1 + z)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        return INFINITY
    # land in the closed first quadrant so that sqrt has arg in [0, pi/4]
    w = complex(max(w.real, 0.0), max(w.imag, 0.0))
    v = np.sqrt(w)
    re, im = float(v.real), float(v.imag)
    if im > re:
        re = im = 0.5 * (re + im)
    return (im, re)


NDRValue = namedtuple("NDRValue", ["u", "h"])

_DISC_SLACK = 1e-12


def _check_halfdisc(z):
    if abs(z) > 1 + _DISC_SLACK or z.imag < -_DISC_SLACK:
        raise ValueError(f"{z} is not in the closed upper half disc")


def halfdisc_u(z: complex) -> float:
    return min(1.0, max(0.0, 2.0 - 2.0 * abs(z)))


def halfdisc_h(z: complex, t: float) -> complex:
    r = abs(z)
    if r == 0:
        return 0j
    return z * (min(1.0, (2.0 - t) * r) / r)


def dplus2_u(p) -> float:
    return halfdisc_u(conformal(p))


def dplus2_h(p, t: float):
    if p is INFINITY:
        return INFINITY
    return conformal_inv(halfdisc_h(conformal(p), t))


def dplus2_homotopy(t: float) -> FacialMap:
    """h'_t as a self-map of D+(2)."""
    return FacialMap(2, 2, "D+", lambda p: dplus2_h(p, t), label=f"h'_{t}")


def ndr_pair(pair_id: str, point, t: float) -> NDRValue:
    """The NDR data (u, h_t) of one of the three pairs.

    ``halfdisc``: closed upper half disc rel. the upper semicircle.
    ``dplus2``: D+(2) rel. D0(2), transported through :func:`conformal`.
    ``hom``: Hom(V, W) compactified, rel. the non-injective maps; ``point`` is
    a matrix and ``h_t`` is the singular-value calculus of ``hat(h'_t)``.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if pair_id == "halfdisc":
        z = complex(point)
        _check_halfdisc(z)
        return NDRValue(halfdisc_u(z), halfdisc_h(z, t))
    if pair_id == "dplus2":
        if point is INFINITY:
            return NDRValue(0.0, INFINITY)
        p = as_point(point)
        if p is INFINITY:
            return NDRValue(0.0, INFINITY)
        if len(p) != 2 or p[0] < -_DISC_SLACK or p[1] < p[0] - _DISC_SLACK * (1 + abs(p[1])):
            raise ValueError(f"{point} is not in D+(2)")
        return NDRValue(dplus2_u(p), dplus2_h(p, t))
    if pair_id == "hom":
        from . import opcalc

        if point is INFINITY:
            return NDRValue(0.0, INFINITY)
        gamma = np.asarray(point, dtype=complex)
        if gamma.ndim != 2:
            raise ValueError("hom pair points are matrices")
        e = opcalc.singular_values_sorted(gamma)
        u = dplus2_u((e[0], e[-1]))
        h = dplus2_homotopy(t)
        d = gamma.shape[1]
        lifted = FacialMap(d, d, "D+", lambda s: _hat_eval(h, s), label=f"hat(h'_{t})")
        return NDRValue(u, opcalc.apply_B(lifted, gamma))
    raise ValueError(f"unknown NDR pair {pair_id!r}")


# -- degrees -------------------------------------------------------------

@dataclass(frozen=True)
class CircleMap:
    """A self-map of the compactified line R u {INFINITY}."""

    eval: Callable[[Any], Any]
    label: str = ""

    def __call__(self, x):
        try:
            y = self.eval(x)
        except (OverflowError, ZeroDivisionError):
            return INFINITY
        if y is INFINITY or y is None:
            return INFINITY
        y = float(y)
        return y if math.isfinite(y) else INFINITY


def _line_angle(x) -> float:
    if x is INFINITY:
        return math.pi
    return 2.0 * math.atan(x)


def _wrap(a: float) -> float:
    """Reduce an angle difference to [-pi, pi)."""
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def circle_degree(m: Callable, samples: int = 1024, max_evals: int = 2 ** 20) -> int:
    """Degree of a self-map of R u {INFINITY}, oriented by increasing t.

    Works in the angle chart 2*arctan; consecutive image angles further
    apart than pi/2 are bisected until every step is short.
    """
    if samples < 4:
        raise ValueError("samples must be at least 4")
    cm = m if isinstance(m, CircleMap) else CircleMap(m)

    def point(theta):
        if abs(theta) >= math.pi:
            return INFINITY
        return math.tan(theta / 2.0)

    def angle_at(theta):
        return _line_angle(cm(point(theta)))

    thetas = np.linspace(-math.pi, math.pi, samples + 1)
    angles = [angle_at(th) for th in thetas]
    evals = len(angles)
    total = 0.0
    stack = [(thetas[i], thetas[i + 1], angles[i], angles[i + 1]) for i in range(samples)]
    stack.reverse()
    while stack:
        a, b, fa, fb = stack.pop()
        step = _wrap(fb - fa)
        if abs(step) < math.pi / 2:
            total += step
            continue
        mid = 0.5 * (a + b)
        if not a < mid < b or b - a < 1e-13:
            raise DegreeError(f"image angle jumps by {step:.3g} on an interval of width {b - a:.3g}")
        if evals >= max_evals:
            raise DegreeError(f"refinement exceeded {max_evals} evaluations")
        fm = angle_at(mid)
        evals += 1
        stack.append((mid, b, fm, fb))
        stack.append((a, mid, fa, fm))
    n = total / (2.0 * math.pi)
    deg = round(n)
    if abs(n - deg) > 1e-6:
        raise DegreeError(f"winding sum {n} is not an integer")
    return int(deg)


def _to_sphere(p) -> np.ndarray:
    """Inverse stereographic projection from the north pole."""
    if p is INFINITY:
        return np.array([0.0, 0.0, 1.0])
    x, y = p
    r = math.hypot(x, y)
    if r == 0:
        return np.array([0.0, 0.0, -1.0])
    if r <= 1.0:
        den = r * r + 1.0
        return np.array([2 * x / den, 2 * y / den, (r * r - 1.0) / den])
    q = 1.0 / r
    den = 1.0 + q * q
    return np.array([2 * (x / r) * q / den, 2 * (y / r) * q / den, (1.0 - q * q) / den])


def _to_plane(v: np.ndarray):
    x, y, z = v
    if z >= 1.0 - 1e-15 and abs(x) + abs(y) < 1e-12:
        return INFINITY
    den = 1.0 - z
    if den <= 0:
        return INFINITY
    return (x / den, y / den)


def _plane_eval(m, p):
    try:
        img = m(p)
    except (OverflowError, ZeroDivisionError):
        return INFINITY
    if img is INFINITY or img is None:
        return INFINITY
    x, y = float(img[0]), float(img[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        return INFINITY
    return (x, y)


def _octahedron_mesh(grid: int):
    axes = [np.eye(3)[i] for i in range(3)]
    faces = []
    for sx in (1, -1):
        for sy in (1, -1):
            for sz in (1, -1):
                a, b, c = sx * axes[0], sy * axes[1], sz * axes[2]
                if sx * sy * sz < 0:
                    b, c = c, b
                faces.append((a, b, c))
    verts: dict = {}
    pts: list = []

    def vid(v):
        v = v / np.linalg.norm(v)
        key = tuple(np.round(v, 12))
        if key not in verts:
            verts[key] = len(pts)
            pts.append(v)
        return verts[key]

    tris = []
    n = grid
    for a, b, c in faces:
        def node(i, j):
            return vid(a + (b - a) * (i / n) + (c - a) * (j / n))

        for i in range(n):
            for j in range(n - i):
                tris.append((node(i, j), node(i + 1, j), node(i, j + 1)))
                if i + j < n - 1:
                    tris.append((node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)))
    return pts, tris


def sphere_degree(m: Callable, grid: int = 16, seed: int = 0, retries: int = 3,
                  max_angle: float = 0.25, max_evals: int = 2 ** 20) -> int:
    """Degree of a based self-map of the compactified plane.

    The sphere is triangulated (a subdivided octahedron, refined wherever an
    image edge is longer than ``max_angle``), and the signed count of image
    triangles covering a random regular value is returned.
    """
    if grid < 1:
        raise ValueError("grid must be positive")
    pts, tris = _octahedron_mesh(grid)
    cache: dict = {}

    def image_of(idx):
        if idx not in cache:
            cache[idx] = _to_sphere(_plane_eval(m, _to_plane(pts[idx])))
        return cache[idx]

    midpoints: dict = {}

    def midpoint(i, j):
        key = (min(i, j), max(i, j))
        if key not in midpoints:
            v = pts[i] + pts[j]
            norm = np.linalg.norm(v)
            if norm < 1e-15:
                raise DegreeError("antipodal mesh edge")
            pts.append(v / norm)
            midpoints[key] = len(pts) - 1
        return midpoints[key]

    def chord(u, v):
        return float(np.linalg.norm(u - v))

    limit = 2.0 * math.sin(max_angle / 2.0)
    final = []
    stack = list(tris)
    while stack:
        i, j, k = stack.pop()
        a, b, c = image_of(i), image_of(j), image_of(k)
        if max(chord(a, b), chord(b, c), chord(c, a)) <= limit:
            final.append((i, j, k))
            continue
        size = max(chord(pts[i], pts[j]), chord(pts[j], pts[k]), chord(pts[k], pts[i]))
        if size < 1e-9:
            raise DegreeError("image triangles do not shrink under refinement")
        if len(cache) >= max_evals:
            raise DegreeError(f"refinement exceeded {max_evals} evaluations")
        ij, jk, ki = midpoint(i, j), midpoint(j, k), midpoint(k, i)
        stack.extend([(i, ij, ki), (ij, j, jk), (ki, jk, k), (ij, jk, ki)])
    idx = np.array(final)
    table = np.zeros((len(pts), 3))
    for n, v in cache.items():
        table[n] = v
    A, B, C = table[idx[:, 0]], table[idx[:, 1]], table[idx[:, 2]]
    orient = np.einsum("ij,ij->i", A, np.cross(B, C))
    rng = np.random.default_rng(seed)
    for _ in range(retries):
        y = rng.normal(size=3)
        y /= np.linalg.norm(y)
        deg = _signed_cover(A, B, C, orient, y)
        if deg is not None:
            return deg
    raise DegreeError(f"no regular value found after {retries} attempts")


def _signed_cover(A, B, C, orient, y, eps=1e-12):
    near = (A + B + C) @ y > 0
    dab = np.cross(A, B) @ y
    dbc = np.cross(B, C) @ y
    dca = np.cross(C, A) @ y
    sgn = np.sign(orient)
    inside = near & (dab * sgn > 0) & (dbc * sgn > 0) & (dca * sgn > 0)
    # y close to an edge or a degenerate triangle near y: not regular
    closest = np.minimum(np.minimum(np.abs(dab), np.abs(dbc)), np.abs(dca))
    slack = near & (dab * sgn > -eps) & (dbc * sgn > -eps) & (dca * sgn > -eps)
    if np.any(slack & (closest <= eps)):
        return None
    if np.any(inside & (np.abs(orient) <= eps ** 2)):
        return None
    return int(np.sum(sgn[inside]))


def diagonal_restriction(f: FacialMap) -> CircleMap:
    """t -> f(t, ..., t), read back on the diagonal."""
    d = f.dim_in

    def ev(t):
        if t is INFINITY:
            return INFINITY
        img = image_point(f((t,) * d))
        if img is INFINITY:
            return INFINITY
        return img[0]

    return CircleMap(ev, label=f"{f.label}'")


def facially_homotopic(f: FacialMap, g: FacialMap, samples: int = 1024) -> bool:
    """Degree criterion for a facial homotopy between two self-maps of D(d)."""
    if f.dim_in != g.dim_in:
        raise ValueError("maps live on different D(d)")
    return circle_degree(diagonal_restriction(f), samples) == circle_degree(diagonal_restriction(g), samples)
