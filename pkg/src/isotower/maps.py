"""Named builtin maps used by the degree checks and the command line.

The collapse f'' and the embedding f''' are written so that they accept
either floats or ``mpmath`` numbers.  Near the collapse boundary
t = -log 6, f'' has slope of order exp(|t|), so composing f'' with f'''
in double precision loses roughly |t|/ln(10) - 3 digits; feeding ``mpf``
values keeps the composition exact to the working precision.
"""
from __future__ import annotations

import math

import mpmath

from .facial import (INFINITY, CircleMap, FacialMap, constant_infinity_map,
                     identity_map, shift_map)

LOG6 = math.log(6.0)


def _is_mp(t) -> bool:
    return isinstance(t, mpmath.mpf)


def f_double_prime(t):
    """t -> log(8 e^t / (1 - 6 e^t)) for t < -log 6, INFINITY otherwise."""
    if t is INFINITY:
        return INFINITY
    if _is_mp(t):
        if t >= -mpmath.log(6):
            return INFINITY
        return mpmath.log(8) + t - mpmath.log1p(-6 * mpmath.exp(t))
    if t >= -LOG6:
        return INFINITY
    gap = 1.0 - 6.0 * math.exp(t)
    if gap <= 0.0:
        return INFINITY
    return math.log(8.0) + t - math.log1p(-6.0 * math.exp(t))


def f_triple_prime(t):
    """t -> log(e^t / (8 + 6 e^t)), an embedding of R onto (-inf, -log 6)."""
    if _is_mp(t):
        return t - mpmath.log(8 + 6 * mpmath.exp(t))
    # log(8 + 6 e^t) without overflow for large t
    return t - float(logaddexp(math.log(8.0), math.log(6.0) + t))


def logaddexp(a: float, b: float) -> float:
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def g_triple_prime(p):
    """(s, t) -> (t - e^{-s}, -s); INFINITY is fixed."""
    if p is INFINITY:
        return INFINITY
    s, t = p
    if -s > 700.0:
        return INFINITY
    return (t - math.exp(-s), -s)


def reflection(p):
    if p is INFINITY:
        return INFINITY
    s, t = p
    return (-s, t)


def plane_identity(p):
    return p


def negation(t):
    return INFINITY if t is INFINITY else -t


def line_identity(t):
    return t


CIRCLE_MAPS = {
    "identity": line_identity,
    "negation": negation,
    "f-double-prime": f_double_prime,
    "constant-infinity": lambda t: INFINITY,
}

SPHERE_MAPS = {
    "plane-identity": plane_identity,
    "g-triple-prime": g_triple_prime,
    "reflection": reflection,
    "constant-infinity-plane": lambda p: INFINITY,
}


class UnknownMapError(KeyError):
    pass


def degree_map(name: str):
    """Return ("circle" | "sphere", callable) for a builtin id."""
    if name in CIRCLE_MAPS:
        return "circle", CircleMap(CIRCLE_MAPS[name], label=name)
    if name in SPHERE_MAPS:
        return "sphere", SPHERE_MAPS[name]
    if name.startswith("shift:"):
        c = _parse_shift(name)
        return "circle", CircleMap(lambda t: INFINITY if t is INFINITY else t + c, label=name)
    raise UnknownMapError(f"unknown map {name!r}; known: {sorted(list(CIRCLE_MAPS) + list(SPHERE_MAPS)) + ['shift:<c>']}")


def _parse_shift(name: str) -> float:
    try:
        c = float(name.split(":", 1)[1])
    except ValueError:
        raise UnknownMapError(f"bad shift constant in {name!r}") from None
    if not math.isfinite(c):
        raise UnknownMapError(f"bad shift constant in {name!r}")
    return c


def facial_map(name: str, d: int) -> FacialMap:
    """A builtin facial self-map of D(d), applied entrywise where that makes sense."""
    if name == "identity":
        return identity_map(d)
    if name == "constant-infinity":
        return constant_infinity_map(d)
    if name.startswith("shift:"):
        return shift_map(d, _parse_shift(name))
    if name == "f-double-prime":
        def ev(t):
            out = tuple(f_double_prime(x) for x in t)
            return INFINITY if any(x is INFINITY for x in out) else out
        return FacialMap(d, d, "D", ev, label=name)
    raise UnknownMapError(f"{name!r} is not a builtin facial map")
