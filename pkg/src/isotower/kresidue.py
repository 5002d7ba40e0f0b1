"""Exact arithmetic in representation rings of abelian compact Lie groups.

For G = C_{n_1} x ... x C_{n_r} x T^m the representation ring is the group
ring of the character lattice: Laurent polynomials in r + m variables with
the first r exponents read mod n_i.  Everything here is integer arithmetic.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class GroupSpecError(ValueError):
    pass


@dataclass(frozen=True)
class AbelianGroupSpec:
    cyclic_orders: tuple = ()
    torus_rank: int = 0

    def __post_init__(self):
        orders = tuple(int(n) for n in self.cyclic_orders)
        object.__setattr__(self, "cyclic_orders", orders)
        if any(n < 1 for n in orders):
            raise GroupSpecError(f"cyclic orders must be >= 1, got {orders}")
        if int(self.torus_rank) < 0:
            raise GroupSpecError("torus rank must be >= 0")
        object.__setattr__(self, "torus_rank", int(self.torus_rank))

    @property
    def rank(self) -> int:
        return len(self.cyclic_orders) + self.torus_rank

    def reduce(self, exponents: Sequence[int]) -> tuple:
        exponents = tuple(int(e) for e in exponents)
        if len(exponents) != self.rank:
            raise GroupSpecError(f"character needs {self.rank} exponents, got {len(exponents)}")
        r = len(self.cyclic_orders)
        return tuple(e % n for e, n in zip(exponents[:r], self.cyclic_orders)) + exponents[r:]

    def finite_characters(self):
        """All characters, when the group is finite."""
        if self.torus_rank:
            raise GroupSpecError("a torus has infinitely many characters")
        return [tuple(c) for c in itertools.product(*(range(n) for n in self.cyclic_orders))]

    def variable_names(self) -> list:
        if self.rank == 1:
            return ["x"]
        return [f"x{i + 1}" for i in range(self.rank)]


def character(group: AbelianGroupSpec, exponents: Sequence[int]) -> tuple:
    return group.reduce(exponents)


class RepRingElem:
    """A finitely supported integer combination of characters, kept canonical."""

    __slots__ = ("group", "terms")

    def __init__(self, group: AbelianGroupSpec, terms=None):
        self.group = group
        clean = {}
        for ch, c in (terms or {}).items():
            ch = group.reduce(ch)
            clean[ch] = clean.get(ch, 0) + int(c)
        self.terms = {ch: c for ch, c in clean.items() if c != 0}

    @classmethod
    def one(cls, group):
        return cls(group, {(0,) * group.rank: 1})

    @classmethod
    def zero(cls, group):
        return cls(group)

    @classmethod
    def of_character(cls, group, ch, coeff: int = 1):
        return cls(group, {tuple(ch): coeff})

    def _coerce(self, other) -> "RepRingElem":
        if isinstance(other, RepRingElem):
            if other.group != self.group:
                raise GroupSpecError("elements of different representation rings")
            return other
        if isinstance(other, int):
            return RepRingElem(self.group, {(0,) * self.group.rank: other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for ch, c in other.terms.items():
            terms[ch] = terms.get(ch, 0) + c
        return RepRingElem(self.group, terms)

    __radd__ = __add__

    def __neg__(self):
        return RepRingElem(self.group, {ch: -c for ch, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                ch = self.group.reduce(x + y for x, y in zip(a, b))
                terms[ch] = terms.get(ch, 0) + ca * cb
        return RepRingElem(self.group, terms)

    __rmul__ = __mul__

    def __eq__(self, other):
        other = self._coerce(other) if isinstance(other, (RepRingElem, int)) else NotImplemented
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash((self.group, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def unit_character(self):
        """The character c if self = +-[c], else None."""
        if len(self.terms) == 1:
            (ch, c), = self.terms.items()
            if c in (1, -1):
                return ch
        return None

    def inverse(self) -> "RepRingElem":
        ch = self.unit_character()
        if ch is None:
            raise ZeroDivisionError(f"{self} is not a unit")
        c = self.terms[ch]
        return RepRingElem(self.group, {tuple(-e for e in ch): c})

    def sorted_terms(self):
        return sorted(self.terms.items())

    def to_json(self) -> list:
        return [{"exponents": list(ch), "coeff": c} for ch, c in self.sorted_terms()]

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.group.variable_names()
        parts = []
        for ch, c in self.sorted_terms():
            mono = "*".join(
                name if e == 1 else f"{name}^{e}" for name, e in zip(names, ch) if e != 0
            )
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            parts.append(("-" if c < 0 else "+", body))
        sign, body = parts[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"RepRingElem({self})"


@dataclass(frozen=True)
class Representation:
    """A sum of one-dimensional representations, given by their characters."""

    group: AbelianGroupSpec
    characters: tuple = field(default=())

    def __post_init__(self):
        chars = tuple(sorted(self.group.reduce(c) for c in self.characters))
        object.__setattr__(self, "characters", chars)

    @property
    def dim(self) -> int:
        return len(self.characters)

    def __add__(self, other: "Representation"):
        if other.group != self.group:
            raise GroupSpecError("direct sum of representations of different groups")
        return Representation(self.group, self.characters + other.characters)

    def contains(self, other: "Representation") -> bool:
        """Character-multiset inclusion other <= self."""
        mine = Counter(self.characters)
        return all(mine[c] >= n for c, n in Counter(other.characters).items())


class KPolynomial:
    """A polynomial in z over R(G); ``coeffs[i]`` multiplies z^i."""

    __slots__ = ("group", "coeffs")

    def __init__(self, group: AbelianGroupSpec, coeffs: Iterable = ()):
        self.group = group
        cs = [c if isinstance(c, RepRingElem) else RepRingElem(group, {(0,) * group.rank: int(c)})
              for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = cs

    @classmethod
    def monomial(cls, group, i: int, coeff=None):
        c = RepRingElem.one(group) if coeff is None else coeff
        return cls(group, [RepRingElem.zero(group)] * i + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> RepRingElem:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return RepRingElem.zero(self.group)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == RepRingElem.one(self.group)

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return KPolynomial(self.group, [self.coeff(i) + other.coeff(i) for i in range(n)])

    def __neg__(self):
        return KPolynomial(self.group, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RepRingElem):
            return KPolynomial(self.group, [c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return KPolynomial(self.group)
        out = [RepRingElem.zero(self.group) for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return KPolynomial(self.group, out)

    def __eq__(self, other):
        if not isinstance(other, KPolynomial):
            return NotImplemented
        return self.group == other.group and self.coeffs == other.coeffs

    def divmod(self, q: "KPolynomial"):
        """Long division by a monic polynomial: self = quotient * q + remainder."""
        if not q.is_monic():
            raise ValueError("division needs a monic divisor")
        d = q.degree
        rem = list(self.coeffs)
        quot = [RepRingElem.zero(self.group)] * max(len(rem) - d, 0)
        for i in range(len(rem) - 1, d - 1, -1):
            c = rem[i]
            if c.is_zero():
                continue
            quot[i - d] = c
            for j, b in enumerate(q.coeffs):
                rem[i - d + j] = rem[i - d + j] - c * b
        return KPolynomial(self.group, quot), KPolynomial(self.group, rem[:d])

    def to_json(self) -> list:
        return [c.to_json() for c in self.coeffs]

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c.is_zero():
                continue
            zpow = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            if not zpow:
                parts.append(str(c))
            elif c == RepRingElem.one(self.group):
                parts.append(zpow)
            elif c == -RepRingElem.one(self.group):
                parts.append(f"-{zpow}")
            else:
                parts.append(f"({c})*{zpow}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"KPolynomial({self})"


def elementary_symmetric(elems: Sequence[RepRingElem], group) -> list:
    """e_0, ..., e_n of the given ring elements."""
    es = [RepRingElem.one(group)]
    for x in elems:
        es = [es[0]] + [es[i] + es[i - 1] * x for i in range(1, len(es))] + [es[-1] * x]
    return es


def exterior_powers(V: Representation) -> list:
    """lambda^0(V), ..., lambda^d(V)."""
    lines = [RepRingElem.of_character(V.group, c) for c in V.characters]
    return elementary_symmetric(lines, V.group)


def k_polynomial(V: Representation) -> KPolynomial:
    """f_V(z) = sum_k (-1)^k lambda^k(V) z^(d-k)."""
    lam = exterior_powers(V)
    d = V.dim
    coeffs = [RepRingElem.zero(V.group)] * (d + 1)
    for k, l in enumerate(lam):
        coeffs[d - k] = l if k % 2 == 0 else -l
    return KPolynomial(V.group, coeffs)


def linear_factor_product(V: Representation) -> KPolynomial:
    """prod_i (z - [L_i]) expanded directly."""
    out = KPolynomial(V.group, [RepRingElem.one(V.group)])
    for c in V.characters:
        out = out * KPolynomial(V.group, [-RepRingElem.of_character(V.group, c), RepRingElem.one(V.group)])
    return out


def residue(g: KPolynomial, q: KPolynomial) -> RepRingElem:
    """res(g/q dz) at infinity: the z^(deg q - 1) coefficient of g mod q."""
    if not q.is_monic():
        raise ValueError("residue needs a monic denominator")
    _, rem = g.divmod(q)
    return rem.coeff(q.degree - 1)


def gysin_values(V: Representation) -> list:
    """r_i = res(z^i / f_V dz) for 0 <= i < d."""
    f = k_polynomial(V)
    return [residue(KPolynomial.monomial(V.group, i), f) for i in range(V.dim)]


def normalization_sum(V: Representation, r: Sequence[RepRingElem] | None = None) -> KPolynomial:
    """sum_{0 <= i+j < d} a_{i+j+1} z^i r_j, which must equal 1."""
    f = k_polynomial(V)
    r = gysin_values(V) if r is None else r
    d = V.dim
    out = [RepRingElem.zero(V.group)] * d
    for i in range(d):
        for j in range(d - i):
            out[i] = out[i] + f.coeff(i + j + 1) * r[j]
    return KPolynomial(V.group, out)


class BivariatePolynomial:
    """Polynomial in z, w over R(G), as {(i, j): coefficient}."""

    def __init__(self, group, terms=None):
        self.group = group
        self.terms = {ij: c for ij, c in (terms or {}).items() if not c.is_zero()}

    def __eq__(self, other):
        return self.group == other.group and self.terms == other.terms

    def __sub__(self, other):
        terms = dict(self.terms)
        for ij, c in other.terms.items():
            terms[ij] = terms.get(ij, RepRingElem.zero(self.group)) - c
        return BivariatePolynomial(self.group, terms)

    def times_z_minus_w(self):
        terms: dict = {}
        zero = RepRingElem.zero(self.group)
        for (i, j), c in self.terms.items():
            terms[(i + 1, j)] = terms.get((i + 1, j), zero) + c
            terms[(i, j + 1)] = terms.get((i, j + 1), zero) - c
        return BivariatePolynomial(self.group, terms)

    @classmethod
    def in_z(cls, f: KPolynomial):
        return cls(f.group, {(i, 0): c for i, c in enumerate(f.coeffs)})

    @classmethod
    def in_w(cls, f: KPolynomial):
        return cls(f.group, {(0, j): c for j, c in enumerate(f.coeffs)})

    def to_json(self):
        return [{"z": i, "w": j, "coeff": c.to_json()} for (i, j), c in sorted(self.terms.items())]


def diagonal_class(V: Representation) -> BivariatePolynomial:
    """(f_V(z) - f_V(w)) / (z - w) = sum_{0 <= i+j < d} a_{i+j+1} z^i w^j."""
    if V.dim == 0:
        raise ValueError("the diagonal class needs d >= 1")
    f = k_polynomial(V)
    d = V.dim
    return BivariatePolynomial(V.group, {(i, j): f.coeff(i + j + 1)
                                          for i in range(d) for j in range(d - i)})


def divides(p: KPolynomial, q: KPolynomial):
    """(True, quotient) if the monic p divides q in R(G)[z], else (False, None)."""
    quot, rem = q.divmod(p)
    if rem.is_zero():
        return True, quot
    return False, None


@dataclass
class ObstructionVerdict:
    f_v0: KPolynomial
    f_v1: KPolynomial
    divides: bool
    residues: list
    subrepresentation: bool

    def to_json(self) -> dict:
        return {
            "f_v0": self.f_v0.to_json(),
            "f_v1": self.f_v1.to_json(),
            "f_v0_text": str(self.f_v0),
            "f_v1_text": str(self.f_v1),
            "divides": self.divides,
            "residues": [r.to_json() for r in self.residues],
            "residues_text": [str(r) for r in self.residues],
            "subrepresentation": self.subrepresentation,
        }


def obstruction_check(V0: Representation, V1: Representation) -> ObstructionVerdict:
    """Residue pairings res(z^i f_V1 / f_V0 dz), the divisibility verdict and multiset inclusion."""
    if V0.group != V1.group:
        raise GroupSpecError("V0 and V1 must be representations of the same group")
    if V0.dim > V1.dim:
        raise ValueError(f"need dim V0 <= dim V1, got {V0.dim} > {V1.dim}")
    f0, f1 = k_polynomial(V0), k_polynomial(V1)
    residues = [residue(KPolynomial.monomial(V0.group, i) * f1, f0) for i in range(V0.dim)]
    div, _ = divides(f0, f1)
    if div != all(r.is_zero() for r in residues):
        raise AssertionError("residue criterion and long division disagree")
    return ObstructionVerdict(f0, f1, div, residues, V1.contains(V0))


def parse_group(obj) -> AbelianGroupSpec:
    """Group JSON: {"cyclic": [n1, ...], "torus_rank": r}."""
    if not isinstance(obj, dict):
        raise GroupSpecError("group must be a JSON object")
    extra = set(obj) - {"cyclic", "torus_rank"}
    if extra:
        raise GroupSpecError(
            f"unsupported group keys {sorted(extra)}: only finite abelian x torus groups, "
            "given as {\"cyclic\": [...], \"torus_rank\": r}, are supported")
    cyclic = obj.get("cyclic", [])
    if not isinstance(cyclic, list) or not all(isinstance(n, int) and not isinstance(n, bool) for n in cyclic):
        raise GroupSpecError("\"cyclic\" must be a list of integers")
    rank = obj.get("torus_rank", 0)
    if not isinstance(rank, int) or isinstance(rank, bool):
        raise GroupSpecError("\"torus_rank\" must be an integer")
    return AbelianGroupSpec(tuple(cyclic), rank)


def parse_representation(group: AbelianGroupSpec, obj) -> Representation:
    """Representation JSON: an array of characters, each an integer array."""
    if not isinstance(obj, list):
        raise GroupSpecError("a representation is a JSON array of characters")
    chars = []
    for c in obj:
        if not isinstance(c, list) or not all(isinstance(e, int) and not isinstance(e, bool) for e in c):
            raise GroupSpecError(f"character {c!r} is not an integer array")
        chars.append(group.reduce(c))
    return Representation(group, tuple(chars))
