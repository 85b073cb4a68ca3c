"""Exact scalar arithmetic: Gaussian rationals and sparse multivariate polynomials.

Every displayed coefficient in the structure-equation machinery lives in the
commutative ring Q(i)[x1, x1*, x2, x2*, ...] where conjugate symbols are
independent generators linked only by an involution on names.  Keeping the
ring exact (Fraction-backed) lets closure identities be asserted as literal
zero instead of small floats.
"""

from __future__ import annotations

import cmath
import random
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence


class QQi:
    """A Gaussian rational: re + i*im with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def of(value) -> "QQi":
        """Coerce an int, Fraction, float, complex or QQi to QQi.

        Floats are converted exactly (binary rational), which is how radical
        model constants enter the exact pipeline: the tiny representation
        error is carried faithfully and judged against tolerances at the end.
        """
        if isinstance(value, QQi):
            return value
        if isinstance(value, complex):
            return QQi(Fraction(value.real), Fraction(value.imag))
        return QQi(Fraction(value))

    def __add__(self, other) -> "QQi":
        if not _qqi_like(other):
            return NotImplemented
        other = QQi.of(other)
        return QQi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> "QQi":
        return QQi(-self.re, -self.im)

    def __sub__(self, other) -> "QQi":
        if not _qqi_like(other):
            return NotImplemented
        return self + (-QQi.of(other))

    def __rsub__(self, other) -> "QQi":
        return QQi.of(other) + (-self)

    def __mul__(self, other) -> "QQi":
        if not _qqi_like(other):
            return NotImplemented
        other = QQi.of(other)
        return QQi(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def inv(self) -> "QQi":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of 0 in Q(i)")
        return QQi(self.re / n, -self.im / n)

    def __truediv__(self, other) -> "QQi":
        return self * QQi.of(other).inv()

    def conj(self) -> "QQi":
        return QQi(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def to_complex(self) -> complex:
        return complex(self.re, self.im)

    def quadruple(self) -> tuple[int, int, int, int]:
        """(re_num, re_den, im_num, im_den), the serialized wire form."""
        return (
            self.re.numerator,
            self.re.denominator,
            self.im.numerator,
            self.im.denominator,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, (QQi, int, Fraction, float, complex)):
            return NotImplemented
        other = QQi.of(other)
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self) -> str:
        if self.im == 0:
            return f"{self.re}"
        if self.re == 0:
            return f"{self.im}i"
        return f"({self.re}{'+' if self.im > 0 else ''}{self.im}i)"


def _qqi_like(value) -> bool:
    return isinstance(value, (QQi, int, Fraction, float, complex))


I = QQi(0, 1)
ONE = QQi(1)
ZERO = QQi(0)


def frac(num, den=1) -> QQi:
    return QQi(Fraction(num, den))


class SymbolTable:
    """Declared scalar symbols with a conjugation involution on names.

    Real symbols are their own conjugates.  Complex symbols come in pairs
    (name, conjugate-name); both directions are registered.
    """

    def __init__(self):
        self._conj: dict[str, str] = {}
        self._real: set[str] = set()
        self._order: list[str] = []

    @staticmethod
    def make(real: Sequence[str] = (), complex_pairs: Sequence[tuple[str, str]] = ()) -> "SymbolTable":
        t = SymbolTable()
        for name in real:
            t.add_real(name)
        for name, cname in complex_pairs:
            t.add_complex(name, cname)
        return t

    def add_real(self, name: str) -> None:
        self._declare(name, name)
        self._real.add(name)

    def add_complex(self, name: str, conj_name: str) -> None:
        if name == conj_name:
            raise ValueError(f"complex symbol {name!r} needs a distinct conjugate name")
        self._declare(name, conj_name)
        self._declare(conj_name, name)

    def _declare(self, name: str, conj_name: str) -> None:
        if name in self._conj:
            if self._conj[name] != conj_name:
                raise ValueError(f"symbol {name!r} redeclared with different conjugate")
            return
        self._conj[name] = conj_name
        self._order.append(name)

    def conj(self, name: str) -> str:
        try:
            return self._conj[name]
        except KeyError:
            raise KeyError(f"undeclared symbol {name!r}") from None

    def is_real(self, name: str) -> bool:
        return name in self._real

    def __contains__(self, name: str) -> bool:
        return name in self._conj

    def names(self) -> list[str]:
        return list(self._order)

    def merged(self, other: "SymbolTable") -> "SymbolTable":
        t = SymbolTable()
        for src in (self, other):
            for name in src._order:
                t._declare(name, src._conj[name])
                if name in src._real:
                    t._real.add(name)
        return t


Monomial = tuple[tuple[str, int], ...]  # sorted by name, exponents > 0

_EMPTY: Monomial = ()


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for name, e in m2:
        d[name] = d.get(name, 0) + e
    return tuple(sorted((n, e) for n, e in d.items() if e))


class ScalarPoly:
    """Sparse polynomial over QQi in named symbols; zero terms never stored."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, QQi] | None = None):
        self.terms: dict[Monomial, QQi] = {}
        if terms:
            for m, c in terms.items():
                if not c.is_zero():
                    self.terms[m] = c

    @staticmethod
    def const(value) -> "ScalarPoly":
        c = QQi.of(value)
        return ScalarPoly({_EMPTY: c}) if not c.is_zero() else ScalarPoly()

    @staticmethod
    def symbol(name: str) -> "ScalarPoly":
        return ScalarPoly({((name, 1),): ONE})

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _EMPTY in self.terms)

    def const_value(self) -> QQi:
        if not self.is_const():
            raise ValueError("polynomial is not constant")
        return self.terms.get(_EMPTY, ZERO)

    def __add__(self, other) -> "ScalarPoly":
        if not _poly_like(other):
            return NotImplemented
        other = _as_poly(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, ZERO) + c
            if s.is_zero():
                out.pop(m, None)
            else:
                out[m] = s
        p = ScalarPoly()
        p.terms = out
        return p

    __radd__ = __add__

    def __neg__(self) -> "ScalarPoly":
        p = ScalarPoly()
        p.terms = {m: -c for m, c in self.terms.items()}
        return p

    def __sub__(self, other) -> "ScalarPoly":
        if not _poly_like(other):
            return NotImplemented
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "ScalarPoly":
        return _as_poly(other) + (-self)

    def __mul__(self, other) -> "ScalarPoly":
        if not _poly_like(other):
            return NotImplemented
        other = _as_poly(other)
        out: dict[Monomial, QQi] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                c = c1 * c2
                if c.is_zero():
                    continue
                m = _mono_mul(m1, m2)
                s = out.get(m, ZERO) + c
                if s.is_zero():
                    out.pop(m, None)
                else:
                    out[m] = s
        p = ScalarPoly()
        p.terms = out
        return p

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "ScalarPoly":
        if n < 0:
            raise ValueError("negative power")
        out = ScalarPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def scale(self, value) -> "ScalarPoly":
        return self * ScalarPoly.const(value)

    def conj(self, symbols: SymbolTable) -> "ScalarPoly":
        out: dict[Monomial, QQi] = {}
        for m, c in self.terms.items():
            mc = tuple(sorted((symbols.conj(n), e) for n, e in m))
            cc = c.conj()
            s = out.get(mc, ZERO) + cc
            if s.is_zero():
                out.pop(mc, None)
            else:
                out[mc] = s
        p = ScalarPoly()
        p.terms = out
        return p

    def partial(self, name: str) -> "ScalarPoly":
        out: dict[Monomial, QQi] = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(name, 0)
            if not e:
                continue
            if e == 1:
                del d[name]
            else:
                d[name] = e - 1
            mm = tuple(sorted(d.items()))
            s = out.get(mm, ZERO) + c * e
            if s.is_zero():
                out.pop(mm, None)
            else:
                out[mm] = s
        p = ScalarPoly()
        p.terms = out
        return p

    def subs(self, mapping: Mapping[str, "ScalarPoly | QQi | int"]) -> "ScalarPoly":
        """Substitute polynomials for symbols (applied simultaneously)."""
        cache: dict[tuple[str, int], ScalarPoly] = {}
        out = ScalarPoly()
        for m, c in self.terms.items():
            term = ScalarPoly.const(c)
            for name, e in m:
                if name in mapping:
                    key = (name, e)
                    if key not in cache:
                        cache[key] = _as_poly(mapping[name]) ** e
                    term = term * cache[key]
                else:
                    term = term * (ScalarPoly.symbol(name) ** e)
            out = out + term
        return out

    def eval(self, assignment: Mapping[str, complex]) -> complex:
        total = 0j
        for m, c in self.terms.items():
            v = c.to_complex()
            for name, e in m:
                try:
                    v *= assignment[name] ** e
                except KeyError:
                    raise KeyError(f"symbol {name!r} has no assigned value") from None
            total += v
        return total

    def symbols(self) -> set[str]:
        out: set[str] = set()
        for m in self.terms:
            for name, _ in m:
                out.add(name)
        return out

    def cancel_pairs(self, pairs: Iterable[tuple[str, str]]) -> "ScalarPoly":
        """Reduce modulo x*xinv = 1 for each (x, xinv) pair."""
        pairs = list(pairs)
        out: dict[Monomial, QQi] = {}
        for m, c in self.terms.items():
            d = dict(m)
            for x, xinv in pairs:
                k = min(d.get(x, 0), d.get(xinv, 0))
                if k:
                    d[x] -= k
                    d[xinv] -= k
            mm = tuple(sorted((n, e) for n, e in d.items() if e))
            s = out.get(mm, ZERO) + c
            if s.is_zero():
                out.pop(mm, None)
            else:
                out[mm] = s
        p = ScalarPoly()
        p.terms = out
        return p

    def __eq__(self, other) -> bool:
        if not isinstance(other, (ScalarPoly, QQi, int, Fraction, complex, float)):
            return NotImplemented
        return (self - _as_poly(other)).is_zero()

    def __hash__(self):
        return hash(frozenset((m, c) for m, c in self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for m, c in sorted(self.terms.items()):
            factors = "".join(
                f"*{n}" if e == 1 else f"*{n}^{e}" for n, e in m
            )
            bits.append(f"({c}){factors}")
        return " + ".join(bits)


def _poly_like(value) -> bool:
    return isinstance(value, (ScalarPoly, QQi, int, Fraction, float, complex))


def _as_poly(value) -> ScalarPoly:
    if isinstance(value, ScalarPoly):
        return value
    return ScalarPoly.const(value)


def sym(name: str) -> ScalarPoly:
    return ScalarPoly.symbol(name)


def const(value) -> ScalarPoly:
    return ScalarPoly.const(value)


IPOLY = ScalarPoly.const(I)


def solve_linear(poly: ScalarPoly, name: str) -> ScalarPoly:
    """Solve poly == 0 for a symbol that occurs linearly with constant pivot.

    Mirrors the fixed solve order of the classification chains, where each
    displayed coefficient equation is linear in its designated highest-order
    jet variable.
    """
    pivot = poly.partial(name)
    if pivot.is_zero():
        raise ValueError(f"{name!r} does not occur in the equation")
    if not pivot.is_const():
        raise ValueError(f"pivot for {name!r} is not constant: {pivot!r}")
    if name in pivot.symbols():
        raise ValueError(f"equation is not linear in {name!r}")
    rest = poly.subs({name: ScalarPoly()})
    return rest.scale(-pivot.const_value().inv() * ONE)


class NumericAssignment:
    """Seeded symbol values respecting conjugation: value(conj x) == conj(value x)."""

    def __init__(self, values: Mapping[str, complex], seed: int):
        self.values = dict(values)
        self.seed = seed

    def __getitem__(self, name: str) -> complex:
        return self.values[name]

    def __contains__(self, name: str) -> bool:
        return name in self.values

    def get(self, name, default=None):
        return self.values.get(name, default)

    def keys(self):
        return self.values.keys()


def random_assignment(
    symbols: SymbolTable,
    seed: int,
    magnitude: tuple[float, float] = (0.5, 2.0),
    overrides: Mapping[str, complex] | None = None,
) -> NumericAssignment:
    """Draw values with |value| in the given annulus, deterministic in seed.

    Symbols are visited in sorted order so the assignment depends only on
    (symbol set, seed).  Overrides are applied last, with conjugates synced.
    """
    rng = random.Random(seed)
    values: dict[str, complex] = {}
    lo, hi = magnitude
    for name in sorted(symbols.names()):
        if name in values:
            continue
        mag = lo + (hi - lo) * rng.random()
        if symbols.is_real(name):
            values[name] = complex(mag if rng.random() < 0.5 else -mag, 0.0)
        else:
            theta = 2.0 * cmath.pi * rng.random()
            z = mag * cmath.exp(1j * theta)
            values[name] = z
            values[symbols.conj(name)] = z.conjugate()
    if overrides:
        for name, val in overrides.items():
            values[name] = complex(val)
            cname = symbols.conj(name)
            if cname != name:
                values[cname] = complex(val).conjugate()
    return NumericAssignment(values, seed)
