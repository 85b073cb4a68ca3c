"""Free exterior algebra over a declared coframe, with symbolic d and numeric evaluation.

A Form is a graded element with ScalarPoly coefficients on strictly increasing
generator index tuples; antisymmetry is canonical (signs absorbed into
coefficients).  A StructureTable declares d of every generator (degree-2 rule)
and optionally d of scalar symbols (degree-1 rules); symbols without a rule
are d-closed.  Exterior differentiation against a table powers every closure
check in the package, in two flavors: exact, and seeded-numeric for the large
identities where full expansion is wasteful.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping, Sequence

from .scalars import (
    ONE,
    QQi,
    NumericAssignment,
    ScalarPoly,
    SymbolTable,
    _as_poly,
)


class ConfigurationError(ValueError):
    """Raised for undeclared generators/symbols or mismatched coframes."""


class Coframe:
    """Ordered 1-form generators with a conjugation involution on names."""

    def __init__(self, names: Sequence[str], conj: Mapping[str, str] | None = None):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ConfigurationError("duplicate generator names")
        self._index = {n: i for i, n in enumerate(self.names)}
        conj = dict(conj or {})
        self.conj_map: dict[str, str] = {}
        for n in self.names:
            c = conj.get(n, n)
            self.conj_map[n] = c
        for n, c in self.conj_map.items():
            if c not in self._index:
                raise ConfigurationError(f"conjugate generator {c!r} not declared")
            if self.conj_map[c] != n:
                raise ConfigurationError(f"conjugation is not an involution at {n!r}")

    @staticmethod
    def make(names: Sequence[str], pairs: Sequence[tuple[str, str]] = ()) -> "Coframe":
        conj = {}
        for a, b in pairs:
            conj[a] = b
            conj[b] = a
        return Coframe(names, conj)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ConfigurationError(f"undeclared generator {name!r}") from None

    def is_real(self, name: str) -> bool:
        return self.conj_map[name] == name

    def __eq__(self, other) -> bool:
        return isinstance(other, Coframe) and self.names == other.names and self.conj_map == other.conj_map

    def __hash__(self):
        return hash(self.names)

    def __repr__(self) -> str:
        return f"Coframe({list(self.names)})"


def _merge(t1: tuple[int, ...], t2: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """Merge two increasing index tuples; return (sign, merged) or None if repeated."""
    out: list[int] = []
    sign = 1
    i = j = 0
    n1, n2 = len(t1), len(t2)
    while i < n1 and j < n2:
        a, b = t1[i], t2[j]
        if a == b:
            return None
        if a < b:
            out.append(a)
            i += 1
        else:
            # move b across the remaining n1-i entries of t1
            if (n1 - i) % 2:
                sign = -sign
            out.append(b)
            j += 1
    out.extend(t1[i:])
    out.extend(t2[j:])
    return sign, tuple(out)


class Form:
    """Graded exterior-algebra element with polynomial coefficients."""

    __slots__ = ("coframe", "degree", "terms")

    def __init__(self, coframe: Coframe, degree: int, terms: Mapping[tuple[int, ...], ScalarPoly] | None = None):
        self.coframe = coframe
        self.degree = degree
        self.terms: dict[tuple[int, ...], ScalarPoly] = {}
        if terms:
            for idx, p in terms.items():
                if len(idx) != degree:
                    raise ConfigurationError(f"index tuple {idx} has wrong degree (want {degree})")
                if tuple(sorted(set(idx))) != idx:
                    raise ConfigurationError(f"index tuple {idx} is not strictly increasing")
                if not p.is_zero():
                    self.terms[idx] = p

    @staticmethod
    def zero(coframe: Coframe, degree: int = 0) -> "Form":
        return Form(coframe, degree)

    @staticmethod
    def scalar(coframe: Coframe, value) -> "Form":
        return Form(coframe, 0, {(): _as_poly(value)})

    @staticmethod
    def gen(coframe: Coframe, name: str) -> "Form":
        return Form(coframe, 1, {(coframe.index(name),): ScalarPoly.const(1)})

    @staticmethod
    def one_form(coframe: Coframe, coeffs: Mapping[str, ScalarPoly | QQi | int]) -> "Form":
        terms = {}
        for name, c in coeffs.items():
            p = _as_poly(c)
            if not p.is_zero():
                terms[(coframe.index(name),)] = p
        return Form(coframe, 1, terms)

    def _check_mate(self, other: "Form") -> None:
        if self.coframe != other.coframe:
            raise ConfigurationError("forms live over different coframes")

    def __add__(self, other: "Form") -> "Form":
        self._check_mate(other)
        if self.degree != other.degree:
            if self.is_zero():
                return other
            if other.is_zero():
                return self
            raise ConfigurationError("degree mismatch in sum")
        out = dict(self.terms)
        for idx, p in other.terms.items():
            s = out.get(idx, ScalarPoly()) + p
            if s.is_zero():
                out.pop(idx, None)
            else:
                out[idx] = s
        f = Form(self.coframe, self.degree)
        f.terms = out
        return f

    def __neg__(self) -> "Form":
        f = Form(self.coframe, self.degree)
        f.terms = {idx: -p for idx, p in self.terms.items()}
        return f

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __rmul__(self, scalar) -> "Form":
        p0 = _as_poly(scalar)
        f = Form(self.coframe, self.degree)
        for idx, p in self.terms.items():
            q = p0 * p
            if not q.is_zero():
                f.terms[idx] = q
        return f

    __mul__ = __rmul__

    def wedge(self, other: "Form") -> "Form":
        self._check_mate(other)
        out: dict[tuple[int, ...], ScalarPoly] = {}
        for i1, p1 in self.terms.items():
            for i2, p2 in other.terms.items():
                m = _merge(i1, i2)
                if m is None:
                    continue
                sign, idx = m
                c = p1 * p2
                if sign < 0:
                    c = -c
                s = out.get(idx, ScalarPoly()) + c
                if s.is_zero():
                    out.pop(idx, None)
                else:
                    out[idx] = s
        f = Form(self.coframe, self.degree + other.degree)
        f.terms = out
        return f

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, *names: str) -> ScalarPoly:
        """Coefficient on the wedge of the named generators (sign-normalized)."""
        idx = tuple(self.coframe.index(n) for n in names)
        order = tuple(sorted(idx))
        if len(set(idx)) != len(idx):
            return ScalarPoly()
        sign = _perm_sign(idx)
        p = self.terms.get(order, ScalarPoly())
        return p if sign > 0 else -p

    def map_coeffs(self, fn: Callable[[ScalarPoly], ScalarPoly]) -> "Form":
        f = Form(self.coframe, self.degree)
        for idx, p in self.terms.items():
            q = fn(p)
            if not q.is_zero():
                f.terms[idx] = q
        return f

    def subs(self, mapping: Mapping[str, ScalarPoly | QQi | int]) -> "Form":
        return self.map_coeffs(lambda p: p.subs(mapping))

    def conj(self, symbols: SymbolTable) -> "Form":
        """Complex conjugate: conjugate coefficients, map generators by the coframe involution."""
        out: dict[tuple[int, ...], ScalarPoly] = {}
        cf = self.coframe
        for idx, p in self.terms.items():
            names = [cf.conj_map[cf.names[i]] for i in idx]
            new_idx = tuple(cf.index(n) for n in names)
            order = tuple(sorted(new_idx))
            if len(set(new_idx)) != len(new_idx):
                continue
            sign = _perm_sign(new_idx)
            c = p.conj(symbols)
            if sign < 0:
                c = -c
            s = out.get(order, ScalarPoly()) + c
            if s.is_zero():
                out.pop(order, None)
            else:
                out[order] = s
        f = Form(self.coframe, self.degree)
        f.terms = out
        return f

    def change_basis(self, images: Mapping[str, "Form"]) -> "Form":
        """Rewrite over a new coframe; every generator must be given an image 1-form."""
        if not images:
            raise ConfigurationError("empty basis map")
        target = next(iter(images.values())).coframe
        out = Form.zero(target, self.degree)
        for idx, p in self.terms.items():
            term = Form.scalar(target, ScalarPoly.const(1))
            for i in idx:
                name = self.coframe.names[i]
                if name not in images:
                    raise ConfigurationError(f"no image for generator {name!r}")
                term = term.wedge(images[name])
            out = out + p * term
        return out

    def max_abs(self) -> float:
        """Largest coefficient magnitude, constants only (raises on symbols)."""
        best = 0.0
        for p in self.terms.values():
            v = abs(p.const_value().to_complex())
            best = max(best, v)
        return best

    def symbols(self) -> set[str]:
        out: set[str] = set()
        for p in self.terms.values():
            out |= p.symbols()
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        return (self - other).is_zero() if self.degree == other.degree or self.is_zero() or other.is_zero() else False

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        names = self.coframe.names
        bits = []
        for idx, p in sorted(self.terms.items()):
            basis = "^".join(names[i] for i in idx) or "1"
            bits.append(f"({p}) {basis}")
        return " + ".join(bits)


def _perm_sign(idx: Sequence[int]) -> int:
    sign = 1
    idx = list(idx)
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return sign


def wedge(f: Form, g: Form) -> Form:
    return f.wedge(g)


class StructureTable:
    """d-rules for a coframed manifold: generator -> 2-form, scalar -> 1-form."""

    def __init__(
        self,
        coframe: Coframe,
        symbols: SymbolTable,
        generator_rules: Mapping[str, Form],
        scalar_rules: Mapping[str, Form] | None = None,
    ):
        self.coframe = coframe
        self.symbols = symbols
        self.generator_rules = dict(generator_rules)
        self.scalar_rules = dict(scalar_rules or {})
        for name in coframe.names:
            if name not in self.generator_rules:
                raise ConfigurationError(f"generator {name!r} has no d-rule (use an explicit zero)")
        for name, rule in self.generator_rules.items():
            if rule.degree != 2 and not rule.is_zero():
                raise ConfigurationError(f"rule for generator {name!r} must be a 2-form")
        for name, rule in self.scalar_rules.items():
            if name not in symbols:
                raise ConfigurationError(f"scalar rule for undeclared symbol {name!r}")
            if rule.degree != 1 and not rule.is_zero():
                raise ConfigurationError(f"rule for scalar {name!r} must be a 1-form")

    def check_scalar_conjugation(self) -> dict[str, Form]:
        """Residuals rule(conj x) - conj(rule(x)) for every ruled scalar pair."""
        out = {}
        for name, rule in self.scalar_rules.items():
            cname = self.symbols.conj(name)
            if cname in self.scalar_rules:
                out[name] = self.scalar_rules[cname] - rule.conj(self.symbols)
        return out

    def d(self, form: Form) -> Form:
        """Exterior derivative: graded Leibniz with declared rules, d-closed fallback for unruled scalars."""
        cf = self.coframe
        out = Form.zero(cf, form.degree + 1)
        for idx, p in form.terms.items():
            basis = [cf.names[i] for i in idx]
            # d of the polynomial coefficient
            for name in sorted(p.symbols()):
                if name not in self.symbols:
                    raise ConfigurationError(f"undeclared symbol {name!r}")
                rule = self.scalar_rules.get(name)
                if rule is None:
                    continue
                dp = p.partial(name)
                if dp.is_zero():
                    continue
                contrib = dp * rule
                for g in basis:
                    contrib = contrib.wedge(Form.gen(cf, g))
                out = out + contrib
            # d across the generator slots
            for j, name in enumerate(basis):
                rule = self.generator_rules[name]
                if rule.is_zero():
                    continue
                prefix = Form.scalar(cf, 1)
                for g in basis[:j]:
                    prefix = prefix.wedge(Form.gen(cf, g))
                tail = rule
                for g in basis[j + 1:]:
                    tail = tail.wedge(Form.gen(cf, g))
                piece = p * prefix.wedge(tail)
                if j % 2:
                    piece = -piece
                out = out + piece
        return out

    def d_squared(self) -> "ClosureReport":
        """Exact d(d(.)) residuals for every generator and ruled scalar."""
        residuals: dict[str, Form] = {}
        for name, rule in self.generator_rules.items():
            residuals[name] = self.d(rule)
        for name, rule in self.scalar_rules.items():
            residuals[name] = self.d(rule)
        return ClosureReport(residuals)

    # -- numeric path -------------------------------------------------------

    def _numeric_rules(self, assignment: NumericAssignment) -> tuple[dict, dict]:
        gen_rules = {
            name: numeric_eval(rule, assignment)
            for name, rule in self.generator_rules.items()
        }
        sc_rules = {
            name: numeric_eval(rule, assignment)
            for name, rule in self.scalar_rules.items()
        }
        return gen_rules, sc_rules

    def d_numeric(
        self,
        form: Form,
        assignment: NumericAssignment,
        _cache: dict | None = None,
    ) -> tuple["NumericForm", float]:
        """Numeric exterior derivative; returns (value, scale of largest contribution)."""
        cf = self.coframe
        if _cache is not None and "rules" in _cache:
            gen_rules, sc_rules = _cache["rules"]
        else:
            gen_rules, sc_rules = self._numeric_rules(assignment)
            if _cache is not None:
                _cache["rules"] = (gen_rules, sc_rules)
        out = NumericForm(cf, form.degree + 1)
        scale = 0.0
        for idx, p in form.terms.items():
            for name in p.symbols():
                if name not in self.symbols:
                    raise ConfigurationError(f"undeclared symbol {name!r}")
                rule = sc_rules.get(name)
                if rule is None:
                    continue
                dv = p.partial(name).eval(assignment)
                if dv == 0:
                    continue
                contrib = rule.scale(dv).wedge_basis(idx)
                scale = max(scale, contrib.max_abs())
                out.iadd(contrib)
            pv = p.eval(assignment)
            if pv != 0:
                for j, i in enumerate(idx):
                    rule = gen_rules[cf.names[i]]
                    if rule.is_empty():
                        continue
                    rest = idx[:j] + idx[j + 1:]
                    c = pv if j % 2 == 0 else -pv
                    contrib = rule.scale(c).wedge_basis_split(idx[:j], idx[j + 1:])
                    scale = max(scale, contrib.max_abs())
                    out.iadd(contrib)
        return out, scale

    def d_squared_numeric(
        self,
        assignment: NumericAssignment,
        names: Iterable[str] | None = None,
    ) -> dict[str, float]:
        """Relative d^2 residual per rule under one assignment."""
        cache: dict = {}
        out = {}
        wanted = set(names) if names is not None else None
        for name, rule in list(self.generator_rules.items()) + list(self.scalar_rules.items()):
            if wanted is not None and name not in wanted:
                continue
            value, scale = self.d_numeric(rule, assignment, _cache=cache)
            out[name] = value.max_abs() / max(1.0, scale)
        return out


class NumericForm:
    """Form with complex coefficients; used by randomized identity checks."""

    __slots__ = ("coframe", "degree", "terms")

    def __init__(self, coframe: Coframe, degree: int, terms: Mapping[tuple[int, ...], complex] | None = None):
        self.coframe = coframe
        self.degree = degree
        self.terms: dict[tuple[int, ...], complex] = dict(terms or {})

    def is_empty(self) -> bool:
        return not self.terms

    def iadd(self, other: "NumericForm") -> None:
        for idx, v in other.terms.items():
            self.terms[idx] = self.terms.get(idx, 0j) + v

    def __add__(self, other: "NumericForm") -> "NumericForm":
        out = NumericForm(self.coframe, self.degree, self.terms)
        out.terms = dict(self.terms)
        out.iadd(other)
        return out

    def __sub__(self, other: "NumericForm") -> "NumericForm":
        return self + other.scale(-1.0)

    def scale(self, c: complex) -> "NumericForm":
        return NumericForm(self.coframe, self.degree, {i: c * v for i, v in self.terms.items()})

    def wedge(self, other: "NumericForm") -> "NumericForm":
        out = NumericForm(self.coframe, self.degree + other.degree)
        for i1, v1 in self.terms.items():
            for i2, v2 in other.terms.items():
                m = _merge(i1, i2)
                if m is None:
                    continue
                sign, idx = m
                out.terms[idx] = out.terms.get(idx, 0j) + sign * v1 * v2
        return out

    def wedge_basis(self, idx: tuple[int, ...]) -> "NumericForm":
        """Wedge on the right with a unit basis monomial."""
        return self.wedge_basis_split((), idx)

    def wedge_basis_split(self, left: tuple[int, ...], right: tuple[int, ...]) -> "NumericForm":
        out = NumericForm(self.coframe, self.degree + len(left) + len(right))
        for i1, v in self.terms.items():
            m = _merge(left, i1)
            if m is None:
                continue
            s1, a = m
            m = _merge(a, right)
            if m is None:
                continue
            s2, idx = m
            out.terms[idx] = out.terms.get(idx, 0j) + s1 * s2 * v
        return out

    def max_abs(self) -> float:
        return max((abs(v) for v in self.terms.values()), default=0.0)


def numeric_eval(form: Form, assignment: NumericAssignment) -> NumericForm:
    """Evaluate polynomial coefficients; generators stay formal."""
    out = NumericForm(form.coframe, form.degree)
    for idx, p in form.terms.items():
        v = p.eval(assignment)
        if v != 0:
            out.terms[idx] = v
    return out


class ClosureReport:
    """Per-rule d^2 residual forms (exact), with helpers for assertions."""

    def __init__(self, residuals: dict[str, Form]):
        self.residuals = residuals

    def all_zero(self) -> bool:
        return all(r.is_zero() for r in self.residuals.values())

    def nonzero(self) -> dict[str, Form]:
        return {k: v for k, v in self.residuals.items() if not v.is_zero()}

    def max_abs(self) -> float:
        """Largest coefficient magnitude across residuals (constant coefficients)."""
        return max((r.max_abs() for r in self.residuals.values()), default=0.0)

    def __repr__(self) -> str:
        bad = sorted(self.nonzero())
        return f"ClosureReport(all_zero={not bad}, nonzero={bad})"


def pit_closure(
    table: StructureTable,
    seeds: Iterable[int],
    names: Iterable[str] | None = None,
    overrides: Mapping[str, complex] | None = None,
) -> dict[str, float]:
    """Max relative d^2 residual per rule over seeded random assignments."""
    from .scalars import random_assignment

    worst: dict[str, float] = {}
    for seed in seeds:
        assignment = random_assignment(table.symbols, seed, overrides=overrides)
        for name, r in table.d_squared_numeric(assignment, names).items():
            worst[name] = max(worst.get(name, 0.0), r)
    return worst


# -- serialization ----------------------------------------------------------


def form_to_json(form: Form) -> dict:
    """Documented wire format: constant monomial entries are flat index lists
    followed by the coefficient quadruple; symbolic monomials insert a
    [[symbol, exponent], ...] list before the quadruple."""
    terms = []
    for idx, p in sorted(form.terms.items()):
        for mono, c in sorted(p.terms.items()):
            quad = list(c.quadruple())
            if mono:
                terms.append(list(idx) + [[list(me) for me in mono]] + quad)
            else:
                terms.append(list(idx) + quad)
    return {
        "generators": list(form.coframe.names),
        "degree": form.degree,
        "terms": terms,
    }


def form_from_json(data: dict, coframe: Coframe | None = None) -> Form:
    cf = coframe or Coframe(data["generators"])
    degree = data["degree"]
    terms: dict[tuple[int, ...], ScalarPoly] = {}
    for entry in data["terms"]:
        idx = tuple(entry[:degree])
        rest = entry[degree:]
        if len(rest) == 5:
            mono = tuple(sorted((str(n), int(e)) for n, e in rest[0]))
            quad = rest[1:]
        else:
            mono = ()
            quad = rest
        from fractions import Fraction

        c = QQi(Fraction(quad[0], quad[1]), Fraction(quad[2], quad[3]))
        p = terms.get(idx, ScalarPoly())
        terms[idx] = p + ScalarPoly({mono: c})
    return Form(cf, degree, terms)


def table_to_json(table: StructureTable) -> dict:
    return {
        "generators": list(table.coframe.names),
        "conjugates": dict(table.coframe.conj_map),
        "generator_rules": {k: form_to_json(v) for k, v in sorted(table.generator_rules.items())},
        "scalar_rules": {k: form_to_json(v) for k, v in sorted(table.scalar_rules.items())},
    }
