"""Hermitian frames of C^4: the invariant form, the Maurer-Cartan matrix and
its mechanical expansion, and membership tests for the adapted subgroups.

Conventions.  epsilon = +1 selects the definite hyperquadric (symmetry group
SU(3,1)), epsilon = -1 the split one (SU(2,2)).  delta = 0 for epsilon = +1
and 1 otherwise; the (+-1)^delta sign freedom exists only when epsilon = -1
and is always an explicit field, never inferred.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .forms import Coframe, Form, StructureTable
from .scalars import I, ONE, QQi, ScalarPoly, SymbolTable, frac, sym

# canonical generator order for the full frame coframe
FRAME_GENERATORS = (
    "kappa", "eta", "etab", "zeta", "zetab", "lam", "lamb",
    "rho", "tau", "xi", "xib", "phi1", "phi1b", "phi2", "phi2b", "psi",
)
CONJ_PAIRS = (
    ("eta", "etab"), ("zeta", "zetab"), ("lam", "lamb"),
    ("xi", "xib"), ("phi1", "phi1b"), ("phi2", "phi2b"),
)
REAL_GENERATORS = ("kappa", "rho", "tau", "psi")


def frame_coframe(trace_free: bool = False) -> Coframe:
    names = tuple(n for n in FRAME_GENERATORS if not (trace_free and n == "tau"))
    return Coframe.make(names, CONJ_PAIRS)


def delta_epsilon(epsilon: int) -> int:
    if epsilon not in (1, -1):
        raise ValueError("epsilon must be +1 or -1")
    return 0 if epsilon == 1 else 1


def hermitian_matrix(epsilon: int, sign: int = 1) -> list[list[QQi]]:
    """Gram matrix of the invariant Hermitian form on frame vectors."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if epsilon == 1 and sign != 1:
        raise ValueError("sign is forced to +1 when epsilon = +1")
    s = QQi(sign)
    z = QQi(0)
    return [
        [z, z, z, s * I],
        [z, s * ONE, z, z],
        [z, z, s * QQi(epsilon), z],
        [-s * I, z, z, z],
    ]


@dataclass(frozen=True)
class HermitianForm:
    epsilon: int
    sign: int = 1

    def __post_init__(self):
        delta_epsilon(self.epsilon)
        if self.epsilon == 1 and self.sign != 1:
            raise ValueError("sign is forced to +1 when epsilon = +1")

    @property
    def matrix(self) -> list[list[QQi]]:
        return hermitian_matrix(self.epsilon, self.sign)

    def signature(self) -> tuple[int, int]:
        d = delta_epsilon(self.epsilon)
        return (3 - d, 1 + d)


@dataclass
class MuMatrix:
    """The 4x4 matrix of connection 1-forms; entries indexed [row][col]."""

    epsilon: int
    entries: list[list[Form]]
    coframe: Coframe
    trace_free: bool = False

    def trace(self) -> Form:
        t = Form.zero(self.coframe, 1)
        for i in range(4):
            t = t + self.entries[i][i]
        return t


def _mu_symbols() -> SymbolTable:
    return SymbolTable.make()


def build_mu(epsilon: int, trace_free: bool = False) -> MuMatrix:
    """The Lie-algebra-valued Maurer-Cartan matrix in our representation."""
    delta_epsilon(epsilon)
    cf = frame_coframe(trace_free)
    g = lambda n: Form.gen(cf, n)
    i = ScalarPoly.const(I)
    eps = ScalarPoly.const(epsilon)
    if trace_free:
        # i*tau = -i*rho - lam + lamb
        itau = -(i * g("rho")) - g("lam") + g("lamb")
    else:
        itau = i * g("tau")
    rows = [
        [g("lam"), -(i * g("xib")), -(i * g("phi2b")), g("psi")],
        [g("eta"), i * g("rho"), -g("phi1b"), g("xi")],
        [g("zeta"), eps * g("phi1"), itau, eps * g("phi2")],
        [g("kappa"), i * g("etab"), eps * i * g("zetab"), -g("lamb")],
    ]
    return MuMatrix(epsilon, rows, cf, trace_free)


def algebra_condition_residual(mu: MuMatrix, sign: int = 1) -> list[list[Form]]:
    """conj-transpose(mu) . h + h . mu as a matrix of Forms (zero when valid)."""
    h = hermitian_matrix(mu.epsilon, sign)
    syms = _mu_symbols()
    cf = mu.coframe
    conj_t = [[mu.entries[j][i].conj(syms) for j in range(4)] for i in range(4)]
    out = []
    for i in range(4):
        row = []
        for j in range(4):
            acc = Form.zero(cf, 1)
            for k in range(4):
                acc = acc + h[k][j] * conj_t[i][k]
                acc = acc + h[i][k] * mu.entries[k][j]
            row.append(acc)
        out.append(row)
    return out


def _mu_wedge_square(mu: MuMatrix) -> list[list[Form]]:
    n = 4
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = Form.zero(mu.coframe, 2)
            for k in range(n):
                acc = acc + mu.entries[i][k].wedge(mu.entries[k][j])
            row.append(acc)
        out.append(row)
    return out


def mc_expand(mu: MuMatrix) -> StructureTable:
    """Read generator rules off d(mu) = -mu^mu entry by entry.

    Rules derived from conjugate entry positions must agree with conjugates of
    the primary ones; disagreement means the matrix layout is corrupt.
    """
    sq = _mu_wedge_square(mu)
    cf = mu.coframe
    syms = _mu_symbols()
    i = ScalarPoly.const(I)
    minus_i = ScalarPoly.const(-I)
    eps = ScalarPoly.const(mu.epsilon)
    primary = {
        "lam": -sq[0][0],
        "eta": -sq[1][0],
        "zeta": -sq[2][0],
        "kappa": -sq[3][0],
        "psi": -sq[0][3],
        "rho": minus_i * (-sq[1][1]),
        "xi": -sq[1][3],
        "phi1": eps * (-sq[2][1]),
        "phi2": eps * (-sq[2][3]),
    }
    if not mu.trace_free:
        primary["tau"] = minus_i * (-sq[2][2])
    rules: dict[str, Form] = {}
    for name, rule in primary.items():
        rules[name] = rule
        cname = cf.conj_map[name]
        if cname != name:
            rules[cname] = rule.conj(syms)
    # cross-checks against the mirror entries
    mirror = {
        "etab": minus_i * (-sq[3][1]),
        "zetab": (minus_i * eps) * (-sq[3][2]),
        "lamb": -(-sq[3][3]),
        "xib": i * (-sq[0][1]),
        "phi2b": i * (-sq[0][2]),
        "phi1b": -(-sq[1][2]),
    }
    for name, rule in mirror.items():
        if not (rules[name] - rule).is_zero():
            raise AssertionError(f"inconsistent mirror rule for {name}")
    for name, rule in rules.items():
        if name in REAL_GENERATORS:
            if not (rule.conj(syms) - rule).is_zero():
                raise AssertionError(f"rule for real generator {name} is not real")
    return StructureTable(cf, syms, rules)


def umc_table(epsilon: int) -> StructureTable:
    """The ten displayed Maurer-Cartan equations, transcribed by hand."""
    cf = frame_coframe()
    syms = _mu_symbols()
    g = lambda n: Form.gen(cf, n)
    i = ScalarPoly.const(I)
    eps = ScalarPoly.const(epsilon)
    k, e, eb = g("kappa"), g("eta"), g("etab")
    z, zb = g("zeta"), g("zetab")
    lam, lamb = g("lam"), g("lamb")
    rho, tau = g("rho"), g("tau")
    x, xb = g("xi"), g("xib")
    p1, p1b = g("phi1"), g("phi1b")
    p2, p2b = g("phi2"), g("phi2b")
    psi = g("psi")
    rules = {
        "kappa": i * e.wedge(eb) + (lam + lamb).wedge(k) + eps * i * z.wedge(zb),
        "eta": (lam - i * rho).wedge(e) - x.wedge(k) + p1b.wedge(z),
        "psi": psi.wedge(lam + lamb) - i * x.wedge(xb) - eps * i * p2.wedge(p2b),
        "xi": psi.wedge(e) + x.wedge(lamb + i * rho) + eps * p1b.wedge(p2),
        "lam": i * xb.wedge(e) + i * p2b.wedge(z) - psi.wedge(k),
        "rho": eps * i * p1.wedge(p1b) - xb.wedge(e) - x.wedge(eb),
        "phi1": eps * i * z.wedge(xb) + (i * rho - i * tau).wedge(p1) - i * p2.wedge(eb),
        "phi2": eps * psi.wedge(z) + p2.wedge(lamb + i * tau) + x.wedge(p1),
        "zeta": (lam - i * tau).wedge(z) - eps * p1.wedge(e) - eps * p2.wedge(k),
        "tau": z.wedge(p2b) + zb.wedge(p2) - eps * i * p1.wedge(p1b),
    }
    for name in list(rules):
        cname = cf.conj_map[name]
        if cname != name:
            rules[cname] = rules[name].conj(syms)
    return StructureTable(cf, syms, rules)


# -- matrices over QQi or complex --------------------------------------------


def _conj(x):
    return x.conj() if isinstance(x, QQi) else complex(x).conjugate()


def _mag(x) -> float:
    return abs(x.to_complex() if isinstance(x, QQi) else complex(x))


def mat_mul(a, b):
    n = len(a)
    return [
        [sum((a[i][k] * b[k][j] for k in range(n)), start_zero(a)) for j in range(n)]
        for i in range(n)
    ]


def start_zero(a):
    return QQi(0) if isinstance(a[0][0], QQi) else 0j


def conj_transpose(a):
    n = len(a)
    return [[_conj(a[j][i]) for j in range(n)] for i in range(n)]


def mat_sub(a, b):
    n = len(a)
    return [[a[i][j] - b[i][j] for j in range(n)] for i in range(n)]


def mat_det(a):
    """Laplace expansion; exact for QQi entries."""
    n = len(a)
    if n == 1:
        return a[0][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        term = a[0][j] * mat_det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def mat_inv_diag4(l):
    """Inverse of diag(l, 1, 1, conj(l)^-1)."""
    li = l.inv() if isinstance(l, QQi) else 1.0 / l
    lc = _conj(l)
    one = QQi(1) if isinstance(l, QQi) else 1.0 + 0j
    z = QQi(0) if isinstance(l, QQi) else 0j
    return [
        [li, z, z, z],
        [z, one, z, z],
        [z, z, one, z],
        [z, z, z, lc],
    ]


def max_residual(mat) -> float:
    return max(_mag(v) for row in mat for v in row)


@dataclass
class GroupElement:
    """4x4 matrix with optional constructor parameters kept for reporting."""

    matrix: list[list]
    epsilon: int
    params: dict = field(default_factory=dict)

    @staticmethod
    def from_p0_params(epsilon, a1, a2, c1, c2, phase, t, sign=1) -> "GroupElement":
        """Element fixing the first frame vector; phase is e^{i r} passed as a value.

        The modulus constraints |a1|^2 + eps|a2|^2 = sign and |phase| = 1 are
        validated, not silently normalized.
        """
        exact = all(isinstance(v, QQi) for v in (a1, a2, c1, c2, phase)) and isinstance(t, (QQi, int))
        conv = (lambda v: v) if exact else (lambda v: v.to_complex() if isinstance(v, QQi) else complex(v))
        a1, a2, c1, c2, phase = map(conv, (a1, a2, c1, c2, phase))
        eps = QQi(epsilon) if exact else complex(epsilon)
        s = QQi(sign) if exact else complex(sign)
        ii = I if exact else 1j
        one = QQi(1) if exact else 1 + 0j
        zero = QQi(0) if exact else 0j
        if epsilon == 1 and sign != 1:
            raise ValueError("sign is forced to +1 when epsilon = +1")
        unit = a1 * _conj(a1) + eps * (a2 * _conj(a2))
        if _mag(unit - s) > 1e-12:
            raise ValueError("|a1|^2 + eps|a2|^2 must equal the sign choice")
        if _mag(phase * _conj(phase) - one) > 1e-12:
            raise ValueError("phase must have unit modulus")
        half = frac(1, 2) if exact else 0.5
        c0 = (QQi.of(t) if exact else complex(t)) - ii * half * (c1 * _conj(c1) + eps * (c2 * _conj(c2)))
        rows = [
            [one, -ii * (a1 * _conj(c1) + eps * (a2 * _conj(c2))),
             eps * ii * phase * (_conj(a2) * _conj(c1) - _conj(a1) * _conj(c2)), c0 * s],
            [zero, a1, -eps * phase * _conj(a2), c1 * s],
            [zero, a2, phase * _conj(a1), c2 * s],
            [zero, zero, zero, s],
        ]
        return GroupElement(rows, epsilon, {
            "a1": a1, "a2": a2, "c1": c1, "c2": c2, "phase": phase, "t": t, "sign": sign,
        })

    @staticmethod
    def from_pl(epsilon, l) -> "GroupElement":
        exact = isinstance(l, QQi)
        if exact and l.is_zero():
            raise ValueError("l must be nonzero")
        if not exact and abs(complex(l)) == 0:
            raise ValueError("l must be nonzero")
        one = QQi(1) if exact else 1 + 0j
        zero = QQi(0) if exact else 0j
        lc_inv = _conj(l).inv() if exact else 1.0 / complex(l).conjugate()
        rows = [
            [l, zero, zero, zero],
            [zero, one, zero, zero],
            [zero, zero, one, zero],
            [zero, zero, zero, lc_inv],
        ]
        return GroupElement(rows, epsilon, {"l": l})

    def to_complex(self) -> list[list[complex]]:
        return [[v.to_complex() if isinstance(v, QQi) else complex(v) for v in row] for row in self.matrix]


def orient_rescale(g: GroupElement) -> GroupElement:
    """Rescale the third frame vector by conj(det); lands in det = 1 frames."""
    d = mat_det(g.matrix)
    dc = _conj(d)
    rows = [[g.matrix[i][j] * dc if j == 2 else g.matrix[i][j] for j in range(4)] for i in range(4)]
    return GroupElement(rows, g.epsilon, dict(g.params))


_LF_U_COLUMNS = None


def lf_basis_matrix() -> list[list[complex]]:
    """Numeric change of basis to the null flag frame (split case)."""
    r = 1.0 / math.sqrt(2.0)
    return [
        [0, 1, 0, 0],
        [r, 0, 0, -r],
        [r, 0, 0, r],
        [0, 0, 1, 0],
    ]


GROUPS = ("P0", "Pl", "Phat", "P", "P1_LN", "P1_LF", "R")


def subgroup_membership(g: GroupElement, which: str, tol: float = 1e-9) -> tuple[bool, dict[str, float]]:
    """Residual-style membership test; returns (member, named residual magnitudes)."""
    if which not in GROUPS:
        raise ValueError(f"unknown group {which!r}")
    m = g.to_complex()
    if abs(_det_c(m)) < 1e-14:
        raise ValueError("singular matrix")
    eps = g.epsilon
    res: dict[str, float] = {}
    if which == "P0":
        res = _p0_residuals(m, eps)
    elif which == "Pl":
        res = _pl_residuals(m)
    elif which in ("Phat", "P"):
        l = m[0][0]
        res["l_nonzero"] = 0.0 if abs(l) > 1e-14 else 1.0
        if res["l_nonzero"] == 0.0:
            p0 = _apply(mat_inv_diag4(l), m)
            res.update(_p0_residuals(p0, eps))
            if which == "P":
                res["det"] = abs(_det_c(m) - 1.0)
                phase = _extract_phase(p0, eps)
                if phase is not None:
                    res["phase_l"] = abs(phase - l.conjugate() / l)
    elif which == "P1_LN":
        res = _p0_residuals(m, eps)
        res["a2"] = abs(m[2][1])
        s = m[3][3]
        res["c2"] = abs(m[2][3] / s)
        res["sign_plus"] = abs(s - 1.0)
    elif which == "P1_LF":
        if eps != -1:
            raise ValueError("P1_LF requires epsilon = -1")
        res = _p0_residuals(m, eps)
        s = m[3][3]
        res["sign_plus"] = abs(s - 1.0)
        c1, c2 = m[1][3] / s, m[2][3] / s
        res["c2_eq_c1"] = abs(c2 - c1)
        a1, a2 = m[1][1], m[2][1]
        phase = _extract_phase(m, eps)
        if phase is None:
            res["phase"] = 1.0
        else:
            res["a_sum"] = abs((a1 + a2) - phase * (a2.conjugate() + a1.conjugate()))
    elif which == "R":
        if eps != -1:
            raise ValueError("R lives in the split case")
        h = [[v.to_complex() for v in row] for row in hermitian_matrix(-1)]
        uni = mat_sub(_apply(_apply(conj_transpose(m), h), m), h)
        res["unitarity"] = max_residual(uni)
        res["det"] = abs(_det_c(m) - 1.0)
        u = lf_basis_matrix()
        c = _apply(_apply(conj_transpose(u), m), u)
        for (i, j) in ((1, 0), (2, 0), (3, 0), (3, 1), (3, 2)):
            res[f"flag_{i}{j}"] = abs(c[i][j])
    member = all(v <= tol for v in res.values())
    return member, res


def _apply(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(4)) for j in range(4)] for i in range(4)]


def _det_c(m) -> complex:
    import numpy as np

    return complex(np.linalg.det(np.array(m, dtype=complex)))


def _extract_phase(m, eps) -> complex | None:
    a1, a2 = m[1][1], m[2][1]
    if abs(a1) > 1e-12:
        return m[2][2] / a1.conjugate()
    if abs(a2) > 1e-12:
        return -eps * m[1][2] / a2.conjugate()
    return None


def _pl_residuals(m) -> dict[str, float]:
    res = {}
    off = max(abs(m[i][j]) for i in range(4) for j in range(4) if i != j)
    res["off_diagonal"] = off
    res["mid"] = max(abs(m[1][1] - 1.0), abs(m[2][2] - 1.0))
    l = m[0][0]
    res["corner"] = abs(m[3][3] - 1.0 / l.conjugate()) if abs(l) > 1e-14 else 1.0
    return res


def _p0_residuals(m, eps) -> dict[str, float]:
    res = {}
    res["col0"] = max(abs(m[0][0] - 1.0), abs(m[1][0]), abs(m[2][0]), abs(m[3][0]))
    res["row3"] = max(abs(m[3][1]), abs(m[3][2]))
    s = m[3][3]
    res["corner_sign"] = min(abs(s - 1.0), abs(s + 1.0)) if eps == -1 else abs(s - 1.0)
    if res["corner_sign"] > 1e-9:
        return res
    s = 1.0 if abs(s - 1.0) < abs(s + 1.0) else -1.0
    a1, a2 = m[1][1], m[2][1]
    c1, c2, c0 = m[1][3] / s, m[2][3] / s, m[0][3] / s
    res["unit"] = abs(a1 * a1.conjugate() + eps * a2 * a2.conjugate() - s)
    phase = _extract_phase(m, eps)
    if phase is None:
        res["phase"] = 1.0
        return res
    res["phase_unit"] = abs(abs(phase) - 1.0)
    res["mid_12"] = abs(m[1][2] + eps * phase * a2.conjugate())
    res["mid_22"] = abs(m[2][2] - phase * a1.conjugate())
    res["top_1"] = abs(m[0][1] + 1j * (a1 * c1.conjugate() + eps * a2 * c2.conjugate()))
    res["top_2"] = abs(
        m[0][2] - eps * 1j * phase * (a2.conjugate() * c1.conjugate() - a1.conjugate() * c2.conjugate())
    )
    res["c0_imag"] = abs(c0.imag + 0.5 * (abs(c1) ** 2 + eps * abs(c2) ** 2))
    return res


def h_isometry_residual(g: GroupElement, sign: int = 1) -> float:
    """Max |conj-transpose(g) h g - sign'*h| where sign' follows the corner sign."""
    m = g.to_complex()
    h = [[v.to_complex() for v in row] for row in hermitian_matrix(g.epsilon)]
    lhs = _apply(_apply(conj_transpose(m), h), m)
    target = [[sign * v for v in row] for row in h]
    return max_residual(mat_sub(lhs, target))
