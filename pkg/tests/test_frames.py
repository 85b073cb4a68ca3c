"""Hermitian frame layer: mu, its MC expansion, subgroup membership."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from crquadric.forms import Form
from crquadric.frames import (
    GroupElement,
    HermitianForm,
    algebra_condition_residual,
    build_mu,
    h_isometry_residual,
    hermitian_matrix,
    lf_basis_matrix,
    mat_det,
    mc_expand,
    orient_rescale,
    subgroup_membership,
    umc_table,
)
from crquadric.scalars import I, QQi, frac


@pytest.mark.parametrize("epsilon", [1, -1])
def test_mu_entries_as_displayed(epsilon):
    mu = build_mu(epsilon)
    cf = mu.coframe
    assert mu.entries[3][0] == Form.gen(cf, "kappa")
    assert mu.entries[1][3] == Form.gen(cf, "xi")
    assert mu.entries[2][1] == QQi(epsilon) * Form.gen(cf, "phi1")
    assert mu.entries[0][3] == Form.gen(cf, "psi")


@pytest.mark.parametrize("epsilon", [1, -1])
def test_algebra_condition(epsilon):
    res = algebra_condition_residual(build_mu(epsilon))
    assert all(res[i][j].is_zero() for i in range(4) for j in range(4))


def test_trace_free_substitution():
    mu = build_mu(-1, trace_free=True)
    assert mu.trace().is_zero()
    assert "tau" not in mu.coframe.names


@pytest.mark.parametrize("epsilon", [1, -1])
def test_mc_expand_matches_transcription(epsilon):
    got = mc_expand(build_mu(epsilon))
    want = umc_table(epsilon)
    for name in got.coframe.names:
        assert (got.generator_rules[name] - want.generator_rules[name]).is_zero(), name


@pytest.mark.parametrize("epsilon", [1, -1])
def test_mc_equations_close(epsilon):
    assert mc_expand(build_mu(epsilon)).d_squared().all_zero()


def test_mc_sample_rules():
    t = mc_expand(build_mu(1))
    cf = t.coframe
    rule = t.generator_rules["kappa"]
    assert rule.coeff("eta", "etab") == QQi(0, 1)
    assert rule.coeff("lam", "kappa") == 1
    assert rule.coeff("lamb", "kappa") == 1
    assert rule.coeff("zeta", "zetab") == QQi(0, 1)
    rho_rule = t.generator_rules["rho"]
    assert rho_rule.coeff("phi1", "phi1b") == QQi(0, 1)
    assert rho_rule.coeff("xib", "eta") == -1
    assert rho_rule.coeff("xi", "etab") == -1


def test_hermitian_form_signature():
    assert HermitianForm(1).signature() == (3, 1)
    assert HermitianForm(-1, sign=-1).signature() == (2, 2)
    with pytest.raises(ValueError):
        HermitianForm(1, sign=-1)


def _rational_unit(rng) -> QQi:
    # (1 - q^2 + 2qi) / (1 + q^2) has unit modulus for rational q
    q = Fraction(rng.randint(-5, 5), rng.randint(1, 5))
    den = 1 + q * q
    return QQi((1 - q * q) / den, 2 * q / den)


def _random_p0(epsilon, rng) -> GroupElement:
    u1 = _rational_unit(rng)
    u2 = _rational_unit(rng)
    if epsilon == 1:
        # rational point on |a1|^2 + |a2|^2 = 1
        q = Fraction(rng.randint(-4, 4), rng.randint(1, 4))
        den = 1 + q * q
        a1 = QQi((1 - q * q) / den) * u1
        a2 = QQi(2 * q / den) * u2
        sign = 1
    else:
        # rational point on |a1|^2 - |a2|^2 = 1
        q = Fraction(rng.randint(1, 5), rng.randint(1, 5))
        a1 = QQi((1 + q * q) / (2 * q)) * u1
        a2 = QQi((1 - q * q) / (2 * q)) * u2
        sign = 1
    c1 = QQi(Fraction(rng.randint(-3, 3), 2), Fraction(rng.randint(-3, 3), 3))
    c2 = QQi(Fraction(rng.randint(-3, 3), 3), Fraction(rng.randint(-3, 3), 2))
    t = QQi(Fraction(rng.randint(-6, 6), 5))
    return GroupElement.from_p0_params(epsilon, a1, a2, c1, c2, _rational_unit(rng), t, sign)


@pytest.mark.parametrize("epsilon", [1, -1])
def test_identity_in_all_groups(epsilon):
    e = GroupElement([[QQi(1) if i == j else QQi(0) for j in range(4)] for i in range(4)], epsilon)
    groups = ["P0", "Pl", "Phat", "P", "P1_LN"]
    if epsilon == -1:
        groups += ["P1_LF", "R"]
    for which in groups:
        member, res = subgroup_membership(e, which)
        assert member, (which, res)


def test_pl_member_not_in_p():
    # a real scale diag(l,1,1,1/l) happens to have det = l/conj(l) = 1 and
    # trivially compensating phase, so it sits in P; a non-real l does not.
    g = GroupElement.from_pl(1, QQi(2))
    ok_pl, _ = subgroup_membership(g, "Pl")
    assert ok_pl
    ok_p, _ = subgroup_membership(g, "P")
    assert ok_p
    g2 = GroupElement.from_pl(1, QQi(1, 1))
    ok_pl2, _ = subgroup_membership(g2, "Pl")
    assert ok_pl2
    ok_p2, res = subgroup_membership(g2, "P")
    assert not ok_p2 and (res["det"] > 0.1 or res.get("phase_l", 0) > 0.1)


def test_p_membership_with_phase_compensation():
    # p_l p_0 with e^{ir} = conj(l)/l has det 1 and lands in P
    l = QQi(Fraction(3, 5), Fraction(4, 5))  # unit modulus keeps things tidy
    phase = l.conj() * l.inv()
    p0 = GroupElement.from_p0_params(1, QQi(1), QQi(0), QQi(0), QQi(0), phase, 0)
    pl = GroupElement.from_pl(1, l)
    prod = [[sum((pl.matrix[i][k] * p0.matrix[k][j] for k in range(4)), QQi(0)) for j in range(4)] for i in range(4)]
    g = GroupElement(prod, 1)
    member, res = subgroup_membership(g, "P")
    assert member, res


@pytest.mark.parametrize("epsilon", [1, -1])
def test_p0_closure_under_products(epsilon):
    rng = random.Random(20 + epsilon)
    for _ in range(20):
        g1 = _random_p0(epsilon, rng)
        g2 = _random_p0(epsilon, rng)
        prod = [
            [sum((g1.matrix[i][k] * g2.matrix[k][j] for k in range(4)), QQi(0)) for j in range(4)]
            for i in range(4)
        ]
        member, res = subgroup_membership(GroupElement(prod, epsilon), "P0", tol=1e-10)
        assert member, res


@pytest.mark.parametrize("epsilon", [1, -1])
def test_h_isometry_exact(epsilon):
    rng = random.Random(7)
    for _ in range(10):
        g = _random_p0(epsilon, rng)
        assert h_isometry_residual(g) < 1e-12


def test_sign_flip_changes_form_sign():
    # epsilon = -1 admits corner sign -1; such elements carry h to -h
    g = GroupElement.from_p0_params(-1, QQi(0), QQi(1), QQi(0), QQi(0), QQi(1), 0, sign=-1)
    assert h_isometry_residual(g, sign=-1) < 1e-12
    member, _ = subgroup_membership(g, "P0")
    assert member


def test_orient_rescale_preserves_adaptations():
    g = GroupElement.from_p0_params(1, QQi(0, 1), QQi(0), QQi(1, 1), QQi(0), QQi(0, -1), 2)
    d = mat_det(g.matrix)
    assert abs(d.abs2() - 1) == 0
    g2 = orient_rescale(g)
    assert mat_det(g2.matrix) == QQi(1)
    member, res = subgroup_membership(g2, "P1_LN")
    assert member, res


def test_lf_flag_membership():
    # a diagonal element of SU(2,2) stabilizing the null flag
    # null pairings in the flag basis force lambda4 = 1/conj(lambda1),
    # lambda3 = 1/conj(lambda2)
    m = [[0j] * 4 for _ in range(4)]
    vals = [2.0, 0.5, 2.0, 0.5]
    for i, v in enumerate(vals):
        m[i][i] = complex(v)
    u = lf_basis_matrix()
    # conjugate into the original frame basis: g = U m U^{-1}
    ut = [[u[j][i] for j in range(4)] for i in range(4)]
    g = [[sum(u[i][k] * m[k][l] * ut[l][j] for k in range(4) for l in range(4)) for j in range(4)] for i in range(4)]
    member, res = subgroup_membership(GroupElement(g, -1), "R")
    assert member, res


def test_singular_matrix_rejected():
    g = GroupElement([[0j] * 4 for _ in range(4)], 1)
    with pytest.raises(ValueError):
        subgroup_membership(g, "P0")


def test_unknown_group_rejected():
    e = GroupElement([[QQi(1) if i == j else QQi(0) for j in range(4)] for i in range(4)], 1)
    with pytest.raises(ValueError):
        subgroup_membership(e, "Q_nope")
