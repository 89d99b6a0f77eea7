import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fbasis.bethe import solve_bae
from fbasis.chain import (ChainSpec, PoleError, b_weight, c_weight,
                          vacuum_eigenvalue)
from fbasis.field import EXACT, FLOAT, matmul
from fbasis.identities import generic_params
from fbasis.scalar_products import (OffShellError, extrapolate_to_zero,
                                    gaudin_factorized, gaudin_matrix,
                                    gaudin_norm, norm_direct, phi_m_det,
                                    phi_m_direct, residue_recursion,
                                    slavnov_limit, sp_direct, sp_fbasis,
                                    sp_onshell_form, sp_onshell_form_alt,
                                    sp_slavnov, sp_slavnov_jacobian,
                                    sp_split_form, sp_subset_sum)

from conftest import make_chain, off_shell_params

F = Fraction


# ---------------------------------------------------------------- Phi_M

def test_phi_one_site():
    for xi, t, eta in [(F(1, 3), F(7, 2), F(2)), (0, 5, 1)]:
        assert phi_m_det([xi], [t], eta) == F(eta) / (t - xi + eta)
        assert phi_m_direct([xi], [t], eta) == F(eta) / (t - xi + eta)


def test_phi_reduction_worked():
    assert phi_m_det([0, 2], [0, 4], 1) == F(1, 3)
    assert phi_m_direct([0, 2], [0, 4], 1) == F(1, 3)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10**6))
def test_phi_det_equals_direct(m, seed):
    rng = random.Random(seed)
    eta = F(rng.randint(1, 5), rng.randint(1, 3))
    xi = generic_params(rng, m, eta)
    t = generic_params(rng, m, eta, avoid=xi)
    assert phi_m_det(xi, t, eta) == phi_m_direct(xi, t, eta)


def test_phi_symmetric():
    rng = random.Random(3)
    eta = F(1, 2)
    xi = generic_params(rng, 3, eta)
    t = generic_params(rng, 3, eta, avoid=xi)
    ref = phi_m_direct(xi, t, eta)
    for p in itertools.permutations(range(3)):
        assert phi_m_direct([xi[i] for i in p], t, eta) == ref
        assert phi_m_direct(xi, [t[i] for i in p], eta) == ref


def test_phi_first_row_development():
    rng = random.Random(11)
    eta = F(2, 3)
    xi = generic_params(rng, 3, eta)
    t = generic_params(rng, 3, eta, avoid=xi)

    def b(x):
        return b_weight("xxx", eta, x)

    def c(x):
        return c_weight("xxx", eta, x)

    total = 0
    for i in range(3):
        f = b(t[0] - xi[i])
        for a in range(3):
            if a != i:
                f *= c(t[0] - xi[a]) / c(xi[i] - xi[a])
        rest = [x for k, x in enumerate(xi) if k != i]
        total += f * phi_m_det(rest, t[1:], eta)
    assert total == phi_m_det(xi, t, eta)


def test_phi_xxz_det_equals_direct():
    xi, t = [0.1, -0.3 + 0.2j], [0.45, 0.8 - 0.1j]
    a = phi_m_det(xi, t, 0.35, "xxz")
    b = phi_m_direct(xi, t, 0.35, "xxz")
    assert FLOAT.eq(a, b)


# ---------------------------------------------------------------- off shell

def test_sp_worked_example(n2):
    for route in (sp_direct, sp_subset_sum, sp_fbasis, sp_split_form):
        assert route(n2, [4], [5]) == F(19, 24)


def test_sp_m1_closed_form(n2):
    lam, t = F(7, 3), F(-5, 4)
    expected = (vacuum_eigenvalue(n2, lam) - vacuum_eigenvalue(n2, t)) / (
        t - lam)
    assert sp_direct(n2, [lam], [t]) == expected


def test_sp_empty(n2):
    assert sp_direct(n2, [], []) == 1


def test_sp_rejects_coinciding(n2):
    with pytest.raises(ValueError):
        sp_direct(n2, [3], [3])
    with pytest.raises(ValueError):
        sp_direct(n2, [3, 4, 5], [6, 7, 8])


@pytest.mark.parametrize("n,m", [(3, 1), (3, 2), (4, 2), (4, 3), (5, 2)])
def test_routes_agree(n, m):
    spec = make_chain(300 + 10 * n + m, n, F(3, 4))
    t = off_shell_params(n + m, spec, m)
    lam = off_shell_params(n * m, spec, m, avoid=t)
    ref = sp_direct(spec, lam, t)
    assert sp_subset_sum(spec, lam, t) == ref
    assert sp_fbasis(spec, lam, t) == ref
    assert sp_split_form(spec, lam, t) == ref


def test_fbasis_single_term_when_saturated():
    spec = make_chain(5, 2, F(1, 2))
    t = off_shell_params(1, spec, 2)
    lam = off_shell_params(2, spec, 2, avoid=t)
    assert sp_fbasis(spec, lam, t) == sp_direct(spec, lam, t)


def test_sp_symmetric():
    spec = make_chain(6, 3, F(2, 5))
    t = off_shell_params(1, spec, 2)
    lam = off_shell_params(2, spec, 2, avoid=t)
    ref = sp_direct(spec, lam, t)
    assert sp_direct(spec, lam[::-1], t) == ref
    assert sp_subset_sum(spec, lam, t[::-1]) == ref


def test_sp_float_routes():
    spec = ChainSpec("xxz", 0.4 + 0.1j, (0.1, -0.5, 0.9))
    t, lam = (0.3 + 0.2j, -0.2), (0.7, 0.05 - 0.3j)
    ref = sp_direct(spec, lam, t)
    assert FLOAT.eq(sp_subset_sum(spec, lam, t), ref)
    assert FLOAT.eq(sp_fbasis(spec, lam, t), ref)


def test_coefficient_of_lambda_product():
    """Collecting the splits with mu = {t}: Phi_M(lam, t) prod 1/c(t - lam)."""
    spec = make_chain(8, 3, F(1, 3))
    t = off_shell_params(3, spec, 2)
    lam = off_shell_params(4, spec, 2, avoid=t)
    from fbasis.scalar_products import subset_sum

    def only_lambda(v, origin, idx):
        return 1 if origin == "lambda" else 0

    got = subset_sum(lam, t, spec.eta, only_lambda)
    expected = phi_m_det(lam, t, spec.eta)
    for u in t:
        for l in lam:
            expected /= spec.c(u - l)
    assert got == expected


# ---------------------------------------------------------------- on shell

def test_slavnov_worked(n2):
    t = [F(3, 2)]
    assert sp_slavnov(n2, [4], t) == F(-2, 3)
    assert sp_direct(n2, [4], t) == F(-2, 3)
    assert sp_slavnov_jacobian(n2, [4], t) == F(-2, 3)
    assert sp_slavnov_jacobian(n2, [4], t, absorb_sign=True) == F(-2, 3)
    assert sp_onshell_form(n2, [4], t) == F(-2, 3)
    assert sp_onshell_form_alt(n2, [4], t) == F(-2, 3)


def test_slavnov_rejects_off_shell(n2):
    with pytest.raises(OffShellError):
        sp_slavnov(n2, [4], [5])
    with pytest.raises(OffShellError):
        gaudin_norm(n2, [5])


def test_gaudin_worked(n2):
    assert gaudin_norm(n2, [F(3, 2)]) == F(8, 3)
    assert norm_direct(n2, [F(3, 2)]) == F(8, 3)


def test_gaudin_forms_and_factorization(n2):
    t = [F(3, 2)]
    n_log = gaudin_matrix(n2, t)
    assert EXACT.allclose(n_log, gaudin_matrix(n2, t, "explicit"))
    left, diag = gaudin_factorized(n_log, EXACT)
    assert EXACT.allclose(matmul(left, diag), n_log)


def test_slavnov_limit_exact(n2):
    val = slavnov_limit(n2, [F(3, 2)])
    assert abs(float(val) - 8 / 3) < 1e-12


def test_extrapolation_of_polynomial():
    eps = [F(1, 10 ** k) for k in range(1, 5)]
    vals = [3 + 2 * e - 5 * e ** 2 + e ** 3 for e in eps]
    assert extrapolate_to_zero(eps, vals) == 3


@pytest.fixture(scope="module")
def float_roots():
    spec = ChainSpec("xxx", 1, (F(1, 3), F(5, 2), F(-7, 4), F(9, 5)))
    seeds = [(-0.2, 2.6), (1.2 - 0.3j, 1.2 + 0.3j)]
    return spec.to_float(), solve_bae(spec, 2, seeds)


def test_slavnov_float_roots(float_roots):
    spec, roots = float_roots
    lam = (0.17, -0.61)
    for r in roots:
        a = sp_slavnov(spec, lam, r.roots)
        b = sp_direct(spec, lam, r.roots)
        assert abs(a - b) <= 1e-9 * abs(b)
        j = sp_slavnov_jacobian(spec, lam, r.roots)
        assert abs(j - b) <= 1e-9 * abs(b)


def test_orthogonality(float_roots):
    spec, roots = float_roots
    assert len(roots) >= 2
    for x, y in itertools.combinations(roots, 2):
        overlap = abs(sp_direct(spec, x.roots, y.roots))
        scale = abs(norm_direct(spec, x.roots) * norm_direct(spec, y.roots))
        assert overlap / scale ** 0.5 < 1e-8


def test_gaudin_float_roots(float_roots):
    spec, roots = float_roots
    for r in roots:
        assert FLOAT.eq(gaudin_norm(spec, r.roots), norm_direct(spec, r.roots))


def test_onshell_forms_m2():
    spec = ChainSpec("xxx", 1, (F(1, 3), F(5, 2), F(-7, 4), F(9, 5)))
    fspec = spec.to_float()
    (r,) = solve_bae(spec, 2, [(-0.2, 2.6)])
    lam = (0.17, -0.61)
    ref = sp_direct(fspec, lam, r.roots)
    assert FLOAT.eq(sp_onshell_form(fspec, lam, r.roots), ref)
    assert FLOAT.eq(sp_onshell_form_alt(fspec, lam, r.roots), ref)


def test_residue_recursion_limit():
    rng = random.Random(5)
    eta = F(1)
    t = generic_params(rng, 2, eta)
    lam = generic_params(rng, 2, eta, avoid=t)

    def a(v):
        return (v - F(1, 3)) / (v + F(7, 2))

    eps = [F(1, 10 ** k) for k in range(3, 7)]
    lhs, rhs = residue_recursion(lam, t, eta, a, eps)
    lim_l = extrapolate_to_zero(eps, lhs)
    lim_r = extrapolate_to_zero(eps, rhs)
    assert abs(float(lim_l - lim_r)) < 1e-12 * max(1, abs(float(lim_r)))


def test_pole_is_reported():
    spec = ChainSpec("xxx", 1, (0, 2))
    with pytest.raises(PoleError):
        sp_direct(spec, [1], [5])
