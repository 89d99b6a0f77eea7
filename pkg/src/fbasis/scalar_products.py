"""Domain-wall partition functions and scalar products of Bethe states.

``S_M(lam, t) = <0|C(lam_1)..C(lam_M) B(t_1)..B(t_M)|0>`` is computed by
direct contraction, by the sum over splittings of ``{lam} u {t}`` and by
the sum over F-basis coordinates.  For on-shell ``{t}`` it also follows from
the Slavnov determinant and its Jacobian form.  The Gaudin norm is the
``lam -> t`` limit.
"""

from __future__ import annotations

import itertools
import logging
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .chain import (ChainSpec, PoleError, bae_residual, bethe_state,
                    dual_bethe_state, vacuum_eigenvalue)
from .field import (DEFAULT_TOL, Field, Regime, Scalar, det, dphi, field_of,
                    phi)

log = logging.getLogger(__name__)

ONSHELL_TOL = 1e-10


class OffShellError(ValueError):
    """On-shell formula called with roots that violate the Bethe equations."""

    def __init__(self, residuals):
        super().__init__(f"roots are off shell: residuals {residuals}")
        self.residuals = residuals


class _Weights:
    """phi-based weights for a regime and anisotropy, independent of a chain."""

    def __init__(self, regime, eta, fld: Field):
        self.regime = Regime(regime)
        self.eta = eta
        self.field = fld
        self.one = Fraction(1) if fld.exact else 1.0 + 0j

    def phi(self, x):
        return phi(self.regime, x)

    def c(self, x):
        den = self.phi(x + self.eta)
        if den == 0:
            raise PoleError(f"c({x}) has a pole")
        return self.phi(x) / den

    def inv_c(self, x):
        num = self.phi(x)
        if num == 0:
            raise PoleError(f"1/c({x}) has a pole")
        return self.phi(x + self.eta) / num

    def prod(self, values):
        out = self.one
        for v in values:
            out *= v
        return out


def _weights(regime, eta, *param_sets, tol=DEFAULT_TOL):
    values = [eta, *itertools.chain.from_iterable(param_sets)]
    fld = field_of(values, tol)
    if Regime(regime) is Regime.XXZ and fld.exact:
        fld = Field(False, tol)
    conv = (lambda v: Fraction(v)) if fld.exact else complex
    w = _Weights(regime, conv(eta), fld)
    return w, [tuple(conv(v) for v in p) for p in param_sets]


def _spec_weights(spec: ChainSpec) -> _Weights:
    return _Weights(spec.regime, spec.eta, spec.field)


def _check_distinct(fld, values, name):
    for i, j in itertools.combinations(range(len(values)), 2):
        if fld.eq(values[i], values[j]):
            raise ValueError(f"{name}_{i + 1} and {name}_{j + 1} coincide")


def _vandermonde(w: _Weights, values, increasing: bool):
    """prod_{i<j} phi(v_i - v_j), or prod_{j<i} phi(v_i - v_j)."""
    out = w.one
    for i, j in itertools.combinations(range(len(values)), 2):
        out *= w.phi(values[i] - values[j]) if increasing \
            else w.phi(values[j] - values[i])
    return out


# ------------------------------------------------------------ Phi_M

def izergin_matrix(w: _Weights, inhom, args) -> np.ndarray:
    """``phi(eta) / (phi(t_i - xi_j) phi(t_i - xi_j + eta))``, i over args."""
    m = len(args)
    out = w.field.zeros((m, m))
    pe = w.phi(w.eta)
    for i, t in enumerate(args):
        for j, x in enumerate(inhom):
            den = w.phi(t - x) * w.phi(t - x + w.eta)
            if den == 0:
                raise PoleError(f"Izergin entry pole at t = {t}, xi = {x}")
            out[i, j] = pe / den
    return out


def _phi_m(w: _Weights, inhom, args):
    inhom, args = list(inhom), list(args)
    if len(inhom) != len(args):
        raise ValueError("Phi_M needs as many arguments as inhomogeneities")
    # t_i = xi_j reduces Phi_M to Phi_{M-1} on the remaining variables
    reduced = True
    while reduced:
        reduced = False
        for i, j in itertools.product(range(len(args)), range(len(inhom))):
            if w.field.eq(args[i], inhom[j]):
                del args[i], inhom[j]
                reduced = True
                break
    if not args:
        return w.one
    den = _vandermonde(w, args, True) * _vandermonde(w, inhom, False)
    if w.field.is_zero(den):
        raise ValueError("Phi_M determinant form needs distinct parameters")
    num = w.prod(w.phi(t - x) for t in args for x in inhom)
    return num / den * det(izergin_matrix(w, inhom, args))


def _phi_m_cleared(w: _Weights, inhom, args):
    """``Phi_M(inhom, args) prod_{i,j} phi(args_i - inhom_j + eta)``.

    Multiplying row i of the Izergin matrix by
    ``prod_k phi(t_i - xi_k) phi(t_i - xi_k + eta)`` leaves polynomial
    entries, so this form is finite everywhere (including ``t_i = xi_j``
    and ``t_i = xi_j - eta``).
    """
    m = len(args)
    if len(inhom) != m:
        raise ValueError("Phi_M needs as many arguments as inhomogeneities")
    if m == 0:
        return w.one
    den = _vandermonde(w, args, True) * _vandermonde(w, inhom, False)
    if w.field.is_zero(den):
        raise ValueError("Phi_M determinant form needs distinct parameters")
    pe = w.phi(w.eta)
    mat = w.field.zeros((m, m))
    for i, t in enumerate(args):
        for j in range(m):
            mat[i, j] = pe * w.prod(
                w.phi(t - x) * w.phi(t - x + w.eta)
                for k, x in enumerate(inhom) if k != j)
    return det(mat) / den


def phi_m_det(xi: Sequence, t: Sequence, eta, regime=Regime.XXX,
              tol: float = DEFAULT_TOL) -> Scalar:
    """Domain-wall partition function from the Izergin determinant.

    ``xi`` are the inhomogeneities of the M-site lattice and ``t`` the
    arguments of the B operators.  Pairs with ``t_i = xi_j`` are removed
    first (the function reduces to the smaller lattice there).
    """
    w, (xi, t) = _weights(regime, eta, xi, t, tol=tol)
    return _phi_m(w, xi, t)


def phi_m_direct(xi: Sequence, t: Sequence, eta, regime=Regime.XXX,
                 tol: float = DEFAULT_TOL) -> Scalar:
    """``<1..1|B(t_1)..B(t_M)|0>`` on an M-site lattice.

    The lattice uses ``S_{0j}(t, xi_j)``, i.e. weights of ``t - xi_j``;
    that is the chain convention evaluated at ``-xi`` and ``-t``.
    """
    xi, t = list(xi), list(t)
    if len(xi) != len(t):
        raise ValueError("Phi_M needs as many arguments as inhomogeneities")
    if not xi:
        return Fraction(1) if field_of([eta]).exact else 1.0 + 0j
    lattice = ChainSpec(regime, eta, tuple(-x for x in xi), tol=tol,
                        strict=False)
    v = bethe_state(lattice, [-x for x in t])
    return v[lattice.dim - 1]


# ------------------------------------------------------------ S_M routes

def _check_sp_args(spec: ChainSpec, lam, t, allow_coincident=False):
    lam, t = spec.params(lam), spec.params(t)
    if len(lam) != len(t):
        raise ValueError("lambda and t must have the same size")
    if len(t) > spec.n:
        raise ValueError(
            f"M = {len(t)} exceeds N = {spec.n}: the sector is empty")
    if not allow_coincident:
        for i, a in enumerate(lam):
            for j, b in enumerate(t):
                if spec.field.eq(a, b):
                    raise ValueError(
                        f"lambda_{i + 1} = t_{j + 1}: use the norm or the "
                        "Slavnov limit")
    return lam, t


def sp_direct(spec: ChainSpec, lam: Sequence, t: Sequence,
              allow_coincident: bool = False) -> Scalar:
    """Bra-ket contraction with the chain operators."""
    lam, t = _check_sp_args(spec, lam, t, allow_coincident)
    return dual_bethe_state(spec, lam) @ bethe_state(spec, t)


def norm_direct(spec: ChainSpec, t: Sequence) -> Scalar:
    """``<0|C(t_1)..C(t_M) B(t_1)..B(t_M)|0>`` by contraction."""
    return sp_direct(spec, t, t, allow_coincident=True)


Weight = Callable[[Scalar, str, int], Scalar]


def subset_sum(lam: Sequence, t: Sequence, eta, weight: Weight,
               regime=Regime.XXX, tol: float = DEFAULT_TOL) -> Scalar:
    """Sum over splittings ``{lam} u {t} = {mu} u {nu}``.

    Each split contributes ``prod_j weight(nu_j) Phi_M(t, mu) Phi_M(lam, mu)
    prod_{i,j} 1/c(mu_i - nu_j)``.  ``weight(value, origin, index)`` gets
    origin ``"lambda"`` or ``"t"`` and the index within that set.  Poles of
    the Phi factors at ``mu - nu = -eta`` cancel against the zeros of
    ``1/c`` and are removed before evaluation.
    """
    w, (lam, t) = _weights(regime, eta, lam, t, tol=tol)
    m = len(t)
    if len(lam) != m:
        raise ValueError("lambda and t must have the same size")
    merged = [(v, "lambda", j) for j, v in enumerate(lam)] + \
             [(v, "t", i) for i, v in enumerate(t)]
    _check_distinct(w.field, [v for v, _, _ in merged], "param")
    total = Fraction(0) if w.field.exact else 0j
    for mu_idx in itertools.combinations(range(2 * m), m):
        chosen = set(mu_idx)
        mu = [merged[k] for k in mu_idx]
        nu = [merged[k] for k in range(2 * m) if k not in chosen]
        try:
            term = w.prod(weight(*p) for p in nu)
            mu_vals = [p[0] for p in mu]
            term *= _phi_m_cleared(w, t, mu_vals)
            term *= _phi_m_cleared(w, lam, mu_vals)
            # the phi(mu - nu + eta) of 1/c cancel the cleared poles
            den = w.prod(w.phi(a[0] - b[0]) for a in mu for b in nu)
            den *= w.prod(w.phi(a - b + w.eta) for a in mu_vals
                          for b in mu_vals)
            if den == 0:
                raise PoleError("two mu values differ by -eta")
            term /= den
        except PoleError as exc:
            split = [f"{o}_{i + 1}" for _, o, i in mu]
            raise PoleError(f"split mu = {split}: {exc}") from None
        log.debug("split %s -> %s", mu_idx, term)
        total += term
    return total


def sp_subset_sum(spec: ChainSpec, lam: Sequence, t: Sequence) -> Scalar:
    """S_M from the splitting sum with the chain's vacuum eigenvalue."""
    lam, t = _check_sp_args(spec, lam, t)
    return subset_sum(lam, t, spec.eta,
                      lambda v, origin, idx: vacuum_eigenvalue(spec, v),
                      spec.regime, spec.tol)


def sp_fbasis(spec: ChainSpec, lam: Sequence, t: Sequence) -> Scalar:
    """S_M as the sum over F-basis coordinate sets ``{x}``."""
    lam, t = _check_sp_args(spec, lam, t)
    w = _spec_weights(spec)
    m, xi = len(t), spec.xi
    pref = w.prod(vacuum_eigenvalue(spec, v) for v in (*t, *lam))
    total = Fraction(0) if w.field.exact else 0j
    for xs in itertools.combinations(range(spec.n), m):
        rest = [a for a in range(spec.n) if a not in xs]
        x_vals = [xi[x] for x in xs]
        try:
            term = w.prod(w.inv_c(xi[a] - xi[x]) for x in xs for a in rest)
            term *= _phi_m_cleared(w, lam, x_vals) / w.prod(
                w.phi(x - l) for x in x_vals for l in lam)
            term *= _phi_m_cleared(w, t, x_vals) / w.prod(
                w.phi(x - u) for x in x_vals for u in t)
        except PoleError as exc:
            raise PoleError(
                f"coordinates {[x + 1 for x in xs]}: {exc}") from None
        total += term
    return pref * total


def _require_on_shell(spec: ChainSpec, t) -> None:
    res = bae_residual(spec, t)
    if spec.field.exact:
        bad = any(r != 0 for r in res)
    else:
        bad = any(abs(r) >= ONSHELL_TOL for r in res)
    if bad:
        raise OffShellError(res)


def slavnov_det(w: _Weights, lam, t, a_lam) -> Scalar:
    """Slavnov determinant with arbitrary values ``a_lam[j] = a(lam_j)``."""
    m = len(t)
    mat = w.field.zeros((m, m))
    pe = w.phi(w.eta)
    for i in range(m):
        for j in range(m):
            d = w.phi(t[i] - lam[j])
            if d == 0:
                raise ValueError(f"t_{i + 1} = lambda_{j + 1}")
            plus = w.prod(w.phi(t[a] - lam[j] + w.eta)
                          for a in range(m) if a != i)
            minus = w.prod(w.phi(t[a] - lam[j] - w.eta)
                           for a in range(m) if a != i)
            mat[i, j] = pe / d * (a_lam[j] * plus - minus)
    return det(mat) / (_vandermonde(w, t, True) * _vandermonde(w, lam, False))


def sp_slavnov(spec: ChainSpec, lam: Sequence, t: Sequence) -> Scalar:
    """Slavnov determinant; ``t`` must solve the Bethe equations."""
    lam, t = _check_sp_args(spec, lam, t)
    _check_distinct(spec.field, lam, "lambda")
    _require_on_shell(spec, t)
    w = _spec_weights(spec)
    return slavnov_det(w, lam, t, [vacuum_eigenvalue(spec, l) for l in lam])


def transfer_eigenvalue_gradient(spec: ChainSpec, lam, t) -> np.ndarray:
    """Matrix ``d Lambda(lam_j; {t}) / d t_i`` from the closed form."""
    w = _spec_weights(spec)
    m = len(t)
    pe = w.phi(w.eta)

    def g(x):
        return w.inv_c(x)

    def dg(x):
        return -pe / w.phi(x) ** 2

    out = w.field.zeros((m, m))
    for j, l in enumerate(lam):
        a_l = vacuum_eigenvalue(spec, l)
        for i in range(m):
            first = a_l * dg(t[i] - l) * w.prod(
                g(t[a] - l) for a in range(m) if a != i)
            second = -dg(l - t[i]) * w.prod(
                g(l - t[a]) for a in range(m) if a != i)
            out[i, j] = first + second
    return out


def sp_slavnov_jacobian(spec: ChainSpec, lam: Sequence, t: Sequence,
                        absorb_sign: bool = False) -> Scalar:
    """Slavnov's formula written through ``det(d Lambda / d t)``.

    With ``absorb_sign`` the ``(-1)^M`` is folded into
    ``prod phi(lam_j - t_i)`` instead of being applied separately.
    """
    lam, t = _check_sp_args(spec, lam, t)
    _check_distinct(spec.field, lam, "lambda")
    _require_on_shell(spec, t)
    w = _spec_weights(spec)
    m = len(t)
    if absorb_sign:
        pref = w.prod(w.phi(l - u) for u in t for l in lam)
    else:
        pref = (-1) ** m * w.prod(w.phi(u - l) for u in t for l in lam)
    pref /= _vandermonde(w, t, True) * _vandermonde(w, lam, False)
    return pref * det(transfer_eigenvalue_gradient(spec, lam, t))


# ------------------------------------------------------------ norms

def _log_factors(spec: ChainSpec, t, i):
    """ln(a(t_i)/f(t_i)) as (power, {root index: coefficient}, const)."""
    eta = spec.eta
    out = []
    for x in spec.xi:
        out.append((1, {i: -1}, x))
        out.append((-1, {i: -1}, x + eta))
    for a in range(len(t)):
        if a != i:
            out.append((-1, {a: 1, i: -1}, -eta))
            out.append((1, {a: 1, i: -1}, eta))
    return out


def gaudin_matrix(spec: ChainSpec, t: Sequence, form: str = "logderiv"):
    """The matrix ``N_ij = -d/dt_j ln(a(t_i)/f(t_i))``.

    ``form="logderiv"`` differentiates the factorized logarithm term by
    term; ``form="explicit"`` uses the closed off-diagonal entries
    ``phi(2 eta) / (phi(t_ij + eta) phi(t_ij - eta))``.
    """
    t = spec.params(t)
    m = len(t)
    w = _spec_weights(spec)
    out = w.field.zeros((m, m))
    if form == "logderiv":
        for i in range(m):
            for power, coeffs, const in _log_factors(spec, t, i):
                arg = const + sum(c * t[k] for k, c in coeffs.items())
                ratio = dphi(spec.regime, arg) / w.phi(arg)
                for k, c in coeffs.items():
                    out[i, k] -= power * c * ratio
        return out
    if form != "explicit":
        raise ValueError(f"unknown form {form!r}")
    eta = spec.eta

    def off(x):
        return w.phi(2 * eta) / (w.phi(x + eta) * w.phi(x - eta))

    for i in range(m):
        diag = Fraction(0) if w.field.exact else 0j
        for x in spec.xi:
            u = x - t[i]
            # -(ln a)'(t_i), a(t) = prod phi(xi - t) / phi(xi - t + eta)
            diag += dphi(spec.regime, u) / w.phi(u) \
                - dphi(spec.regime, u + eta) / w.phi(u + eta)
        for a in range(m):
            if a != i:
                out[i, a] = off(t[i] - t[a])
                diag -= off(t[a] - t[i])
        out[i, i] = diag
    return out


def gaudin_factorized(n_mat: np.ndarray, fld: Field):
    """Split ``N = L D`` with ``D = diag(N_ii)`` and unit-diagonal ``L``."""
    m = n_mat.shape[0]
    left = fld.identity(m)
    right = fld.zeros((m, m))
    for a in range(m):
        right[a, a] = n_mat[a, a]
        for i in range(m):
            if i != a:
                left[i, a] = n_mat[i, a] / n_mat[a, a]
    return left, right


def gaudin_norm(spec: ChainSpec, t: Sequence) -> Scalar:
    """Norm of the on-shell Bethe state ``B(t_1)..B(t_M)|0>``."""
    t = spec.params(t)
    _check_distinct(spec.field, t, "t")
    _require_on_shell(spec, t)
    w = _spec_weights(spec)
    logd = gaudin_matrix(spec, t, "logderiv")
    explicit = gaudin_matrix(spec, t, "explicit")
    if not spec.field.allclose(logd, explicit):
        raise ArithmeticError("the two forms of the Gaudin matrix disagree")
    m = len(t)
    pref = w.phi(spec.eta) ** m
    for i, j in itertools.permutations(range(m), 2):
        pref *= w.phi(t[i] - t[j] + spec.eta) / w.phi(t[i] - t[j])
    return pref * det(logd)


def extrapolate_to_zero(eps: Sequence, values: Sequence) -> Scalar:
    """Neville extrapolation of ``values(eps)`` to ``eps = 0``."""
    p = list(values)
    x = list(eps)
    n = len(p)
    for level in range(1, n):
        for i in range(n - level):
            p[i] = (x[i + level] * p[i] - x[i] * p[i + 1]) / \
                   (x[i + level] - x[i])
    return p[0]


def default_offsets(fld: Field):
    if fld.exact:
        return [Fraction(1, 10 ** k) for k in range(4, 8)]
    return [1e-3 / 2 ** k for k in range(5)]


def slavnov_limit(spec: ChainSpec, t: Sequence, eps=None) -> Scalar:
    """``lim_{lam -> t}`` of the Slavnov determinant along ``lam = t + eps``."""
    t = spec.params(t)
    eps = default_offsets(spec.field) if eps is None else eps
    values = [sp_slavnov(spec, [u + e for u in t], t) for e in eps]
    return extrapolate_to_zero(eps, values)


# ------------------------------------------------------------ residue check

def residue_recursion(lam: Sequence, t: Sequence, eta, a: Callable,
                      eps: Sequence, regime=Regime.XXX):
    """Both sides of the residue relation at ``lam_1 = t_1 + eps``.

    The splitting sum uses ``a`` on lambda values and ``f(t_i)`` on t
    values.  Returns the two lists ``(lhs, rhs)`` evaluated at each offset:
    ``lhs = (t_1 - lam_1) S_M`` and
    ``rhs = phi(eta)(a(lam_1) - f(t_1)) prod_{k>1} 1/c(t_k - t_1)
    1/c(lam_k - t_1) S_{M-1}(a')`` with ``a'(v) = a(v) c(v - t_1)/c(t_1 - v)``.
    """
    w, (lam, t) = _weights(regime, eta, lam, t)
    m = len(t)

    def f(i, roots):
        return w.prod(w.c(roots[k] - roots[i]) / w.c(roots[i] - roots[k])
                      for k in range(len(roots)) if k != i)

    lhs, rhs = [], []
    for e in eps:
        lam_e = (t[0] + e,) + tuple(lam[1:])

        def weight(v, origin, idx, roots=t):
            return a(v) if origin == "lambda" else f(idx, roots)

        full = subset_sum(lam_e, t, w.eta, weight, regime)
        lhs.append(w.phi(t[0] - lam_e[0]) * full)

        t1 = t[0]
        sub_t = t[1:]

        def weight_sub(v, origin, idx):
            base = a(v) if origin == "lambda" else f(idx + 1, t)
            return base * w.c(v - t1) / w.c(t1 - v)

        sub = subset_sum(lam_e[1:], sub_t, w.eta, weight_sub, regime) \
            if m > 1 else w.one
        pref = w.phi(w.eta) * (a(lam_e[0]) - f(0, t))
        pref *= w.prod(w.inv_c(t[k] - t1) * w.inv_c(lam_e[k] - t1)
                       for k in range(1, m))
        rhs.append(pref * sub)
    return lhs, rhs


# ------------------------------------------------------------ rewritings

def _sign(seq: Sequence[int]) -> int:
    inv = sum(1 for i, j in itertools.combinations(range(len(seq)), 2)
              if seq[i] > seq[j])
    return -1 if inv % 2 else 1


def sp_split_form(spec: ChainSpec, lam: Sequence, t: Sequence) -> Scalar:
    """Splitting sum regrouped by which t's and lambda's sit in ``{nu}``.

    ``sum_m sum_{k,n} prod a(lam_n) a(t_k) Phi_m(t_k, lam_beta)
    Phi_{M-m}(lam_n, t_alpha) prod 1/c(lam_beta - lam_n) 1/c(t_alpha - t_k)
    1/c(t_alpha - lam_n) 1/c(lam_beta - t_k)``.
    """
    lam, t = _check_sp_args(spec, lam, t)
    w = _spec_weights(spec)
    M = len(t)
    a = {("t", i): vacuum_eigenvalue(spec, v) for i, v in enumerate(t)}
    a.update({("l", j): vacuum_eigenvalue(spec, v)
              for j, v in enumerate(lam)})
    total = Fraction(0) if w.field.exact else 0j
    for m in range(M + 1):
        for k in itertools.combinations(range(M), m):
            alpha = [i for i in range(M) if i not in k]
            for n in itertools.combinations(range(M), M - m):
                beta = [j for j in range(M) if j not in n]
                tk = [t[i] for i in k]
                ta = [t[i] for i in alpha]
                ln = [lam[j] for j in n]
                lb = [lam[j] for j in beta]
                term = w.prod(a[("l", j)] for j in n)
                term *= w.prod(a[("t", i)] for i in k)
                term *= w.prod(w.inv_c(x - y) for x in lb for y in ln)
                term *= w.prod(w.inv_c(x - y) for x in ta for y in tk)
                # Phi_m(t_k, lam_b) prod 1/c(lam_b - t_k), pole-cleared
                term *= _phi_m_cleared(w, tk, lb) / w.prod(
                    w.phi(x - y) for x in lb for y in tk)
                term *= _phi_m_cleared(w, ln, ta) / w.prod(
                    w.phi(x - y) for x in ta for y in ln)
                total += term
    return total


def _onshell_terms(spec: ChainSpec, lam, t):
    if spec.regime is not Regime.XXX:
        raise ValueError("the determinant rewritings are for the xxx chain")
    lam, t = _check_sp_args(spec, lam, t)
    _require_on_shell(spec, t)
    w = _spec_weights(spec)
    M = len(t)
    for m in range(M + 1):
        for k in itertools.combinations(range(M), m):
            alpha = tuple(i for i in range(M) if i not in k)
            for n in itertools.combinations(range(M), M - m):
                beta = tuple(j for j in range(M) if j not in n)
                sign = _sign(k + alpha) * _sign(n + beta)
                yield w, m, sign, [t[i] for i in k], [t[i] for i in alpha], \
                    [lam[j] for j in n], [lam[j] for j in beta], lam, t


def _izergin_det(w, inhom, args):
    return det(izergin_matrix(w, inhom, args)) if args else w.one


def sp_onshell_form(spec: ChainSpec, lam: Sequence, t: Sequence) -> Scalar:
    """On-shell splitting sum written with bare Izergin determinants."""
    total = None
    for w, m, sign, tk, ta, ln, lb, lam_, t_ in _onshell_terms(spec, lam, t):
        eta = w.eta
        term = sign * w.prod(vacuum_eigenvalue(spec, v) for v in ln)
        term *= _izergin_det(w, tk, lb) * _izergin_det(w, ln, ta)
        term *= w.prod(x - y + eta for x in lb for y in ln)
        term *= w.prod(x - y + eta for x in tk for y in ta)
        term *= w.prod(x - y + eta for x in ta for y in ln)
        term *= w.prod(x - y + eta for x in lb for y in tk)
        total = term if total is None else total + term
    return total / (_vandermonde(w, t_, True) * _vandermonde(w, lam_, False))


def sp_onshell_form_alt(spec: ChainSpec, lam: Sequence, t: Sequence):
    """Second on-shell rewriting, with the ``(-1)^{Mm}`` sign."""
    total = None
    for w, m, sign, tk, ta, ln, lb, lam_, t_ in _onshell_terms(spec, lam, t):
        eta, M = w.eta, len(t_)
        term = sign * (-1) ** (M * m)
        term *= w.prod(vacuum_eigenvalue(spec, v) for v in ln)
        term *= w.prod(u - y + eta for u in t_ for y in ln)
        term *= w.prod(u - y - eta for u in t_ for y in lb)
        term *= _izergin_det(w, tk, lb) * _izergin_det(w, ln, ta)
        term *= w.prod(x - y + eta for x in tk for y in ta)
        term /= w.prod(x - y + eta for x in tk for y in ln)
        term *= w.prod(x - y + eta for x in lb for y in ln)
        term /= w.prod(x - y + eta for x in lb for y in ta)
        total = term if total is None else total + term
    return total / (_vandermonde(w, t_, True) * _vandermonde(w, lam_, False))
