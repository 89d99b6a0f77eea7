"""Pointwise checks of the determinant and summation identities.

Each check evaluates both sides of an identity at a concrete rational
fixture and returns an :class:`IdentityReport`.  Random fixtures at
distinct points are a sound proxy for the polynomial identities because
the degrees involved are far below the number of samples.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .chain import ChainSpec, PoleError, vacuum_eigenvalue
from .field import Regime, Scalar, det, to_json
from .scalar_products import _weights, phi_m_det, phi_m_direct, sp_direct


@dataclass(frozen=True)
class IdentityReport:
    identity: str
    fixture: dict
    lhs: Scalar
    rhs: Scalar
    passed: bool
    note: str = field(default="", compare=False)

    def to_json(self) -> dict:
        out = {"identity": self.identity,
               "fixture": {k: _json_value(v) for k, v in self.fixture.items()},
               "lhs": _json_value(self.lhs), "rhs": _json_value(self.rhs),
               "pass": self.passed}
        if self.note:
            out["note"] = self.note
        return out


def _json_value(v):
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, (Fraction, complex, float)):
        return to_json(v)
    return v


def _report(name, fixture, lhs, rhs, fld, note=""):
    return IdentityReport(name, fixture, lhs, rhs, fld.eq(lhs, rhs), note)


def _prod(values, one):
    out = one
    for v in values:
        out *= v
    return out


# ------------------------------------------------------------ row reduction

def _izergin_entries(t, lam, eta, fld):
    m = len(t)
    out = fld.zeros((m, m))
    for i in range(m):
        for j in range(m):
            den = (t[i] - lam[j]) * (t[i] - lam[j] + eta)
            if den == 0:
                raise PoleError(f"M_{i + 1}{j + 1} has a pole")
            out[i, j] = 1 / den
    return out


def row_reduction_b2(t: Sequence, lam: Sequence, eta) -> list:
    """Row and column reductions of ``1/((t_i - l_j)(t_i - l_j + eta))``.

    Returns three reports: ``det M' = det M`` for the row operation, the
    closed form of the reduced first row, and the closed form of the
    reduced first column.
    """
    w, (t, lam) = _weights(Regime.XXX, eta, t, lam)
    eta, fld, one = w.eta, w.field, w.one
    m = len(t)
    if len(lam) != m:
        raise ValueError("t and lambda must have the same size")
    mat = _izergin_entries(t, lam, eta, fld)
    fixture = {"t": list(t), "lambda": list(lam), "eta": eta}

    coef = {x: -_prod(((t[x] - lam[b] + eta) / (t[0] - lam[b] + eta)
                       for b in range(m)), one)
            * _prod(((t[0] - t[a]) / (t[x] - t[a])
                     for a in range(m) if a not in (0, x)), one)
            for x in range(1, m)}
    reduced = mat.copy()
    for x, cx in coef.items():
        reduced[0] = reduced[0] + cx * mat[x]
    closed_row = [
        mat[0, j]
        * _prod(((t[0] - t[a]) / (lam[j] - t[a]) for a in range(1, m)), one)
        * _prod(((lam[j] - lam[b] + eta) / (t[0] - lam[b] + eta)
                 for b in range(m) if b != j), one)
        for j in range(m)]

    coef = {x: -_prod(((lam[x] - t[a]) / (lam[0] - t[a]) for a in range(m)),
                      one)
            * _prod(((lam[0] - lam[b]) / (lam[x] - lam[b])
                     for b in range(m) if b not in (0, x)), one)
            for x in range(1, m)}
    col = mat[:, 0].copy()
    for x, cx in coef.items():
        col = col + cx * mat[:, x]
    closed_col = [
        mat[i, 0]
        * _prod(((t[i] - t[a] + eta) / (lam[0] - t[a])
                 for a in range(m) if a != i), one)
        * _prod(((lam[0] - lam[b]) / (t[i] - lam[b] + eta)
                 for b in range(1, m)), one)
        for i in range(m)]

    row_ok = all(fld.eq(a, b) for a, b in zip(reduced[0], closed_row))
    col_ok = all(fld.eq(a, b) for a, b in zip(col, closed_col))
    return [
        _report("row_reduction_det", fixture, det(reduced), det(mat), fld),
        IdentityReport("row_reduction_b2", fixture, tuple(reduced[0]),
                       tuple(closed_row), row_ok),
        IdentityReport("column_reduction", fixture, tuple(col),
                       tuple(closed_col), col_ok),
    ]


# ------------------------------------------------------------ residues

def residue_sum(t: Sequence, lam: Sequence, j: int, eta) -> IdentityReport:
    """Vanishing contour integral: residues at the t's against t_1, l_j.

    ``j`` is zero-based.
    """
    w, (t, lam) = _weights(Regime.XXX, eta, t, lam)
    eta, one = w.eta, w.one
    m = len(t)
    others = [a for a in range(1, m)]

    def f(z):
        return _prod(((z - lam[b] + eta) / (t[0] - lam[b] + eta)
                      for b in range(len(lam)) if b != j), one)

    def guard(x):
        if x == 0:
            raise PoleError("coinciding parameters in the residue sum")
        return x

    lhs = 0 * one
    for x in others:
        den = (t[x] - t[0]) * (t[x] - lam[j]) * _prod(
            (t[x] - t[a] for a in others if a != x), one)
        lhs += f(t[x]) / guard(den)
    first = f(t[0]) / guard((t[0] - lam[j]) * _prod(
        (t[0] - t[a] for a in others), one))
    second = f(lam[j]) / guard((lam[j] - t[0]) * _prod(
        (lam[j] - t[a] for a in others), one))
    fixture = {"t": list(t), "lambda": list(lam), "j": j, "eta": eta}
    return _report("residue_sum", fixture, lhs, -(first + second), w.field)


# ------------------------------------------------------------ simplified sum

def _simplified_term(xi, lam, xs, one):
    # constrained summand: alpha runs over the unoccupied sites
    rest = [a for a in range(len(xi)) if a not in xs]
    den = _prod((xi[a] - xi[x] for x in xs for a in rest), one)
    den *= _prod((xi[x] - l for x in xs for l in lam), one)
    return 1 / den


def simplified_sum_S(xi: Sequence, lam: Sequence) -> IdentityReport:
    """Sum over coordinate sets against ``prod (xi_a - l_i)^{-1}``."""
    w, (xi, lam) = _weights(Regime.XXX, 1, xi, lam)
    one = w.one
    if any(x == l for x in xi for l in lam):
        raise PoleError("some xi coincides with some lambda")
    lhs = sum((_simplified_term(xi, lam, xs, one)
               for xs in itertools.combinations(range(len(xi)), len(lam))),
              0 * one)
    rhs = 1 / _prod((x - l for x in xi for l in lam), one)
    return _report("simplified_sum_S", {"xi": list(xi), "lambda": list(lam)},
                   lhs, rhs, w.field)


def simplified_sum_relaxed(xi: Sequence, lam: Sequence) -> IdentityReport:
    """Unconstrained sum over ordered tuples equals ``M!`` times the set sum.

    With ``prod_{i != j}(xi_{x_i} - xi_{x_j})`` moved to the numerator the
    summand vanishes whenever two coordinates coincide.
    """
    w, (xi, lam) = _weights(Regime.XXX, 1, xi, lam)
    one, n, m = w.one, len(xi), len(lam)
    total = 0 * one
    for xs in itertools.product(range(n), repeat=m):
        num = _prod((xi[xs[i]] - xi[xs[j]]
                     for i in range(m) for j in range(m) if i != j), one)
        if num == 0:
            continue
        den = _prod((xi[a] - xi[x] for x in xs for a in range(n) if a != x),
                    one)
        den *= _prod((xi[x] - l for x in xs for l in lam), one)
        total += num / den
    rhs = math.factorial(m) / _prod((x - l for x in xi for l in lam), one)
    return _report("simplified_sum_relaxed",
                   {"xi": list(xi), "lambda": list(lam)}, total, rhs, w.field)


# ------------------------------------------------------------ Phi_M zeros

def phi_vanishing(xi: Sequence, t: Sequence, eta, sign: int = 1,
                  slot: str = "xi") -> IdentityReport:
    """Evaluate Phi_M with two parameters of one slot set ``eta`` apart.

    ``slot="xi"`` shifts the second inhomogeneity to ``xi_1 + sign*eta``;
    ``slot="t"`` does the same to the second argument.  The report passes
    only if Phi_M is exactly zero there.  Both the determinant and the
    direct lattice contraction are evaluated; ``note`` records whether they
    agree.
    """
    if len(xi) < 2:
        raise ValueError("phi_vanishing needs M >= 2")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    xi, t = [Fraction(x) for x in xi], [Fraction(x) for x in t]
    target = xi if slot == "xi" else t
    if slot not in ("xi", "t"):
        raise ValueError("slot must be 'xi' or 't'")
    target[1] = target[0] + sign * Fraction(eta)
    by_det = phi_m_det(xi, t, eta)
    by_lattice = phi_m_direct(xi, t, eta)
    fixture = {"xi": xi, "t": t, "eta": Fraction(eta), "sign": sign,
               "slot": slot}
    note = "routes agree" if by_det == by_lattice else "routes disagree"
    return IdentityReport("phi_vanishing", fixture, by_det, Fraction(0),
                          by_det == 0, note)


# ------------------------------------------------------------ F-basis sum

def fbasis_relaxed_sum(spec: ChainSpec, lam: Sequence, t: Sequence):
    """Coordinate sum in the F basis, constrained and relaxed.

    The summand over ordered coordinates ``x_1..x_M`` is
    ``prod_j [prod_{a != x_j} 1/c(xi_a - xi_{x_j}) prod_i 1/c(xi_{x_j} - t_i)
    prod_i 1/c(xi_{x_j} - l_i)] prod_{i != j} c(xi_{x_i} - xi_{x_j})
    Phi_M(t, xi_x) Phi_M(l, xi_x)``; it vanishes at coinciding coordinates.
    Returns reports for relaxed = ``M!`` constrained and for
    ``a(t) a(l)`` times the constrained set sum = ``S_M``.
    """
    lam, t = spec.params(lam), spec.params(t)
    fld, xi, n, m = spec.field, spec.xi, spec.n, len(t)
    one = Fraction(1) if fld.exact else 1.0 + 0j

    def inv_c(x):
        c = spec.c(x)
        if fld.is_zero(c):
            raise PoleError(f"1/c({x}) has a pole")
        return 1 / c

    def summand(xs):
        x_vals = [xi[x] for x in xs]
        val = _prod((inv_c(xi[a] - xi[x]) for x in xs
                     for a in range(n) if a != x), one)
        val *= _prod((inv_c(v - u) for v in x_vals for u in (*t, *lam)), one)
        val *= _prod((spec.c(x_vals[i] - x_vals[j])
                      for i in range(m) for j in range(m) if i != j), one)
        if fld.is_zero(val):
            return 0 * one
        val *= phi_m_direct(t, x_vals, spec.eta, spec.regime, spec.tol)
        val *= phi_m_direct(lam, x_vals, spec.eta, spec.regime, spec.tol)
        return val

    relaxed = sum((summand(xs)
                   for xs in itertools.product(range(n), repeat=m)), 0 * one)
    constrained = sum((summand(xs)
                       for xs in itertools.combinations(range(n), m)),
                      0 * one)
    pref = _prod((vacuum_eigenvalue(spec, v) for v in (*t, *lam)), one)
    fixture = {"xi": list(xi), "eta": spec.eta, "lambda": list(lam),
               "t": list(t)}
    return [
        _report("fbasis_relaxation", fixture, relaxed,
                math.factorial(m) * constrained, fld),
        _report("fbasis_set_sum", fixture, pref * constrained,
                sp_direct(spec, lam, t), fld),
    ]


# ------------------------------------------------------------ fixtures

def random_rational(rng: random.Random, num: int = 40, den: int = 9):
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def generic_params(rng: random.Random, count: int, eta, avoid=(),
                   num: int = 40, den: int = 9, max_tries: int = 1000):
    """``count`` distinct rationals with no pair (or pair with ``avoid``)
    differing by 0 or +-eta."""
    out: list = []
    for _ in range(max_tries):
        if len(out) == count:
            return out
        v = random_rational(rng, num, den)
        if all(v - u not in (0, eta, -eta) for u in (*out, *avoid)):
            out.append(v)
    if len(out) == count:
        return out
    raise ValueError("could not draw generic parameters within the bounds")


def _nonzero_eta(rng):
    while True:
        eta = random_rational(rng, 5, 4)
        if eta != 0:
            return eta


def run_all(count: int = 100, seed: int = 0) -> list:
    """Every identity on ``count`` random rational fixtures."""
    rng = random.Random(seed)
    reports: list[IdentityReport] = []
    for k in range(count):
        m = 1 + k % 3
        eta = _nonzero_eta(rng)
        t = generic_params(rng, m, eta)
        lam = generic_params(rng, m, eta, avoid=t)
        reports.extend(row_reduction_b2(t, lam, eta))
        reports.append(residue_sum(t, lam, rng.randrange(m), eta))
        n = m + 1 + k % 3
        xi = generic_params(rng, n, eta)
        lam = generic_params(rng, m, eta, avoid=xi)
        reports.append(simplified_sum_S(xi, lam))
        reports.append(simplified_sum_relaxed(xi, lam))
        mm, sign = 2 + k % 2, 1 - 2 * (k % 2)
        xi = generic_params(rng, mm, eta)
        xi[1] = xi[0] + sign * eta
        t = generic_params(rng, mm, eta, avoid=xi)
        reports.append(phi_vanishing(xi, t, eta, sign=sign))
    return reports


__all__ = [
    "IdentityReport", "row_reduction_b2", "residue_sum", "simplified_sum_S",
    "simplified_sum_relaxed", "phi_vanishing", "fbasis_relaxed_sum",
    "generic_params", "random_rational", "run_all",
]
