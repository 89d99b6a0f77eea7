"""The factorizing operator and the monodromy entries in its basis.

``O`` maps the label state ``|{n}>`` to the eigenvector
``B(xi_{n_1}) ... B(xi_{n_M})|0>`` of ``A(t)``, so ``F = O^{-1}`` is the
factorizing twist.  It is built two ways (ordered product of local
``F_i`` factors, and column by column from B operators) and inverted
through the dual operator ``Otilde`` built from C operators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .chain import (ChainSpec, PoleError, apply_entry, apply_entry_left,
                    apply_s, basis_vector, embed_s, index_of, monodromy,
                    permutation_operator, sites_of)
from .field import Scalar, matmul


class FactorizationError(ArithmeticError):
    pass


# ------------------------------------------------------------ T_n and O

def _bits(dim: int, site: int) -> np.ndarray:
    return (np.arange(dim) >> (site - 1)) & 1


def _apply_t_n(spec: ChainSpec, n: int, x: np.ndarray) -> np.ndarray:
    # T_n = S_{n+1,n} ... S_{N,n}; the rightmost factor acts first
    for j in range(spec.n, n, -1):
        u = spec.xi[j - 1] - spec.xi[n - 1]
        x = apply_s(x, j - 1, n - 1, spec.c(u), spec.b(u), spec.n)
    return x


def t_n(spec: ChainSpec, n: int) -> np.ndarray:
    """``T_n = S_{n+1,n}(xi_{n+1}, xi_n) ... S_{N,n}(xi_N, xi_n)``."""
    if not 1 <= n <= spec.n:
        raise ValueError(f"site {n} outside 1..{spec.n}")
    return _apply_t_n(spec, n, spec.field.identity(spec.dim))


def o_hat_product(spec: ChainSpec) -> np.ndarray:
    """``O = F_1 F_2 ... F_N`` with ``F_i = (1 - n_i) + T_i n_i``."""
    dim = spec.dim
    x = spec.field.identity(dim)
    for i in range(spec.n, 0, -1):
        occupied = _bits(dim, i) == 1
        moved = x.copy()
        moved[~occupied] = 0
        kept = x.copy()
        kept[occupied] = 0
        x = kept + _apply_t_n(spec, i, moved)
    return x


def o_hat_from_b(spec: ChainSpec) -> np.ndarray:
    """Column ``{n}`` is ``B(xi_{n_1}) ... B(xi_{n_M})|0>``."""
    dim = spec.dim
    out = spec.field.zeros((dim, dim))
    for k in range(dim):
        v = basis_vector(spec.field, dim, 0)
        for s in reversed(sites_of(k, spec.n)):
            v = apply_entry(spec, "B", spec.xi[s - 1], v)
        out[:, k] = v
    return out


def o_tilde(spec: ChainSpec) -> np.ndarray:
    """Row ``{m}`` is ``<0|C(xi_{m_1}) ... C(xi_{m_M})``."""
    dim = spec.dim
    out = spec.field.zeros((dim, dim))
    for k in range(dim):
        v = basis_vector(spec.field, dim, 0)
        for s in sites_of(k, spec.n):
            v = apply_entry_left(spec, "C", spec.xi[s - 1], v)
        out[k, :] = v
    return out


def f_value(spec: ChainSpec, sites: Sequence[int]) -> Scalar:
    """Diagonal entry of ``Otilde O`` on ``|{n}>``.

    ``prod_k prod_{alpha not in {n}} c(xi_alpha - xi_{n_k})``.
    """
    occupied = set(sites)
    out = Fraction(1) if spec.field.exact else 1.0
    for k in sites:
        for a in range(1, spec.n + 1):
            if a not in occupied:
                out *= spec.c(spec.xi[a - 1] - spec.xi[k - 1])
    return out


def f_hat(spec: ChainSpec) -> dict:
    """Map occupation set -> f({n}) over the whole space."""
    return {sites_of(k, spec.n): f_value(spec, sites_of(k, spec.n))
            for k in range(spec.dim)}


def o_inverse(spec: ChainSpec, o_t: np.ndarray | None = None) -> np.ndarray:
    """``O^{-1} = f^{-1} Otilde``."""
    o_t = o_tilde(spec) if o_t is None else o_t
    out = o_t.copy()
    fld = spec.field
    for k in range(spec.dim):
        sites = sites_of(k, spec.n)
        f = f_value(spec, sites)
        if fld.is_zero(f):
            pair = _vanishing_pair(spec, sites)
            raise FactorizationError(
                f"f({sites}) = 0: c(xi_{pair[0]} - xi_{pair[1]}) vanishes")
        out[k] = out[k] / f if not fld.exact else out[k] * (1 / f)
    return out


def _vanishing_pair(spec, sites):
    for k in sites:
        for a in range(1, spec.n + 1):
            if a not in sites and spec.field.is_zero(
                    spec.c(spec.xi[a - 1] - spec.xi[k - 1])):
                return a, k
    return None, None


@dataclass(frozen=True)
class FactorizingOperator:
    spec: ChainSpec
    o_hat: np.ndarray
    o_tilde: np.ndarray
    o_inv: np.ndarray
    f_hat: dict

    @classmethod
    def build(cls, spec: ChainSpec) -> "FactorizingOperator":
        o_t = o_tilde(spec)
        return cls(spec, o_hat_product(spec), o_t, o_inverse(spec, o_t),
                   f_hat(spec))

    def conjugate(self, op: np.ndarray) -> np.ndarray:
        """The operator in the F basis, ``O^{-1} op O``."""
        return matmul(self.o_inv, matmul(op, self.o_hat))


# ------------------------------------------------------------ F-basis ops

def a_f(spec: ChainSpec, t) -> np.ndarray:
    """Diagonal ``A^F(t)``: ``prod_{alpha not in {n}} c(xi_alpha - t)``."""
    t = spec.scalar(t)
    out = spec.field.zeros((spec.dim, spec.dim))
    weights = _site_weights(spec, spec.c, t)
    for k in range(spec.dim):
        val = Fraction(1) if spec.field.exact else 1.0
        for a in range(spec.n):
            if not k >> a & 1:
                val *= weights[a]
        out[k, k] = val
    return out


def _site_weights(spec, fn, t):
    try:
        return [fn(x - t) for x in spec.xi]
    except PoleError:
        raise PoleError(f"spectral parameter {t} hits a pole xi + eta") \
            from None


def b_f(spec: ChainSpec, t) -> np.ndarray:
    """``B^F(t)``: quasilocal raising operator.

    Raising site x carries ``b(xi_x - t)`` times, for every other site
    alpha, ``c(xi_alpha - t) / c(xi_alpha - xi_x)`` when alpha is empty
    and 1 when it is occupied.
    """
    t = spec.scalar(t)
    n, xi = spec.n, spec.xi
    c_t = _site_weights(spec, spec.c, t)
    out = spec.field.zeros((spec.dim, spec.dim))
    for k in range(spec.dim):
        for x in range(n):
            if k >> x & 1:
                continue
            amp = spec.b(xi[x] - t)
            for a in range(n):
                if a != x and not k >> a & 1:
                    amp *= c_t[a] / spec.c(xi[a] - xi[x])
            out[k | 1 << x, k] = amp
    return out


def c_f(spec: ChainSpec, t) -> np.ndarray:
    """``C^F(t)``: quasilocal lowering operator.

    Lowering site x carries ``b(xi_x - t)`` times, for every other site
    alpha, ``c(xi_alpha - t)`` when alpha is empty and
    ``1 / c(xi_x - xi_alpha)`` when it is occupied.
    """
    t = spec.scalar(t)
    n, xi = spec.n, spec.xi
    c_t = _site_weights(spec, spec.c, t)
    out = spec.field.zeros((spec.dim, spec.dim))
    for k in range(spec.dim):
        for x in range(n):
            if not k >> x & 1:
                continue
            amp = spec.b(xi[x] - t)
            for a in range(n):
                if a == x:
                    continue
                if k >> a & 1:
                    amp /= spec.c(xi[x] - xi[a])
                else:
                    amp *= c_t[a]
            out[k & ~(1 << x), k] = amp
    return out


# ------------------------------------------------------------ factorization

def site_permuted(spec: ChainSpec, perm: Sequence[int], builder):
    """Operator built on the chain reordered by ``perm``.

    Site ``k`` of the reordered chain carries ``xi_{perm[k]}``; the result
    is relabelled back so that it acts on the original sites.
    """
    perm = tuple(perm)
    swapped = spec.with_xi([spec.xi[p - 1] for p in perm])
    op = builder(swapped)
    p = permutation_operator(spec.field, spec.n, perm)
    return matmul(p, matmul(op, p.T))


def adjacent_swap(n: int, i: int) -> tuple:
    perm = list(range(1, n + 1))
    perm[i - 1], perm[i] = perm[i], perm[i - 1]
    return tuple(perm)


@dataclass(frozen=True)
class FactorizationCheck:
    site: int
    passed: bool


def verify_factorization(spec: ChainSpec, o_hat: np.ndarray | None = None):
    """Check ``O = S_{i+1,i}(xi_{i+1}, xi_i) O^{(i,i+1)}`` for every i."""
    o_hat = o_hat_product(spec) if o_hat is None else o_hat
    report = []
    for i in range(1, spec.n):
        swapped = site_permuted(spec, adjacent_swap(spec.n, i),
                                o_hat_product)
        s = embed_s(spec, i + 1, i, spec.xi[i], spec.xi[i - 1])
        report.append(FactorizationCheck(
            i, spec.field.allclose(o_hat, matmul(s, swapped))))
    return report


def r_sigma(spec: ChainSpec, perm: Sequence[int]) -> np.ndarray:
    """Product of S-matrices accumulated along adjacent swaps.

    Returns ``R`` with ``O = R O_sigma``, composing the single-swap
    relations along a reduced word of ``perm``.
    """
    perm = list(perm)
    current = list(range(1, spec.n + 1))
    r = spec.field.identity(spec.dim)
    # bubble sort current -> perm; each adjacent swap contributes one S
    target_pos = {v: k for k, v in enumerate(perm)}
    changed = True
    while changed:
        changed = False
        for k in range(spec.n - 1):
            if target_pos[current[k]] > target_pos[current[k + 1]]:
                u, v = current[k], current[k + 1]
                s = embed_s(spec, v, u, spec.xi[v - 1], spec.xi[u - 1])
                r = matmul(r, s)
                current[k], current[k + 1] = v, u
                changed = True
    return r


def f_basis_monodromy(spec: ChainSpec, t, op: FactorizingOperator | None
                      = None) -> dict:
    """All four monodromy entries conjugated into the F basis."""
    op = FactorizingOperator.build(spec) if op is None else op
    m = monodromy(spec, t)
    return {name: op.conjugate(x) for name, x in m._asdict().items()}


def symmetric_group(n: int):
    return itertools.permutations(range(1, n + 1))


def occupation_dominates(m_sites: Sequence[int], n_sites: Sequence[int]):
    """``{m}`` is reachable from ``{n}`` by moving particles right."""
    return len(m_sites) == len(n_sites) and all(
        a >= b for a, b in zip(m_sites, n_sites))


def flip_count(i: int, j: int) -> int:
    return bin(i ^ j).count("1")


__all__ = [
    "FactorizationError", "FactorizingOperator", "FactorizationCheck",
    "t_n", "o_hat_product", "o_hat_from_b", "o_tilde", "o_inverse",
    "f_value", "f_hat", "a_f", "b_f", "c_f", "verify_factorization",
    "site_permuted", "adjacent_swap", "r_sigma", "f_basis_monodromy",
    "symmetric_group", "occupation_dominates", "flip_count", "index_of",
]
