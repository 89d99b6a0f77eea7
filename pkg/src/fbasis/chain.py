"""Inhomogeneous spin-1/2 chains: S-matrices, monodromy entries, Bethe data.

Basis convention (fixed for the whole package): a basis state of the
``N``-site quantum space is an integer whose bit ``i-1`` is set when site
``i`` carries spin up.  The pseudovacuum (all spins down) is index 0.
When an auxiliary space is attached it occupies bit ``N``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .field import (DEFAULT_TOL, EXACT, Field, Regime, Scalar,
                    from_json, parse_scalar, phi, to_json)

N_MAX = 12

UP, DOWN = 1, 0


class ChainError(ValueError):
    """A chain specification violates one of its invariants."""


class PoleError(ZeroDivisionError):
    """A spectral parameter hits a pole of the S-matrix weights."""


# ------------------------------------------------------------ weights

def b_weight(regime: Regime, eta: Scalar, x: Scalar) -> Scalar:
    """phi(eta) / phi(x + eta)."""
    den = phi(regime, x + eta)
    if den == 0:
        raise PoleError(f"b({x}) has a pole: phi({x} + eta) = 0")
    return phi(regime, eta) / den


def c_weight(regime: Regime, eta: Scalar, x: Scalar) -> Scalar:
    """phi(x) / phi(x + eta)."""
    den = phi(regime, x + eta)
    if den == 0:
        raise PoleError(f"c({x}) has a pole: phi({x} + eta) = 0")
    return phi(regime, x) / den


def _coerce(fld: Field, regime: Regime, v) -> Scalar:
    if isinstance(v, str):
        v = parse_scalar(v)
    return fld(v)


@dataclass(frozen=True)
class ChainSpec:
    """Regime, anisotropy ``eta`` and inhomogeneities ``xi_1..xi_N``.

    Values are exact rationals in the xxx regime unless one of them is a
    float (or complex), in which case the whole chain switches to the float
    field.  The xxz regime always uses floats.  Construct with
    ``strict=False`` to skip the genericity checks (used for identities
    that live exactly on the excluded points).
    """

    regime: Regime
    eta: Scalar
    xi: tuple
    tol: float = DEFAULT_TOL
    strict: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        regime = Regime(self.regime)
        values = [self.eta, *self.xi]
        values = [parse_scalar(v) if isinstance(v, str) else v
                  for v in values]
        exact = regime is Regime.XXX and all(
            isinstance(v, (int, Fraction)) for v in values)
        fld = EXACT if exact else Field(False, self.tol)
        values = [_coerce(fld, regime, v) for v in values]
        object.__setattr__(self, "regime", regime)
        object.__setattr__(self, "eta", values[0])
        object.__setattr__(self, "xi", tuple(values[1:]))
        object.__setattr__(self, "_field", fld)
        if self.strict:
            self.validate()

    # -- invariants

    def validate(self) -> None:
        n = len(self.xi)
        if not 1 <= n <= N_MAX:
            raise ChainError(f"chain length must be in 1..{N_MAX}, got {n}")
        fld = self.field
        if fld.is_zero(self.eta):
            raise ChainError("eta must be nonzero")
        for i, j in itertools.combinations(range(n), 2):
            d = self.xi[i] - self.xi[j]
            if fld.is_zero(d):
                raise ChainError(
                    f"xi_{i + 1} and xi_{j + 1} coincide ({self.xi[i]})")
            if fld.eq(d, self.eta) or fld.eq(d, -self.eta):
                raise ChainError(
                    f"xi_{i + 1} - xi_{j + 1} = {d} equals +/-eta")

    # -- accessors

    @property
    def n(self) -> int:
        return len(self.xi)

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def field(self) -> Field:
        return self._field

    def phi(self, x: Scalar) -> Scalar:
        return phi(self.regime, x)

    def b(self, x: Scalar) -> Scalar:
        return b_weight(self.regime, self.eta, x)

    def c(self, x: Scalar) -> Scalar:
        return c_weight(self.regime, self.eta, x)

    def scalar(self, v) -> Scalar:
        """Coerce ``v`` into this chain's field."""
        return _coerce(self.field, self.regime, v)

    def params(self, values: Iterable) -> tuple:
        return tuple(self.scalar(v) for v in values)

    def with_xi(self, xi: Sequence, strict: bool = True) -> "ChainSpec":
        return replace(self, xi=tuple(xi), strict=strict)

    def to_float(self) -> "ChainSpec":
        return ChainSpec(self.regime, complex(self.eta),
                         tuple(complex(x) for x in self.xi), tol=self.tol,
                         strict=False)

    def to_json(self) -> dict:
        return {"regime": self.regime.value, "n": self.n,
                "eta": to_json(self.eta), "xi": [to_json(x) for x in self.xi]}

    @classmethod
    def from_json(cls, obj: dict, tol: float = DEFAULT_TOL) -> "ChainSpec":
        xi = [from_json(x) for x in obj["xi"]]
        if "n" in obj and obj["n"] != len(xi):
            raise ChainError(f"n = {obj['n']} but {len(xi)} xi values given")
        return cls(obj.get("regime", "xxx"), from_json(obj["eta"]),
                   tuple(xi), tol=tol)


# ------------------------------------------------------------ basis helpers

def index_of(sites: Iterable[int]) -> int:
    """Basis index of the state with spin up on the given 1-based sites."""
    return sum(1 << (s - 1) for s in sites)


def sites_of(index: int, n: int) -> tuple:
    return tuple(i + 1 for i in range(n) if index >> i & 1)


def check_occupation(sites: Sequence[int], n: int) -> tuple:
    sites = tuple(sites)
    if any(b <= a for a, b in zip(sites, sites[1:])):
        raise ValueError(f"occupation {sites} is not strictly increasing")
    if sites and (sites[0] < 1 or sites[-1] > n):
        raise ValueError(f"occupation {sites} outside 1..{n}")
    return sites


def sector(n: int, m: int) -> list:
    """Occupation sets with ``m`` particles, in lexicographic order."""
    return list(itertools.combinations(range(1, n + 1), m))


def sector_indices(n: int, m: int) -> list:
    return [index_of(s) for s in sector(n, m)]


def sector_block(op: np.ndarray, n: int, m: int, m_in: int | None = None):
    rows = sector_indices(n, m)
    cols = sector_indices(n, m if m_in is None else m_in)
    return op[np.ix_(rows, cols)]


def basis_vector(fld: Field, dim: int, index: int) -> np.ndarray:
    v = fld.zeros(dim)
    v[index] = 1 if fld.exact else 1.0
    return v


def occupation_operator(fld: Field, n: int, site: int) -> np.ndarray:
    """Diagonal number operator of spin up on ``site``."""
    out = fld.zeros((1 << n, 1 << n))
    for k in range(1 << n):
        if k >> (site - 1) & 1:
            out[k, k] = 1 if fld.exact else 1.0
    return out


def raising_operator(fld: Field, n: int, site: int) -> np.ndarray:
    out = fld.zeros((1 << n, 1 << n))
    bit = 1 << (site - 1)
    for k in range(1 << n):
        if not k & bit:
            out[k | bit, k] = 1 if fld.exact else 1.0
    return out


# ------------------------------------------------------------ gates

@lru_cache(maxsize=None)
def _mixed_pairs(nbits: int, p: int, q: int):
    idx = np.arange(1 << nbits)
    mixed = idx[((idx >> p) & 1) != ((idx >> q) & 1)]
    return mixed, mixed ^ ((1 << p) | (1 << q))


def apply_s(state: np.ndarray, p: int, q: int, c: Scalar, b: Scalar,
            nbits: int) -> np.ndarray:
    """Apply the S-matrix with weights (c, b) on bits p, q to the rows."""
    mixed, partner = _mixed_pairs(nbits, p, q)
    out = state.copy()
    out[mixed] = c * state[mixed] + b * state[partner]
    return out


def s_matrix(spec: ChainSpec, t1: Scalar, t2: Scalar) -> np.ndarray:
    """4x4 S-matrix on two sites, normalized so that ``a = 1``.

    Rows and columns are ordered by the two-bit index (bit 0 = first
    space).  The operator is symmetric under exchange of the two spaces.
    """
    t = spec.scalar(t1) - spec.scalar(t2)
    c, b = spec.c(t), spec.b(t)
    return apply_s(spec.field.identity(4), 0, 1, c, b, 2)


def embed_s(spec: ChainSpec, i: int, j: int, t1: Scalar, t2: Scalar,
            nbits: int | None = None) -> np.ndarray:
    """Dense ``S_ij(t1, t2)`` on ``nbits`` spaces (sites are 1-based)."""
    nbits = spec.n if nbits is None else nbits
    t = spec.scalar(t1) - spec.scalar(t2)
    return apply_s(spec.field.identity(1 << nbits), i - 1, j - 1,
                   spec.c(t), spec.b(t), nbits)


def permutation_operator(fld: Field, n: int, perm: Sequence[int]):
    """Operator sending site ``k`` of a state to site ``perm[k-1]``."""
    dim = 1 << n
    out = fld.zeros((dim, dim))
    for k in range(dim):
        target = index_of(perm[s - 1] for s in sites_of(k, n))
        out[target, k] = 1 if fld.exact else 1.0
    return out


# ------------------------------------------------------------ monodromy

class Monodromy(NamedTuple):
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray


def _site_gates(spec: ChainSpec, t: Scalar):
    """(bit, c, b) for the factors S_{i0}(xi_i, t), i = 1..N."""
    out = []
    for i, x in enumerate(spec.xi):
        u = x - t
        try:
            out.append((i, spec.c(u), spec.b(u)))
        except PoleError:
            raise PoleError(
                f"spectral parameter {t} collides with pole xi_{i + 1} + eta"
            ) from None
    return out


def monodromy(spec: ChainSpec, t) -> Monodromy:
    """Dense entries of ``T_0(t) = S_10(xi_1,t) ... S_N0(xi_N,t)``.

    ``A = <up|T|up>``, ``B = <down|T|up>``, ``C = <up|T|down>``,
    ``D = <down|T|down>`` in the auxiliary space.
    """
    t = spec.scalar(t)
    n = spec.n
    x = spec.field.identity(1 << (n + 1))
    for bit, c, b in reversed(_site_gates(spec, t)):
        x = apply_s(x, bit, n, c, b, n + 1)
    lo = slice(0, 1 << n)
    hi = slice(1 << n, 2 << n)
    return Monodromy(A=x[hi, hi], B=x[lo, hi], C=x[hi, lo], D=x[lo, lo])


_AUX = {"A": (UP, UP), "B": (DOWN, UP), "C": (UP, DOWN), "D": (DOWN, DOWN)}


def apply_entry(spec: ChainSpec, which: str, t, vec: np.ndarray):
    """``X(t) @ vec`` for X in A, B, C, D without forming the matrix."""
    out_aux, in_aux = _AUX[which]
    return _act(spec, t, vec, in_aux, out_aux, reverse=False)


def apply_entry_left(spec: ChainSpec, which: str, t, vec: np.ndarray):
    """``vec @ X(t)`` (a bra times the operator X)."""
    out_aux, in_aux = _AUX[which]
    # S is symmetric, so T^T is the same product in reversed order
    return _act(spec, t, vec, out_aux, in_aux, reverse=True)


def _act(spec, t, vec, in_aux, out_aux, reverse):
    t = spec.scalar(t)
    n = spec.n
    dim = 1 << n
    full = spec.field.zeros((2 * dim,) + vec.shape[1:])
    full[in_aux * dim:(in_aux + 1) * dim] = vec
    gates = _site_gates(spec, t)
    if not reverse:
        gates = gates[::-1]
    for bit, c, b in gates:
        full = apply_s(full, bit, n, c, b, n + 1)
    return full[out_aux * dim:(out_aux + 1) * dim]


def transfer_matrix(spec: ChainSpec, t) -> np.ndarray:
    m = monodromy(spec, t)
    return m.A + m.D


def vacuum(spec: ChainSpec) -> np.ndarray:
    return basis_vector(spec.field, spec.dim, 0)


def bethe_state(spec: ChainSpec, roots: Sequence) -> np.ndarray:
    """``B(t_1) ... B(t_M)|0>``."""
    v = vacuum(spec)
    for t in reversed(tuple(roots)):
        v = apply_entry(spec, "B", t, v)
    return v


def dual_bethe_state(spec: ChainSpec, params: Sequence) -> np.ndarray:
    """``<0|C(l_1) ... C(l_M)`` as a row vector."""
    v = vacuum(spec)
    for t in params:
        v = apply_entry_left(spec, "C", t, v)
    return v


# ------------------------------------------------------------ eigenvalues

def vacuum_eigenvalue(spec: ChainSpec, t) -> Scalar:
    """a(t) = prod_alpha c(xi_alpha - t)."""
    t = spec.scalar(t)
    out = Fraction(1) if spec.field.exact else 1.0
    for x in spec.xi:
        try:
            out *= spec.c(x - t)
        except PoleError:
            raise PoleError(f"a(t) has a pole at t = {t} = xi + eta") \
                from None
    return out


def _inv_c(spec: ChainSpec, x: Scalar) -> Scalar:
    c = spec.c(x)
    if c == 0:
        raise PoleError(f"1/c({x}) has a pole")
    return 1 / c


def transfer_eigenvalue(spec: ChainSpec, t, roots: Sequence) -> Scalar:
    """Lambda(t) = a(t) prod 1/c(t_a - t) + prod 1/c(t - t_a)."""
    t = spec.scalar(t)
    roots = spec.params(roots)
    first = vacuum_eigenvalue(spec, t)
    second = Fraction(1) if spec.field.exact else 1.0
    for r in roots:
        first *= _inv_c(spec, r - t)
        second *= _inv_c(spec, t - r)
    return first + second


def bethe_f(spec: ChainSpec, roots: Sequence, i: int) -> Scalar:
    """f(t_i) = prod_{a != i} c(t_a - t_i) / c(t_i - t_a)."""
    roots = spec.params(roots)
    out = Fraction(1) if spec.field.exact else 1.0
    for a, r in enumerate(roots):
        if a != i:
            out *= spec.c(r - roots[i]) * _inv_c(spec, roots[i] - r)
    return out


def bae_residual(spec: ChainSpec, roots: Sequence) -> list:
    """Per-root residual a(t_i) - f(t_i); all zero exactly on shell."""
    roots = spec.params(roots)
    fld = spec.field
    for i, j in itertools.combinations(range(len(roots)), 2):
        if fld.eq(roots[i], roots[j]):
            raise ValueError(f"roots t_{i + 1} and t_{j + 1} coincide")
    return [vacuum_eigenvalue(spec, r) - bethe_f(spec, roots, i)
            for i, r in enumerate(roots)]
