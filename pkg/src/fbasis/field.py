"""Number fields and the small dense linear algebra built on them.

Two realizations are used throughout the package:

* exact rationals, as :class:`fractions.Fraction` scalars held in numpy
  ``object`` arrays;
* double precision complex numbers compared with a relative tolerance.

A :class:`Field` value carries the realization and the comparison
tolerance; it never stores numbers itself.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import reduce
from typing import Any, Iterable, Sequence, Union

import numpy as np

Scalar = Union[Fraction, complex]

DEFAULT_TOL = 1e-9

_RATIONAL_RE = re.compile(r"^\s*[+-]?\d+(\s*/\s*[+-]?\d+)?\s*$")


class FieldError(ValueError):
    """Operation is not available in the requested field."""


class SingularMatrixError(ValueError):
    """Raised by :func:`solve` when the matrix has no inverse."""

    def __init__(self, stage: int, size: int):
        super().__init__(
            f"matrix is singular: no pivot in column {stage} of {size}")
        self.stage = stage


class Regime(str, Enum):
    XXX = "xxx"
    XXZ = "xxz"


@dataclass(frozen=True)
class Field:
    """Exact rationals (``exact=True``) or tolerant complex floats."""

    exact: bool = True
    tol: float = DEFAULT_TOL

    @property
    def name(self) -> str:
        return "exact" if self.exact else "float"

    @property
    def dtype(self):
        return object if self.exact else complex

    def __call__(self, x: Any) -> Scalar:
        if self.exact:
            if isinstance(x, complex):
                if x.imag != 0:
                    raise FieldError(f"{x!r} is not rational")
                x = x.real
            if isinstance(x, float):
                raise FieldError(
                    f"float {x!r} cannot enter the exact field; pass a "
                    "Fraction or a 'num/den' string")
            if isinstance(x, str):
                return parse_rational(x)
            return Fraction(x)
        if isinstance(x, str):
            return complex(parse_scalar(x))
        return complex(x)

    def eq(self, a: Scalar, b: Scalar) -> bool:
        if self.exact:
            return a == b
        return abs(a - b) <= self.tol * max(1.0, abs(a), abs(b))

    def is_zero(self, a: Scalar) -> bool:
        return self.eq(a, 0)

    def array(self, rows) -> np.ndarray:
        if self.exact:
            return np.array(rows, dtype=object)
        return np.array(rows, dtype=complex)

    def zeros(self, shape) -> np.ndarray:
        if self.exact:
            out = np.empty(shape, dtype=object)
            out.fill(Fraction(0))
            return out
        return np.zeros(shape, dtype=complex)

    def identity(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = Fraction(1) if self.exact else 1.0
        return out

    def allclose(self, a: np.ndarray, b: np.ndarray) -> bool:
        a = np.asarray(a)
        b = np.asarray(b)
        if a.shape != b.shape:
            return False
        if self.exact:
            return bool(np.all(a == b))
        a = a.astype(complex)
        b = b.astype(complex)
        scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
        return bool(np.all(np.abs(a - b) <= self.tol * scale))


EXACT = Field(True)
FLOAT = Field(False)


def field_of(values: Iterable[Any], tol: float = DEFAULT_TOL) -> Field:
    """Exact field if every value is rational, float field otherwise."""
    if all(isinstance(v, (int, Fraction)) for v in values):
        return EXACT
    return Field(False, tol)


def parse_rational(text: str) -> Fraction:
    if not _RATIONAL_RE.match(text):
        raise FieldError(f"not a rational literal: {text!r}")
    return Fraction(text.replace(" ", ""))


def parse_scalar(text: str) -> Scalar:
    """``"3/2"`` parses to an exact rational, anything else to complex."""
    text = text.strip()
    if _RATIONAL_RE.match(text):
        return parse_rational(text)
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise FieldError(f"not a number: {text!r}") from None


def to_json(x: Scalar) -> Any:
    if isinstance(x, (Fraction, int)):
        x = Fraction(x)
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 \
            else str(x.numerator)
    x = complex(x)
    return {"re": x.real, "im": x.imag}


def from_json(obj: Any) -> Scalar:
    if isinstance(obj, dict):
        return complex(obj["re"], obj.get("im", 0.0))
    if isinstance(obj, str):
        return parse_scalar(obj)
    if isinstance(obj, int):
        return Fraction(obj)
    return complex(obj)


def phi(regime: Regime, t: Scalar) -> Scalar:
    """Rational (``t``) or trigonometric (``sinh t``) weight function."""
    if Regime(regime) is Regime.XXX:
        return t
    if isinstance(t, (Fraction, int)):
        raise FieldError("the xxz regime needs the float field")
    return cmath.sinh(t)


def dphi(regime: Regime, t: Scalar) -> Scalar:
    if Regime(regime) is Regime.XXX:
        return Fraction(1) if isinstance(t, (Fraction, int)) else 1.0
    if isinstance(t, (Fraction, int)):
        raise FieldError("the xxz regime needs the float field")
    return cmath.cosh(t)


# ---------------------------------------------------------------- linalg

def _check_square(m: np.ndarray) -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m.shape[0]


def _is_exact(m: np.ndarray) -> bool:
    return m.dtype == object


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                # exact division is guaranteed by Sylvester's identity
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1] if n else 1


def det(m: np.ndarray) -> Scalar:
    """Exact determinant for rational input, LU-based for complex input."""
    m = np.asarray(m)
    n = _check_square(m)
    if n == 0:
        return Fraction(1) if _is_exact(m) else 1.0 + 0j
    if not _is_exact(m):
        return complex(np.linalg.det(m.astype(complex)))
    rows, scale = [], Fraction(1)
    for r in m:
        r = [Fraction(x) for x in r]
        den = reduce(math.lcm, (x.denominator for x in r), 1)
        rows.append([int(x * den) for x in r])
        scale *= den
    return Fraction(bareiss_det(rows)) / scale


def solve(m: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Return ``x`` with ``m @ x == rhs`` (exactly, for rational input)."""
    m = np.asarray(m)
    rhs = np.asarray(rhs)
    n = _check_square(m)
    vector = rhs.ndim == 1
    if vector:
        rhs = rhs.reshape(-1, 1)
    if rhs.shape[0] != n:
        raise ValueError("right-hand side has the wrong number of rows")
    if not (_is_exact(m) and _is_exact(rhs)):
        try:
            x = np.linalg.solve(m.astype(complex), rhs.astype(complex))
        except np.linalg.LinAlgError:
            raise SingularMatrixError(0, n) from None
        return x.ravel() if vector else x
    a = [[Fraction(x) for x in row] + [Fraction(x) for x in b]
         for row, b in zip(m, rhs)]
    width = len(a[0])
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            raise SingularMatrixError(k, n)
        a[k], a[piv] = a[piv], a[k]
        inv = 1 / a[k][k]
        a[k] = [x * inv for x in a[k]]
        for i in range(n):
            if i != k and a[i][k] != 0:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    x = np.empty((n, width - n), dtype=object)
    for i in range(n):
        x[i, :] = a[i][n:]
    return x.ravel() if vector else x


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product that skips structural zeros of ``a`` in exact mode."""
    if not (_is_exact(a) or _is_exact(b)):
        return a @ b
    if a.ndim != 2:
        return a @ b
    out_shape = (a.shape[0],) + b.shape[1:]
    out = np.empty(out_shape, dtype=object)
    out.fill(Fraction(0))
    for i in range(a.shape[0]):
        row = a[i]
        for k in np.flatnonzero(row != 0):
            out[i] = out[i] + row[k] * b[k]
    return out
