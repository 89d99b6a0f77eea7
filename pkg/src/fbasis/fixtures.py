"""Deterministic random chain fixtures and the run configuration."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .chain import (ChainError, ChainSpec, PoleError, bae_residual,
                    c_weight)
from .field import DEFAULT_TOL, Regime

COMMANDS = ("validate", "verify-factorization", "phi", "sp", "norm",
            "solve-bae", "identities", "all")
METHODS = ("direct", "subset-sum", "fbasis", "slavnov", "jacobian", "all")


@dataclass(frozen=True)
class RunConfig:
    chain: Optional[ChainSpec]
    command: str
    method: str = "all"
    out: Optional[str] = None
    tol: float = DEFAULT_TOL
    seed: int = 0
    m: Optional[int] = None
    t: tuple = ()
    lam: tuple = ()
    seeds: tuple = ()
    count: int = 100

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one "
                             f"of {', '.join(METHODS)}")


@dataclass(frozen=True)
class Bounds:
    """Integer ranges (inclusive) for fixture numerators and denominators."""

    n: tuple = (2, 6)
    numerator: tuple = (-20, 20)
    denominator: tuple = (1, 6)
    eta: Fraction = Fraction(1)
    max_attempts: int = 1000

    def __post_init__(self):
        lo, hi = self.denominator
        if lo < 1 or hi < lo:
            raise ValueError("denominator range must be positive")
        if self.numerator[1] < self.numerator[0]:
            raise ValueError("empty numerator range")
        if self.n[0] < 1 or self.n[1] < self.n[0]:
            raise ValueError("bad chain length range")


def random_chain(rng: random.Random, n: int, bounds: Bounds,
                 regime: Regime = Regime.XXX) -> ChainSpec:
    for _ in range(bounds.max_attempts):
        xi = tuple(Fraction(rng.randint(*bounds.numerator),
                            rng.randint(*bounds.denominator))
                   for _ in range(n))
        try:
            return ChainSpec(regime, bounds.eta, xi)
        except ChainError:
            continue
    raise ChainError(f"no valid N={n} chain within the bounds after "
                     f"{bounds.max_attempts} attempts")


def fixture_gen(seed: int, count: int, bounds: Bounds = Bounds(),
                command: str = "all") -> list:
    """``count`` reproducible run configurations on random valid chains."""
    rng = random.Random(seed)
    out = []
    for k in range(count):
        n = rng.randint(*bounds.n)
        out.append(RunConfig(random_chain(rng, n, bounds), command,
                             seed=seed * 100003 + k))
    return out


def _rational_sqrt(q: Fraction):
    if q < 0:
        return None
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def _closing_sites(eta, roots, rest):
    """Last one or two inhomogeneities that put ``roots`` on shell.

    Every Bethe equation reads prod_alpha c(xi_alpha - t_i) = K_i, so each
    unknown xi enters through (u - t)/(u - t + eta).  One unknown gives a
    linear equation.  Two unknowns give equations linear in their sum and
    product, and the pair is rational iff the discriminant is a square.
    """
    def c(x):
        return c_weight(Regime.XXX, eta, x)

    ks = []
    for i, t in enumerate(roots):
        k = Fraction(1)
        for j, s in enumerate(roots):
            if j != i:
                k *= c(s - t) / c(t - s)
        for x in rest:
            k /= c(x - t)
        ks.append(k)
    if len(roots) == 1:
        (t,), (k,) = roots, ks
        return (t + k * eta / (1 - k),)
    rows = [(1 - k, -t - k * (eta - t), t * t - k * (eta - t) ** 2)
            for t, k in zip(roots, ks)]
    (a1, b1, g1), (a2, b2, g2) = rows
    den = a1 * b2 - a2 * b1
    if den == 0:
        return None
    p = (b1 * g2 - b2 * g1) / den
    s = (a2 * g1 - a1 * g2) / den
    r = _rational_sqrt(s * s - 4 * p)
    if not r:
        return None
    return ((s + r) / 2, (s - r) / 2)


# small denominators keep the discriminant a square often enough
ON_SHELL_BOUNDS = Bounds(numerator=(-12, 12), denominator=(1, 3))


def rational_on_shell(rng: random.Random, n: int, m: int,
                      bounds: Bounds = ON_SHELL_BOUNDS):
    """A rational XXX chain of length ``n`` with exact Bethe roots, M = 1, 2.

    The roots and the first n - m inhomogeneities are drawn at random; the
    remaining m sites are solved for.  Returns ``(spec, roots)``.
    """
    if m not in (1, 2) or n < 2 * m:
        # beyond half filling the finite XXX roots do not exist
        raise ValueError("rational on-shell fixtures need M in (1, 2), "
                         "N >= 2M")

    def draw():
        return Fraction(rng.randint(*bounds.numerator),
                        rng.randint(*bounds.denominator))

    eta = bounds.eta
    for _ in range(20 * bounds.max_attempts):
        roots = tuple(draw() for _ in range(m))
        rest = [draw() for _ in range(n - m)]
        try:
            tail = _closing_sites(eta, roots, rest)
            if tail is None:
                continue
            spec = ChainSpec(Regime.XXX, eta, tuple(rest) + tail)
            if all(r == 0 for r in bae_residual(spec, roots)):
                return spec, roots
        except (ZeroDivisionError, ChainError, PoleError, ValueError):
            continue
    raise ChainError(f"no rational on-shell fixture for N={n}, M={m}")
