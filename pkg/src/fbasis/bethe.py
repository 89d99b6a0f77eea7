"""Bethe root finding and certification for small magnon numbers."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .chain import ChainSpec, PoleError, bae_residual, bethe_state
from .field import to_json

CERTIFY_TOL = 1e-10
COLLAPSE_SEP = 1e-8
NULL_TOL = 1e-10
MAX_DENOMINATOR = 10**6


class ConvergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class BetheRoots:
    roots: tuple
    residuals: tuple
    certified: bool
    field: str

    def to_json(self) -> dict:
        return {"roots": [to_json(r) for r in self.roots],
                "residuals": [to_json(r) for r in self.residuals],
                "certified": self.certified, "field": self.field}


def _all_rational(values) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


def certify(spec: ChainSpec, roots: Sequence) -> BetheRoots:
    """Recompute residuals in the strongest field the inputs allow."""
    roots = tuple(roots)
    work = spec if spec.field.exact and _all_rational(roots) \
        else spec.to_float()
    params = work.params(roots)
    res = bae_residual(work, params)
    if work.field.exact:
        ok = all(r == 0 for r in res)
    else:
        ok = all(abs(r) < CERTIFY_TOL for r in res)
    return BetheRoots(params, tuple(res), ok, work.field.name)


# ------------------------------------------------------------ Newton

def cleared_residual(spec: ChainSpec, t: np.ndarray) -> np.ndarray:
    """Pole-free form of a(t_i) = f(t_i).

    ``prod phi(xi - t_i) prod_{b != i} phi(t_b - t_i + eta)
    - (-1)^{M-1} prod phi(xi - t_i + eta) prod_{b != i} phi(t_i - t_b + eta)``
    """
    ph = spec.phi
    eta = complex(spec.eta)
    xi = [complex(x) for x in spec.xi]
    m = len(t)
    sign = -1 if m % 2 == 0 else 1
    out = np.empty(m, dtype=complex)
    for i in range(m):
        left = np.prod([ph(x - t[i]) for x in xi])
        right = np.prod([ph(x - t[i] + eta) for x in xi])
        for b in range(m):
            if b != i:
                left *= ph(t[b] - t[i] + eta)
                right *= ph(t[i] - t[b] + eta)
        out[i] = left - sign * right
    return out


def _jacobian(spec, t, f0, h=1e-7):
    m = len(t)
    jac = np.empty((m, m), dtype=complex)
    for k in range(m):
        tk = t.copy()
        tk[k] += h
        jac[:, k] = (cleared_residual(spec, tk) - f0) / h
    return jac


def newton(spec: ChainSpec, seed: Sequence, max_iter: int = 200,
           tol: float = 1e-13) -> np.ndarray:
    """Damped Newton from one seed; the step halves while |F| grows."""
    t = np.array([complex(s) for s in seed], dtype=complex)
    f = cleared_residual(spec, t)
    norm = np.linalg.norm(f)
    for _ in range(max_iter):
        if norm < tol:
            return t
        try:
            step = np.linalg.solve(_jacobian(spec, t, f), -f)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        while lam > 1e-6:
            trial = t + lam * step
            f_trial = cleared_residual(spec, trial)
            if np.linalg.norm(f_trial) < norm:
                break
            lam /= 2
        t, f = trial, f_trial
        new_norm = np.linalg.norm(f)
        if np.linalg.norm(lam * step) < 1e-15 * max(1.0, np.abs(t).max()):
            norm = new_norm
            break
        norm = new_norm
    if norm < 1e-9:
        return t
    raise ConvergenceError(f"no convergence from seed {list(seed)}")


def _promote(spec: ChainSpec, t: np.ndarray):
    """Exact rational roots if rounding gives an exact solution."""
    if not spec.field.exact:
        return None
    if np.abs(t.imag).max() > 1e-9:
        return None
    cand = tuple(Fraction(float(x.real)).limit_denominator(MAX_DENOMINATOR)
                 for x in t)
    try:
        rep = certify(spec, cand)
    except (PoleError, ValueError):
        return None
    return rep if rep.certified else None


def default_seeds(spec: ChainSpec, m: int) -> list:
    """M-subsets of ``xi + eta/2``, tilted copies, then two-strings.

    The tilted copies (alternating ``+-i eta/4``) and the seeds carrying a
    pair ``c +- i eta/2`` centred between two sites reach complex pairs
    that the real seeds miss.
    """
    base = [complex(x + spec.eta / 2) for x in spec.xi]
    real = [tuple(c) for c in itertools.combinations(base, m)]
    tilt = [complex(spec.eta) * 0.25j * (-1) ** k for k in range(m)]
    out = real + [tuple(x + d for x, d in zip(c, tilt)) for c in real]
    if m >= 2:
        half = complex(spec.eta) * 0.5j
        for i, j in itertools.combinations(range(spec.n), 2):
            c = (base[i] + base[j]) / 2
            others = [b for k, b in enumerate(base) if k not in (i, j)]
            for rest in itertools.combinations(others, m - 2):
                out.append((c + half, c - half, *rest))
    return out


def is_null(spec: ChainSpec, roots: Sequence) -> bool:
    """Whether the Bethe vector of ``roots`` vanishes (a spurious solution)."""
    work = spec if spec.field.exact and _all_rational(roots) \
        else spec.to_float()
    psi = bethe_state(work, work.params(roots))
    if work.field.exact:
        return not np.any(psi != 0)
    return float(np.abs(psi).max()) < NULL_TOL


def _same_set(a, b) -> bool:
    return all(abs(complex(x) - complex(y)) < 1e-7 * max(1, abs(complex(x)))
               for x, y in zip(sorted(a, key=_key), sorted(b, key=_key)))


def _key(z):
    z = complex(z)
    return (round(z.real, 6), round(z.imag, 6))


def solve_bae(spec: ChainSpec, m: int, seeds: Iterable[Sequence] | None
              = None, max_iter: int = 200) -> list:
    """Certified root sets reached from the seeds, up to permutation.

    Seeds that fail to converge, collapse, land on spurious zeros of the
    cleared form or give a vanishing Bethe vector are dropped; an error is
    raised only when none survive.
    """
    if not 0 <= m <= spec.n:
        raise ValueError(f"magnon number {m} outside 0..{spec.n}")
    if m == 0:
        return [certify(spec, ())]
    seeds = default_seeds(spec, m) if seeds is None else [
        tuple(s) for s in seeds]
    for s in seeds:
        if len(s) != m:
            raise ValueError(f"seed {s} has {len(s)} entries, expected {m}")
        if len({_key(x) for x in s}) != m:
            raise ValueError(f"seed {s} has coinciding values")
    found: list[BetheRoots] = []
    failures = []
    for s in seeds:
        try:
            t = newton(spec, s, max_iter)
        except ConvergenceError as exc:
            failures.append(str(exc))
            continue
        if any(abs(a - b) < COLLAPSE_SEP
               for a, b in itertools.combinations(t, 2)):
            failures.append(f"roots collapsed from seed {list(s)}")
            continue
        rep = _promote(spec, t)
        if rep is None:
            try:
                rep = certify(spec, tuple(t))
            except (PoleError, ValueError) as exc:
                failures.append(str(exc))
                continue
        if not rep.certified:
            failures.append(f"uncertified root set from seed {list(s)}")
            continue
        if is_null(spec, rep.roots):
            failures.append(f"null Bethe vector from seed {list(s)}")
            continue
        if not any(_same_set(rep.roots, r.roots) for r in found):
            found.append(rep)
    if not found:
        raise ConvergenceError("; ".join(failures) or "no seeds given")
    return found
