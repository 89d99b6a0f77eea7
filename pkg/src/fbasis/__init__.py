"""Exact F-basis constructions and scalar products for inhomogeneous
spin-1/2 XXX/XXZ chains."""

from .bethe import BetheRoots, ConvergenceError, certify, solve_bae
from .chain import ChainError, ChainSpec, PoleError, monodromy
from .factorizing import FactorizingOperator, a_f, b_f, c_f
from .field import EXACT, FLOAT, Field, Regime, det, solve
from .identities import IdentityReport
from .scalar_products import (OffShellError, gaudin_norm, norm_direct,
                              phi_m_det, phi_m_direct, sp_direct, sp_fbasis,
                              sp_slavnov, sp_slavnov_jacobian, sp_subset_sum)

__all__ = [
    "BetheRoots", "ConvergenceError", "certify", "solve_bae",
    "ChainError", "ChainSpec", "PoleError", "monodromy",
    "FactorizingOperator", "a_f", "b_f", "c_f",
    "EXACT", "FLOAT", "Field", "Regime", "det", "solve",
    "IdentityReport",
    "OffShellError", "gaudin_norm", "norm_direct", "phi_m_det",
    "phi_m_direct", "sp_direct", "sp_fbasis", "sp_slavnov",
    "sp_slavnov_jacobian", "sp_subset_sum",
]

__version__ = "0.1.0"
