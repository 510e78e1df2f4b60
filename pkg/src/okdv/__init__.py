"""okdv: a numerical laboratory for the octonion-valued KdV equation.

Core pieces: exact Cayley-Dickson arithmetic (algebra), periodic spectral
fields (fields), the KdV/Gardner/Miura flows and their integrators (flows),
the solution maps and conserved charges (transforms), the Hamiltonian
densities and Poisson structures with their verification (hamiltonian),
symmetry harnesses (symmetry), and a config-driven CLI (cli).
"""

__version__ = "0.1.0"

from .algebra import (
    CDElement,
    associator,
    automorphism_exp,
    cd_conj,
    cd_mul,
    cd_norm,
    commutator,
    derivation,
    derivation_basis_rank,
    find_zero_divisor,
)
from .fields import (
    AlgebraField,
    Grid,
    dealias,
    fadd,
    fcommutator,
    fimag,
    fmul,
    freal,
    fscale,
    integrate,
    spectral_diff,
)
from .flows import BlowUpError, FlowSpec, Trajectory, evolve, gardner_rhs, kdv_rhs, miura_rhs
from .hamiltonian import (
    Density,
    PoissonOperator,
    apply_poisson,
    eval_density,
    euler_lagrange_residual,
    variational_derivative,
    verify_poisson_flow,
)
from .symmetry import SymmetrySpec, equivariance_residual, galileo_boost
from .transforms import (
    GardnerSeries,
    conserved_charges,
    gardner_map,
    gardner_series,
    miura_map,
)

__all__ = [
    "__version__",
    "CDElement",
    "AlgebraField",
    "Grid",
    "FlowSpec",
    "Trajectory",
    "BlowUpError",
    "Density",
    "PoissonOperator",
    "GardnerSeries",
    "SymmetrySpec",
    "associator",
    "automorphism_exp",
    "apply_poisson",
    "cd_conj",
    "cd_mul",
    "cd_norm",
    "commutator",
    "conserved_charges",
    "dealias",
    "derivation",
    "derivation_basis_rank",
    "equivariance_residual",
    "eval_density",
    "euler_lagrange_residual",
    "evolve",
    "fadd",
    "fcommutator",
    "fimag",
    "find_zero_divisor",
    "fmul",
    "freal",
    "fscale",
    "galileo_boost",
    "gardner_map",
    "gardner_rhs",
    "gardner_series",
    "integrate",
    "kdv_rhs",
    "miura_map",
    "miura_rhs",
    "spectral_diff",
    "variational_derivative",
    "verify_poisson_flow",
]
