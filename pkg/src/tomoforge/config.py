"""Default tolerances and the fixed conventions used across the package."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-9
    psd: float = 1e-9
    trace: float = 1e-9
    unitary: float = 1e-9
    # off-diagonal Frobenius norm below which a conjugated generator counts
    # as lying in the Cartan span
    cartan: float = 1e-9
    record_sum: float = 1e-9

    def with_overrides(self, **kw):
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


TOL = Tolerances()

# measure(rho, u) returns diag(u* rho u) == Tr rho (u P_m u*).
TOMOGRAM_CONVENTION = "diag(u^* rho u)"

# Placement of the surviving index in the Haar inversion integral: with the
# standard orthogonality relation  int D_ab D_cd = delta_ac delta_bd / dim,
# only the column beta = 1 survives and the free index is alpha, i.e.
#   int D(u)_{a,1} Tr rho(u P1 u*) du = rho_a / ((N+1) sqrt(2N(N-1))).
# ``reconstruct.calibrate_index_convention`` re-derives this numerically.
INDEX_CONVENTION = "column"

# Tensor operators: Lambda^{j dagger}_m = (-1)^m Lambda^j_{-m}.
TENSOR_ADJOINT_SIGN = "(-1)^m"

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class AmbiguitySettings:
    budget: int = 10000  # objective evaluations
    restarts: int = 32
    gtol: float = 1e-10  # projected-gradient stop of each local ascent
    ftol: float = 1e-15  # relative improvement stop of each local ascent
    maxiter: int = 2000


AMBIGUITY = AmbiguitySettings()

# largest spin accepted by the SU(2) routines (2J + 1 <= 32 for tensor operators)
SPIN_J_MAX = 16

# measured z in [J3, Lambda^j_m] = z m Lambda^j_m (see spin.j3_commutator_constant)
J3_COMMUTATOR_CONSTANT = 1.0
