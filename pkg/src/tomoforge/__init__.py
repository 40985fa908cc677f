"""Quantum state reconstruction from rotated commuting measurements, lift
ambiguity of diagonal data, system-apparatus recovery and entropic checks."""

__version__ = "0.1.0"

from .ambiguity import DiagonalState, delta_rho, restrict_diagonal, sample_lift
from .circle import (CouplingProfile, Trajectory, b_expectation, particular_solution,
                     recover_momentum, solve_modes)
from .coupled import (CoupledConfig, DesignMatrix, apparatus_read, build_design, evolve, observe,
                      random_configs, recover_system)
from .entropy import GridFunction, entropy_sum_rn, hy_check_rn, hy_constant, u1_check
from .errors import TomoforgeError
from .operators import DensityMatrix, random_density, trace_norm, validate_density
from .reconstruct import (MeasurementRecord, StateOracle, finite_reconstruct, mc_reconstruct,
                          measure, projector_protocol)
from .spin import (GroupFourierData, TensorOperatorSet, group_entropy_check, spin_reconstruct,
                   spin_tomogram, su2_quadrature, tensor_ops, wigner_d)
from .stochastic import (StochasticMatrix, birkhoff_decompose, entropy_monotone, from_unitary,
                         pushforward_check, reassemble, shannon)
from .su_basis import HermitianBasis, adjoint_rep, build_basis, haar_sample, orbit_point, root_rotation
