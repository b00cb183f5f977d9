"""Disentangling driven two-coupled-mode evolution into closed factors,
with brute-force verification on a truncated Fock space."""

from .fock import (FockSpace, TruncationError, annihilator, apply,
                   basis_state, coherent_state, displacement_operator,
                   expectation, interior_mask, make_space, mixing_operator,
                   su2_generator, vacuum_state)
from .scenario import (AllConstantScenario, ConstantDrive,
                       ConstantPhaseScenario, CosineDrive,
                       FresnelNormScenario, GeneralPhaseScenario,
                       IsotropicConstantScenario, LinearPhaseScenario,
                       LogRhoScenario, QuadraticPhaseScenario,
                       RhoConstantScenario, RotatingDrive, TabulatedScenario,
                       alpha_rho, check_phase_condition, eta, eval_coeffs)
from .riccati import (ChartSingularity, ConditionViolated,
                      DisentangledFactors, SeriesDivergence, StepUnderflow,
                      alt_factors, alt_factors_fresnel,
                      alt_factors_quadratic_phase, alt_factors_theta_u_zero,
                      alternative_from_standard, closed_factors,
                      factors_on_grid, fresnel_c,
                      gamma_conjugacy_check, kummer_1f1,
                      solve_riccati_numeric)
from .smatrix import (SMatrix2, smatrix_closed, smatrix_from_factors,
                      smatrix_numeric, smatrix_numeric_grid)
from .evolution import (CoherentAmplitudes, CoherentStateSpec, assemble_U,
                        c_coefficients, coherent_evolution_closed,
                        coherent_spec, habeta_spectrum_check,
                        ladder_eigenvalue_check)
from .oracle import (InsufficientSamples, brute_force_propagator,
                     brute_force_smatrix, compare_operators, ode_residual)

__version__ = "0.1.0"
