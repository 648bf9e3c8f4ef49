"""Mode-by-mode Bogoliubov dynamics of the Dirac field on a closed FRW background.

Per-mode propagators, Bogoliubov matrices, families of invariant complex
structures, summability verdicts for the unitary-implementability and
unitary-equivalence criteria, and the time-averaging lower bound that closes
the uniqueness argument.
"""

from .background import (BackgroundModel, constant_background, log_scale_factor,
                         log_scale_factor_derivative, power_law_background,
                         tabulated_background)
from .bogoliubov import (BogoliubovMatrix, alpha_difference, bogoliubov_matrix,
                         bogoliubov_table, leading_asymptote_residual,
                         transformed_dynamics)
from .complex_structure import (MixingMatrix, ReferenceMap, StructureFamily,
                                check_convention, generate, reference_map)
from .mode_dynamics import (ModePropagator, ModeState, constant_propagator,
                            evolve_state, generator, propagate, propagate_batch)
from .spectrum import (ModeIndex, SpectralCoefficients, coupling_matrices,
                       degeneracy, omega, spectral_coefficients)
from .summability import (SummabilityReport, Thresholds, WeightedSequence, analyze,
                          dynamics_unitarity, equivalence, mixed_conditions,
                          sine_weighted_conditions, uniqueness_verdict)
from .averaging_bound import (BoundParameters, PhaseProfile, bounded_sum_conclusion,
                              constant_profile, lower_bound, polynomial_profile,
                              sin2_integral, sinusoid_profile, verify_bound_chain)

__version__ = "0.1.0"
