"""Gaussian wavepacket dynamics with state-dependent quadratic effective
potentials and high-order geometric split-step integrators."""

from .core import (GaussianHagedorn, GaussianHeller, PhysicalSetup,
                   TangentVector, density, evaluate_wavefunction,
                   evaluate_wavefunction_hagedorn, hagedorn_to_heller,
                   heller_to_hagedorn, normalize_initial, position_covariance,
                   wavefunction_gradient)
from .diagnostics import (DiagnosticsRecord, covariances, effective_energy,
                          energy, energy_rate, gaussian_overlap, norm,
                          symplectic_defect, symplectic_form)
from .errors import (BranchCrossingError, ConfigError, GwpdError,
                     InvalidStateError, MethodConstraintError, NumericalError)
from .integrators import (SchemeSpec, Trajectory, composition_weights,
                          kinetic_step_hagedorn, kinetic_step_heller,
                          potential_step_hagedorn, potential_step_heller,
                          propagate, reverse_roundtrip, step)
from .methods import (METHOD_IDS, EffectiveCoefficients, Method, MethodSpec,
                      bind, coefficients)
from .potentials import (ExpectationEngine, HarmonicPotential, MorsePotential,
                         PolynomialPotential, PotentialModel,
                         QuarticDoubleWellPotential, TabulatedPotential,
                         build_potential, evaluate, finite_difference_tensor,
                         gaussian_expectation)
from .reference import (GridSpec, fidelity_series, grid_propagate,
                        quadratic_exact_state, sample_gaussian_on_grid)

__version__ = "0.1.0"
