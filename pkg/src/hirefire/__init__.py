"""Continuous-time hire/fire signaling game with learning from revenue.

A worker of unknown productivity claims a salary; the employer learns the type
from a noisy revenue stream and fires once the posterior falls to a threshold.
The package computes the equilibrium in closed form, simulates the belief
process, checks the equilibrium by Monte Carlo and solves the underlying
stopping problems on a grid.
"""
from .equilibrium import (Equilibrium, FiringCostParams, InterviewEquilibrium, InterviewParams,
                          Regime, Stop, TypeUncertaintyParams, assemble_pbe, employee_value_weak,
                          employer_value, employer_value_firing, firing_cost_pbe,
                          firing_cost_threshold, indifference_point, interview_indifference,
                          interview_pbe, stopping_threshold, type_uncertainty_pbe,
                          weak_type_mixing)
from .exceptions import (AssumptionViolation, ConfigViolation, DomainViolation,
                         MissingObservations, NoConvergence, OrderingViolation, RegimeMismatch,
                         SingularSystem, ValidationError)
from .filtering import Measure, PathSample, Scheme, SimConfig
from .model import DerivedQuantities, GameParams, derived_quantities, validate_params

__version__ = "0.1.0"
