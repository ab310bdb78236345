"""Numerical toolkit for social assurance contracts: participation equilibria,
threshold-design objectives, observer belief updating, mechanism comparison,
and a finite-population benchmark with exact pivotality."""

from .core import (ModelParams, SafetySpec, Threshold, TypeDistribution,
                   binom_pmf, binom_tail, eta, safety_g, trunc_mean_share)
from .design import (DesignCurve, OppositionSpec, SeedModel, durability_floor,
                     excess_share, optimize_threshold, psi_conditional,
                     psi_durable, psi_ex_ante, sigma_coordination)
from .equilibrium import (FixedPointSet, SuccessProbs, contraction_diagnostic,
                          enumerate_fixed_points, participation_map,
                          participatory_share, solve_fixed_point, solve_q_high,
                          success_probs, type_cutoff, type_cutoff_with_trust,
                          type_shares)
from .finite_n import (CutoffProfile, FiniteNParams, FiniteNSolver,
                       ReducedFormParams, SignalGrid, comparative_statics,
                       finite_n_curves, isotonic_project, pivotal_approx_check,
                       psi_finite_n, reduced_form_curve, scalar_cutoff)
from .overton import (BetaPrior, OvertonGapSpec, likelihood_success,
                      overton_curve, overton_entry, posterior_shift_failure,
                      posterior_shift_success, psi_overton)
from .compare import (CompareParams, assurance_interval, cascade_min_base,
                      cascade_min_base_general, classify_region,
                      risk_dominance_thresholds)

__version__ = "0.1.0"
