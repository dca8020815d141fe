"""Smooth Q-learning and replicator dynamics on finite games.

Batched RK4 integration of Q-learning, replicator, and entropic-FTRL
flows (compiled kernels with a pure-numpy fallback), logit QRE solving,
monotonicity certificates, and welfare/regret measurement.
"""

from ._kernels import backend_name
from .analysis import (MonotonicityReport, WelfareReport, bregman_divergence,
                       fenchel_coupling, monotonicity_exact_polymatrix,
                       monotonicity_report_json, monotonicity_sampled,
                       perturbed_monotonicity_margin, regret, running_tsw,
                       time_average, tsw, weighted_kl, welfare_csv,
                       welfare_normalizer, welfare_report,
                       welfare_report_json)
from .dynamics import (FTRLField, IntegrationError, IntegratorConfig, QLField,
                       Regularizer, ReplicatorField, Trajectory,
                       entropic_choice_map, entropic_regularizer, ftrl_field,
                       integrate, ql_field, replicator_field,
                       trajectory_summary, trajectory_to_csv)
from .equilibrium import (QreSolution, equilibrium_gap, qre_residual,
                          qre_solve, solution_to_json, solve_batch)
from .game_core import (NormalFormGame, PerturbedGameView, PolymatrixGame,
                        StrategyProfile, TemperatureVector, WeightVector,
                        game_from_json, game_to_json, influence_bound, payoff,
                        perturbed_reward, pseudo_gradient, reward_vector,
                        rewards_matrix, social_welfare)
from .zoo import (RandomGameSpec, SplitMix64, WeightedPotentialGame,
                  mismatching_pennies, random_normal_form, seeded_profiles,
                  shapley_network, weighted_potential_quadratic,
                  weighted_zero_sum_cycle)

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "MonotonicityReport", "WelfareReport", "bregman_divergence",
    "fenchel_coupling", "monotonicity_exact_polymatrix",
    "monotonicity_report_json", "monotonicity_sampled",
    "perturbed_monotonicity_margin", "regret", "running_tsw", "time_average",
    "tsw", "weighted_kl", "welfare_csv", "welfare_normalizer",
    "welfare_report", "welfare_report_json",
    "FTRLField", "IntegrationError", "IntegratorConfig", "QLField",
    "Regularizer", "ReplicatorField", "Trajectory", "entropic_choice_map",
    "entropic_regularizer", "ftrl_field", "integrate", "ql_field",
    "replicator_field", "trajectory_summary", "trajectory_to_csv",
    "QreSolution", "equilibrium_gap", "qre_residual", "qre_solve",
    "solution_to_json", "solve_batch",
    "NormalFormGame", "PerturbedGameView", "PolymatrixGame",
    "StrategyProfile", "TemperatureVector", "WeightVector", "game_from_json",
    "game_to_json", "influence_bound", "payoff", "perturbed_reward",
    "pseudo_gradient", "reward_vector", "rewards_matrix", "social_welfare",
    "RandomGameSpec", "SplitMix64", "WeightedPotentialGame",
    "mismatching_pennies", "random_normal_form", "seeded_profiles",
    "shapley_network", "weighted_potential_quadratic",
    "weighted_zero_sum_cycle",
    "__version__",
]
