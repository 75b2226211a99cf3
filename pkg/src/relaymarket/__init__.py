"""Negotiated spectrum-for-relaying market simulator.

Licensed transmitter-receiver pairs lease part of their frame to relays
in exchange for cooperative forwarding and a cash transfer; the engine
negotiates who pairs with whom and at what price and time split through
repeated offers and single-notch concessions. The package also ships
centralized and random baselines, checkers for the mechanism's claimed
guarantees (stability, dominance, Pareto optimality, bounded signaling),
and a seeded Monte Carlo harness with CSV output.
"""

from .baselines import (PairValue, centralized_pu_optimal, centralized_su_rate,
                        pair_optimum_continuous, pair_optimum_discrete, rmbn)
from .bench import (AggregateMetrics, SweepRow, TrialMetrics, emit_csv, p90,
                    read_csv, run_trials, scenario_id, sweep)
from .dda import (EngineTrace, Grids, MatchingOutcome, Offer, concession_grids,
                  init_state, run, step)
from .errors import GuardError
from .prefs import build_pulist, build_sulist, su_prefers
from .radio import (LinkSnrs, PairRates, PairThresholds, Requirements,
                    af_relay_snr, compute_snrs, direct_rate, expected_rate_pu,
                    make_pair_rates, pair_thresholds, rate_pu, rate_su,
                    requirements_for, utility_pu, utility_su)
from .topology import (DEFAULTS, ChannelRealization, Placement, ScenarioParams,
                       draw_channels, load_params, make_realization,
                       params_from_dict, place_users)
from .verify import (StabilityReport, check_weak_pareto, complexity_estimates,
                     enumerate_stable_matchings, is_stable, iteration_bound,
                     packet_bound, per_pu_puu_bounds, pu_utilities)

__version__ = "0.1.0"

__all__ = [
    "AggregateMetrics", "ChannelRealization", "DEFAULTS", "EngineTrace",
    "Grids", "GuardError", "LinkSnrs", "MatchingOutcome", "Offer",
    "PairRates", "PairThresholds", "PairValue", "Placement", "Requirements",
    "ScenarioParams", "StabilityReport", "SweepRow", "TrialMetrics",
    "af_relay_snr", "build_pulist", "build_sulist", "centralized_pu_optimal",
    "centralized_su_rate", "check_weak_pareto", "complexity_estimates",
    "compute_snrs", "concession_grids", "direct_rate", "draw_channels",
    "emit_csv", "enumerate_stable_matchings", "expected_rate_pu",
    "init_state", "is_stable", "iteration_bound", "load_params",
    "make_pair_rates", "make_realization", "p90", "packet_bound",
    "pair_optimum_continuous", "pair_optimum_discrete", "pair_thresholds",
    "params_from_dict", "per_pu_puu_bounds", "place_users", "pu_utilities",
    "rate_pu", "rate_su", "read_csv", "requirements_for", "rmbn", "run",
    "run_trials", "scenario_id", "step", "su_prefers", "sweep", "utility_pu",
    "utility_su",
]
