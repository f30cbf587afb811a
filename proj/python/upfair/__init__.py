"""Utility-proportional-fair power allocation with sigmoidal utilities."""

from ._upfair import (
    AllocationResult,
    BracketOverflowError,
    ConfigError,
    DecayKind,
    DecayPolicy,
    DegenerateBidsError,
    DegenerateChannelError,
    IterationTrace,
    OracleResult,
    ParseError,
    Regime,
    RunStatus,
    Scenario,
    SingularityError,
    SweepRow,
    UtilityParams,
    best_response,
    classify_regime,
    critical_price,
    decay_value,
    decode,
    detect_fluctuation,
    encode_bid,
    encode_price,
    encode_stop,
    inflection_power,
    load_scenario,
    log_utility,
    oracle_allocate,
    parse_scenario,
    reference_users,
    run,
    slope,
    slope_derivative,
    steady_price_bound,
    sweep,
    sweep_defaults,
    utility_value,
)

__all__ = [name for name in dir() if not name.startswith("_")]
