"""Quadrature-measurement chain simulator (Python bindings)."""

from ._core import (
    Distribution,
    Grid,
    QndError,
    WaveFunction,
    cat,
    conditional_output,
    distribution_fidelity,
    equal_fidelity_point,
    gaussian,
    gaussian_distribution_fidelity,
    gaussian_state_fidelity,
    homodyne_distribution,
    l2_distance,
    numeric_trade_off_curve,
    optimize_closed,
    optimize_numeric,
    outcome_density,
    overlap,
    run_pipeline,
    sample_outcomes,
    state,
    state_fidelity,
    trade_off,
    trade_off_parameter,
    tune_phase,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
