"""Degree distributions of networks whose vertices gain and lose edges over time.

A vertex of degree ``k`` gains an edge at rate ``lambda(k)`` (``k`` or
``ln(1 + k)``) and loses one at rate ``k * mu``. The package gives the
stationary degree law of that chain, simulates the chain and the whole
network, compares distributions and fits ``mu`` to observed graphs.
"""
__version__ = "0.1.0"

from .degree_law import (  # noqa: E402
    RatePolicy,
    StationaryPmf,
    ThresholdReport,
    adjacent_crossing_mu,
    crossing_by_root_finding,
    expected_degree,
    rate,
    series_S_log,
    stationarity_holds,
    stationary_pmf,
)
from .empirical import EmpiricalPmf, Weighting  # noqa: E402
from .chain_sim import DegreeTrajectory, holding_times, occupancy_pmf, simulate_chain  # noqa: E402
from .distmetrics import align, js, js_midpoint, kl, pearson  # noqa: E402
from .network_sim import ArrivalMode, EvolutionResult, SimConfig, evolve, init_network  # noqa: E402
from .fitter import FitReport, Objective, evaluate_fit, fit_mu  # noqa: E402
from .graph_io import degree_histogram, read_edge_list, read_pmf, read_result, write_result  # noqa: E402
from . import exceptions  # noqa: E402

__all__ = [
    "RatePolicy", "StationaryPmf", "ThresholdReport", "adjacent_crossing_mu",
    "crossing_by_root_finding", "expected_degree", "rate", "series_S_log",
    "stationarity_holds", "stationary_pmf", "EmpiricalPmf", "Weighting",
    "DegreeTrajectory", "holding_times", "occupancy_pmf", "simulate_chain",
    "align", "js", "js_midpoint", "kl", "pearson", "ArrivalMode", "EvolutionResult",
    "SimConfig", "evolve", "init_network", "FitReport", "Objective", "evaluate_fit",
    "fit_mu", "degree_histogram", "read_edge_list", "read_pmf", "read_result",
    "write_result", "exceptions",
]
