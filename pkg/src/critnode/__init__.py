"""Critical-node detection in interdependent networks.

Cascade simulation, exhaustive ground truth, a SAT search for the
longest cascade, an ILP for the optimal attack, two heuristics and an
instance generator.
"""
__version__ = "0.1.0"

from .errors import (
    BackendError,
    BudgetExceededError,
    ConstraintViolation,
    CritnodeError,
    InvalidInputError,
)
from .graph import InterdependentSystem, UndirectedGraph, articulation_nodes, connected_components
from .cascade import CascadeTrace, last_failure_stage, severity, simulate
from .oracle import OracleResult, oracle_solve
from .cnf import CnfFormula, build_m, emit_dimacs, parse_dimacs
from .sat import Phase1Result, compute_lmax, sat_backend
from .ilp import IlpModel, Phase2Result, build_ilp, emit_lp, ilp_backend, solve_ilp
from .heuristics import HeuristicResult, greedy_select, maxcas_select
from .generate import GenConfig, generate_instance, generate_layer, match_layers
from .bench import PipelineReport, run_bench, run_pipeline

__all__ = [
    "BackendError", "BudgetExceededError", "ConstraintViolation", "CritnodeError", "InvalidInputError",
    "InterdependentSystem", "UndirectedGraph", "articulation_nodes", "connected_components",
    "CascadeTrace", "last_failure_stage", "severity", "simulate",
    "OracleResult", "oracle_solve",
    "CnfFormula", "build_m", "emit_dimacs", "parse_dimacs",
    "Phase1Result", "compute_lmax", "sat_backend",
    "IlpModel", "Phase2Result", "build_ilp", "emit_lp", "ilp_backend", "solve_ilp",
    "HeuristicResult", "greedy_select", "maxcas_select",
    "GenConfig", "generate_instance", "generate_layer", "match_layers",
    "PipelineReport", "run_bench", "run_pipeline",
]
