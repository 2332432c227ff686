"""hanabench: a two-player Hanabi teaming workbench.

Seeded engine, knowledge/labeling layer, rule-bot pool, cross-play tournament
harness, behavioral metrics, regression analysis, and a human-play HTTP
service. See README.md for the tour.
"""

from .cards import Card, Move, MoveKind, action_id, move_from_action_id
from .engine import (
    EngineConfig,
    GameState,
    IllegalMoveError,
    Observation,
    TerminalStatus,
    new_game,
    observe,
)
from .knowledge import DominanceLabel, HandKnowledge, apply_card_counting, label_move
from .agents import ALGORITHMS, DEFAULT_POOL, AgentSpec, make_agent
from .harness import (
    GameTrace,
    TournamentConfig,
    read_traces,
    replay_trace,
    run_game,
    run_pairing,
    run_tournament,
    write_traces,
)
from .metrics import MetricReport, build_report, mutual_information, shannon_entropy
from .stats import analyze_cohorts, linear_regression, parabolic_fit, teamwork_rating

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "DEFAULT_POOL",
    "AgentSpec",
    "make_agent",
    "GameTrace",
    "TournamentConfig",
    "read_traces",
    "replay_trace",
    "run_game",
    "run_pairing",
    "run_tournament",
    "write_traces",
    "MetricReport",
    "build_report",
    "mutual_information",
    "shannon_entropy",
    "analyze_cohorts",
    "linear_regression",
    "parabolic_fit",
    "teamwork_rating",
    "Card",
    "Move",
    "MoveKind",
    "action_id",
    "move_from_action_id",
    "EngineConfig",
    "GameState",
    "IllegalMoveError",
    "Observation",
    "TerminalStatus",
    "new_game",
    "observe",
    "DominanceLabel",
    "HandKnowledge",
    "apply_card_counting",
    "label_move",
    "__version__",
]
