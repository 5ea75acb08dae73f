"""Quantum Go: rules engine, records, variants and a session server."""

from .board import (
    BoardState,
    Color,
    Coord,
    Occupant,
    Pair,
    diagonal_neighbors,
    group_of,
    liberties,
    neighbors,
    resolve_captures,
)
from .errors import (
    IllegalMoveError,
    InvalidCoordinateError,
    NotFinalizedError,
    ParseError,
    ProtocolViolationError,
    QuantumGoError,
    ReplayDivergenceError,
    UnsupportedVariantError,
)
from .qstate import Marginal, QStateExpression, marginal, state_expression
from .record import (
    GameRecord,
    MoveRecordEntry,
    PairBody,
    PassBody,
    ResignBody,
    SingleBody,
    parse_record,
    render_ascii,
    replay,
    replay_steps,
    result_of,
    serialize_record,
)
from .rules import (
    ChoiceRequest,
    CollapseEvent,
    FirstChoices,
    FixedChoices,
    GameState,
    Move,
    Pass,
    PlacePair,
    PlaceSingle,
    RandomChoices,
    Resign,
    Ruleset,
    apply_move,
    legal_moves,
    position_hash,
    resolution_exists,
)
from .scoring import ScoreResult, finalize_pairs, resignation_string, score
from .selfplay import (
    ExperimentConfig,
    ExperimentSummary,
    GameStats,
    play_game,
    run_experiment,
    summary_csv,
)
from .variants import point_symmetric, trigger_neighborhood

__version__ = "0.1.0"

__all__ = [
    "BoardState", "Color", "Coord", "Occupant", "Pair",
    "neighbors", "diagonal_neighbors", "group_of", "liberties", "resolve_captures",
    "GameState", "Move", "PlacePair", "PlaceSingle", "Pass", "Resign", "Ruleset",
    "apply_move", "legal_moves", "position_hash", "resolution_exists",
    "ChoiceRequest", "CollapseEvent",
    "FirstChoices", "RandomChoices", "FixedChoices",
    "ScoreResult", "finalize_pairs", "resignation_string", "score",
    "GameRecord", "MoveRecordEntry", "PairBody", "SingleBody", "PassBody",
    "ResignBody", "parse_record", "serialize_record", "replay", "replay_steps",
    "result_of", "render_ascii",
    "QStateExpression", "Marginal", "state_expression", "marginal",
    "point_symmetric", "trigger_neighborhood",
    "ExperimentConfig", "ExperimentSummary", "GameStats",
    "play_game", "run_experiment", "summary_csv",
    "QuantumGoError", "InvalidCoordinateError", "IllegalMoveError",
    "ProtocolViolationError", "NotFinalizedError", "ParseError",
    "ReplayDivergenceError", "UnsupportedVariantError",
]
