"""HTTP service for human-bot teaming sessions."""

from .store import (
    GAMES_PER_SESSION,
    GAMES_PER_BLOCK,
    PairBalancer,
    SessionStore,
    validate_event_log,
)
from .service import create_app

__all__ = [
    "GAMES_PER_SESSION",
    "GAMES_PER_BLOCK",
    "PairBalancer",
    "SessionStore",
    "create_app",
    "validate_event_log",
]
