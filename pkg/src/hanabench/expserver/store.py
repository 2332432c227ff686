"""Session state, partner balancing, and the append-only event log.

A participant session is eight games against bot partners drawn from the
configured pool: two blocks of four games, one bot per block. The first game
of each block is a warm-up ("test") game; only games 2-4 of a block are
analysis-eligible. The human sits in seat 0 and always moves first; the
server plays the bot's reply synchronously.

Partner assignment balances two goals greedily: per-bot usage stays within
one game-block of every other bot (the two block partners are always drawn
from the least-used usage levels), and among eligible partners the pair with
the least coverage is chosen, preferring the ordered variant (which bot is
played first) seen less often. With the default eight-bot pool this covers
both orders of all 28 unordered pairs well within 100 sessions.

Every state change appends one JSON line to the event log, which is the
durable record: `validate_event_log` replays every logged game through the
engine and re-checks scores.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..agents import DEFAULT_POOL, AgentSpec
from ..cards import Move, action_id, move_from_action_id
from ..engine import EngineConfig, GameState, new_game, observe
from ..knowledge import DominanceLabel, apply_card_counting, label_move

GAMES_PER_SESSION = 8
GAMES_PER_BLOCK = 4
BLOCKS_PER_SESSION = GAMES_PER_SESSION // GAMES_PER_BLOCK
HUMAN_SEAT = 0
BOT_SEAT = 1

PHASE_PLAYING = "playing"
PHASE_BLOCK_SURVEY = "block_survey"
PHASE_FINAL_SURVEY = "final_survey"
PHASE_DONE = "done"

# Questionnaire items stored per block; B3..B8 are the behavior-rating items
# that sum into the teamwork rating.
BLOCK_SURVEY_ITEMS = ("B1", "B2", "B3", "B4", "B5", "B6", "B7", "B8")
RATING_ITEMS = ("B3", "B4", "B5", "B6", "B7", "B8")


class SessionError(Exception):
    """Client-visible protocol violation (bad phase, illegal move, ...)."""


class UnknownSessionError(SessionError):
    pass


class PairBalancer:
    """Greedy assignment of the two block partners for each new session."""

    def __init__(self, labels: list[str]):
        if len(labels) < 2:
            raise ValueError("balancer needs at least two bots")
        self.labels = list(labels)
        self.usage = {label: 0 for label in labels}
        self.ordered_counts: dict[tuple[str, str], int] = {}

    def _unordered_count(self, a: str, b: str) -> int:
        return self.ordered_counts.get((a, b), 0) + self.ordered_counts.get((b, a), 0)

    def next_pair(self) -> tuple[str, str]:
        levels = sorted(set(self.usage.values()))
        least = [l for l in self.labels if self.usage[l] == levels[0]]
        if len(least) >= 2:
            candidates = [
                (a, b) for i, a in enumerate(least) for b in least[i + 1 :]
            ]
        else:
            second = [l for l in self.labels if self.usage[l] == levels[1]]
            candidates = [(least[0], b) for b in second]
        index = {label: i for i, label in enumerate(self.labels)}

        def pair_rank(pair: tuple[str, str]):
            a, b = pair
            return (self._unordered_count(a, b), index[a], index[b])

        a, b = min(candidates, key=pair_rank)
        if self.ordered_counts.get((b, a), 0) < self.ordered_counts.get((a, b), 0):
            a, b = b, a
        self.usage[a] += 1
        self.usage[b] += 1
        self.ordered_counts[(a, b)] = self.ordered_counts.get((a, b), 0) + 1
        return a, b


@dataclass
class MoveRecord:
    turn: int
    seat: int
    action_id: int
    label: int
    description: str
    card: str | None  # identity played/discarded, public once it leaves the hand
    touched: tuple[int, ...] | None
    drew_card: str | None  # identity drawn; redacted for the human seat in payloads
    flagged: bool = False


@dataclass
class GameRecord:
    game_index: int
    deck_seed: int
    bot_label: str
    test_game: bool
    moves: list[MoveRecord] = field(default_factory=list)
    score: int | None = None
    termination: str | None = None

    @property
    def block(self) -> int:
        return self.game_index // GAMES_PER_BLOCK


@dataclass
class Session:
    session_id: str
    participant: str
    block_bots: tuple[str, str]
    phase: str = PHASE_PLAYING
    games: list[GameRecord] = field(default_factory=list)
    surveys: dict[int, dict] = field(default_factory=dict)
    final_survey: dict | None = None
    state: GameState | None = None
    bot: object | None = None

    @property
    def current_game(self) -> GameRecord:
        return self.games[-1]


def _counted_label(state: GameState, seat: int, move: Move) -> DominanceLabel:
    obs = observe(state, seat)
    know = apply_card_counting(obs.own_knowledge, obs.public_view())
    return label_move(know, move, obs.fireworks)


class SessionStore:
    """All live sessions plus the append-only event log."""

    def __init__(
        self,
        log_path: str | Path,
        pool: tuple[AgentSpec, ...] = DEFAULT_POOL,
        seed: int = 0,
        engine_config: EngineConfig = EngineConfig(),
    ):
        self.log_path = Path(log_path)
        self.pool = {spec.label: spec for spec in pool}
        if len(self.pool) != len(pool):
            raise ValueError("pool labels must be unique")
        self.seed = seed
        self.engine_config = engine_config
        self.balancer = PairBalancer([spec.label for spec in pool])
        self.sessions: dict[str, Session] = {}
        self._counter = 0
        self._lock = threading.RLock()
        self.log_path.parent.mkdir(parents=True, exist_ok=True)
        self._log = open(self.log_path, "a")

    def close(self) -> None:
        self._log.close()

    def _append_event(self, event: dict) -> None:
        event = {"ts": round(time.time(), 3), **event}
        self._log.write(json.dumps(event, sort_keys=True, separators=(",", ":")))
        self._log.write("\n")
        self._log.flush()

    def _deck_seed(self, session_index: int, game_index: int) -> int:
        return (
            self.seed * 1_000_003 + session_index * GAMES_PER_SESSION + game_index
        ) & 0x7FFFFFFF

    # -- session lifecycle ------------------------------------------------

    def create_session(self, participant: str = "") -> Session:
        with self._lock:
            self._counter += 1
            session_id = f"s{self._counter:04d}"
            bots = self.balancer.next_pair()
            session = Session(
                session_id=session_id,
                participant=participant,
                block_bots=bots,
            )
            self.sessions[session_id] = session
            self._append_event(
                {
                    "event": "session_created",
                    "session_id": session_id,
                    "participant": participant,
                    "block_bots": list(bots),
                    "session_index": self._counter,
                }
            )
            self._start_game(session)
            return session

    def get(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise UnknownSessionError(f"unknown session {session_id!r}") from None

    def _start_game(self, session: Session) -> None:
        game_index = len(session.games)
        block = game_index // GAMES_PER_BLOCK
        bot_label = session.block_bots[block]
        session_index = int(session.session_id[1:])
        deck_seed = self._deck_seed(session_index, game_index)
        record = GameRecord(
            game_index=game_index,
            deck_seed=deck_seed,
            bot_label=bot_label,
            test_game=game_index % GAMES_PER_BLOCK == 0,
        )
        session.games.append(record)
        session.state = new_game(deck_seed, self.engine_config)
        session.bot = self.pool[bot_label].build()
        session.bot.reset(deck_seed, BOT_SEAT)
        session.phase = PHASE_PLAYING
        self._append_event(
            {
                "event": "game_started",
                "session_id": session.session_id,
                "game_index": game_index,
                "deck_seed": deck_seed,
                "bot": bot_label,
                "test_game": record.test_game,
            }
        )

    def _record_move(
        self, session: Session, actor: str, move: Move, label: DominanceLabel
    ) -> MoveRecord:
        state = session.state
        state.apply_move(move)
        ev = state.last_event
        record = MoveRecord(
            turn=ev.turn,
            seat=ev.seat,
            action_id=action_id(move),
            label=int(label),
            description=move.describe(),
            card=str(ev.card) if ev.card is not None else None,
            touched=tuple(ev.touched) if ev.touched is not None else None,
            drew_card=str(ev.drew) if ev.drew is not None else None,
        )
        session.current_game.moves.append(record)
        self._append_event(
            {
                "event": "move",
                "session_id": session.session_id,
                "game_index": session.current_game.game_index,
                "actor": actor,
                "turn": record.turn,
                "seat": record.seat,
                "action_id": record.action_id,
                "label": record.label,
            }
        )
        return record

    def _finish_game_if_over(self, session: Session) -> bool:
        state = session.state
        if not state.is_terminal():
            return False
        record = session.current_game
        record.score = state.score()
        record.termination = state.terminal_status().value
        if session.bot is not None:
            session.bot.close()
            session.bot = None
        self._append_event(
            {
                "event": "game_finished",
                "session_id": session.session_id,
                "game_index": record.game_index,
                "score": record.score,
                "termination": record.termination,
            }
        )
        if record.game_index % GAMES_PER_BLOCK == GAMES_PER_BLOCK - 1:
            session.phase = PHASE_BLOCK_SURVEY
        else:
            self._start_game(session)
        return True

    # -- participant actions ------------------------------------------------

    def human_move(self, session_id: str, aid: int) -> list[MoveRecord]:
        """Apply the human's move, then the bot's reply; returns new records."""
        with self._lock:
            session = self.get(session_id)
            if session.phase != PHASE_PLAYING:
                raise SessionError(f"session is in phase {session.phase}, not playing")
            state = session.state
            if state.current_seat != HUMAN_SEAT:
                raise SessionError("not the human's turn")
            try:
                move = move_from_action_id(aid)
            except ValueError as exc:
                raise SessionError(str(exc)) from None
            obs = observe(state)
            if move not in obs.legal:
                raise SessionError(f"illegal move: {move.describe()}")
            new_records = []
            label = _counted_label(state, HUMAN_SEAT, move)
            new_records.append(self._record_move(session, "human", move, label))
            if not self._finish_game_if_over(session):
                bot_obs = observe(state)
                bot_move = session.bot.act(bot_obs)
                if bot_move not in bot_obs.legal:
                    raise SessionError(
                        f"bot produced illegal move {bot_move.describe()}"
                    )
                bot_label_value = _counted_label(state, BOT_SEAT, bot_move)
                new_records.append(
                    self._record_move(session, "bot", bot_move, bot_label_value)
                )
                self._finish_game_if_over(session)
            return new_records

    def flag_questionable(self, session_id: str, game_index: int, turn: int) -> dict:
        """Mark a bot move as questionable; returns the stored annotation."""
        with self._lock:
            session = self.get(session_id)
            if not (0 <= game_index < len(session.games)):
                raise SessionError(f"no game with index {game_index}")
            game = session.games[game_index]
            for record in game.moves:
                if record.turn == turn:
                    if record.seat != BOT_SEAT:
                        raise SessionError("only bot moves can be flagged")
                    record.flagged = True
                    annotation = {
                        "session_id": session_id,
                        "game_index": game_index,
                        "turn": turn,
                        "bot": game.bot_label,
                        "action_id": record.action_id,
                        "label": record.label,
                        "label_name": DominanceLabel(record.label).name,
                    }
                    self._append_event({"event": "questionable_flag", **annotation})
                    return annotation
            raise SessionError(f"no move at turn {turn} in game {game_index}")

    def submit_block_survey(self, session_id: str, block: int, items: dict) -> None:
        with self._lock:
            session = self.get(session_id)
            if session.phase != PHASE_BLOCK_SURVEY:
                raise SessionError(f"session is in phase {session.phase}, not block_survey")
            expected_block = (len(session.games) - 1) // GAMES_PER_BLOCK
            if block != expected_block:
                raise SessionError(f"expected survey for block {expected_block}")
            validated = _validate_survey_items(items)
            session.surveys[block] = validated
            self._append_event(
                {
                    "event": "block_survey",
                    "session_id": session_id,
                    "block": block,
                    "bot": session.block_bots[block],
                    "items": validated,
                }
            )
            if block + 1 < BLOCKS_PER_SESSION:
                self._start_game(session)
            else:
                session.phase = PHASE_FINAL_SURVEY

    def submit_final_survey(self, session_id: str, answers: dict) -> None:
        with self._lock:
            session = self.get(session_id)
            if session.phase != PHASE_FINAL_SURVEY:
                raise SessionError(f"session is in phase {session.phase}, not final_survey")
            session.final_survey = dict(answers)
            session.phase = PHASE_DONE
            self._append_event(
                {
                    "event": "final_survey",
                    "session_id": session_id,
                    "answers": session.final_survey,
                }
            )
            self._append_event({"event": "session_finished", "session_id": session_id})

    # -- export ----------------------------------------------------------------

    def export(self) -> dict:
        with self._lock:
            sessions_out = []
            per_bot: dict[str, dict] = {
                label: {
                    "games": 0,
                    "analysis_games": 0,
                    "bot_moves": 0,
                    "flagged_moves": 0,
                    "flag_label_counts": {lab.name: 0 for lab in DominanceLabel},
                    "ratings": [],
                }
                for label in self.pool
            }
            for session in self.sessions.values():
                games_out = []
                for game in session.games:
                    stats = per_bot[game.bot_label]
                    stats["games"] += 1
                    if not game.test_game:
                        stats["analysis_games"] += 1
                    flagged = []
                    for record in game.moves:
                        if record.seat == BOT_SEAT:
                            stats["bot_moves"] += 1
                            if record.flagged:
                                stats["flagged_moves"] += 1
                                name = DominanceLabel(record.label).name
                                stats["flag_label_counts"][name] += 1
                                flagged.append(
                                    {
                                        "turn": record.turn,
                                        "action_id": record.action_id,
                                        "label": record.label,
                                        "label_name": name,
                                    }
                                )
                    games_out.append(
                        {
                            "game_index": game.game_index,
                            "deck_seed": game.deck_seed,
                            "bot": game.bot_label,
                            "test_game": game.test_game,
                            "score": game.score,
                            "termination": game.termination,
                            "n_moves": len(game.moves),
                            "flagged_moves": flagged,
                        }
                    )
                for block, items in session.surveys.items():
                    rating = sum(items[k] for k in RATING_ITEMS if k in items)
                    per_bot[session.block_bots[block]]["ratings"].append(rating)
                sessions_out.append(
                    {
                        "session_id": session.session_id,
                        "participant": session.participant,
                        "phase": session.phase,
                        "block_bots": list(session.block_bots),
                        "games": games_out,
                        "block_surveys": {str(b): v for b, v in session.surveys.items()},
                        "final_survey": session.final_survey,
                    }
                )
            bots_out = {}
            for label, stats in per_bot.items():
                flagged = stats["flagged_moves"]
                attribution = {
                    name: (count / flagged if flagged else 0.0)
                    for name, count in stats["flag_label_counts"].items()
                }
                ratings = stats["ratings"]
                bots_out[label] = {
                    "games": stats["games"],
                    "analysis_games": stats["analysis_games"],
                    "bot_moves": stats["bot_moves"],
                    "flagged_moves": flagged,
                    "flag_rate": (
                        flagged / stats["bot_moves"] if stats["bot_moves"] else 0.0
                    ),
                    "flag_label_counts": stats["flag_label_counts"],
                    "attribution_pct": {
                        name: 100.0 * frac for name, frac in attribution.items()
                    },
                    "teamwork_ratings": ratings,
                    "teamwork_rating_mean": (
                        sum(ratings) / len(ratings) if ratings else None
                    ),
                }
            return {
                "sessions": sessions_out,
                "bots": bots_out,
                "rating_items": list(RATING_ITEMS),
                "games_per_session": GAMES_PER_SESSION,
                "games_per_block": GAMES_PER_BLOCK,
            }


def _validate_survey_items(items: dict) -> dict:
    validated = {}
    for key in BLOCK_SURVEY_ITEMS:
        if key not in items:
            raise SessionError(f"missing survey item {key}")
        value = items[key]
        if not isinstance(value, int) or not (0 <= value <= 6):
            raise SessionError(f"survey item {key} must be an integer in 0..6")
        validated[key] = value
    return validated


def validate_event_log(path: str | Path, engine_config: EngineConfig = EngineConfig()) -> int:
    """Replay every completed game in the log through the engine.

    Returns the number of games checked; raises ValueError on any
    inconsistency (illegal logged move, score or termination mismatch).
    """
    games: dict[tuple[str, int], dict] = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            event = json.loads(line)
            kind = event.get("event")
            key = (event.get("session_id"), event.get("game_index"))
            if kind == "game_started":
                games[key] = {
                    "deck_seed": event["deck_seed"],
                    "moves": [],
                    "finished": None,
                }
            elif kind == "move":
                games[key]["moves"].append(event)
            elif kind == "game_finished":
                games[key]["finished"] = event
    checked = 0
    for (session_id, game_index), game in games.items():
        if game["finished"] is None:
            continue
        state = new_game(game["deck_seed"], engine_config)
        for event in game["moves"]:
            if state.turn_index != event["turn"] or state.current_seat != event["seat"]:
                raise ValueError(
                    f"{session_id} game {game_index}: turn misalignment at {event['turn']}"
                )
            state.apply_move(move_from_action_id(event["action_id"]))
        if not state.is_terminal():
            raise ValueError(f"{session_id} game {game_index}: log ends before terminal state")
        if state.score() != game["finished"]["score"]:
            raise ValueError(
                f"{session_id} game {game_index}: score {state.score()} != logged "
                f"{game['finished']['score']}"
            )
        if state.terminal_status().value != game["finished"]["termination"]:
            raise ValueError(f"{session_id} game {game_index}: termination mismatch")
        checked += 1
    return checked
