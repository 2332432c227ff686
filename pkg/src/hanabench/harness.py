"""Game loop, replayable traces, and cross-play tournaments.

A trace records one game as compact per-turn rows
(turn, seat, action_id, dominance_label, context_bits, hint_tokens, bombs,
deck_size) plus the deck seed and seat assignment, enough to replay the game
bit-for-bit and to compute every downstream metric without touching the
engine again. Traces serialize one-per-line as JSON with sorted keys, so a
rerun of the same config reproduces the file byte-for-byte.

Tournaments run every unordered pairing (self-pairings included) for n games
each, seat order alternating game to game; every pairing reuses the same deck
seed range, which keeps comparisons paired and makes the whole run a pure
function of the config. Games run in parallel across pairings with results
reduced in pairing order.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import multiprocessing
from dataclasses import dataclass, field
from pathlib import Path

from .agents import AgentSpec, ExternalPolicyError
from .cards import action_id, move_from_action_id
from .concepts import encode_context
from .engine import EngineConfig, IllegalMoveError, new_game, observe
from .knowledge import apply_card_counting, label_move

TRACE_SCHEMA = 1


@dataclass
class GameTrace:
    game_id: str
    deck_seed: int
    seats: tuple[dict, ...]  # per seat: {label, name, algo, instance_seed}
    score: int
    termination: str
    # Rows: (turn, seat, action_id, label, ctx_bits, hint_tokens, bombs, deck_size)
    turns: list[tuple[int, int, int, int, int, int, int, int]]
    aborted: str | None = None

    def seat_names(self) -> tuple[str, str]:
        return (self.seats[0]["name"], self.seats[1]["name"])

    def seat_labels(self) -> tuple[str, str]:
        return (self.seats[0]["label"], self.seats[1]["label"])

    def pairing_key(self) -> frozenset[str]:
        return frozenset(self.seat_labels())

    def to_dict(self) -> dict:
        return {
            "schema": TRACE_SCHEMA,
            "game_id": self.game_id,
            "deck_seed": self.deck_seed,
            "seats": list(self.seats),
            "score": self.score,
            "termination": self.termination,
            "turns": [list(row) for row in self.turns],
            "aborted": self.aborted,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GameTrace":
        if data.get("schema") != TRACE_SCHEMA:
            raise ValueError(f"unsupported trace schema: {data.get('schema')!r}")
        return cls(
            game_id=data["game_id"],
            deck_seed=data["deck_seed"],
            seats=tuple(data["seats"]),
            score=data["score"],
            termination=data["termination"],
            turns=[tuple(row) for row in data["turns"]],
            aborted=data.get("aborted"),
        )


def run_game(
    specs: tuple[AgentSpec, AgentSpec],
    deck_seed: int,
    game_id: str = "",
    engine_config: EngineConfig = EngineConfig(),
    counting: bool = True,
    agents=None,
) -> GameTrace:
    """Play one game to termination and return its trace.

    `agents` may carry prebuilt instances (reused across a pairing); they are
    reset here either way. Agent failures (external policy timeouts, illegal
    moves) abort the trace instead of raising.
    """
    if agents is None:
        agents = tuple(spec.build() for spec in specs)
    state = new_game(deck_seed, engine_config)
    for seat, agent in enumerate(agents):
        agent.reset(deck_seed, seat)
    seats = tuple(
        {
            "label": spec.label,
            "name": spec.name,
            "algo": spec.algo,
            "instance_seed": spec.instance_seed,
        }
        for spec in specs
    )
    turns: list[tuple[int, int, int, int, int, int, int, int]] = []
    aborted = None
    while not state.is_terminal():
        seat = state.current_seat
        obs = observe(state)
        partner_obs = observe(state, 1 - seat)
        try:
            move = agents[seat].act(obs)
            if move not in obs.legal:
                raise IllegalMoveError(f"agent returned illegal move {move.describe()}")
            if counting:
                know = apply_card_counting(obs.own_knowledge, obs.public_view())
            else:
                know = obs.own_knowledge
            label = label_move(know, move, obs.fireworks)
            ctx = encode_context(obs, partner_obs, counting=counting)
            turns.append(
                (
                    state.turn_index,
                    seat,
                    action_id(move),
                    int(label),
                    ctx,
                    obs.hint_tokens,
                    obs.bombs_remaining,
                    obs.deck_size,
                )
            )
            state.apply_move(move)
        except (ExternalPolicyError, IllegalMoveError) as exc:
            aborted = f"seat {seat} ({specs[seat].label}): {exc}"
            break
    return GameTrace(
        game_id=game_id or f"{specs[0].label}+{specs[1].label}@{deck_seed}",
        deck_seed=deck_seed,
        seats=seats,
        score=state.score(),
        termination=state.terminal_status().value,
        turns=turns,
        aborted=aborted,
    )


def run_pairing(
    spec_a: AgentSpec,
    spec_b: AgentSpec,
    n_games: int,
    base_seed: int,
    engine_config: EngineConfig = EngineConfig(),
    counting: bool = True,
) -> list[GameTrace]:
    """n games with deck seeds base_seed..base_seed+n-1, seats alternating."""
    agent_a, agent_b = spec_a.build(), spec_b.build()
    traces = []
    try:
        for k in range(n_games):
            if k % 2 == 0:
                pair, bots = (spec_a, spec_b), (agent_a, agent_b)
            else:
                pair, bots = (spec_b, spec_a), (agent_b, agent_a)
            game_id = f"{spec_a.label}+{spec_b.label}#{k:05d}"
            traces.append(
                run_game(
                    pair,
                    deck_seed=base_seed + k,
                    game_id=game_id,
                    engine_config=engine_config,
                    counting=counting,
                    agents=bots,
                )
            )
    finally:
        agent_a.close()
        agent_b.close()
    return traces


# -- tournaments ----------------------------------------------------------


@dataclass(frozen=True)
class TournamentConfig:
    pool: tuple[AgentSpec, ...]
    games_per_pairing: int = 125
    base_seed: int = 20260801
    counting: bool = True
    allow_discard_at_max_tokens: bool = False
    allow_empty_hints: bool = False
    processes: int | None = None  # None = cpu count

    def engine_config(self) -> EngineConfig:
        return EngineConfig(self.allow_discard_at_max_tokens, self.allow_empty_hints)

    def to_dict(self) -> dict:
        return {
            "pool": [s.to_dict() for s in self.pool],
            "games_per_pairing": self.games_per_pairing,
            "base_seed": self.base_seed,
            "counting": self.counting,
            "allow_discard_at_max_tokens": self.allow_discard_at_max_tokens,
            "allow_empty_hints": self.allow_empty_hints,
        }

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:12]

    @classmethod
    def from_dict(cls, data: dict) -> "TournamentConfig":
        return cls(
            pool=tuple(AgentSpec.from_dict(e) for e in data["pool"]),
            games_per_pairing=int(data.get("games_per_pairing", 125)),
            base_seed=int(data.get("base_seed", 20260801)),
            counting=bool(data.get("counting", True)),
            allow_discard_at_max_tokens=bool(data.get("allow_discard_at_max_tokens", False)),
            allow_empty_hints=bool(data.get("allow_empty_hints", False)),
            processes=data.get("processes"),
        )


def pairings(pool: tuple[AgentSpec, ...]) -> list[tuple[AgentSpec, AgentSpec]]:
    """Unordered pairings including self-pairings, in pool order."""
    return list(itertools.combinations_with_replacement(pool, 2))


def _pairing_task(args) -> list[dict]:
    spec_a, spec_b, n_games, base_seed, engine_config, counting = args
    traces = run_pairing(spec_a, spec_b, n_games, base_seed, engine_config, counting)
    return [t.to_dict() for t in traces]


def run_tournament(config: TournamentConfig) -> list[GameTrace]:
    """Every pairing x games_per_pairing, parallel over pairings."""
    tasks = [
        (a, b, config.games_per_pairing, config.base_seed, config.engine_config(), config.counting)
        for a, b in pairings(config.pool)
    ]
    n_proc = config.processes or multiprocessing.cpu_count()
    n_proc = max(1, min(n_proc, len(tasks)))
    traces: list[GameTrace] = []
    if n_proc == 1:
        for task in tasks:
            traces.extend(GameTrace.from_dict(d) for d in _pairing_task(task))
    else:
        with multiprocessing.Pool(n_proc) as pool:
            for chunk in pool.imap(_pairing_task, tasks):
                traces.extend(GameTrace.from_dict(d) for d in chunk)
    return traces


# -- trace files ------------------------------------------------------------


def write_traces(traces: list[GameTrace], path: str | Path) -> None:
    with open(path, "w") as fh:
        for trace in traces:
            fh.write(json.dumps(trace.to_dict(), sort_keys=True, separators=(",", ":")))
            fh.write("\n")


def read_traces(path: str | Path) -> list[GameTrace]:
    traces = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                traces.append(GameTrace.from_dict(json.loads(line)))
    return traces


def replay_trace(trace: GameTrace, engine_config: EngineConfig = EngineConfig()) -> int:
    """Re-run a trace through the engine; returns the replayed score.

    Raises if any recorded move is illegal at its turn or the final score or
    termination disagrees with the record.
    """
    state = new_game(trace.deck_seed, engine_config)
    for turn, seat, aid, *_ in trace.turns:
        if state.turn_index != turn or state.current_seat != seat:
            raise ValueError(f"{trace.game_id}: turn misalignment at {turn}")
        state.apply_move(move_from_action_id(aid))
    if trace.aborted is None:
        if not state.is_terminal():
            raise ValueError(f"{trace.game_id}: replay did not terminate")
        if state.terminal_status().value != trace.termination:
            raise ValueError(f"{trace.game_id}: termination mismatch")
    if state.score() != trace.score:
        raise ValueError(f"{trace.game_id}: score {state.score()} != {trace.score}")
    return state.score()


# -- score aggregation ---------------------------------------------------------


@dataclass(frozen=True)
class ScoreSummary:
    mean: float
    std: float
    n: int
    applicable: bool = True

    @classmethod
    def not_applicable(cls) -> "ScoreSummary":
        return cls(float("nan"), float("nan"), 0, applicable=False)


def summarize(values: list[float]) -> ScoreSummary:
    """Mean and sample standard deviation (ddof=1)."""
    n = len(values)
    if n == 0:
        return ScoreSummary.not_applicable()
    mean = sum(values) / n
    if n == 1:
        return ScoreSummary(mean, float("nan"), 1)
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return ScoreSummary(mean, math.sqrt(var), n)


def valid_traces(traces: list[GameTrace]) -> list[GameTrace]:
    return [t for t in traces if t.aborted is None]


def self_play_score(traces: list[GameTrace], name: str) -> ScoreSummary:
    """Games where both seats hold the same instance label of `name`."""
    scores = [
        float(t.score)
        for t in valid_traces(traces)
        if t.seat_names() == (name, name) and t.seat_labels()[0] == t.seat_labels()[1]
    ]
    return summarize(scores)


def intra_xp_score(traces: list[GameTrace], name: str, seeded: bool) -> ScoreSummary:
    """Games pairing two distinct instances of one seeded algorithm."""
    if not seeded:
        return ScoreSummary.not_applicable()
    scores = [
        float(t.score)
        for t in valid_traces(traces)
        if t.seat_names() == (name, name) and t.seat_labels()[0] != t.seat_labels()[1]
    ]
    if not scores:
        return ScoreSummary.not_applicable()
    return summarize(scores)


def inter_xp_score(traces: list[GameTrace], name: str) -> ScoreSummary:
    """Games where exactly one seat belongs to `name`, pooled over partners."""
    scores = [
        float(t.score)
        for t in valid_traces(traces)
        if (t.seat_names()[0] == name) != (t.seat_names()[1] == name)
    ]
    if not scores:
        return ScoreSummary.not_applicable()
    return summarize(scores)
