"""Behavioral metrics computed from game traces.

Given tournament traces, this module reports per-algorithm:

- score summaries (self-play, intra-algorithm cross-play between distinct
  seeded instances, inter-algorithm cross-play),
- action-distribution entropy over the 20 action ids,
- action-response entropy over ordered (partner action at t, own action at
  t+1) pairs (400 bins),
- interaction coupling: plug-in mutual information between the agent's action
  at t and the partner's response at t+1,
- context independence (see `concepts.context_independence`),
- dominance frequencies: per-game fraction of the agent's turns whose move
  was labeled discard-playable / play-unplayable / play-playable.

Entropy-family metrics are computed once per pairing block (all games of one
unordered pairing involving the agent) and reported as mean +/- sample std
across blocks. Dominance frequencies are per-game fractions averaged across
games. Entropies default to nats; pass base=2 for bits.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .agents import ALGORITHMS, AgentSpec
from .cards import NUM_ACTIONS
from .concepts import (
    ConceptFormula,
    context_independence,
    context_matrix,
    sample_concept_formulas,
)
from .harness import (
    GameTrace,
    ScoreSummary,
    inter_xp_score,
    intra_xp_score,
    self_play_score,
    summarize,
    valid_traces,
)
from .knowledge import DominanceLabel

ROW_TURN, ROW_SEAT, ROW_ACTION, ROW_LABEL, ROW_CTX = 0, 1, 2, 3, 4


def shannon_entropy(counts, base: float = math.e) -> float:
    """Plug-in entropy of a count vector; 0*log0 taken as 0."""
    arr = np.asarray(counts, dtype=float).ravel()
    total = arr.sum()
    if total <= 0:
        return float("nan")
    p = arr[arr > 0] / total
    return float(-(p * np.log(p)).sum() / math.log(base))


def mutual_information(joint, base: float = math.e) -> float:
    """Plug-in mutual information of a 2-D contingency table."""
    j = np.asarray(joint, dtype=float)
    total = j.sum()
    if total <= 0:
        return float("nan")
    p = j / total
    px = p.sum(axis=1, keepdims=True)
    py = p.sum(axis=0, keepdims=True)
    mask = p > 0
    ratio = p[mask] / (px @ py)[mask]
    return float((p[mask] * np.log(ratio)).sum() / math.log(base))


# -- per-trace extraction -------------------------------------------------


def _agent_seats(trace: GameTrace, name: str) -> tuple[int, ...]:
    return tuple(s for s in range(2) if trace.seats[s]["name"] == name)


def action_counts(traces: list[GameTrace], name: str) -> np.ndarray:
    """Histogram of the agent's own actions over the 20 action ids."""
    counts = np.zeros(NUM_ACTIONS, dtype=np.int64)
    for trace in traces:
        seats = _agent_seats(trace, name)
        for row in trace.turns:
            if row[ROW_SEAT] in seats:
                counts[row[ROW_ACTION]] += 1
    return counts


def response_pair_counts(
    traces: list[GameTrace], name: str, agent_first: bool
) -> np.ndarray:
    """20x20 counts of consecutive-action pairs within games.

    agent_first=True counts (agent action at t, partner response at t+1) --
    the coupling direction; agent_first=False counts (partner action at t,
    agent action at t+1) -- the response-distribution direction.
    """
    joint = np.zeros((NUM_ACTIONS, NUM_ACTIONS), dtype=np.int64)
    for trace in traces:
        seats = _agent_seats(trace, name)
        rows = trace.turns
        for i in range(len(rows) - 1):
            first, second = rows[i], rows[i + 1]
            anchor = first if agent_first else second
            if anchor[ROW_SEAT] in seats:
                joint[first[ROW_ACTION], second[ROW_ACTION]] += 1
    return joint


def agent_decision_points(
    traces: list[GameTrace], name: str
) -> tuple[np.ndarray, np.ndarray]:
    """(action_ids, context_bits) over all of the agent's turns."""
    actions: list[int] = []
    contexts: list[int] = []
    for trace in traces:
        seats = _agent_seats(trace, name)
        for row in trace.turns:
            if row[ROW_SEAT] in seats:
                actions.append(row[ROW_ACTION])
                contexts.append(row[ROW_CTX])
    return np.asarray(actions, dtype=np.int64), np.asarray(contexts, dtype=np.int64)


def dominance_frequencies(
    traces: list[GameTrace], name: str
) -> dict[DominanceLabel, ScoreSummary]:
    """Per-game fraction of the agent's turns with each dominance label."""
    wanted = (
        DominanceLabel.DISCARD_PLAYABLE,
        DominanceLabel.PLAY_UNPLAYABLE,
        DominanceLabel.PLAY_PLAYABLE,
    )
    per_game: dict[DominanceLabel, list[float]] = {lab: [] for lab in wanted}
    for trace in valid_traces(traces):
        seats = _agent_seats(trace, name)
        if not seats:
            continue
        labels = [row[ROW_LABEL] for row in trace.turns if row[ROW_SEAT] in seats]
        if not labels:
            continue
        n = len(labels)
        for lab in wanted:
            per_game[lab].append(labels.count(int(lab)) / n)
    return {lab: summarize(vals) for lab, vals in per_game.items()}


# -- block decomposition ----------------------------------------------------


def blocks_for(traces: list[GameTrace], name: str) -> list[list[GameTrace]]:
    """Valid traces grouped by unordered pairing, keeping pairings of `name`.

    Block order follows first appearance in the trace list, so reports are
    deterministic for a fixed tournament ordering.
    """
    grouped: dict[frozenset, list[GameTrace]] = {}
    for trace in valid_traces(traces):
        if name in trace.seat_names():
            grouped.setdefault(trace.pairing_key(), []).append(trace)
    return list(grouped.values())


def block_summary(values: list[float]) -> ScoreSummary:
    return summarize([v for v in values if not math.isnan(v)])


def pooled_interaction_coupling(
    traces: list[GameTrace], name: str, base: float = math.e
) -> float:
    """Coupling MI pooled over every pair (no block averaging).

    Pooling shrinks the plug-in MI bias, which scales like
    (k-1)(l-1)/(2N ln 2); use this for bias-sensitive checks on large runs.
    """
    joint = response_pair_counts(valid_traces(traces), name, agent_first=True)
    return mutual_information(joint, base=base)


# -- report -----------------------------------------------------------------


@dataclass(frozen=True)
class AgentMetrics:
    name: str
    algo: str
    games: int
    self_play: ScoreSummary
    intra_xp: ScoreSummary
    inter_xp: ScoreSummary
    context_independence: ScoreSummary
    interaction_coupling: ScoreSummary
    action_entropy: ScoreSummary
    response_entropy: ScoreSummary
    discard_playable: ScoreSummary
    play_unplayable: ScoreSummary
    play_playable: ScoreSummary

    def metric(self, key: str) -> ScoreSummary:
        return getattr(self, key)


METRIC_KEYS = (
    "self_play",
    "intra_xp",
    "inter_xp",
    "context_independence",
    "interaction_coupling",
    "action_entropy",
    "response_entropy",
    "discard_playable",
    "play_unplayable",
    "play_playable",
)


@dataclass
class MetricReport:
    agents: list[AgentMetrics]
    entropy_unit: str
    config_hash: str
    ci_formula_count: int
    ci_seed: int
    games: int = 0
    notes: dict = field(default_factory=dict)

    def agent(self, name: str) -> AgentMetrics:
        for a in self.agents:
            if a.name == name:
                return a
        raise KeyError(name)

    def to_csv(self, path: str | Path) -> None:
        def cell(value: float) -> str:
            if value is None or (isinstance(value, float) and math.isnan(value)):
                return "n/a"
            return f"{value:.6g}"

        header = ["name", "algo", "games"]
        for key in METRIC_KEYS:
            header += [f"{key}_mean", f"{key}_std"]
        header.append("config_hash")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for a in self.agents:
                row = [a.name, a.algo, str(a.games)]
                for key in METRIC_KEYS:
                    s = a.metric(key)
                    if not s.applicable:
                        row += ["n/a", "n/a"]
                    else:
                        row += [cell(s.mean), cell(s.std)]
                row.append(self.config_hash)
                writer.writerow(row)


def pool_names(pool: tuple[AgentSpec, ...]) -> list[str]:
    """Distinct behavior names in pool order."""
    seen: list[str] = []
    for spec in pool:
        if spec.name not in seen:
            seen.append(spec.name)
    return seen


def build_report(
    traces: list[GameTrace],
    pool: tuple[AgentSpec, ...],
    formulas: list[ConceptFormula] | None = None,
    base: float = math.e,
    ci_formula_count: int = 500,
    ci_seed: int = 0,
    config_hash: str = "",
) -> MetricReport:
    if formulas is None:
        formulas = sample_concept_formulas(count=ci_formula_count, seed=ci_seed)
    agents = []
    for name in pool_names(pool):
        specs = [s for s in pool if s.name == name]
        seeded = ALGORITHMS[specs[0].algo].seeded
        blocks = blocks_for(traces, name)
        ad_vals, ard_vals, ic_vals, ci_vals = [], [], [], []
        for block in blocks:
            ad_vals.append(shannon_entropy(action_counts(block, name), base=base))
            ard_vals.append(
                shannon_entropy(
                    response_pair_counts(block, name, agent_first=False), base=base
                )
            )
            ic_vals.append(
                mutual_information(
                    response_pair_counts(block, name, agent_first=True), base=base
                )
            )
            acts, ctxs = agent_decision_points(block, name)
            ci_vals.append(
                context_independence(acts, context_matrix(ctxs), formulas).value
            )
        dom = dominance_frequencies(traces, name)
        games = sum(len(b) for b in blocks)
        agents.append(
            AgentMetrics(
                name=name,
                algo=specs[0].algo,
                games=games,
                self_play=self_play_score(traces, name),
                intra_xp=intra_xp_score(traces, name, seeded),
                inter_xp=inter_xp_score(traces, name),
                context_independence=block_summary(ci_vals),
                interaction_coupling=block_summary(ic_vals),
                action_entropy=block_summary(ad_vals),
                response_entropy=block_summary(ard_vals),
                discard_playable=dom[DominanceLabel.DISCARD_PLAYABLE],
                play_unplayable=dom[DominanceLabel.PLAY_UNPLAYABLE],
                play_playable=dom[DominanceLabel.PLAY_PLAYABLE],
            )
        )
    return MetricReport(
        agents=agents,
        entropy_unit="nats" if base == math.e else ("bits" if base == 2 else f"log base {base:g}"),
        config_hash=config_hash,
        ci_formula_count=len(formulas),
        ci_seed=ci_seed,
        games=len(valid_traces(traces)),
    )
