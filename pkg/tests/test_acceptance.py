"""Acceptance gate: one test per shipping criterion, at stated tolerance.

Each test prints a single [A#] PASS/FAIL line (visible with -v via the test
name either way). Heavy runs are shared module-scoped fixtures with pinned
seeds, so the gate is deterministic end to end.
"""

from __future__ import annotations

import math
import multiprocessing
import random
import time
from collections import Counter

import numpy as np
import pytest

from hanabench.agents import AgentSpec, DEFAULT_POOL
from hanabench.cards import MoveKind, NUM_IDENTITIES, action_id, copies_of_ident
from hanabench.concepts import ConceptFormula, context_independence
from hanabench.engine import new_game, observe
from hanabench.harness import (
    GameTrace,
    TournamentConfig,
    run_pairing,
    run_tournament,
    summarize,
)
from hanabench.knowledge import DominanceLabel, apply_card_counting, label_move
from hanabench.metrics import (
    METRIC_KEYS,
    action_counts,
    build_report,
    dominance_frequencies,
    mutual_information,
    pooled_interaction_coupling,
    response_pair_counts,
    shannon_entropy,
)
from hanabench.stats import (
    analyze_cohorts,
    bonferroni_threshold,
    linear_regression,
    parabolic_fit,
    synthetic_ratings,
    write_analysis_csv,
)

from oracles import oracle_known, random_decision_states

RANDOM_SPEC = AgentSpec("random", instance_seed=11)


def check(tag: str, ok: bool, detail: str) -> None:
    print(f"[{tag}] {'PASS' if ok else 'FAIL'}: {detail}", flush=True)
    assert ok, f"[{tag}] {detail}"


def _selfplay_chunk(args) -> list[dict]:
    spec, n_games, base_seed, counting = args
    traces = run_pairing(spec, spec, n_games, base_seed, counting=counting)
    return [t.to_dict() for t in traces]


def _parallel_selfplay(spec: AgentSpec, total: int, base_seed: int, counting: bool):
    tasks = [
        (spec, total // 4, base_seed + i * (total // 4), counting) for i in range(4)
    ]
    traces: list[GameTrace] = []
    with multiprocessing.Pool(4) as pool:
        for chunk in pool.imap(_selfplay_chunk, tasks):
            traces.extend(GameTrace.from_dict(d) for d in chunk)
    return traces


@pytest.fixture(scope="module")
def random_selfplay():
    """5,000 uniform-random self-play games, counting labels on."""
    return _parallel_selfplay(RANDOM_SPEC, 5_000, base_seed=9_000_000, counting=True)


@pytest.fixture(scope="module")
def ladder_means():
    """1,000 self-play games per rule bot (scores only, hint-only labels)."""
    specs = {
        "simple": AgentSpec("simple", instance_seed=1),
        "value": AgentSpec("value", instance_seed=1),
        "holmes": AgentSpec("holmes", instance_seed=1, params=(("theta", 0.6),)),
        "smart": AgentSpec("smart", instance_seed=1),
    }
    tasks = []
    for i, spec in enumerate(specs.values()):
        for j in range(2):
            tasks.append((spec, 500, 11_000_000 + i * 1000 + j * 500, False))
    by_name: dict[str, list[int]] = {name: [] for name in specs}
    with multiprocessing.Pool(4) as pool:
        for chunk in pool.imap(_selfplay_chunk, tasks):
            for d in chunk:
                trace = GameTrace.from_dict(d)
                by_name[trace.seats[0]["name"]].append(trace.score)
    assert all(len(v) == 1000 for v in by_name.values())
    return {name: sum(v) / len(v) for name, v in by_name.items()}


@pytest.fixture(scope="module")
def dry_run():
    config = TournamentConfig(
        pool=DEFAULT_POOL,
        games_per_pairing=125,
        base_seed=20260801,
        processes=4,
    )
    started = time.perf_counter()
    traces = run_tournament(config)
    elapsed = time.perf_counter() - started
    return config, traces, elapsed


# -- A1: engine soundness under random play --------------------------------------


def test_a1_engine_soundness_10k_random_games():
    rng = random.Random(20260814)
    started = time.perf_counter()
    full_deck = Counter()
    for ident in range(NUM_IDENTITIES):
        full_deck[ident] = copies_of_ident(ident)
    for game in range(10_000):
        state = new_game(rng.randrange(2**31))
        seen_moves = []
        while not state.is_terminal():
            move = rng.choice(state.legal_moves())
            seen_moves.append(action_id(move))
            state.apply_move(move)
            in_flight = (
                len(state.deck)
                + len(state.hands[0])
                + len(state.hands[1])
                + len(state.discards)
                + sum(state.fireworks)
            )
            assert in_flight == 50, f"game {game}: card count {in_flight}"
            assert 0 <= state.hint_tokens <= 8
            assert 0 <= state.bombs_remaining <= 3
            assert 0 <= state.score() <= 25
        # terminal multiset conservation over exact identities
        idents = Counter()
        for card in state.deck:
            idents[card.ident] += 1
        for hand in state.hands:
            for card in hand:
                idents[card.ident] += 1
        for card in state.discards:
            idents[card.ident] += 1
        for color, top in enumerate(state.fireworks):
            for rank in range(top):
                idents[color * 5 + rank] += 1
        assert idents == full_deck, f"game {game}: identity multiset broken"
        # end-to-end replay of the recorded moves
        replayed = new_game(state.deck_seed)
        from hanabench.cards import move_from_action_id

        for aid in seen_moves:
            replayed.apply_move(move_from_action_id(aid))
        assert replayed.score() == state.score()
        assert replayed.terminal_status() == state.terminal_status()
    elapsed = time.perf_counter() - started
    check(
        "A1",
        elapsed < 30.0,
        f"10,000 random games sound + replayed in {elapsed:.1f}s (< 30s)",
    )


# -- A2-A4: random-baseline bands ---------------------------------------------------


def test_a2_random_selfplay_score_band(random_selfplay):
    scores = summarize([t.score for t in random_selfplay if t.aborted is None])
    ok = scores.n >= 5000 and 0.88 <= scores.mean <= 1.48 and 1.0 <= scores.std <= 1.5
    check(
        "A2",
        ok,
        f"random self-play over {scores.n} games: mean {scores.mean:.3f} in "
        f"[0.88, 1.48], std {scores.std:.3f} in [1.0, 1.5]",
    )


def test_a3_random_action_entropy_and_coupling(random_selfplay):
    entropy = shannon_entropy(action_counts(random_selfplay, "random"))
    coupling = pooled_interaction_coupling(random_selfplay, "random")
    ok = 2.7 <= entropy <= 3.1 and 0.0 <= coupling < 0.10
    check(
        "A3",
        ok,
        f"random action entropy {entropy:.4f} nats in [2.7, 3.1]; pooled "
        f"coupling {coupling:.4f} < 0.10",
    )


def test_a4_random_discard_playable_band(dry_run):
    # Measured over the whole-pool tournament: discarding a known-playable
    # needs real knowledge, which the random bot only accumulates when its
    # partners hint usefully. Its own hints are noise, so self-play sits far
    # below the band this corpus produces.
    _, traces, _ = dry_run
    freq = dominance_frequencies(traces, "random")[DominanceLabel.DISCARD_PLAYABLE]
    ok = 0.02 <= freq.mean <= 0.06
    check(
        "A4",
        ok,
        f"random discard-of-playable per-game rate {freq.mean:.4f} in [0.02, 0.06] "
        f"(counting knowledge, {freq.n} pool games)",
    )


# -- A5: rule-bot strength ladder -----------------------------------------------------


def test_a5_selfplay_strength_ladder(ladder_means):
    m = ladder_means
    ok = m["simple"] < m["value"] <= m["holmes"] < m["smart"] and m["smart"] >= 15.0
    check(
        "A5",
        ok,
        "1,000-game self-play means: "
        f"simple {m['simple']:.2f} < value {m['value']:.2f} <= "
        f"holmes {m['holmes']:.2f} < smart {m['smart']:.2f}, smart >= 15",
    )


# -- A6: dominance labels against the enumeration oracle ------------------------------


def test_a6_labels_match_completion_oracle():
    points = 0
    moves_checked = 0
    disagreements = 0
    for state, seat in random_decision_states(1_000, seed=424242):
        obs = observe(state, seat)
        counted = apply_card_counting(obs.own_knowledge, obs.public_view())
        truth = oracle_known(state, seat)
        points += 1
        for move in obs.legal:
            got = label_move(counted, move, obs.fireworks)
            if move.kind == MoveKind.DISCARD:
                want = (
                    DominanceLabel.DISCARD_PLAYABLE
                    if truth[move.value][0]
                    else DominanceLabel.NONE
                )
            elif move.kind == MoveKind.PLAY:
                known_play, known_unplay = truth[move.value]
                if known_unplay:
                    want = DominanceLabel.PLAY_UNPLAYABLE
                elif known_play:
                    want = DominanceLabel.PLAY_PLAYABLE
                else:
                    want = DominanceLabel.NONE
            else:
                want = DominanceLabel.NONE
            moves_checked += 1
            if got != want:
                disagreements += 1
    ok = points >= 1000 and disagreements == 0
    check(
        "A6",
        ok,
        f"{disagreements} disagreements with the enumeration oracle over "
        f"{points} decision points ({moves_checked} labeled moves)",
    )


# -- A7: information-theoretic estimator properties -----------------------------------


def test_a7_information_estimator_properties():
    rng = np.random.default_rng(7)

    bounds_ok = True
    for _ in range(100):
        counts = rng.integers(0, 40, size=20)
        if counts.sum() == 0:
            continue
        h = shannon_entropy(counts)
        bounds_ok &= -1e-12 <= h <= math.log(20) + 1e-12
    for _ in range(100):
        joint = rng.integers(0, 15, size=(20, 20))
        bounds_ok &= mutual_information(joint) >= -1e-12

    x = rng.integers(0, 20, size=100_000)
    y = rng.integers(0, 20, size=100_000)
    joint = np.zeros((20, 20))
    np.add.at(joint, (x, y), 1)
    independent_bits = mutual_information(joint, base=2)

    # deterministic copy policy: partner cycles k=4 hints, agent echoes
    seats = (
        {"label": "p#0", "name": "p", "algo": "p", "instance_seed": 0},
        {"label": "echo#0", "name": "echo", "algo": "echo", "instance_seed": 0},
    )
    actions = []
    for rep in range(40):
        c = 10 + rep % 4
        actions += [c, c]
    actions.append(10)
    turns = [(t, t % 2, a, 0, 0, 8, 3, 30) for t, a in enumerate(actions)]
    copy_trace = GameTrace(
        game_id="copy",
        deck_seed=0,
        seats=seats,
        score=0,
        termination="bombed_out",
        turns=turns,
    )
    copy_bits = mutual_information(
        response_pair_counts([copy_trace], "echo", agent_first=False), base=2
    )

    pos, neg = ConceptFormula(("atom", 0, False)), ConceptFormula(("atom", 0, True))
    from hanabench.concepts import NUM_ATOMS

    fixture_atoms = np.zeros((10, NUM_ATOMS), dtype=bool)
    fixture_atoms[:6, 0] = True
    fixture_actions = np.array([2, 2, 2, 7, 7, 2, 2, 3, 3, 3])
    ci_fixture = context_independence(fixture_actions, fixture_atoms, [pos, neg])

    degenerate_atoms = np.zeros((8, NUM_ATOMS), dtype=bool)
    degenerate_atoms[:, 0] = True
    ci_degenerate = context_independence(
        np.full(8, 13), degenerate_atoms, [pos]
    )

    ok = (
        bounds_ok
        and independent_bits < 0.05
        and abs(copy_bits - 2.0) <= 1e-9
        and abs(ci_degenerate.value - 1.0) <= 1e-12
        and abs(ci_fixture.value - 77 / 120) <= 1e-9
    )
    check(
        "A7",
        ok,
        f"entropy/MI bounds hold; independent MI {independent_bits:.4f} bits < 0.05 "
        f"at 1e5 pairs; copy-policy MI {copy_bits:.10f} = log2(4); CI degenerate "
        f"{ci_degenerate.value:.1f} = 1; CI fixture {ci_fixture.value:.10f} = 77/120",
    )


# -- A8: regression machinery ----------------------------------------------------------


def _metric_report(names_algos, self_play_means):
    from hanabench.harness import ScoreSummary
    from hanabench.metrics import AgentMetrics, MetricReport

    agents = []
    for (name, algo), mean in zip(names_algos, self_play_means):
        fields = {key: ScoreSummary.not_applicable() for key in METRIC_KEYS}
        fields["self_play"] = ScoreSummary(mean=mean, std=0.4, n=20)
        agents.append(AgentMetrics(name=name, algo=algo, games=20, **fields))
    return MetricReport(
        agents=agents, entropy_unit="nats", config_hash="", ci_formula_count=0, ci_seed=0
    )


def test_a8_regression_oracles():
    rng = np.random.default_rng(8)
    x = rng.normal(size=60)
    y = 0.9 * x + 3.0 + rng.normal(scale=0.5, size=60)
    ours = linear_regression(x, y)
    design = np.column_stack([x, np.ones_like(x)])
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    normal_eq_ok = (
        abs(ours.slope - float(beta[0])) <= 1e-9
        and abs(ours.intercept - float(beta[1])) <= 1e-9
    )

    bonferroni_ok = bonferroni_threshold(0.05, 18) == pytest.approx(
        1.0 / 360.0, abs=1e-15
    )

    xs = np.linspace(-1, 7, 9)
    fit = parabolic_fit(xs, -2.0 * (xs - 3.0) ** 2 + 5.0)
    parabola_ok = (
        abs(fit.a - (-2.0)) <= 1e-6
        and abs(fit.b - (-3.0)) <= 1e-6
        and abs(fit.c - 5.0) <= 1e-6
    )

    names_algos = [(f"bot{i}", "smart") for i in range(8)]
    means = [float(6 + 2 * i) for i in range(8)]
    report = _metric_report(names_algos, means)
    ratings = dict(
        zip(
            [n for n, _ in names_algos],
            synthetic_ratings(means, slope=1.5, intercept=4.0, noise_std=0.8, seed=5),
        )
    )
    planted = analyze_cohorts(report, ratings).cohort("all").fit("self_play")
    planted_ok = abs(planted.slope - 1.5) <= 2.0 * planted.stderr

    ok = normal_eq_ok and bonferroni_ok and parabola_ok and planted_ok
    check(
        "A8",
        ok,
        f"normal-equation agreement <=1e-9; bonferroni(0.05, 18) = 1/360; "
        f"noiseless parabola recovered to 1e-6; planted slope "
        f"{planted.slope:.3f} within 2 stderr ({planted.stderr:.3f}) of 1.5",
    )


# -- A9: full-pool dry run -------------------------------------------------------------


def test_a9_default_pool_dry_run(dry_run, tmp_path):
    config, traces, elapsed = dry_run
    aborted = sum(1 for t in traces if t.aborted is not None)
    run_ok = len(traces) == 36 * 125 and aborted == 0 and elapsed < 600.0

    report = build_report(traces, config.pool, config_hash=config.config_hash())
    metrics_csv = tmp_path / "metrics.csv"
    report.to_csv(metrics_csv)
    import csv as _csv

    with open(metrics_csv, newline="") as fh:
        rows = list(_csv.reader(fh))
    header, body = rows[0], rows[1:]
    cells_ok = len(body) == 7 and all(
        len(row) == len(header) and all(cell.strip() for cell in row) for row in body
    )

    ratings = dict(
        zip(
            [a.name for a in report.agents],
            synthetic_ratings(
                [a.self_play.mean for a in report.agents],
                slope=1.2,
                intercept=5.0,
                noise_std=1.0,
                seed=3,
            ),
        )
    )
    analysis = analyze_cohorts(report, ratings)
    analysis_csv = tmp_path / "analysis.csv"
    write_analysis_csv(analysis, analysis_csv)
    with open(analysis_csv, newline="") as fh:
        arows = list(_csv.DictReader(fh))
    linear_rows = [r for r in arows if r["fit"] == "linear"]
    parabola_rows = [r for r in arows if r["fit"] == "parabola"]
    analysis_ok = len(linear_rows) == 18 and len(parabola_rows) == 2

    ok = run_ok and cells_ok and analysis_ok
    check(
        "A9",
        ok,
        f"default pool: {len(traces)} games ({aborted} aborted) in {elapsed:.0f}s "
        f"(< 600s); metric CSV fully populated for {len(body)} behaviors; analysis "
        f"CSV holds {len(linear_rows)} linear fits + {len(parabola_rows)} coupling "
        f"parabolas",
    )
