"""Context atoms, concept formulas, and the context-independence metric."""

from __future__ import annotations

import random

import numpy as np
import pytest

from hanabench.cards import Move, MoveKind, parse_card
from hanabench.concepts import (
    ATOM_NAMES,
    NUM_ATOMS,
    CIResult,
    ConceptFormula,
    context_independence,
    context_matrix,
    encode_context,
    sample_concept_formulas,
)
from hanabench.engine import GameState, new_game, observe
from hanabench.knowledge import HandKnowledge

IDX = {name: i for i, name in enumerate(ATOM_NAMES)}

CATEGORY_GROUPS = (
    ("hint_tokens_is_0", "hint_tokens_1_to_3", "hint_tokens_4_to_7", "hint_tokens_is_8"),
    ("bombs_remaining_is_1", "bombs_remaining_is_2", "bombs_remaining_is_3"),
    ("deck_size_is_0", "deck_size_1_to_9", "deck_size_10_to_29", "deck_size_30_to_40"),
    ("fireworks_total_0_to_5", "fireworks_total_6_to_15", "fireworks_total_16_to_25"),
)


def force_hand(state: GameState, seat: int, cards: list[str]) -> None:
    state.hands[seat] = [parse_card(c) for c in cards]
    state.knowledge[seat] = HandKnowledge.fresh(len(cards))


def atoms_of(state) -> dict[str, bool]:
    obs = observe(state)
    partner_obs = observe(state, 1 - state.current_seat)
    bits = encode_context(obs, partner_obs)
    row = context_matrix([bits])[0]
    return {name: bool(row[IDX[name]]) for name in ATOM_NAMES}


def test_atom_pool_size():
    assert NUM_ATOMS == 23
    assert len(set(ATOM_NAMES)) == 23


def test_fresh_game_atoms():
    state = new_game(3)
    atoms = atoms_of(state)
    assert atoms["hint_tokens_is_8"]
    assert atoms["bombs_remaining_is_3"]
    assert atoms["deck_size_30_to_40"]
    assert atoms["fireworks_total_0_to_5"]
    assert atoms["own_oldest_card_unhinted"]
    assert not atoms["own_hand_has_known_playable"]
    assert not atoms["partner_holds_known_playable"]
    assert not any(
        atoms[name]
        for name in ATOM_NAMES
        if name.startswith("partner_last_move") or name == "last_played_card_was_rank_1"
    )


def test_hint_atoms_after_partner_rank_hint():
    state = new_game(3)
    force_hand(state, 0, ["R3", "Y3", "G3", "W3", "B1"])
    force_hand(state, 1, ["R4", "Y4", "G4", "W2", "B2"])
    state.current_seat = 1
    state.apply_move(Move(MoveKind.HINT_RANK, 1))  # touches seat 0's newest card
    atoms = atoms_of(state)
    assert atoms["partner_last_move_was_rank_hint"]
    assert atoms["own_newest_card_just_hinted"]
    assert atoms["own_hand_has_known_playable"]  # a hinted 1 on an empty board
    assert atoms["own_oldest_card_unhinted"]  # slot 0 was not touched
    assert atoms["hint_tokens_4_to_7"]


def test_partner_knowledge_atom_uses_partner_view():
    state = new_game(3)
    force_hand(state, 0, ["R3", "Y3", "G3", "W3", "B3"])
    force_hand(state, 1, ["R1", "Y4", "G4", "W2", "B2"])
    state.apply_move(Move(MoveKind.HINT_RANK, 1))  # seat 0 marks partner's R1
    state.apply_move(Move(MoveKind.HINT_RANK, 3))  # seat 1 hints back
    atoms = atoms_of(state)
    assert atoms["partner_holds_known_playable"]
    assert atoms["partner_last_move_was_rank_hint"]


def test_play_and_rank_one_atoms():
    state = new_game(3)
    force_hand(state, 0, ["R1", "Y3", "G3", "W3", "B3"])
    state.apply_move(Move(MoveKind.PLAY, 0))
    atoms = atoms_of(state)  # seat 1 to act
    assert atoms["partner_last_move_was_play"]
    assert atoms["last_played_card_was_rank_1"]
    assert atoms["fireworks_total_0_to_5"]


def test_categorical_groups_are_one_hot_over_rollouts():
    rng = random.Random(7)
    points = 0
    for seed in range(16):
        state = new_game(seed)
        while not state.is_terminal():
            obs = observe(state)
            partner_obs = observe(state, 1 - state.current_seat)
            row = context_matrix([encode_context(obs, partner_obs)])[0]
            for group in CATEGORY_GROUPS:
                assert sum(row[IDX[name]] for name in group) == 1
            points += 1
            moves = state.legal_moves()
            state.apply_move(moves[rng.randrange(len(moves))])
    assert points > 200


def test_encode_without_partner_obs_falls_back_to_hint_marks():
    state = new_game(5)
    obs = observe(state)
    partner_obs = observe(state, 1 - state.current_seat)
    with_view = encode_context(obs, partner_obs)
    without_view = encode_context(obs, None)
    mask = 1 << IDX["partner_holds_known_playable"]
    assert (with_view & ~mask) == (without_view & ~mask)


# -- formulas ----------------------------------------------------------------


def test_formula_depth_and_describe():
    leaf = ConceptFormula(("atom", 4, False))
    assert leaf.depth == 1
    assert leaf.describe() == ATOM_NAMES[4]
    tree = ConceptFormula(("or", ("atom", 0, True), ("and", ("atom", 1, False), ("atom", 2, False))))
    assert tree.depth == 3
    text = tree.describe()
    assert "not " + ATOM_NAMES[0] in text and " or " in text and " and " in text


def test_formula_key_canonicalizes_commutative_children():
    ab = ConceptFormula(("and", ("atom", 0, False), ("atom", 1, False)))
    ba = ConceptFormula(("and", ("atom", 1, False), ("atom", 0, False)))
    assert ab.key() == ba.key()
    a_or_b = ConceptFormula(("or", ("atom", 0, False), ("atom", 1, False)))
    assert ab.key() != a_or_b.key()


def test_formula_pointwise_matches_batch():
    formulas = sample_concept_formulas(count=60, seed=1)
    rng = np.random.default_rng(2)
    atoms = rng.random((200, NUM_ATOMS)) < 0.4
    packed = [int(sum(1 << i for i in range(NUM_ATOMS) if row[i])) for row in atoms]
    for formula in formulas:
        batch = formula.evaluate_batch(atoms)
        for j in range(200):
            assert bool(batch[j]) == formula.evaluate(packed[j])


def test_sampling_is_deterministic_and_deduplicated():
    one = sample_concept_formulas(count=500, seed=0)
    two = sample_concept_formulas(count=500, seed=0)
    assert [f.key() for f in one] == [f.key() for f in two]
    assert len({f.key() for f in one}) == 500
    assert all(f.depth <= 3 for f in one)
    other = sample_concept_formulas(count=500, seed=3)
    assert [f.key() for f in other] != [f.key() for f in one]


def test_sampling_exhausts_tiny_atom_pool():
    with pytest.raises(ValueError):
        sample_concept_formulas(count=100, seed=0, n_atoms=1)


def test_formula_to_dict():
    formula = sample_concept_formulas(count=1, seed=9)[0]
    data = formula.to_dict()
    assert data["key"] == formula.key()
    assert data["text"] == formula.describe()


# -- context independence ------------------------------------------------------


def one_atom_matrix(flags: list[int]) -> np.ndarray:
    atoms = np.zeros((len(flags), NUM_ATOMS), dtype=bool)
    atoms[:, 0] = np.asarray(flags, dtype=bool)
    return atoms


POS = ConceptFormula(("atom", 0, False))
NEG = ConceptFormula(("atom", 0, True))


def test_ci_is_one_when_concepts_pair_off_with_actions():
    n = 12
    atoms = np.zeros((n, NUM_ATOMS), dtype=bool)
    actions = np.zeros(n, dtype=np.int64)
    for j in range(n):
        atoms[j, j % 4] = True
        actions[j] = j % 4
    formulas = [ConceptFormula(("atom", i, False)) for i in range(4)]
    result = context_independence(actions, atoms, formulas)
    assert result.value == pytest.approx(1.0, abs=1e-12)
    assert result.n_concepts == 4 and result.n_vacuous == 0


def test_ci_matches_hand_computed_ten_turn_fixture():
    # Ten decision points; atom 0 holds for the first six.
    # Concept "atom0": actions [2,2,2,7,7,2] -> mode 2, p(m|c)=4/6; action 2
    # occurs 5 times overall, 4 inside the concept -> p(c|m)=4/5; term 8/15.
    # Concept "not atom0": actions [2,3,3,3] -> mode 3, p=3/4; all three 3s
    # are inside -> p(c|m)=1; term 3/4. CI = (8/15 + 3/4) / 2 = 77/120.
    atoms = one_atom_matrix([1, 1, 1, 1, 1, 1, 0, 0, 0, 0])
    actions = np.array([2, 2, 2, 7, 7, 2, 2, 3, 3, 3])
    result = context_independence(actions, atoms, [POS, NEG])
    assert result.value == pytest.approx(77 / 120, abs=1e-12)
    assert result.n_concepts == 2 and result.n_vacuous == 0


def test_ci_drops_and_counts_vacuous_concepts():
    atoms = one_atom_matrix([1, 1, 1, 1, 1, 1, 0, 0, 0, 0])
    actions = np.array([2, 2, 2, 7, 7, 2, 2, 3, 3, 3])
    never = ConceptFormula(("atom", 1, False))
    result = context_independence(actions, atoms, [POS, NEG, never])
    assert result.value == pytest.approx(77 / 120, abs=1e-12)
    assert result.n_concepts == 2 and result.n_vacuous == 1


def test_ci_all_vacuous_or_empty_is_nan():
    atoms = one_atom_matrix([0, 0])
    actions = np.array([1, 2])
    result = context_independence(actions, atoms, [POS])
    assert np.isnan(result.value) and result.n_vacuous == 1
    empty = context_independence(np.array([], dtype=int), np.zeros((0, NUM_ATOMS), bool), [POS])
    assert np.isnan(empty.value) and empty.n_vacuous == 1


def test_ci_invariant_under_action_relabeling():
    atoms = one_atom_matrix([1, 1, 1, 1, 1, 1, 0, 0, 0, 0])
    actions = np.array([2, 2, 2, 7, 7, 2, 2, 3, 3, 3])
    relabel = {2: 11, 3: 0, 7: 19}
    permuted = np.array([relabel[a] for a in actions])
    a = context_independence(actions, atoms, [POS, NEG]).value
    b = context_independence(permuted, atoms, [POS, NEG]).value
    assert a == pytest.approx(b, abs=1e-15)


def test_ci_bounds_on_random_data():
    rng = np.random.default_rng(11)
    atoms = rng.random((400, NUM_ATOMS)) < 0.5
    actions = rng.integers(0, 20, size=400)
    formulas = sample_concept_formulas(count=100, seed=5)
    result = context_independence(actions, atoms, formulas)
    assert 0.0 < result.value <= 1.0
    assert result.n_concepts + result.n_vacuous == 100


def test_ci_shape_mismatch_raises():
    with pytest.raises(ValueError):
        context_independence(np.array([1, 2]), np.zeros((3, NUM_ATOMS), bool), [POS])


def test_ci_result_type():
    assert CIResult(1.0, 2, 3).n_vacuous == 3
