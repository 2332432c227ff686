"""Engine rules: deals, legal moves, transitions, terminal handling."""

from __future__ import annotations

import collections
import random

import pytest

from hanabench.cards import (
    Card,
    DECK_SIZE,
    HAND_SIZE,
    MAX_BOMBS,
    MAX_HINT_TOKENS,
    Move,
    MoveKind,
    NUM_ACTIONS,
    action_id,
    full_deck,
    move_from_action_id,
    parse_card,
)
from hanabench.engine import (
    EngineConfig,
    GameState,
    IllegalMoveError,
    TerminalStatus,
    new_game,
    observe,
    shuffled_deck,
)


def force_hand(state: GameState, seat: int, cards: list[str]) -> None:
    """Test helper: overwrite a hand with parsed cards, knowledge reset."""
    state.hands[seat] = [parse_card(c) for c in cards]
    from hanabench.knowledge import HandKnowledge

    state.knowledge[seat] = HandKnowledge.fresh(len(cards))


def drain_tokens(state: GameState, n: int) -> None:
    """Burn n hint tokens with alternating legal hints."""
    for _ in range(n):
        partner = state.hands[1 - state.current_seat]
        state.apply_move(Move(MoveKind.HINT_RANK, partner[0].rank))


# -- deck and dealing ------------------------------------------------------


def test_full_deck_composition():
    deck = full_deck()
    assert len(deck) == DECK_SIZE
    counts = collections.Counter(deck)
    for color in range(5):
        assert counts[Card(color, 1)] == 3
        assert counts[Card(color, 2)] == 2
        assert counts[Card(color, 3)] == 2
        assert counts[Card(color, 4)] == 2
        assert counts[Card(color, 5)] == 1


def test_shuffle_deterministic_and_complete():
    a = shuffled_deck(123)
    b = shuffled_deck(123)
    c = shuffled_deck(124)
    assert a == b
    assert a != c
    assert collections.Counter(a) == collections.Counter(full_deck())


def test_deal_shape():
    state = new_game(7)
    assert len(state.hands[0]) == HAND_SIZE
    assert len(state.hands[1]) == HAND_SIZE
    assert len(state.deck) == DECK_SIZE - 2 * HAND_SIZE
    assert state.current_seat == 0
    assert state.hint_tokens == MAX_HINT_TOKENS
    assert state.bombs_remaining == MAX_BOMBS
    assert state.score() == 0
    assert state.terminal_status() is TerminalStatus.NOT_TERMINAL


def test_deal_alternates_seats():
    state = new_game(99)
    deck = shuffled_deck(99)
    # Draws come off the end of the shuffled deck, seat 0 first each round.
    expected0 = [deck[-1 - 2 * i] for i in range(HAND_SIZE)]
    expected1 = [deck[-2 - 2 * i] for i in range(HAND_SIZE)]
    assert state.hands[0] == expected0
    assert state.hands[1] == expected1


# -- action ids ------------------------------------------------------------


def test_action_id_bijection():
    seen = set()
    for aid in range(NUM_ACTIONS):
        move = move_from_action_id(aid)
        assert action_id(move) == aid
        seen.add(move)
    assert len(seen) == NUM_ACTIONS


def test_action_id_layout():
    assert action_id(Move(MoveKind.DISCARD, 0)) == 0
    assert action_id(Move(MoveKind.DISCARD, 4)) == 4
    assert action_id(Move(MoveKind.PLAY, 0)) == 5
    assert action_id(Move(MoveKind.PLAY, 4)) == 9
    assert action_id(Move(MoveKind.HINT_COLOR, 0)) == 10
    assert action_id(Move(MoveKind.HINT_COLOR, 4)) == 14
    assert action_id(Move(MoveKind.HINT_RANK, 1)) == 15
    assert action_id(Move(MoveKind.HINT_RANK, 5)) == 19


def test_action_id_rejects_out_of_range():
    with pytest.raises(ValueError):
        action_id(Move(MoveKind.PLAY, 5))
    with pytest.raises(ValueError):
        move_from_action_id(20)
    with pytest.raises(ValueError):
        move_from_action_id(-1)


# -- legal moves -----------------------------------------------------------


def test_fresh_game_legal_moves():
    state = new_game(42)
    moves = state.legal_moves()
    kinds = collections.Counter(m.kind for m in moves)
    # Full tokens: no discards; 5 plays; one hint per attribute present.
    assert kinds[MoveKind.DISCARD] == 0
    assert kinds[MoveKind.PLAY] == 5
    assert 1 <= kinds[MoveKind.HINT_COLOR] <= 5
    assert 1 <= kinds[MoveKind.HINT_RANK] <= 5
    partner = state.hands[1]
    assert kinds[MoveKind.HINT_COLOR] == len({c.color for c in partner})
    assert kinds[MoveKind.HINT_RANK] == len({c.rank for c in partner})
    # Canonical ordering: ascending action id.
    ids = [action_id(m) for m in moves]
    assert ids == sorted(ids)


def test_hints_illegal_at_zero_tokens():
    state = new_game(42)
    drain_tokens(state, MAX_HINT_TOKENS)
    assert state.hint_tokens == 0
    kinds = {m.kind for m in state.legal_moves()}
    assert MoveKind.HINT_COLOR not in kinds
    assert MoveKind.HINT_RANK not in kinds
    assert MoveKind.DISCARD in kinds


def test_single_color_partner_hand_gives_one_color_hint():
    state = new_game(0)
    force_hand(state, 1, ["R1", "R2", "R3", "R4", "R5"])
    moves = [m for m in state.legal_moves() if m.kind == MoveKind.HINT_COLOR]
    assert moves == [Move(MoveKind.HINT_COLOR, 0)]


def test_empty_hint_config_flag():
    state = new_game(0, EngineConfig(allow_empty_hints=True))
    kinds = collections.Counter(m.kind for m in state.legal_moves())
    assert kinds[MoveKind.HINT_COLOR] == 5
    assert kinds[MoveKind.HINT_RANK] == 5


def test_discard_at_max_tokens_config_flag():
    state = new_game(0, EngineConfig(allow_discard_at_max_tokens=True))
    kinds = collections.Counter(m.kind for m in state.legal_moves())
    assert kinds[MoveKind.DISCARD] == 5


# -- apply_move ------------------------------------------------------------


def test_successful_play_advances_pile():
    state = new_game(5)
    force_hand(state, 0, ["R1", "Y2", "G3", "W4", "B5"])
    ev = state.apply_move(Move(MoveKind.PLAY, 0))
    assert ev.success is True
    assert ev.card == parse_card("R1")
    assert state.fireworks[0] == 1
    assert state.score() == 1
    assert state.bombs_remaining == MAX_BOMBS
    assert ev.drew is True
    assert len(state.hands[0]) == HAND_SIZE


def test_wrong_play_costs_bomb_and_keeps_card_visible():
    state = new_game(5)
    force_hand(state, 0, ["R3", "Y2", "G3", "W4", "B5"])
    ev = state.apply_move(Move(MoveKind.PLAY, 0))
    assert ev.success is False
    assert state.bombs_remaining == MAX_BOMBS - 1
    assert parse_card("R3") in state.discards
    assert state.discard_counts[parse_card("R3").ident] == 1
    assert state.score() == 0


def test_completing_pile_with_five_restores_token():
    state = new_game(5)
    state.fireworks = [4, 0, 0, 0, 0]
    force_hand(state, 0, ["R5", "Y2", "G3", "W4", "B1"])
    drain_tokens(state, 2)
    tokens = state.hint_tokens
    ev = state.apply_move(Move(MoveKind.PLAY, 0))
    assert ev.success is True
    assert state.fireworks[0] == 5
    assert state.hint_tokens == tokens + 1


def test_five_play_does_not_exceed_token_cap():
    state = new_game(5)
    state.fireworks = [4, 0, 0, 0, 0]
    force_hand(state, 0, ["R5", "Y2", "G3", "W4", "B1"])
    assert state.hint_tokens == MAX_HINT_TOKENS
    state.apply_move(Move(MoveKind.PLAY, 0))
    assert state.hint_tokens == MAX_HINT_TOKENS


def test_discard_restores_token_and_draws():
    state = new_game(5)
    drain_tokens(state, 3)
    assert state.hint_tokens == 5
    hand_before = list(state.hands[1])  # drain left seat 1 to act
    ev = state.apply_move(Move(MoveKind.DISCARD, 2))
    assert ev.card == hand_before[2]
    assert state.hint_tokens == 6
    assert ev.drew is True
    # Slot ordering: older cards keep indices, draw appends as newest.
    assert state.hands[1][:2] == hand_before[:2]
    assert state.hands[1][2:4] == hand_before[3:]


def test_discard_illegal_at_full_tokens():
    state = new_game(5)
    with pytest.raises(IllegalMoveError):
        state.apply_move(Move(MoveKind.DISCARD, 0))


def test_illegal_move_leaves_state_unchanged():
    state = new_game(5)
    snapshot = (
        list(state.hands[0]),
        list(state.hands[1]),
        state.hint_tokens,
        state.bombs_remaining,
        state.turn_index,
    )
    for bad in (
        Move(MoveKind.DISCARD, 0),
        Move(MoveKind.PLAY, 9),
        Move(MoveKind.HINT_RANK, 0),
    ):
        with pytest.raises(IllegalMoveError):
            state.apply_move(bad)
    assert snapshot == (
        list(state.hands[0]),
        list(state.hands[1]),
        state.hint_tokens,
        state.bombs_remaining,
        state.turn_index,
    )


def test_empty_hint_rejected_by_default():
    state = new_game(5)
    force_hand(state, 1, ["R1", "R2", "R3", "R4", "R5"])
    with pytest.raises(IllegalMoveError):
        state.apply_move(Move(MoveKind.HINT_COLOR, 1))


def test_hint_records_touched_slots_and_consumes_token():
    state = new_game(5)
    force_hand(state, 1, ["R1", "Y2", "R3", "W4", "B5"])
    ev = state.apply_move(Move(MoveKind.HINT_COLOR, 0))
    assert ev.touched == (0, 2)
    assert state.hint_tokens == MAX_HINT_TOKENS - 1
    assert state.current_seat == 1
    assert state.turn_index == 1


# -- terminal handling -----------------------------------------------------


def test_bombed_out_keeps_score():
    state = new_game(5)
    state.fireworks = [1, 1, 0, 0, 0]
    force_hand(state, 0, ["R5", "Y5", "G5", "W4", "B5"])
    force_hand(state, 1, ["R4", "Y4", "G4", "W3", "B4"])
    for _ in range(MAX_BOMBS):
        state.apply_move(Move(MoveKind.PLAY, 0))  # seat 0 wrong play
        if not state.is_terminal():
            state.apply_move(Move(MoveKind.HINT_RANK, 5))  # seat 1 passes
    assert state.terminal_status() is TerminalStatus.BOMBED_OUT
    assert state.score() == 2
    assert state.legal_moves() == []


def test_perfect_game_terminal():
    state = new_game(5)
    state.fireworks = [5, 5, 5, 5, 4]
    force_hand(state, 0, ["B5", "Y2", "G3", "W4", "R1"])
    state.apply_move(Move(MoveKind.PLAY, 0))
    assert state.terminal_status() is TerminalStatus.PERFECT
    assert state.score() == 25


def test_deck_exhaustion_final_round():
    state = new_game(11)
    drain_tokens(state, 1)
    # Burn the deck down with alternating discards/draws.
    while len(state.deck) > 1:
        slot = 0
        if state.hint_tokens >= MAX_HINT_TOKENS:
            partner = state.hands[1 - state.current_seat]
            state.apply_move(Move(MoveKind.HINT_RANK, partner[0].rank))
            continue
        state.apply_move(Move(MoveKind.DISCARD, slot))
    assert state.final_round_turns_left is None
    # The move that draws the last card arms the final round but does not
    # consume one of its turns.
    while state.hint_tokens >= MAX_HINT_TOKENS:
        partner = state.hands[1 - state.current_seat]
        state.apply_move(Move(MoveKind.HINT_RANK, partner[0].rank))
    state.apply_move(Move(MoveKind.DISCARD, 0))
    assert len(state.deck) == 0
    assert state.final_round_turns_left == 2
    assert not state.is_terminal()
    mover = state.current_seat
    state.apply_move(state.legal_moves()[0])
    assert state.final_round_turns_left == 1
    assert not state.is_terminal()
    state.apply_move(state.legal_moves()[0])
    assert state.final_round_turns_left == 0
    assert state.terminal_status() is TerminalStatus.DECK_EXHAUSTED
    # Each seat got exactly one extra turn.
    assert state.current_seat == mover


# -- observations ----------------------------------------------------------


def test_observation_hides_own_hand():
    state = new_game(3)
    obs = observe(state)
    assert obs.seat == 0
    assert obs.partner_hand == tuple(state.hands[1])
    assert not hasattr(obs, "own_hand")
    assert obs.own_slots == HAND_SIZE
    assert obs.deck_size == DECK_SIZE - 2 * HAND_SIZE
    assert [m for m in obs.legal] == state.legal_moves()


def test_observation_knowledge_is_a_copy():
    state = new_game(3)
    obs = observe(state)
    obs.own_knowledge.slots[0].mask = 0
    assert state.knowledge[0].slots[0].mask != 0


# -- invariants under random play ------------------------------------------


def check_invariants(state: GameState) -> None:
    total = collections.Counter()
    for card in state.deck:
        total[card] += 1
    for hand in state.hands:
        for card in hand:
            total[card] += 1
    for card in state.discards:
        total[card] += 1
    for color, top in enumerate(state.fireworks):
        assert 0 <= top <= 5
        for rank in range(1, top + 1):
            total[Card(color, rank)] += 1
    assert total == collections.Counter(full_deck())
    assert 0 <= state.hint_tokens <= MAX_HINT_TOKENS
    assert 0 <= state.bombs_remaining <= MAX_BOMBS
    assert 0 <= state.score() <= 25
    assert state.turn_index <= 200
    if state.deck:
        assert all(len(h) == HAND_SIZE for h in state.hands)
    for seat in range(2):
        assert len(state.knowledge[seat]) == len(state.hands[seat])
        for card, slotk in zip(state.hands[seat], state.knowledge[seat].slots):
            assert slotk.mask >> card.ident & 1, "true identity pruned from knowledge"


@pytest.mark.parametrize("config", [EngineConfig(), EngineConfig(True, True)])
def test_random_play_invariants(config):
    rng = random.Random(2024)
    for game in range(60):
        state = new_game(rng.randrange(2**32), config)
        while not state.is_terminal():
            moves = state.legal_moves()
            assert moves, "non-terminal state must offer a move"
            state.apply_move(rng.choice(moves))
            check_invariants(state)
        assert state.legal_moves() == []


def test_identical_seeds_identical_games():
    def rollout(seed: int) -> list[int]:
        rng = random.Random(77)
        state = new_game(seed)
        ids = []
        while not state.is_terminal():
            move = rng.choice(state.legal_moves())
            ids.append(action_id(move))
            state.apply_move(move)
        ids.append(state.score())
        return ids

    assert rollout(31337) == rollout(31337)
