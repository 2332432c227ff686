"""Two-player Hanabi engine: seeded deals, legal moves, state transitions.

Rule set in force:

* 50-card deck, 5-card hands dealt alternately, seat 0 moves first.
* 8 hint tokens, 3 bombs. A discard or a successful rank-5 play restores one
  token (capped). Discarding at the full 8 tokens is illegal unless a config
  flag re-enables it; hints must touch at least one card unless a config flag
  allows empty hints.
* A wrong play moves the card to the discard pile and costs a bomb; the game
  ends immediately at zero bombs with the accumulated score kept.
* Drawing the last deck card arms a final round of one further turn per
  player. Terminal states: perfect 25, final round exhausted, bombed out.

Hand slots are ordered oldest-first: removals shift newer cards down and a
draw appends at the highest index. All randomness comes from one named deck
PRNG (see SHUFFLE_ALGO); agents own their seeds separately, so a deal is a
pure function of its seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .cards import (
    Card,
    COLORS,
    DECK_SIZE,
    HAND_SIZE,
    MAX_BOMBS,
    MAX_HINT_TOKENS,
    Move,
    MoveKind,
    NUM_COLORS,
    NUM_RANKS,
    RANKS,
    full_deck,
)
from .knowledge import HandKnowledge, PublicView, update_on_hint

NUM_SEATS = 2
# Generous bound; a real game cannot exceed ~110 turns (each play/discard
# consumes one of 50 cards, hints are token-bounded by discards).
MAX_TURNS = 200
SHUFFLE_ALGO = "fisher-yates/mt19937-v1"


class IllegalMoveError(ValueError):
    """Raised by apply_move; the state is left untouched."""


class TerminalStatus(Enum):
    NOT_TERMINAL = "not_terminal"
    PERFECT = "perfect"
    DECK_EXHAUSTED = "deck_exhausted"
    BOMBED_OUT = "bombed_out"


@dataclass(frozen=True)
class EngineConfig:
    allow_discard_at_max_tokens: bool = False
    allow_empty_hints: bool = False


DEFAULT_CONFIG = EngineConfig()


@dataclass
class EventRecord:
    """What one applied move did, for traces, observations, and UIs."""

    turn: int
    seat: int
    move: Move
    card: Card | None = None  # revealed card for play/discard
    success: bool | None = None  # play outcome
    touched: tuple[int, ...] = ()  # partner slots a hint touched
    drew: bool = False


def shuffled_deck(seed: int) -> list[Card]:
    """Fisher-Yates over the canonical deck, driven by seeded MT19937."""
    rng = random.Random(seed)
    deck = full_deck()
    for i in range(len(deck) - 1, 0, -1):
        j = rng.randrange(i + 1)
        deck[i], deck[j] = deck[j], deck[i]
    return deck


class GameState:
    """Mutable game state owned by a single game loop.

    `apply_move` validates before mutating, so a rejected move leaves the
    state untouched. Copy with `clone()` before speculative use.
    """

    __slots__ = (
        "config",
        "deck_seed",
        "deck",
        "hands",
        "knowledge",
        "fireworks",
        "discards",
        "discard_counts",
        "hint_tokens",
        "bombs_remaining",
        "current_seat",
        "final_round_turns_left",
        "turn_index",
        "last_event",
        "last_played_rank",
    )

    def __init__(self, deck_seed: int, config: EngineConfig = DEFAULT_CONFIG):
        self.config = config
        self.deck_seed = deck_seed
        self.deck = shuffled_deck(deck_seed)
        self.hands: list[list[Card]] = [[], []]
        self.knowledge = [HandKnowledge(), HandKnowledge()]
        self.fireworks = [0] * NUM_COLORS
        self.discards: list[Card] = []
        self.discard_counts = [0] * 25
        self.hint_tokens = MAX_HINT_TOKENS
        self.bombs_remaining = MAX_BOMBS
        self.current_seat = 0
        self.final_round_turns_left: int | None = None
        self.turn_index = 0
        self.last_event: EventRecord | None = None
        self.last_played_rank: int | None = None
        for _ in range(HAND_SIZE):
            for seat in range(NUM_SEATS):
                self.hands[seat].append(self.deck.pop())
                self.knowledge[seat].add_drawn_slot()

    # -- queries ---------------------------------------------------------

    def score(self) -> int:
        return sum(self.fireworks)

    def terminal_status(self) -> TerminalStatus:
        if self.bombs_remaining == 0:
            return TerminalStatus.BOMBED_OUT
        if all(top == NUM_RANKS for top in self.fireworks):
            return TerminalStatus.PERFECT
        if self.final_round_turns_left == 0:
            return TerminalStatus.DECK_EXHAUSTED
        return TerminalStatus.NOT_TERMINAL

    def is_terminal(self) -> bool:
        return self.terminal_status() is not TerminalStatus.NOT_TERMINAL

    def legal_moves(self) -> list[Move]:
        """Legal moves for the seat to act, in ascending action-id order."""
        if self.is_terminal():
            return []
        seat = self.current_seat
        hand = self.hands[seat]
        partner = self.hands[1 - seat]
        moves: list[Move] = []
        can_discard = (
            self.hint_tokens < MAX_HINT_TOKENS or self.config.allow_discard_at_max_tokens
        )
        if can_discard:
            moves.extend(Move(MoveKind.DISCARD, i) for i in range(len(hand)))
        moves.extend(Move(MoveKind.PLAY, i) for i in range(len(hand)))
        if self.hint_tokens > 0 and partner:
            if self.config.allow_empty_hints:
                colors = range(NUM_COLORS)
                ranks = RANKS
            else:
                present_colors = {card.color for card in partner}
                present_ranks = {card.rank for card in partner}
                colors = sorted(present_colors)
                ranks = sorted(present_ranks)
            moves.extend(Move(MoveKind.HINT_COLOR, c) for c in colors)
            moves.extend(Move(MoveKind.HINT_RANK, r) for r in ranks)
        if not moves:
            # Degenerate corner (max tokens, nothing to play or hint): the
            # discard prohibition is lifted rather than deadlocking the game.
            moves = [Move(MoveKind.DISCARD, i) for i in range(len(hand))]
        return moves

    def public_view(self, seat: int) -> PublicView:
        return PublicView(
            fireworks=tuple(self.fireworks),
            discard_counts=tuple(self.discard_counts),
            partner_hand=tuple(self.hands[1 - seat]),
        )

    def clone(self) -> "GameState":
        other = object.__new__(GameState)
        other.config = self.config
        other.deck_seed = self.deck_seed
        other.deck = list(self.deck)
        other.hands = [list(h) for h in self.hands]
        other.knowledge = [k.copy() for k in self.knowledge]
        other.fireworks = list(self.fireworks)
        other.discards = list(self.discards)
        other.discard_counts = list(self.discard_counts)
        other.hint_tokens = self.hint_tokens
        other.bombs_remaining = self.bombs_remaining
        other.current_seat = self.current_seat
        other.final_round_turns_left = self.final_round_turns_left
        other.turn_index = self.turn_index
        other.last_event = self.last_event
        other.last_played_rank = self.last_played_rank
        return other

    # -- transitions -----------------------------------------------------

    def _validate(self, move: Move) -> None:
        if self.is_terminal():
            raise IllegalMoveError(f"game over ({self.terminal_status().value}): {move}")
        kind, value = move
        hand = self.hands[self.current_seat]
        partner = self.hands[1 - self.current_seat]
        if kind in (MoveKind.DISCARD, MoveKind.PLAY):
            if not 0 <= value < len(hand):
                raise IllegalMoveError(f"no card in slot {value}")
            if (
                kind == MoveKind.DISCARD
                and self.hint_tokens >= MAX_HINT_TOKENS
                and not self.config.allow_discard_at_max_tokens
            ):
                # An occupied slot implies a legal play, so the no-other-move
                # exception in legal_moves can never apply here.
                raise IllegalMoveError("discard illegal at full hint tokens")
        elif kind == MoveKind.HINT_COLOR:
            if self.hint_tokens <= 0:
                raise IllegalMoveError("no hint tokens left")
            if not 0 <= value < NUM_COLORS:
                raise IllegalMoveError(f"bad hint color {value}")
            if not self.config.allow_empty_hints and not any(
                card.color == value for card in partner
            ):
                raise IllegalMoveError(f"empty hint: no {COLORS[value]} in partner hand")
        elif kind == MoveKind.HINT_RANK:
            if self.hint_tokens <= 0:
                raise IllegalMoveError("no hint tokens left")
            if value not in RANKS:
                raise IllegalMoveError(f"bad hint rank {value}")
            if not self.config.allow_empty_hints and not any(
                card.rank == value for card in partner
            ):
                raise IllegalMoveError(f"empty hint: no rank {value} in partner hand")
        else:
            raise IllegalMoveError(f"unknown move kind {kind}")

    def _draw(self, seat: int) -> bool:
        if not self.deck:
            return False
        self.hands[seat].append(self.deck.pop())
        self.knowledge[seat].add_drawn_slot()
        if not self.deck:
            self.final_round_turns_left = NUM_SEATS
        return True

    def apply_move(self, move: Move) -> EventRecord:
        """Validate and apply `move` for the current seat; returns the event."""
        self._validate(move)
        seat = self.current_seat
        kind, value = move
        armed_before = self.final_round_turns_left is not None
        event = EventRecord(turn=self.turn_index, seat=seat, move=move)

        if kind == MoveKind.PLAY:
            card = self.hands[seat].pop(value)
            self.knowledge[seat].remove_slot(value)
            self.last_played_rank = card.rank
            if self.fireworks[card.color] == card.rank - 1:
                self.fireworks[card.color] = card.rank
                if card.rank == NUM_RANKS and self.hint_tokens < MAX_HINT_TOKENS:
                    self.hint_tokens += 1
                event.success = True
            else:
                self.discards.append(card)
                self.discard_counts[card.ident] += 1
                self.bombs_remaining -= 1
                event.success = False
            event.card = card
            event.drew = self._draw(seat)
        elif kind == MoveKind.DISCARD:
            card = self.hands[seat].pop(value)
            self.knowledge[seat].remove_slot(value)
            self.discards.append(card)
            self.discard_counts[card.ident] += 1
            if self.hint_tokens < MAX_HINT_TOKENS:
                self.hint_tokens += 1
            event.card = card
            event.drew = self._draw(seat)
        else:
            self.hint_tokens -= 1
            partner = 1 - seat
            if kind == MoveKind.HINT_COLOR:
                touched = tuple(
                    i for i, card in enumerate(self.hands[partner]) if card.color == value
                )
            else:
                touched = tuple(
                    i for i, card in enumerate(self.hands[partner]) if card.rank == value
                )
            update_on_hint(self.knowledge[partner], kind, value, touched, self.turn_index)
            event.touched = touched

        if armed_before:
            self.final_round_turns_left -= 1
        self.current_seat = 1 - seat
        self.turn_index += 1
        if self.turn_index > MAX_TURNS:
            raise RuntimeError(f"game exceeded {MAX_TURNS} turns; engine invariant broken")
        self.last_event = event
        return event


def new_game(deck_seed: int, config: EngineConfig = DEFAULT_CONFIG) -> GameState:
    return GameState(deck_seed, config)


@dataclass
class Observation:
    """One seat's view of the game; never contains the viewer's own cards."""

    seat: int
    turn_index: int
    partner_hand: tuple[Card, ...]
    own_knowledge: HandKnowledge
    partner_knowledge: HandKnowledge
    fireworks: tuple[int, ...]
    discards: tuple[Card, ...]
    discard_counts: tuple[int, ...]
    hint_tokens: int
    bombs_remaining: int
    deck_size: int
    last_event: EventRecord | None
    last_played_rank: int | None
    legal: tuple[Move, ...]

    @property
    def own_slots(self) -> int:
        return len(self.own_knowledge)

    def public_view(self) -> PublicView:
        return PublicView(self.fireworks, self.discard_counts, self.partner_hand)


def observe(state: GameState, seat: int | None = None) -> Observation:
    """Build the acting seat's observation (or an arbitrary seat's)."""
    if seat is None:
        seat = state.current_seat
    return Observation(
        seat=seat,
        turn_index=state.turn_index,
        partner_hand=tuple(state.hands[1 - seat]),
        own_knowledge=state.knowledge[seat].copy(),
        partner_knowledge=state.knowledge[1 - seat].copy(),
        fireworks=tuple(state.fireworks),
        discards=tuple(state.discards),
        discard_counts=tuple(state.discard_counts),
        hint_tokens=state.hint_tokens,
        bombs_remaining=state.bombs_remaining,
        deck_size=len(state.deck),
        last_event=state.last_event,
        last_played_rank=state.last_played_rank,
        legal=tuple(state.legal_moves()) if seat == state.current_seat else (),
    )
