"""Core Hanabi vocabulary: cards, moves, and the canonical action-id space.

Everything else in the package builds on the types here. Cards are (color, rank)
pairs with a dense integer identity (0..24) used by the knowledge masks; moves
map bijectively onto 20 action ids shared by traces, metrics, and the external
policy wire protocol.
"""

from __future__ import annotations

import enum
from typing import NamedTuple

COLORS = ("R", "Y", "G", "W", "B")
NUM_COLORS = 5
NUM_RANKS = 5
RANKS = (1, 2, 3, 4, 5)
# Copies per rank within one suit: three 1s, two each of 2..4, one 5.
COPIES_PER_RANK = (3, 2, 2, 2, 1)
NUM_IDENTITIES = NUM_COLORS * NUM_RANKS
DECK_SIZE = 50
HAND_SIZE = 5
MAX_HINT_TOKENS = 8
MAX_BOMBS = 3
NUM_ACTIONS = 20


class Card(NamedTuple):
    color: int  # index into COLORS
    rank: int  # 1..5

    @property
    def ident(self) -> int:
        return self.color * NUM_RANKS + self.rank - 1

    def __str__(self) -> str:
        return f"{COLORS[self.color]}{self.rank}"


def card_from_ident(ident: int) -> Card:
    return Card(ident // NUM_RANKS, ident % NUM_RANKS + 1)


def copies_of_ident(ident: int) -> int:
    return COPIES_PER_RANK[ident % NUM_RANKS]


def parse_card(text: str) -> Card:
    """Parse the compact display form, e.g. "R3" -> Card(0, 3)."""
    if len(text) != 2 or text[0] not in COLORS or not text[1].isdigit():
        raise ValueError(f"bad card literal: {text!r}")
    rank = int(text[1])
    if rank not in RANKS:
        raise ValueError(f"bad card rank: {text!r}")
    return Card(COLORS.index(text[0]), rank)


def full_deck() -> list[Card]:
    """The canonical (unshuffled) 50-card deck."""
    return [
        Card(color, rank)
        for color in range(NUM_COLORS)
        for rank in RANKS
        for _ in range(COPIES_PER_RANK[rank - 1])
    ]


class MoveKind(enum.IntEnum):
    DISCARD = 0
    PLAY = 1
    HINT_COLOR = 2
    HINT_RANK = 3


class Move(NamedTuple):
    kind: MoveKind
    # Slot index for DISCARD/PLAY, color index for HINT_COLOR, rank for HINT_RANK.
    value: int

    def describe(self) -> str:
        if self.kind == MoveKind.DISCARD:
            return f"discard slot {self.value}"
        if self.kind == MoveKind.PLAY:
            return f"play slot {self.value}"
        if self.kind == MoveKind.HINT_COLOR:
            return f"hint color {COLORS[self.value]}"
        return f"hint rank {self.value}"


# Canonical action-id layout: discard slots 0-4 -> 0..4, play slots 0-4 -> 5..9,
# hint colors -> 10..14 in COLORS order, hint ranks 1-5 -> 15..19.
def action_id(move: Move) -> int:
    kind, value = move
    if kind == MoveKind.DISCARD:
        if 0 <= value < HAND_SIZE:
            return value
    elif kind == MoveKind.PLAY:
        if 0 <= value < HAND_SIZE:
            return 5 + value
    elif kind == MoveKind.HINT_COLOR:
        if 0 <= value < NUM_COLORS:
            return 10 + value
    elif kind == MoveKind.HINT_RANK:
        if 1 <= value <= NUM_RANKS:
            return 15 + value - 1
    raise ValueError(f"move out of range: {move}")


def move_from_action_id(aid: int) -> Move:
    if not 0 <= aid < NUM_ACTIONS:
        raise ValueError(f"action id out of range: {aid}")
    group, offset = divmod(aid, 5)
    if group == 0:
        return Move(MoveKind.DISCARD, offset)
    if group == 1:
        return Move(MoveKind.PLAY, offset)
    if group == 2:
        return Move(MoveKind.HINT_COLOR, offset)
    return Move(MoveKind.HINT_RANK, offset + 1)
