"""Per-slot card knowledge: hint constraints, card counting, and move labeling.

A slot's knowledge is a 25-bit candidate mask over card identities plus the raw
hint marks (direct color/rank, hint turn indices). Two strictness modes exist:

* hints-only: candidates follow from positive and negative hint information.
* counting: candidates are additionally intersected with the multiset of cards
  the viewer cannot see (full deck minus fireworks, discards, and the partner's
  visible hand), then refined so that an identity survives only if some full
  assignment of the remaining slots is possible without exceeding any
  identity's unseen copy count. The refinement makes the per-slot sets equal
  to the projection of "every deck-consistent completion of the hand", which
  is what the dominance labels are defined against. When every slot keeps at
  least nslots+1 candidates the refinement provably cannot remove anything
  (each candidate identity contributes one available copy, so any union of k
  slot sets covers at least k copies even after fixing one identity) and is
  skipped.

Convention inference is deliberately out of scope: nothing here interprets
*why* a hint was given.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .cards import (
    Card,
    COPIES_PER_RANK,
    HAND_SIZE,
    Move,
    MoveKind,
    NUM_COLORS,
    NUM_IDENTITIES,
    NUM_RANKS,
)

FULL_MASK = (1 << NUM_IDENTITIES) - 1

# Identity bit layout: bit(color * 5 + rank - 1).
COLOR_MASKS = tuple(0b11111 << (c * NUM_RANKS) for c in range(NUM_COLORS))
RANK_MASKS = tuple(
    sum(1 << (c * NUM_RANKS + r) for c in range(NUM_COLORS)) for r in range(NUM_RANKS)
)
IDENT_COPIES = tuple(COPIES_PER_RANK[i % NUM_RANKS] for i in range(NUM_IDENTITIES))


class SlotKnowledge:
    """What the owner can deduce about one hand slot from hints alone."""

    __slots__ = ("mask", "color_hint", "rank_hint", "hint_turns")

    def __init__(
        self,
        mask: int = FULL_MASK,
        color_hint: int | None = None,
        rank_hint: int | None = None,
        hint_turns: tuple[int, ...] = (),
    ):
        self.mask = mask
        self.color_hint = color_hint
        self.rank_hint = rank_hint
        self.hint_turns = hint_turns

    @property
    def hinted(self) -> bool:
        return self.color_hint is not None or self.rank_hint is not None

    def candidates(self) -> frozenset[Card]:
        from .cards import card_from_ident

        return frozenset(
            card_from_ident(i) for i in range(NUM_IDENTITIES) if self.mask >> i & 1
        )

    def copy(self) -> "SlotKnowledge":
        return SlotKnowledge(self.mask, self.color_hint, self.rank_hint, self.hint_turns)

    def __repr__(self) -> str:
        return (
            f"SlotKnowledge(color={self.color_hint}, rank={self.rank_hint},"
            f" n_candidates={bin(self.mask).count('1')})"
        )


class HandKnowledge:
    """Knowledge for every slot of one hand, oldest card at index 0."""

    __slots__ = ("slots",)

    def __init__(self, slots: list[SlotKnowledge] | None = None):
        self.slots = slots if slots is not None else []

    @classmethod
    def fresh(cls, n_slots: int = HAND_SIZE) -> "HandKnowledge":
        return cls([SlotKnowledge() for _ in range(n_slots)])

    def copy(self) -> "HandKnowledge":
        return HandKnowledge([s.copy() for s in self.slots])

    def remove_slot(self, slot: int) -> None:
        # Older cards keep their indices; newer ones shift down by one.
        del self.slots[slot]

    def add_drawn_slot(self) -> None:
        self.slots.append(SlotKnowledge())

    def __len__(self) -> int:
        return len(self.slots)

    def __getitem__(self, slot: int) -> SlotKnowledge:
        return self.slots[slot]


def update_on_hint(
    hand: HandKnowledge, kind: MoveKind, value: int, touched: tuple[int, ...], turn: int
) -> None:
    """Apply one hint's positive (touched) and negative (untouched) information."""
    if kind == MoveKind.HINT_COLOR:
        attr_mask = COLOR_MASKS[value]
    elif kind == MoveKind.HINT_RANK:
        attr_mask = RANK_MASKS[value - 1]
    else:
        raise ValueError(f"not a hint: {kind}")
    touched_set = set(touched)
    for i, slot in enumerate(hand.slots):
        if i in touched_set:
            slot.mask &= attr_mask
            if kind == MoveKind.HINT_COLOR:
                slot.color_hint = value
            else:
                slot.rank_hint = value
            slot.hint_turns = slot.hint_turns + (turn,)
        else:
            slot.mask &= ~attr_mask


@dataclass(frozen=True)
class PublicView:
    """Everything one seat can see besides its own hand."""

    fireworks: tuple[int, ...]  # top rank per color, 0 = empty pile
    discard_counts: tuple[int, ...]  # per identity, wrong plays included
    partner_hand: tuple[Card, ...]

    def unseen_counts(self) -> list[int]:
        """Copies per identity the viewer cannot see: own hand plus the deck."""
        counts = list(IDENT_COPIES)
        for color, top in enumerate(self.fireworks):
            for rank in range(1, top + 1):
                counts[color * NUM_RANKS + rank - 1] -= 1
        for ident, n in enumerate(self.discard_counts):
            counts[ident] -= n
        for card in self.partner_hand:
            counts[card.ident] -= 1
        return counts


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _completion_exists(slot_masks: list[int], avail: list[int]) -> bool:
    """Is there an assignment of identities to slots within the copy budget?"""
    order = sorted(range(len(slot_masks)), key=lambda i: slot_masks[i].bit_count())

    def assign(k: int) -> bool:
        if k == len(order):
            return True
        for ident in _bits(slot_masks[order[k]]):
            if avail[ident] > 0:
                avail[ident] -= 1
                if assign(k + 1):
                    avail[ident] += 1
                    return True
                avail[ident] += 1
        return False

    return assign(0)


def refine_joint(slot_masks: list[int], unseen: list[int]) -> list[int]:
    """Drop per-slot candidates that no deck-consistent hand completion uses.

    `slot_masks` must already be intersected with availability (no zero-copy
    identities). Cross-slot pruning is only possible when some slot is down to
    at most nslots candidates, hence the fast path.
    """
    n = len(slot_masks)
    if n <= 1 or all(m.bit_count() >= n + 1 for m in slot_masks):
        return slot_masks
    refined: list[int] = []
    for i, mask in enumerate(slot_masks):
        keep = 0
        others = slot_masks[:i] + slot_masks[i + 1 :]
        for ident in _bits(mask):
            unseen[ident] -= 1
            if unseen[ident] >= 0 and _completion_exists(others, unseen):
                keep |= 1 << ident
            unseen[ident] += 1
        refined.append(keep)
    return refined


def apply_card_counting(hand: HandKnowledge, public: PublicView) -> HandKnowledge:
    """Return a copy of `hand` with candidate masks narrowed by card counting."""
    unseen = public.unseen_counts()
    avail_mask = 0
    for ident, n in enumerate(unseen):
        if n > 0:
            avail_mask |= 1 << ident
    masks = [slot.mask & avail_mask for slot in hand.slots]
    masks = refine_joint(masks, unseen)
    out = hand.copy()
    for slot, mask in zip(out.slots, masks):
        slot.mask = mask
    return out


def playable_mask(fireworks: tuple[int, ...]) -> int:
    """Bit per identity that would extend its pile right now."""
    mask = 0
    for color, top in enumerate(fireworks):
        if top < NUM_RANKS:
            mask |= 1 << (color * NUM_RANKS + top)
    return mask


def is_known_playable(hand: HandKnowledge, slot: int, fireworks: tuple[int, ...]) -> bool:
    """True when every remaining candidate for the slot is presently playable."""
    mask = hand.slots[slot].mask
    return mask != 0 and mask & ~playable_mask(fireworks) == 0


def is_known_unplayable(hand: HandKnowledge, slot: int, fireworks: tuple[int, ...]) -> bool:
    """True when no remaining candidate for the slot is presently playable."""
    mask = hand.slots[slot].mask
    return mask != 0 and mask & playable_mask(fireworks) == 0


class DominanceLabel(enum.IntEnum):
    """Game-theoretic tag for a move given the actor's knowledge at decision time.

    DISCARD_PLAYABLE and PLAY_UNPLAYABLE are single-step strictly dominated
    (some alternative is at least as good against every hidden completion and
    better against one); PLAY_PLAYABLE is weakly dominant.
    """

    NONE = 0
    DISCARD_PLAYABLE = 1
    PLAY_UNPLAYABLE = 2
    PLAY_PLAYABLE = 3


def label_move(hand: HandKnowledge, move: Move, fireworks: tuple[int, ...]) -> DominanceLabel:
    """Label one move. `hand` must reflect the knowledge mode under analysis."""
    if move.kind == MoveKind.DISCARD:
        if is_known_playable(hand, move.value, fireworks):
            return DominanceLabel.DISCARD_PLAYABLE
        return DominanceLabel.NONE
    if move.kind == MoveKind.PLAY:
        if is_known_unplayable(hand, move.value, fireworks):
            return DominanceLabel.PLAY_UNPLAYABLE
        if is_known_playable(hand, move.value, fireworks):
            return DominanceLabel.PLAY_PLAYABLE
    return DominanceLabel.NONE
