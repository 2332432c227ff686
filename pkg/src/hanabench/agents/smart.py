"""Conventions bot: hints are promises, not just facts.

Priorities:

1. If the partner's previous move was a hint touching exactly one of our
   cards and that card is plausibly playable, play it (hint-implies-play).
   Plausibility excludes protective hints: a lone touch on the card we were
   about to discard (the oldest unhinted slot) reads as "keep this" whenever
   the touched card could, on public information, be a 5 or a last live
   copy — the only cards worth saving — and those reads never trigger the
   convention. A front touch with no save-worthy candidate is a play signal
   like any other.
2. Play a known-playable card, preferring one whose playability is not
   already deducible from the public hint record (spend private inference
   first; the partner can re-derive the public one later).
3. Give the hint that newly marks the most actually-playable partner cards,
   counting both cards made certain and single-touch convention plays under
   the same save-aware reading the receiver applies; tie-break toward fewer
   touched cards, then the configured attribute order. A lone touch that
   would leave an unplayable card looking playable is a trap and is never
   chosen.
4. Save-hint the card the partner will discard next if it is a 5 or a last
   live copy; the protective reading above keeps the partner from playing it.
5. Discard the oldest unhinted card, else the oldest.

The partner model uses only information both seats share: the hint record
plus card counting over the board and discard pile. The bot's own playability
checks also count the partner's visible hand, which the partner cannot verify
from the outside; that gap is what rule 2's preference exploits.
"""

from __future__ import annotations

from ..cards import Move, MoveKind, card_from_ident
from ..engine import Observation
from ..knowledge import (
    HandKnowledge,
    IDENT_COPIES,
    is_known_playable,
    playable_mask,
    update_on_hint,
)
from .base import card_playable, is_last_live_copy
from .rules import SimpleBot


def _board_avail_mask(fireworks: tuple[int, ...], discard_counts: tuple[int, ...]) -> int:
    """Identities with unseen copies given only board + discards (no hands)."""
    mask = 0
    for ident in range(25):
        seen = discard_counts[ident]
        card = card_from_ident(ident)
        if fireworks[card.color] >= card.rank:
            seen += 1
        if seen < IDENT_COPIES[ident]:
            mask |= 1 << ident
    return mask


def _public_masks(hand: HandKnowledge, avail: int) -> list[int]:
    return [slot.mask & avail for slot in hand.slots]


class SmartBot(SimpleBot):
    algo = "smart"
    uses_counting = True

    def __init__(self, instance_seed: int = 0, hint_attribute_order: str = "color"):
        super().__init__(instance_seed)
        if hint_attribute_order not in ("color", "rank"):
            raise ValueError(f"bad hint_attribute_order: {hint_attribute_order}")
        self.hint_attribute_order = hint_attribute_order

    # -- rule 1: hint-implies-play ----------------------------------------

    @staticmethod
    def _discard_front(knowledge: HandKnowledge) -> int:
        """The slot rules 5/6 discard next: oldest unhinted, else the oldest."""
        for slot in range(len(knowledge)):
            if not knowledge[slot].hinted:
                return slot
        return 0

    @staticmethod
    def _front_before_hint(knowledge: HandKnowledge, kind: MoveKind, touched) -> int:
        """Reconstruct the discard-front as it stood before the hint landed.

        A touched slot counted as hinted beforehand only if it already
        carried the other attribute's mark; untouched slots keep their
        current marks.
        """
        for slot in range(len(knowledge)):
            slotk = knowledge[slot]
            if slot in touched:
                prior = slotk.rank_hint if kind == MoveKind.HINT_COLOR else slotk.color_hint
                if prior is None:
                    return slot
            elif not slotk.hinted:
                return slot
        return 0

    @staticmethod
    def _reads_as_save(mask: int, fireworks, discard_counts) -> bool:
        """Whether a hinted slot could, on public counting, be a save target."""
        while mask:
            ident = (mask & -mask).bit_length() - 1
            card = card_from_ident(ident)
            if card.rank == 5 or is_last_live_copy(card, fireworks, discard_counts):
                return True
            mask &= mask - 1
        return False

    def _rule_convention_play(self, obs: Observation, own: HandKnowledge):
        ev = obs.last_event
        if (
            ev is None
            or ev.seat == obs.seat
            or ev.move.kind not in (MoveKind.HINT_COLOR, MoveKind.HINT_RANK)
            or len(ev.touched) != 1
        ):
            return None
        slot = ev.touched[0]
        if slot >= len(own):
            return None
        if slot == self._front_before_hint(obs.own_knowledge, ev.move.kind, ev.touched):
            avail = _board_avail_mask(obs.fireworks, obs.discard_counts)
            public = obs.own_knowledge[slot].mask & avail
            if self._reads_as_save(public, obs.fireworks, obs.discard_counts):
                return None  # protective hint on the card we were about to discard
        mask = own[slot].mask
        if mask and mask & playable_mask(obs.fireworks):
            return Move(MoveKind.PLAY, slot), "convention-play"
        return None

    # -- rule 2: prefer privately-known plays ------------------------------

    def _rule_play_known(self, obs: Observation, own: HandKnowledge):
        playable_slots = [
            slot for slot in range(len(own)) if is_known_playable(own, slot, obs.fireworks)
        ]
        if not playable_slots:
            return None
        avail = _board_avail_mask(obs.fireworks, obs.discard_counts)
        public = HandKnowledge(
            [slotk.copy() for slotk in obs.own_knowledge.slots]
        )
        for slotk in public.slots:
            slotk.mask &= avail
        hidden = [
            slot
            for slot in playable_slots
            if not is_known_playable(public, slot, obs.fireworks)
        ]
        pool = hidden or playable_slots

        def lowest_rank(slot: int) -> int:
            mask = own[slot].mask
            best = 6
            while mask:
                ident = (mask & -mask).bit_length() - 1
                best = min(best, card_from_ident(ident).rank)
                mask &= mask - 1
            return best

        # Lower ranks first: each one unlocks the next link of its suit.
        slot = min(pool, key=lambda s: (lowest_rank(s), s))
        return Move(MoveKind.PLAY, slot), "play-known"

    # -- rule 3: most-marking hint -----------------------------------------

    def _mark_count(self, obs: Observation, kind: MoveKind, value: int, avail: int) -> tuple[int, int]:
        """(# partner playables newly marked, # cards touched) for one hint.

        Returns a large negative mark count for trap hints: a lone touch on a
        non-front unplayable card that would still look playable afterward,
        which the partner's convention would turn into a bombed play.
        """
        if kind == MoveKind.HINT_COLOR:
            touched = tuple(
                i for i, c in enumerate(obs.partner_hand) if c.color == value
            )
        else:
            touched = tuple(i for i, c in enumerate(obs.partner_hand) if c.rank == value)
        if not touched:
            return -1, 0  # empty hints are illegal
        front = self._discard_front(obs.partner_knowledge)
        before = HandKnowledge([s.copy() for s in obs.partner_knowledge.slots])
        after = HandKnowledge([s.copy() for s in obs.partner_knowledge.slots])
        update_on_hint(after, kind, value, touched, obs.turn_index)
        for hand in (before, after):
            for slotk in hand.slots:
                slotk.mask &= avail
        reads_as_play = False
        if len(touched) == 1:
            slot = touched[0]
            reads_as_play = slot != front or not self._reads_as_save(
                after[slot].mask, obs.fireworks, obs.discard_counts
            )
            looks_playable = after[slot].mask & playable_mask(obs.fireworks)
            if (
                reads_as_play
                and looks_playable
                and not card_playable(obs.partner_hand[slot], obs.fireworks)
            ):
                return -9, len(touched)
        marked = 0
        for slot, card in enumerate(obs.partner_hand):
            if not card_playable(card, obs.fireworks):
                continue
            if is_known_playable(before, slot, obs.fireworks):
                continue
            newly_certain = is_known_playable(after, slot, obs.fireworks)
            convention = reads_as_play and touched[0] == slot
            first_touch = slot in touched and not obs.partner_knowledge[slot].hinted
            if newly_certain or convention or first_touch:
                marked += 1
        return marked, len(touched)

    def _rule_marking_hint(self, obs: Observation):
        if obs.hint_tokens <= 0 or not obs.partner_hand:
            return None
        avail = _board_avail_mask(obs.fireworks, obs.discard_counts)
        attr_pref = {"color": (0, 1), "rank": (1, 0)}[self.hint_attribute_order]
        candidates = []
        colors = sorted({c.color for c in obs.partner_hand})
        ranks = sorted({c.rank for c in obs.partner_hand})
        for color in colors:
            marked, touched = self._mark_count(obs, MoveKind.HINT_COLOR, color, avail)
            candidates.append((-marked, touched, attr_pref[0], color, MoveKind.HINT_COLOR))
        for rank in ranks:
            marked, touched = self._mark_count(obs, MoveKind.HINT_RANK, rank, avail)
            candidates.append((-marked, touched, attr_pref[1], rank, MoveKind.HINT_RANK))
        neg_marked, _, _, value, kind = min(candidates)
        if -neg_marked < 1:
            return None
        return Move(kind, value), "marking-hint"

    # -- rule 4: save hint --------------------------------------------------

    def _rule_save_oldest(self, obs: Observation):
        if obs.hint_tokens <= 0 or not obs.partner_hand:
            return None
        front = self._discard_front(obs.partner_knowledge)
        card = obs.partner_hand[front]
        if card.rank != 5 and not is_last_live_copy(card, obs.fireworks, obs.discard_counts):
            return None
        slotk = obs.partner_knowledge[front]
        if slotk.rank_hint is None:
            return Move(MoveKind.HINT_RANK, card.rank), "save-oldest"
        if slotk.color_hint is None:
            return Move(MoveKind.HINT_COLOR, card.color), "save-oldest"
        return None

    def _fallback(self, obs: Observation):
        # Stalling hint: prefer informing the partner's discard-front card,
        # but never stall with a hint the convention would read as a play
        # signal on an unplayable card.
        if obs.hint_tokens > 0 and obs.partner_hand:
            avail = _board_avail_mask(obs.fireworks, obs.discard_counts)
            front = self._discard_front(obs.partner_knowledge)
            card = obs.partner_hand[front]
            slotk = obs.partner_knowledge[front]
            ordered: list[Move] = []
            if slotk.color_hint is None:
                ordered.append(Move(MoveKind.HINT_COLOR, card.color))
            if slotk.rank_hint is None:
                ordered.append(Move(MoveKind.HINT_RANK, card.rank))
            ordered += [
                Move(MoveKind.HINT_COLOR, c) for c in sorted({x.color for x in obs.partner_hand})
            ]
            ordered += [
                Move(MoveKind.HINT_RANK, r) for r in sorted({x.rank for x in obs.partner_hand})
            ]
            seen = set()
            safe = []
            for mv in ordered:
                if (mv.kind, mv.value) in seen:
                    continue
                seen.add((mv.kind, mv.value))
                safe.append(mv)
                marked, _ = self._mark_count(obs, mv.kind, mv.value, avail)
                if marked >= 0:
                    return mv, "fallback-hint"
            return safe[0], "fallback-hint"
        return obs.legal[0], "fallback-first-legal"

    def decide(self, obs: Observation) -> tuple[Move, str]:
        own = self._own(obs)
        for rule in (
            lambda: self._rule_convention_play(obs, own),
            lambda: self._rule_play_known(obs, own),
            lambda: self._rule_marking_hint(obs),
            lambda: self._rule_save_oldest(obs),
            lambda: self._rule_discard(obs, own),
        ):
            hit = rule()
            if hit:
                return hit
        return self._fallback(obs)
