"""The rule-bot ladder: certain plays, playable hints, then safe-ish discards.

Each bot is the previous one plus a refinement:

* SimpleBot: play a known-playable card; hint the partner's lowest-index
  playable card an attribute it lacks (color before rank); discard the oldest
  unhinted card, else the oldest.
* ValueBot: additionally save-hints the partner's oldest unhinted card when it
  is the last live copy of a still-needed card, and refuses to discard a card
  it knows to be such a last copy while an alternative discard exists.
* HolmesBot: ValueBot plus card counting on its own hand and a risk rule that
  plays the best non-certain card once its playability probability (uniform
  over remaining candidates) reaches `theta`, while two bombs remain.

Decisions are exposed as (move, rule-name) pairs via `decide` so tests can
check which rule fired.
"""

from __future__ import annotations

from ..cards import Move, MoveKind, card_from_ident
from ..engine import Observation
from ..knowledge import (
    HandKnowledge,
    is_known_playable,
    playable_mask,
)
from .base import Agent, card_playable, counting_knowledge, is_last_live_copy


class SimpleBot(Agent):
    algo = "simple"
    uses_counting = False

    # -- knowledge --------------------------------------------------------

    def _own(self, obs: Observation) -> HandKnowledge:
        if self.uses_counting:
            return counting_knowledge(obs)
        return obs.own_knowledge

    # -- rules ------------------------------------------------------------

    def _rule_play_known(self, obs: Observation, own: HandKnowledge):
        for slot in range(len(own)):
            if is_known_playable(own, slot, obs.fireworks):
                return Move(MoveKind.PLAY, slot), "play-known"
        return None

    def _rule_hint_playable(self, obs: Observation):
        if obs.hint_tokens <= 0:
            return None
        for slot, card in enumerate(obs.partner_hand):
            if not card_playable(card, obs.fireworks):
                continue
            slotk = obs.partner_knowledge[slot]
            if slotk.color_hint is None:
                return Move(MoveKind.HINT_COLOR, card.color), "hint-playable-color"
            if slotk.rank_hint is None:
                return Move(MoveKind.HINT_RANK, card.rank), "hint-playable-rank"
        return None

    def _can_discard(self, obs: Observation) -> bool:
        return any(m.kind == MoveKind.DISCARD for m in obs.legal)

    def _discard_order(self, obs: Observation, own: HandKnowledge) -> list[tuple[int, str]]:
        """Slots in discard preference order with the rule each came from."""
        unhinted = [i for i in range(len(own)) if not own[i].hinted]
        ordered = [(i, "discard-unhinted") for i in unhinted]
        ordered += [(i, "discard-oldest") for i in range(len(own)) if i not in unhinted]
        return ordered

    def _rule_discard(self, obs: Observation, own: HandKnowledge):
        if not self._can_discard(obs) or not len(own):
            return None
        slot, rule = self._discard_order(obs, own)[0]
        return Move(MoveKind.DISCARD, slot), rule

    def _fallback(self, obs: Observation):
        # Max tokens, nothing certain to play, nothing playable to hint:
        # the priority list bottoms out, so give a safe filler hint.
        if obs.hint_tokens > 0 and obs.partner_hand:
            card = obs.partner_hand[0]
            slotk = obs.partner_knowledge[0]
            if slotk.color_hint is None:
                return Move(MoveKind.HINT_COLOR, card.color), "fallback-hint"
            if slotk.rank_hint is None:
                return Move(MoveKind.HINT_RANK, card.rank), "fallback-hint"
            return Move(MoveKind.HINT_COLOR, card.color), "fallback-hint"
        return obs.legal[0], "fallback-first-legal"

    def decide(self, obs: Observation) -> tuple[Move, str]:
        own = self._own(obs)
        for rule in (
            lambda: self._rule_play_known(obs, own),
            lambda: self._rule_hint_playable(obs),
            lambda: self._rule_discard(obs, own),
        ):
            hit = rule()
            if hit:
                return hit
        return self._fallback(obs)

    def act(self, obs: Observation) -> Move:
        return self.decide(obs)[0]


class ValueBot(SimpleBot):
    algo = "value"

    def _rule_save_hint(self, obs: Observation):
        if obs.hint_tokens <= 0:
            return None
        for slot, card in enumerate(obs.partner_hand):
            if obs.partner_knowledge[slot].hinted:
                continue
            # Oldest unhinted card: save it if it is irreplaceable.
            if is_last_live_copy(card, obs.fireworks, obs.discard_counts):
                return Move(MoveKind.HINT_RANK, card.rank), "save-hint"
            return None
        return None

    def _known_last_copy(self, own: HandKnowledge, slot: int, obs: Observation) -> bool:
        """Every candidate identity is the last live copy of a needed card."""
        mask = own[slot].mask
        if mask == 0:
            return False
        ident = 0
        while mask:
            if mask & 1 and not is_last_live_copy(
                card_from_ident(ident), obs.fireworks, obs.discard_counts
            ):
                return False
            mask >>= 1
            ident += 1
        return True

    def _discard_order(self, obs: Observation, own: HandKnowledge) -> list[tuple[int, str]]:
        ordered = super()._discard_order(obs, own)
        safe = [(i, rule) for i, rule in ordered if not self._known_last_copy(own, i, obs)]
        precious = [(i, rule) for i, rule in ordered if (i, rule) not in safe]
        # Last-copy cards go to the back: discarded only without alternatives.
        return safe + [(i, "discard-forced") for i, _ in precious]

    def decide(self, obs: Observation) -> tuple[Move, str]:
        own = self._own(obs)
        for rule in (
            lambda: self._rule_play_known(obs, own),
            lambda: self._rule_hint_playable(obs),
            lambda: self._rule_save_hint(obs),
            lambda: self._rule_discard(obs, own),
        ):
            hit = rule()
            if hit:
                return hit
        return self._fallback(obs)


class HolmesBot(ValueBot):
    algo = "holmes"
    uses_counting = True

    def __init__(self, instance_seed: int = 0, theta: float = 0.6):
        super().__init__(instance_seed)
        self.theta = theta

    def _rule_risk_play(self, obs: Observation, own: HandKnowledge):
        if obs.bombs_remaining < 2:
            return None
        play = playable_mask(obs.fireworks)
        best_slot, best_p = None, 0.0
        for slot in range(len(own)):
            mask = own[slot].mask
            total = mask.bit_count()
            if total == 0:
                continue
            p = (mask & play).bit_count() / total
            if p > best_p:
                best_slot, best_p = slot, p
        if best_slot is not None and best_p >= self.theta:
            return Move(MoveKind.PLAY, best_slot), "risk-play"
        return None

    def decide(self, obs: Observation) -> tuple[Move, str]:
        own = self._own(obs)
        for rule in (
            lambda: self._rule_play_known(obs, own),
            lambda: self._rule_risk_play(obs, own),
            lambda: self._rule_hint_playable(obs),
            lambda: self._rule_save_hint(obs),
            lambda: self._rule_discard(obs, own),
        ):
            hit = rule()
            if hit:
                return hit
        return self._fallback(obs)
