"""Agent protocol, shared board-reasoning helpers, and the random baseline."""

from __future__ import annotations

import random
from typing import ClassVar

from ..cards import Card, Move, copies_of_ident
from ..engine import Observation
from ..knowledge import HandKnowledge, apply_card_counting, playable_mask


class Agent:
    """A policy for one seat.

    Instances are reset per game with the deck seed and seat; `act` must be
    deterministic given (algo, params, instance_seed, deck_seed, seat) and the
    observation stream. `seeded` declares whether distinct instance seeds
    produce distinct behavior, which decides intra-algorithm cross-play
    applicability downstream.
    """

    algo: ClassVar[str] = "?"
    seeded: ClassVar[bool] = False

    def __init__(self, instance_seed: int = 0):
        self.instance_seed = instance_seed

    def reset(self, deck_seed: int, seat: int) -> None:
        pass

    def act(self, obs: Observation) -> Move:
        raise NotImplementedError

    def close(self) -> None:
        pass


def card_playable(card: Card, fireworks: tuple[int, ...]) -> bool:
    return fireworks[card.color] == card.rank - 1


def still_needed(card: Card, fireworks: tuple[int, ...], discard_counts: tuple[int, ...]) -> bool:
    """Could this card still score, i.e. is its pile able to reach its rank?"""
    if fireworks[card.color] >= card.rank:
        return False
    for rank in range(fireworks[card.color] + 1, card.rank):
        below = Card(card.color, rank)
        if discard_counts[below.ident] >= copies_of_ident(below.ident):
            return False
    return True


def is_last_live_copy(
    card: Card, fireworks: tuple[int, ...], discard_counts: tuple[int, ...]
) -> bool:
    """The only remaining copy of a card that is still needed."""
    remaining = copies_of_ident(card.ident) - discard_counts[card.ident]
    return remaining == 1 and still_needed(card, fireworks, discard_counts)


def counting_knowledge(obs: Observation) -> HandKnowledge:
    """The viewer's own knowledge refined by card counting over its view."""
    return apply_card_counting(obs.own_knowledge, obs.public_view())


class RandomBot(Agent):
    """Uniform choice over the legal moves; the scoring floor of the pool."""

    algo = "random"
    seeded = True

    def reset(self, deck_seed: int, seat: int) -> None:
        # String seeding hashes via SHA-512, stable across platforms.
        self._rng = random.Random(f"random:{self.instance_seed}:{deck_seed}:{seat}")

    def act(self, obs: Observation) -> Move:
        return self._rng.choice(obs.legal)
