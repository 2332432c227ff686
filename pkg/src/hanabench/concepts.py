"""Decision-context predicates and the context-independence metric.

Each decision point is summarized by a fixed pool of boolean atoms
(categorical features one-hot per bin) packed into an integer recorded in the
trace. Concepts are random AND/OR formulas over those atoms, with optional
NOT on leaves, sampled up to a tree depth of 3. Context independence for an
agent over a set of decision points is

    CI = mean over non-vacuous concepts c of  p(m_c | c) * p(c | m_c)

where m_c is the agent's modal action id among points satisfying c,
p(m_c | c) is that mode's share, and p(c | m_c) is the concept's share among
points where the agent chose m_c. CI is 1 exactly when concepts and actions
pair off deterministically; vacuous concepts (never true) are dropped and
counted.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .cards import MoveKind
from .engine import Observation
from .knowledge import apply_card_counting, is_known_playable

# Atom layout. Categorical features contribute one atom per bin; bins
# partition the range, so exactly one bin atom per feature is true.
ATOM_NAMES: tuple[str, ...] = (
    "hint_tokens_is_0",
    "hint_tokens_1_to_3",
    "hint_tokens_4_to_7",
    "hint_tokens_is_8",
    "bombs_remaining_is_1",
    "bombs_remaining_is_2",
    "bombs_remaining_is_3",
    "deck_size_is_0",
    "deck_size_1_to_9",
    "deck_size_10_to_29",
    "deck_size_30_to_40",
    "partner_holds_known_playable",
    "partner_last_move_was_play",
    "partner_last_move_was_discard",
    "partner_last_move_was_color_hint",
    "partner_last_move_was_rank_hint",
    "own_newest_card_just_hinted",
    "own_hand_has_known_playable",
    "own_oldest_card_unhinted",
    "fireworks_total_0_to_5",
    "fireworks_total_6_to_15",
    "fireworks_total_16_to_25",
    "last_played_card_was_rank_1",
)
NUM_ATOMS = len(ATOM_NAMES)
_IDX = {name: i for i, name in enumerate(ATOM_NAMES)}


def _bin_bit(value: int, edges: tuple[tuple[int, int, str], ...]) -> int:
    for lo, hi, name in edges:
        if lo <= value <= hi:
            return 1 << _IDX[name]
    raise ValueError(f"value {value} outside bins {edges}")


def _hand_has_known_playable(knowledge, fireworks) -> bool:
    return any(is_known_playable(knowledge, s, fireworks) for s in range(len(knowledge)))


def encode_context(
    obs: Observation, partner_obs: Observation | None = None, counting: bool = True
) -> int:
    """Pack the atom pool for one decision point into an int.

    `obs` is the acting seat's observation. `partner_obs` (the partner's view
    of the same state) lets the partner-knowledge atom use the partner's true
    card-counting view; without it the atom falls back to the partner's
    hint-only knowledge, which any seat can reconstruct.
    """
    bits = _bin_bit(
        obs.hint_tokens,
        (
            (0, 0, "hint_tokens_is_0"),
            (1, 3, "hint_tokens_1_to_3"),
            (4, 7, "hint_tokens_4_to_7"),
            (8, 8, "hint_tokens_is_8"),
        ),
    )
    bits |= _bin_bit(
        obs.bombs_remaining,
        (
            (1, 1, "bombs_remaining_is_1"),
            (2, 2, "bombs_remaining_is_2"),
            (3, 3, "bombs_remaining_is_3"),
        ),
    )
    bits |= _bin_bit(
        obs.deck_size,
        (
            (0, 0, "deck_size_is_0"),
            (1, 9, "deck_size_1_to_9"),
            (10, 29, "deck_size_10_to_29"),
            (30, 40, "deck_size_30_to_40"),
        ),
    )
    bits |= _bin_bit(
        sum(obs.fireworks),
        (
            (0, 5, "fireworks_total_0_to_5"),
            (6, 15, "fireworks_total_6_to_15"),
            (16, 25, "fireworks_total_16_to_25"),
        ),
    )

    own = apply_card_counting(obs.own_knowledge, obs.public_view()) if counting else obs.own_knowledge
    if _hand_has_known_playable(own, obs.fireworks):
        bits |= 1 << _IDX["own_hand_has_known_playable"]
    if len(own) and not own[0].hinted:
        bits |= 1 << _IDX["own_oldest_card_unhinted"]

    if partner_obs is not None and counting:
        partner = apply_card_counting(partner_obs.own_knowledge, partner_obs.public_view())
    elif partner_obs is not None:
        partner = partner_obs.own_knowledge
    else:
        partner = obs.partner_knowledge
    if _hand_has_known_playable(partner, obs.fireworks):
        bits |= 1 << _IDX["partner_holds_known_playable"]

    ev = obs.last_event
    if ev is not None and ev.seat != obs.seat:
        kind_atom = {
            MoveKind.PLAY: "partner_last_move_was_play",
            MoveKind.DISCARD: "partner_last_move_was_discard",
            MoveKind.HINT_COLOR: "partner_last_move_was_color_hint",
            MoveKind.HINT_RANK: "partner_last_move_was_rank_hint",
        }[ev.move.kind]
        bits |= 1 << _IDX[kind_atom]
        if (
            ev.move.kind in (MoveKind.HINT_COLOR, MoveKind.HINT_RANK)
            and len(own) > 0
            and (len(own) - 1) in ev.touched
        ):
            bits |= 1 << _IDX["own_newest_card_just_hinted"]

    if obs.last_played_rank == 1:
        bits |= 1 << _IDX["last_played_card_was_rank_1"]
    return bits


def context_matrix(ctx_bits: list[int] | np.ndarray) -> np.ndarray:
    """Unpack packed atom ints into an (n_points, NUM_ATOMS) boolean matrix."""
    arr = np.asarray(ctx_bits, dtype=np.int64)
    shifts = np.arange(NUM_ATOMS, dtype=np.int64)
    return (arr[:, None] >> shifts[None, :] & 1).astype(bool)


# -- concept formulas ---------------------------------------------------------


@dataclass(frozen=True)
class ConceptFormula:
    """An AND/OR tree over atoms; leaves are (atom_index, negated) pairs.

    Nodes are encoded as nested tuples: ("atom", index, negated) or
    (op, left, right) with op in {"and", "or"}.
    """

    root: tuple

    @property
    def depth(self) -> int:
        def d(node) -> int:
            if node[0] == "atom":
                return 1
            return 1 + max(d(node[1]), d(node[2]))

        return d(self.root)

    def key(self) -> str:
        """Canonical form: commutative children sorted, for deduplication."""

        def canon(node) -> str:
            if node[0] == "atom":
                return f"{'!' if node[2] else ''}a{node[1]}"
            parts = sorted((canon(node[1]), canon(node[2])))
            return f"({parts[0]} {node[0]} {parts[1]})"

        return canon(self.root)

    def describe(self) -> str:
        def text(node) -> str:
            if node[0] == "atom":
                return ("not " if node[2] else "") + ATOM_NAMES[node[1]]
            return f"({text(node[1])} {node[0]} {text(node[2])})"

        return text(self.root)

    def evaluate(self, ctx_bits: int) -> bool:
        def ev(node) -> bool:
            if node[0] == "atom":
                val = bool(ctx_bits >> node[1] & 1)
                return not val if node[2] else val
            if node[0] == "and":
                return ev(node[1]) and ev(node[2])
            return ev(node[1]) or ev(node[2])

        return ev(self.root)

    def evaluate_batch(self, atoms: np.ndarray) -> np.ndarray:
        """Vectorized evaluation over an (n_points, NUM_ATOMS) bool matrix."""

        def ev(node) -> np.ndarray:
            if node[0] == "atom":
                col = atoms[:, node[1]]
                return ~col if node[2] else col
            if node[0] == "and":
                return ev(node[1]) & ev(node[2])
            return ev(node[1]) | ev(node[2])

        return ev(self.root)

    def to_dict(self) -> dict:
        return {"key": self.key(), "text": self.describe(), "tree": self.root}


def sample_concept_formulas(
    count: int = 500,
    max_depth: int = 3,
    seed: int = 0,
    n_atoms: int = NUM_ATOMS,
) -> list[ConceptFormula]:
    """Sample `count` distinct formulas (by canonical form), deterministically."""
    if n_atoms < 1:
        raise ValueError("empty atom pool")
    rng = random.Random(f"concepts:{seed}")

    def grow(depth_left: int) -> tuple:
        if depth_left <= 1 or rng.random() < 1 / 3:
            return ("atom", rng.randrange(n_atoms), rng.random() < 0.5)
        op = "and" if rng.random() < 0.5 else "or"
        return (op, grow(depth_left - 1), grow(depth_left - 1))

    out: list[ConceptFormula] = []
    seen: set[str] = set()
    attempts = 0
    limit = 200 * count
    while len(out) < count:
        attempts += 1
        if attempts > limit:
            raise ValueError(
                f"could not sample {count} distinct formulas from {n_atoms} atoms "
                f"at depth {max_depth} ({len(out)} found)"
            )
        formula = ConceptFormula(grow(max_depth))
        k = formula.key()
        if k in seen:
            continue
        seen.add(k)
        out.append(formula)
    return out


# -- context independence -------------------------------------------------------


@dataclass(frozen=True)
class CIResult:
    value: float
    n_concepts: int
    n_vacuous: int


def context_independence(
    action_ids: np.ndarray,
    atoms: np.ndarray,
    formulas: list[ConceptFormula],
    n_actions: int = 20,
) -> CIResult:
    """Plug-in CI over one set of decision points (one agent, one trace block)."""
    action_ids = np.asarray(action_ids, dtype=np.int64)
    if action_ids.ndim != 1 or atoms.shape[0] != action_ids.shape[0]:
        raise ValueError("action ids and atom matrix must align")
    if action_ids.size == 0:
        return CIResult(float("nan"), 0, len(formulas))
    total = 0.0
    active = 0
    vacuous = 0
    # Per-action masks reused across formulas.
    action_masks = [action_ids == m for m in range(n_actions)]
    action_counts = np.array([m.sum() for m in action_masks], dtype=np.int64)
    for formula in formulas:
        sat = formula.evaluate_batch(atoms)
        n_sat = int(sat.sum())
        if n_sat == 0:
            vacuous += 1
            continue
        counts = np.bincount(action_ids[sat], minlength=n_actions)
        mode = int(np.argmax(counts))  # ties resolve to the lowest action id
        p_m_given_c = counts[mode] / n_sat
        p_c_given_m = int(sat[action_masks[mode]].sum()) / int(action_counts[mode])
        total += p_m_given_c * p_c_given_m
        active += 1
    value = total / active if active else float("nan")
    return CIResult(value, active, vacuous)
