import type {
  MoveRow,
  Observation,
  OwnSlot,
  PartnerSlot,
  SessionPayload,
} from "../src/api.js";

export function ownSlot(overrides: Partial<OwnSlot> = {}): OwnSlot {
  return { color_hint: null, rank_hint: null, hinted: false, candidates: (1 << 25) - 1, ...overrides };
}

export function partnerSlot(card: string, overrides: Partial<PartnerSlot> = {}): PartnerSlot {
  return { card, color_hint: null, rank_hint: null, hinted: false, ...overrides };
}

export function moveRow(overrides: Partial<MoveRow> = {}): MoveRow {
  return {
    turn: 0,
    seat: 0,
    actor: "human",
    action_id: 0,
    description: "discard slot 0",
    card: "Y1",
    touched: null,
    drew: null,
    flagged: false,
    ...overrides,
  };
}

export function observation(overrides: Partial<Observation> = {}): Observation {
  return {
    turn: 2,
    to_move: "human",
    score: 1,
    hint_tokens: 6,
    bombs_remaining: 3,
    deck_size: 38,
    fireworks: { R: 1, Y: 0, G: 0, W: 0, B: 0 },
    discards: ["Y1"],
    own_hand: [
      ownSlot({ color_hint: "G", hinted: true }),
      ownSlot({ rank_hint: 2, hinted: true }),
      ownSlot(),
      ownSlot(),
      ownSlot(),
    ],
    partner_hand: [
      partnerSlot("R2", { rank_hint: 2, hinted: true }),
      partnerSlot("B4"),
      partnerSlot("W1"),
      partnerSlot("G3"),
      partnerSlot("Y5"),
    ],
    legal_action_ids: [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 13, 14, 16, 17, 18, 19],
    ...overrides,
  };
}

export function sessionPayload(overrides: Partial<SessionPayload> = {}): SessionPayload {
  return {
    session_id: "s0001",
    phase: "playing",
    game_index: 1,
    block: 0,
    test_game: false,
    bot: "first",
    schedule: [
      { game_index: 0, block: 0, bot: "first", test_game: true, score: 3, termination: "deck_exhausted" },
      { game_index: 1, block: 0, bot: "first", test_game: false, score: null, termination: null },
    ],
    games_per_block: 4,
    history: [
      moveRow({ turn: 0, seat: 0, actor: "human", action_id: 16, description: "hint rank 2", card: null, touched: [0] }),
      moveRow({ turn: 1, seat: 1, actor: "bot", action_id: 6, description: "play slot 1", card: "R1", drew: "G4" }),
    ],
    observation: observation(),
    ...overrides,
  };
}
