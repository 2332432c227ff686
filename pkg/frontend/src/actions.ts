/**
 * Action-id codec shared with the server.
 *
 * Ids 0-4 discard own slot, 5-9 play own slot, 10-14 hint a color (in
 * canonical color order), 15-19 hint a rank (1-5).
 */

export const COLORS = ["R", "Y", "G", "W", "B"] as const;
export type Color = (typeof COLORS)[number];

export const HAND_SIZE = 5;
export const NUM_RANKS = 5;
export const NUM_ACTIONS = 20;

export type ActionKind = "discard" | "play" | "hint_color" | "hint_rank";

export interface ActionSpec {
  kind: ActionKind;
  /** Slot index for discard/play, color index for hint_color, rank for hint_rank. */
  value: number;
}

export function discardAction(slot: number): number {
  checkRange(slot, 0, HAND_SIZE - 1, "slot");
  return slot;
}

export function playAction(slot: number): number {
  checkRange(slot, 0, HAND_SIZE - 1, "slot");
  return 5 + slot;
}

export function hintColorAction(colorIndex: number): number {
  checkRange(colorIndex, 0, COLORS.length - 1, "color index");
  return 10 + colorIndex;
}

export function hintRankAction(rank: number): number {
  checkRange(rank, 1, NUM_RANKS, "rank");
  return 15 + rank - 1;
}

export function decodeAction(actionId: number): ActionSpec {
  checkRange(actionId, 0, NUM_ACTIONS - 1, "action id");
  const group = Math.floor(actionId / 5);
  const offset = actionId % 5;
  switch (group) {
    case 0:
      return { kind: "discard", value: offset };
    case 1:
      return { kind: "play", value: offset };
    case 2:
      return { kind: "hint_color", value: offset };
    default:
      return { kind: "hint_rank", value: offset + 1 };
  }
}

/** Human-readable move text; matches the server's description format. */
export function describeAction(actionId: number): string {
  const { kind, value } = decodeAction(actionId);
  switch (kind) {
    case "discard":
      return `discard slot ${value}`;
    case "play":
      return `play slot ${value}`;
    case "hint_color":
      return `hint color ${COLORS[value]}`;
    case "hint_rank":
      return `hint rank ${value}`;
  }
}

/** Parse an identity string like "R3" into its color index and rank. */
export function parseCard(card: string): { colorIndex: number; rank: number } {
  const colorIndex = COLORS.indexOf(card[0] as Color);
  const rank = Number(card.slice(1));
  if (colorIndex < 0 || !(rank >= 1 && rank <= NUM_RANKS)) {
    throw new Error(`not a card identity: ${card}`);
  }
  return { colorIndex, rank };
}

/** Bit position of an identity in a candidates bitmask. */
export function cardBit(colorIndex: number, rank: number): number {
  return colorIndex * NUM_RANKS + rank - 1;
}

function checkRange(value: number, lo: number, hi: number, what: string): void {
  if (!Number.isInteger(value) || value < lo || value > hi) {
    throw new Error(`${what} out of range: ${value}`);
  }
}
