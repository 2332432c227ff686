/**
 * Client view model.
 *
 * A `ClientGameView` is derived from the last server response by a pure
 * function; local interaction state (the picked slot or hint, the pending
 * flag, transient notices) lives alongside it and is reset whenever a fresh
 * response arrives. Nothing here mutates: every transition returns a new
 * view, so rendering is always a function of one value.
 */

import type { MoveRow, Observation, Phase, ScheduleRow, SessionPayload } from "./api.js";
import { discardAction, playAction } from "./actions.js";

/** What the participant has picked so far while composing a move. */
export type Selection =
  | { type: "own_slot"; slot: number }
  | { type: "hint_color"; colorIndex: number }
  | { type: "hint_rank"; rank: number };

export interface ClientGameView {
  sessionId: string;
  phase: Phase;
  gameIndex: number;
  block: number;
  testGame: boolean;
  /** Blinded partner label ("first"/"second"). */
  botLabel: string;
  gamesPerBlock: number;
  schedule: ScheduleRow[];
  history: MoveRow[];
  observation: Observation | null;
  /** The bot's most recent move this game, if any. */
  lastBotMove: MoveRow | null;
  humanTurn: boolean;
  legalActionIds: number[];
  /** True while a request is in flight; all inputs are disabled. */
  pending: boolean;
  selection: Selection | null;
  /** Transient acknowledgment (flag recorded, survey stored, ...). */
  notice: string | null;
  /** Surfaced request error, if the last request was rejected. */
  error: string | null;
}

/** Build the view for a server response. Pure: same payload, same view. */
export function viewFromPayload(payload: SessionPayload): ClientGameView {
  const observation = payload.observation;
  const humanTurn =
    payload.phase === "playing" && observation !== null && observation.to_move === "human";
  return {
    sessionId: payload.session_id,
    phase: payload.phase,
    gameIndex: payload.game_index,
    block: payload.block,
    testGame: payload.test_game,
    botLabel: payload.bot,
    gamesPerBlock: payload.games_per_block,
    schedule: payload.schedule,
    history: payload.history,
    observation,
    lastBotMove: lastBotMove(payload.history),
    humanTurn,
    legalActionIds: observation === null ? [] : observation.legal_action_ids,
    pending: false,
    selection: null,
    notice: null,
    error: null,
  };
}

function lastBotMove(history: MoveRow[]): MoveRow | null {
  for (let i = history.length - 1; i >= 0; i--) {
    const row = history[i]!;
    if (row.actor === "bot") {
      return row;
    }
  }
  return null;
}

export function withSelection(view: ClientGameView, selection: Selection | null): ClientGameView {
  return { ...view, selection, error: null };
}

export function withPending(view: ClientGameView): ClientGameView {
  return { ...view, pending: true };
}

export function withNotice(view: ClientGameView, notice: string): ClientGameView {
  return { ...view, notice };
}

export function withError(view: ClientGameView, error: string): ClientGameView {
  return { ...view, pending: false, error };
}

export function isLegal(view: ClientGameView, actionId: number): boolean {
  return view.legalActionIds.includes(actionId);
}

/** Whether an action may be submitted right now (legal, our turn, idle). */
export function canSubmitAction(view: ClientGameView, actionId: number): boolean {
  return view.humanTurn && !view.pending && isLegal(view, actionId);
}

/** The questionable button is live once the bot has moved this game. */
export function canFlagQuestionable(view: ClientGameView): boolean {
  return view.lastBotMove !== null && !view.pending;
}

/** Play/discard ids for one own slot, for rendering per-card controls. */
export function slotActions(slot: number): { play: number; discard: number } {
  return { play: playAction(slot), discard: discardAction(slot) };
}

export function gamesPerSession(view: ClientGameView): number {
  return view.schedule.length;
}

/** One-line progress caption, e.g. "Game 3 of 8 — second bot (warm-up)". */
export function progressLabel(view: ClientGameView): string {
  const total = gamesPerSession(view);
  const base = `Game ${view.gameIndex + 1} of ${total} — ${view.botLabel} bot`;
  return view.testGame ? `${base} (warm-up)` : base;
}
