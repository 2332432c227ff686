/**
 * HTML renderers. Every function maps a view (plus, for surveys, the draft
 * responses) to a markup string; the app shell swaps the strings into the
 * document and wires events through data attributes.
 *
 * The participant's own cards render face-down with badges showing direct
 * hint marks only. The candidate bitmask the server also sends is for
 * programmatic use and is deliberately never rendered: a human teammate
 * only knows what the hints said.
 */

import type { MoveRow, Observation } from "./api.js";
import { COLORS, hintColorAction, hintRankAction, NUM_RANKS } from "./actions.js";
import {
  canFlagQuestionable,
  canSubmitAction,
  progressLabel,
  slotActions,
  type ClientGameView,
} from "./state.js";
import {
  BLOCK_SCALE,
  BLOCK_SURVEY_ITEMS,
  BLOCK_SURVEY_PREAMBLE,
  blockSurveyComplete,
  FINAL_SCALE,
  FINAL_SURVEY_ITEMS,
  finalSurveyComplete,
  type BlockResponses,
  type FinalResponses,
} from "./surveys.js";

export const QUESTIONABLE_BUTTON_LABEL = "Partner's Last Move was Questionable";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

function attr(on: boolean, name: string): string {
  return on ? ` ${name}` : "";
}

function badges(colorHint: string | null, rankHint: number | null): string {
  const parts: string[] = [];
  if (colorHint !== null) {
    parts.push(`<span class="badge badge-color">${escapeHtml(colorHint)}</span>`);
  }
  if (rankHint !== null) {
    parts.push(`<span class="badge badge-rank">${rankHint}</span>`);
  }
  return parts.join("");
}

function renderFireworks(observation: Observation): string {
  const piles = COLORS.map((color) => {
    const height = observation.fireworks[color] ?? 0;
    return `<div class="pile" data-color="${color}" data-height="${height}">${color} ${height}</div>`;
  });
  return `<section class="fireworks">${piles.join("")}</section>`;
}

function renderCounters(observation: Observation): string {
  return (
    `<section class="counters">` +
    `<span class="counter" data-counter="score">Score ${observation.score}</span>` +
    `<span class="counter" data-counter="hint-tokens">Hints ${observation.hint_tokens}</span>` +
    `<span class="counter" data-counter="bombs">Bombs left ${observation.bombs_remaining}</span>` +
    `<span class="counter" data-counter="deck">Deck ${observation.deck_size}</span>` +
    `</section>`
  );
}

function renderDiscards(observation: Observation): string {
  const chips = observation.discards
    .map((card) => `<span class="discard-chip">${escapeHtml(card)}</span>`)
    .join("");
  return `<section class="discards">${chips}</section>`;
}

/** Slots the bot's hint just touched, when that hint is the newest move. */
function justHintedSlots(view: ClientGameView): Set<number> {
  const last = view.history[view.history.length - 1];
  if (last !== undefined && last.actor === "bot" && last.touched !== null) {
    return new Set(last.touched);
  }
  return new Set();
}

function renderOwnHand(view: ClientGameView, observation: Observation): string {
  const hinted = justHintedSlots(view);
  const cards = observation.own_hand.map((slot, index) => {
    const classes = ["card", "face-down"];
    if (hinted.has(index)) {
      classes.push("just-hinted");
    }
    if (view.selection?.type === "own_slot" && view.selection.slot === index) {
      classes.push("selected");
    }
    return (
      `<div class="${classes.join(" ")}" data-slot="${index}">` +
      badges(slot.color_hint, slot.rank_hint) +
      `</div>`
    );
  });
  return `<section class="own-hand">${cards.join("")}</section>`;
}

function renderPartnerHand(observation: Observation): string {
  const cards = observation.partner_hand.map(
    (slot, index) =>
      `<div class="card face-up" data-slot="${index}" data-card="${escapeHtml(slot.card)}">` +
      `<span class="identity">${escapeHtml(slot.card)}</span>` +
      badges(slot.color_hint, slot.rank_hint) +
      `</div>`,
  );
  return `<section class="partner-hand">${cards.join("")}</section>`;
}

function renderLastBotMove(lastBotMove: MoveRow | null): string {
  if (lastBotMove === null) {
    return `<div class="last-bot-move" data-empty="true">The bot has not moved yet.</div>`;
  }
  const what = escapeHtml(lastBotMove.description);
  const card = lastBotMove.card === null ? "" : ` (${escapeHtml(lastBotMove.card)})`;
  return (
    `<div class="last-bot-move highlight" data-turn="${lastBotMove.turn}">` +
    `Bot, turn ${lastBotMove.turn}: ${what}${card}` +
    `</div>`
  );
}

function renderMoveControls(view: ClientGameView, observation: Observation): string {
  const slotButtons = observation.own_hand
    .map((_slot, index) => {
      const { play, discard } = slotActions(index);
      return (
        `<span class="slot-controls" data-slot="${index}">` +
        `<button data-action="${play}"${attr(!canSubmitAction(view, play), "disabled")}>Play ${index}</button>` +
        `<button data-action="${discard}"${attr(!canSubmitAction(view, discard), "disabled")}>Discard ${index}</button>` +
        `</span>`
      );
    })
    .join("");
  const colorButtons = COLORS.map((color, index) => {
    const id = hintColorAction(index);
    return `<button data-action="${id}"${attr(!canSubmitAction(view, id), "disabled")}>Hint ${color}</button>`;
  }).join("");
  const rankButtons = Array.from({ length: NUM_RANKS }, (_, i) => {
    const id = hintRankAction(i + 1);
    return `<button data-action="${id}"${attr(!canSubmitAction(view, id), "disabled")}>Hint ${i + 1}</button>`;
  }).join("");
  const turn = view.humanTurn ? "Your turn." : "Waiting for the bot.";
  return (
    `<section class="move-controls">` +
    `<div class="turn-indicator">${turn}</div>` +
    `<div class="slot-buttons">${slotButtons}</div>` +
    `<div class="hint-buttons">${colorButtons}${rankButtons}</div>` +
    `</section>`
  );
}

export function renderQuestionableButton(view: ClientGameView): string {
  const disabled = attr(!canFlagQuestionable(view), "disabled");
  return `<button class="questionable"${disabled}>${QUESTIONABLE_BUTTON_LABEL}</button>`;
}

function renderToasts(view: ClientGameView): string {
  const parts: string[] = [];
  if (view.notice !== null) {
    parts.push(`<div class="toast notice">${escapeHtml(view.notice)}</div>`);
  }
  if (view.error !== null) {
    parts.push(`<div class="toast error">${escapeHtml(view.error)}</div>`);
  }
  return parts.join("");
}

function renderSchedule(view: ClientGameView): string {
  const rows = view.schedule
    .map((game) => {
      const current = game.game_index === view.gameIndex ? ` class="current"` : "";
      const score = game.score === null ? "—" : String(game.score);
      const tag = game.test_game ? " (warm-up)" : "";
      return `<li${current}>Game ${game.game_index + 1}, ${escapeHtml(game.bot)} bot${tag}: ${score}</li>`;
    })
    .join("");
  return `<ol class="schedule">${rows}</ol>`;
}

/** The full in-game screen for the current view. */
export function renderBoard(view: ClientGameView): string {
  const observation = view.observation;
  if (observation === null) {
    return (
      `<div class="board" data-phase="${view.phase}">` +
      renderToasts(view) +
      renderSchedule(view) +
      `</div>`
    );
  }
  return (
    `<div class="board" data-phase="${view.phase}" data-turn="${observation.turn}">` +
    `<header class="progress">${escapeHtml(progressLabel(view))}</header>` +
    renderToasts(view) +
    renderCounters(observation) +
    renderFireworks(observation) +
    renderDiscards(observation) +
    `<section class="partner-area"><h2>The bot’s hand</h2>` +
    renderPartnerHand(observation) +
    renderLastBotMove(view.lastBotMove) +
    renderQuestionableButton(view) +
    `</section>` +
    `<section class="own-area"><h2>Your hand</h2>` +
    renderOwnHand(view, observation) +
    renderMoveControls(view, observation) +
    `</section>` +
    renderSchedule(view) +
    `</div>`
  );
}

function likertRow<Id extends string>(
  itemId: Id,
  text: string,
  values: number[],
  picked: number | undefined,
): string {
  const cells = values
    .map(
      (value) =>
        `<label><input type="radio" name="${itemId}" value="${value}"` +
        `${attr(picked === value, "checked")}> ${value}</label>`,
    )
    .join("");
  return (
    `<fieldset class="likert-item" data-item="${itemId}">` +
    `<legend>${escapeHtml(text)}</legend>${cells}</fieldset>`
  );
}

function scaleValues(min: number, max: number): number[] {
  return Array.from({ length: max - min + 1 }, (_, i) => min + i);
}

/** Post-block form: eight agreement items; submit gated on completeness. */
export function renderBlockSurvey(view: ClientGameView, responses: BlockResponses): string {
  const values = scaleValues(BLOCK_SCALE.min, BLOCK_SCALE.max);
  const rows = BLOCK_SURVEY_ITEMS.map((item) =>
    likertRow(item.id, item.text, values, responses[item.id]),
  ).join("");
  const incomplete = !blockSurveyComplete(responses);
  return (
    `<form class="survey block-survey" data-block="${view.block}">` +
    `<p class="preamble">${escapeHtml(BLOCK_SURVEY_PREAMBLE)}</p>` +
    `<p class="anchors">${BLOCK_SCALE.min} = ${escapeHtml(BLOCK_SCALE.minAnchor)}, ` +
    `${BLOCK_SCALE.max} = ${escapeHtml(BLOCK_SCALE.maxAnchor)}</p>` +
    rows +
    `<button type="submit"${attr(incomplete || view.pending, "disabled")}>Submit</button>` +
    `</form>`
  );
}

/** Post-experiment form: seven first-bot/second-bot comparison items. */
export function renderFinalSurvey(view: ClientGameView, responses: FinalResponses): string {
  const values = scaleValues(FINAL_SCALE.min, FINAL_SCALE.max);
  const rows = FINAL_SURVEY_ITEMS.map((item) =>
    likertRow(item.id, item.text, values, responses[item.id]),
  ).join("");
  const incomplete = !finalSurveyComplete(responses);
  return (
    `<form class="survey final-survey">` +
    `<p class="anchors">${FINAL_SCALE.min} = ${escapeHtml(FINAL_SCALE.minAnchor)}, ` +
    `${FINAL_SCALE.max} = ${escapeHtml(FINAL_SCALE.maxAnchor)}</p>` +
    rows +
    `<button type="submit"${attr(incomplete || view.pending, "disabled")}>Submit</button>` +
    `</form>`
  );
}

/** The closing screen once the final survey is in. */
export function renderDone(view: ClientGameView): string {
  return (
    `<div class="done">` +
    `<h2>All games finished — thank you!</h2>` +
    renderSchedule(view) +
    `</div>`
  );
}
