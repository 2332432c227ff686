/**
 * The two questionnaire instruments, with their exact published wording.
 *
 * The post-block instrument rates the block's bot on eight statements
 * (7-point agreement scale, coded 0..6); items B3-B8 sum into the teamwork
 * rating downstream. The post-experiment instrument compares the two bots on
 * seven questions (7-point first-bot..second-bot scale, coded -3..+3).
 * Submission is gated on completeness; partial forms never leave the client.
 */

export const SCALE_POINTS = 7;

export type BlockItemId = "B1" | "B2" | "B3" | "B4" | "B5" | "B6" | "B7" | "B8";
export type FinalItemId = "P1" | "P2" | "P3" | "P4" | "P5" | "P6" | "P7";

export interface SurveyItem<Id extends string> {
  id: Id;
  text: string;
}

export const BLOCK_SURVEY_PREAMBLE =
  "Based on your “actual” games, how would you rate your level of " +
  "agreement with the following statements for games with this bot?";

export const BLOCK_SURVEY_ITEMS: readonly SurveyItem<BlockItemId>[] = [
  { id: "B1", text: "I am playing well" },
  { id: "B2", text: "The bot is playing well" },
  { id: "B3", text: "The bot and I have good teamwork" },
  { id: "B4", text: "I understand the bot’s intentions" },
  { id: "B5", text: "The bot understands my intentions" },
  { id: "B6", text: "I trust the bot to do the right thing" },
  { id: "B7", text: "The bot is predictable" },
  { id: "B8", text: "The team would perform well in a future game" },
];

export const FINAL_SURVEY_ITEMS: readonly SurveyItem<FinalItemId>[] = [
  { id: "P1", text: "Which bot did you prefer playing with?" },
  { id: "P2", text: "Which bot did you trust more?" },
  { id: "P3", text: "Which bot did you understand more?" },
  { id: "P4", text: "Which bot understood you more?" },
  { id: "P5", text: "Which bot was the better Hanabi player?" },
  { id: "P6", text: "Which bot was more predictable?" },
  { id: "P7", text: "Which bot was easier to work with?" },
];

export const BLOCK_SCALE = {
  min: 0,
  max: SCALE_POINTS - 1,
  minAnchor: "Strongly Disagree",
  maxAnchor: "Strongly Agree",
} as const;

export const FINAL_SCALE = {
  min: -3,
  max: 3,
  minAnchor: "Definitely the first bot",
  maxAnchor: "Definitely the second bot",
} as const;

/** The block items whose sum forms the teamwork rating. */
export const RATING_ITEM_IDS: readonly BlockItemId[] = ["B3", "B4", "B5", "B6", "B7", "B8"];

export type BlockResponses = Partial<Record<BlockItemId, number>>;
export type FinalResponses = Partial<Record<FinalItemId, number>>;

export function blockValueValid(value: number): boolean {
  return Number.isInteger(value) && value >= BLOCK_SCALE.min && value <= BLOCK_SCALE.max;
}

export function finalValueValid(value: number): boolean {
  return Number.isInteger(value) && value >= FINAL_SCALE.min && value <= FINAL_SCALE.max;
}

export function blockSurveyComplete(
  responses: BlockResponses,
): responses is Record<BlockItemId, number> {
  return BLOCK_SURVEY_ITEMS.every((item) => {
    const value = responses[item.id];
    return value !== undefined && blockValueValid(value);
  });
}

export function finalSurveyComplete(
  responses: FinalResponses,
): responses is Record<FinalItemId, number> {
  return FINAL_SURVEY_ITEMS.every((item) => {
    const value = responses[item.id];
    return value !== undefined && finalValueValid(value);
  });
}

/** Sum of the B3-B8 agreement codes (0..36 with seven-point 0..6 coding). */
export function teamworkRating(responses: Record<BlockItemId, number>): number {
  return RATING_ITEM_IDS.reduce((sum, id) => sum + responses[id], 0);
}
