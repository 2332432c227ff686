/**
 * Typed fetch client for the experiment service HTTP/JSON API.
 *
 * Every session-shaped response can be routed through an `onPayload`
 * recorder, which the contract tests use to prove that nothing the client
 * ever receives contains the participant's own card identities.
 */

export type Phase = "playing" | "block_survey" | "final_survey" | "done";
export type Actor = "human" | "bot";

/** Direct hint marks on one card slot; all the participant knows from hints. */
export interface KnowledgeMarks {
  color_hint: string | null;
  rank_hint: number | null;
  hinted: boolean;
}

/** The participant's own slot: hint marks plus a candidate-identity bitmask. */
export interface OwnSlot extends KnowledgeMarks {
  candidates: number;
}

/** A partner slot is face-up: identity string like "R3" plus its hint marks. */
export interface PartnerSlot extends KnowledgeMarks {
  card: string;
}

export interface MoveRow {
  turn: number;
  seat: number;
  actor: Actor;
  action_id: number;
  description: string;
  card: string | null;
  touched: number[] | null;
  drew: string | null;
  flagged: boolean;
}

export interface ScheduleRow {
  game_index: number;
  block: number;
  bot: string;
  test_game: boolean;
  score: number | null;
  termination: string | null;
}

export interface Observation {
  turn: number;
  to_move: Actor;
  score: number;
  hint_tokens: number;
  bombs_remaining: number;
  deck_size: number;
  fireworks: Record<string, number>;
  discards: string[];
  own_hand: OwnSlot[];
  partner_hand: PartnerSlot[];
  legal_action_ids: number[];
}

export interface SessionPayload {
  session_id: string;
  phase: Phase;
  game_index: number;
  block: number;
  test_game: boolean;
  /** Blinded partner label: "first" or "second", never an agent id. */
  bot: string;
  schedule: ScheduleRow[];
  games_per_block: number;
  history: MoveRow[];
  observation: Observation | null;
  /** Move endpoints echo the rows appended by the request. */
  events?: MoveRow[];
}

export interface FlagAck {
  ok: boolean;
  game_index: number;
  turn: number;
}

export interface HealthPayload {
  status: string;
  sessions: number;
}

export interface ExportFlaggedMove {
  turn: number;
  action_id: number;
  label: number;
  label_name: string;
}

export interface ExportGame {
  game_index: number;
  deck_seed: number;
  bot: string;
  test_game: boolean;
  score: number | null;
  termination: string | null;
  n_moves: number;
  flagged_moves: ExportFlaggedMove[];
}

export interface ExportSession {
  session_id: string;
  participant: string;
  phase: Phase;
  block_bots: string[];
  games: ExportGame[];
  block_surveys: Record<string, Record<string, number>>;
  final_survey: Record<string, unknown> | null;
}

export interface ExportBotStats {
  games: number;
  analysis_games: number;
  bot_moves: number;
  flagged_moves: number;
  flag_rate: number;
  flag_label_counts: Record<string, number>;
  attribution_pct: Record<string, number>;
  teamwork_ratings: number[];
  teamwork_rating_mean: number | null;
}

export interface ExportPayload {
  sessions: ExportSession[];
  bots: Record<string, ExportBotStats>;
  rating_items: string[];
  games_per_session: number;
  games_per_block: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export interface ApiClientOptions {
  fetchImpl?: typeof fetch;
  /** Called with every session payload the server returns. */
  onPayload?: (payload: SessionPayload) => void;
}

export class ApiClient {
  private readonly fetchImpl: typeof fetch;
  private readonly onPayload?: (payload: SessionPayload) => void;

  constructor(
    readonly baseUrl: string,
    options: ApiClientOptions = {},
  ) {
    this.fetchImpl = options.fetchImpl ?? fetch;
    this.onPayload = options.onPayload;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const data = (await response.json()) as { detail?: unknown };
        if (data.detail !== undefined) {
          detail = typeof data.detail === "string" ? data.detail : JSON.stringify(data.detail);
        }
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  private async session(method: string, path: string, body?: unknown): Promise<SessionPayload> {
    const payload = await this.request<SessionPayload>(method, path, body);
    this.onPayload?.(payload);
    return payload;
  }

  health(): Promise<HealthPayload> {
    return this.request<HealthPayload>("GET", "/healthz");
  }

  createSession(participant = ""): Promise<SessionPayload> {
    return this.session("POST", "/sessions", { participant });
  }

  getSession(sessionId: string): Promise<SessionPayload> {
    return this.session("GET", `/sessions/${sessionId}`);
  }

  submitMove(sessionId: string, actionId: number): Promise<SessionPayload> {
    return this.session("POST", `/sessions/${sessionId}/move`, { action_id: actionId });
  }

  flagQuestionable(sessionId: string, gameIndex: number, turn: number): Promise<FlagAck> {
    return this.request<FlagAck>("POST", `/sessions/${sessionId}/questionable`, {
      game_index: gameIndex,
      turn,
    });
  }

  submitBlockSurvey(
    sessionId: string,
    block: number,
    items: Record<string, number>,
  ): Promise<SessionPayload> {
    return this.session("POST", `/sessions/${sessionId}/survey/block`, { block, items });
  }

  submitFinalSurvey(
    sessionId: string,
    answers: Record<string, unknown>,
  ): Promise<SessionPayload> {
    return this.session("POST", `/sessions/${sessionId}/survey/final`, { answers });
  }

  exportDataset(): Promise<ExportPayload> {
    return this.request<ExportPayload>("GET", "/export");
  }
}
