/**
 * Session controller: the bridge between the view model and the API client.
 *
 * One rule above all: at most one request per session is ever in flight.
 * While a request is pending every further submission is suppressed
 * client-side (the specified double-submit behavior), and every outcome is
 * explicit — a fresh view, a suppression, or a surfaced rejection. Server
 * errors are never swallowed; they land in `view.error`.
 */

import { ApiClient, ApiError, type SessionPayload } from "./api.js";
import {
  canFlagQuestionable,
  canSubmitAction,
  viewFromPayload,
  withError,
  withNotice,
  withPending,
  type ClientGameView,
} from "./state.js";
import {
  blockSurveyComplete,
  finalSurveyComplete,
  type BlockResponses,
  type FinalResponses,
} from "./surveys.js";

export type SubmitResult =
  | { status: "ok"; view: ClientGameView }
  /** Dropped client-side because a request was already pending. */
  | { status: "suppressed" }
  /** Blocked client-side (illegal move, incomplete form) or server-rejected. */
  | { status: "rejected"; reason: string };

export const FLAG_ACK_NOTICE = "Feedback recorded. The bot's play is not affected.";

export class SessionController {
  view: ClientGameView | null = null;

  private inFlight = false;

  constructor(
    readonly client: ApiClient,
    private readonly onChange: (view: ClientGameView) => void = () => {},
  ) {}

  private setView(view: ClientGameView): void {
    this.view = view;
    this.onChange(view);
  }

  /** Run one request, enforcing the single-in-flight rule. */
  private async exchange(
    work: () => Promise<SessionPayload>,
    notice?: string,
  ): Promise<SubmitResult> {
    if (this.inFlight) {
      return { status: "suppressed" };
    }
    this.inFlight = true;
    if (this.view !== null) {
      this.setView(withPending(this.view));
    }
    try {
      let next = viewFromPayload(await work());
      if (notice !== undefined) {
        next = withNotice(next, notice);
      }
      this.setView(next);
      return { status: "ok", view: next };
    } catch (error) {
      const reason = error instanceof ApiError ? error.detail : String(error);
      if (this.view !== null) {
        this.setView(withError(this.view, reason));
      }
      return { status: "rejected", reason };
    } finally {
      this.inFlight = false;
    }
  }

  start(participant = ""): Promise<SubmitResult> {
    return this.exchange(() => this.client.createSession(participant));
  }

  refresh(): Promise<SubmitResult> {
    const view = this.view;
    if (view === null) {
      return Promise.resolve({ status: "rejected", reason: "no session" });
    }
    return this.exchange(() => this.client.getSession(view.sessionId));
  }

  /** Post one play/discard/hint. Illegal selections never reach the wire. */
  submitAction(actionId: number): Promise<SubmitResult> {
    const view = this.view;
    if (view === null) {
      return Promise.resolve({ status: "rejected", reason: "no session" });
    }
    if (this.inFlight) {
      return Promise.resolve({ status: "suppressed" });
    }
    if (!canSubmitAction(view, actionId)) {
      return Promise.resolve({ status: "rejected", reason: "not a legal move right now" });
    }
    return this.exchange(() => this.client.submitMove(view.sessionId, actionId));
  }

  /**
   * Flag the bot's most recent move as questionable. Allowed repeatedly;
   * each click is logged server-side. Gameplay is unaffected, so the session
   * is simply re-fetched for the flag marker.
   */
  flagQuestionable(): Promise<SubmitResult> {
    const view = this.view;
    if (view === null) {
      return Promise.resolve({ status: "rejected", reason: "no session" });
    }
    if (this.inFlight) {
      return Promise.resolve({ status: "suppressed" });
    }
    if (!canFlagQuestionable(view)) {
      return Promise.resolve({ status: "rejected", reason: "the bot has not moved yet" });
    }
    const target = view.lastBotMove!;
    return this.exchange(async () => {
      await this.client.flagQuestionable(view.sessionId, view.gameIndex, target.turn);
      return this.client.getSession(view.sessionId);
    }, FLAG_ACK_NOTICE);
  }

  /** Submit the post-block form; incomplete forms never leave the client. */
  submitBlockSurvey(responses: BlockResponses): Promise<SubmitResult> {
    const view = this.view;
    if (view === null) {
      return Promise.resolve({ status: "rejected", reason: "no session" });
    }
    if (view.phase !== "block_survey") {
      return Promise.resolve({ status: "rejected", reason: "no block survey is due" });
    }
    if (!blockSurveyComplete(responses)) {
      return Promise.resolve({ status: "rejected", reason: "please answer every item" });
    }
    return this.exchange(
      () => this.client.submitBlockSurvey(view.sessionId, view.block, responses),
      "Survey recorded.",
    );
  }

  /** Submit the post-experiment comparison form. */
  submitFinalSurvey(responses: FinalResponses): Promise<SubmitResult> {
    const view = this.view;
    if (view === null) {
      return Promise.resolve({ status: "rejected", reason: "no session" });
    }
    if (view.phase !== "final_survey") {
      return Promise.resolve({ status: "rejected", reason: "the final survey is not due yet" });
    }
    if (!finalSurveyComplete(responses)) {
      return Promise.resolve({ status: "rejected", reason: "please answer every item" });
    }
    return this.exchange(
      () => this.client.submitFinalSurvey(view.sessionId, responses),
      "All done — thank you!",
    );
  }
}
