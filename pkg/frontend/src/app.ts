/**
 * DOM shell: renders the current view into a root element and translates
 * DOM events into controller calls. All game logic lives in the controller
 * and the pure renderers; this file only swaps markup and reads inputs.
 */

import { ApiClient } from "./api.js";
import { renderBlockSurvey, renderBoard, renderDone, renderFinalSurvey } from "./board.js";
import { SessionController } from "./controller.js";
import type { ClientGameView } from "./state.js";
import type {
  BlockItemId,
  BlockResponses,
  FinalItemId,
  FinalResponses,
} from "./surveys.js";

export class App {
  readonly controller: SessionController;

  private blockDraft: BlockResponses = {};
  private finalDraft: FinalResponses = {};
  private draftKey = "";

  constructor(
    private readonly root: HTMLElement,
    baseUrl: string,
  ) {
    const client = new ApiClient(baseUrl);
    this.controller = new SessionController(client, (view) => this.render(view));
    this.bindEvents();
  }

  start(participant = ""): Promise<unknown> {
    return this.controller.start(participant);
  }

  private render(view: ClientGameView): void {
    const key = `${view.phase}:${view.block}`;
    if (key !== this.draftKey) {
      this.draftKey = key;
      this.blockDraft = {};
      this.finalDraft = {};
    }
    switch (view.phase) {
      case "playing":
        this.root.innerHTML = renderBoard(view);
        break;
      case "block_survey":
        this.root.innerHTML = renderBoard(view) + renderBlockSurvey(view, this.blockDraft);
        break;
      case "final_survey":
        this.root.innerHTML = renderBoard(view) + renderFinalSurvey(view, this.finalDraft);
        break;
      case "done":
        this.root.innerHTML = renderDone(view);
        break;
    }
  }

  private bindEvents(): void {
    this.root.addEventListener("click", (event) => {
      const target = event.target as HTMLElement;
      const actionAttr = target.closest("[data-action]")?.getAttribute("data-action");
      if (actionAttr !== undefined && actionAttr !== null) {
        void this.controller.submitAction(Number(actionAttr));
        return;
      }
      if (target.closest(".questionable") !== null) {
        void this.controller.flagQuestionable();
      }
    });

    this.root.addEventListener("change", (event) => {
      const input = event.target as HTMLInputElement;
      if (input.type !== "radio") {
        return;
      }
      const form = input.closest("form.survey");
      if (form === null) {
        return;
      }
      const value = Number(input.value);
      if (form.classList.contains("block-survey")) {
        this.blockDraft[input.name as BlockItemId] = value;
      } else {
        this.finalDraft[input.name as FinalItemId] = value;
      }
      const view = this.controller.view;
      if (view !== null) {
        this.render(view);
      }
    });

    this.root.addEventListener("submit", (event) => {
      event.preventDefault();
      const form = event.target as HTMLFormElement;
      if (form.classList.contains("block-survey")) {
        void this.controller.submitBlockSurvey(this.blockDraft);
      } else if (form.classList.contains("final-survey")) {
        void this.controller.submitFinalSurvey(this.finalDraft);
      }
    });
  }
}

/** Mount onto a root element and start a session immediately. */
export function mountApp(root: HTMLElement, baseUrl: string, participant = ""): App {
  const app = new App(root, baseUrl);
  void app.start(participant);
  return app;
}
