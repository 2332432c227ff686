import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { FLAG_ACK_NOTICE, SessionController } from "../src/controller.js";
import { BLOCK_SURVEY_ITEMS } from "../src/surveys.js";
import { sessionPayload } from "./fixtures.js";

interface Call {
  method: string;
  path: string;
  body: unknown;
}

/** fetch stub: records calls, answers from a queue, resolves on demand. */
function makeFakeServer(responses: Array<{ status?: number; body: unknown }>) {
  const calls: Call[] = [];
  let release: (() => void) | null = null;
  const gate = { hold: false };
  const fetchImpl = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    calls.push({
      method: init?.method ?? "GET",
      path: url.replace(/^https?:\/\/[^/]+/, ""),
      body: init?.body === undefined ? undefined : JSON.parse(init.body as string),
    });
    if (gate.hold) {
      await new Promise<void>((resolve) => {
        release = resolve;
      });
    }
    const next = responses.shift() ?? { body: {} };
    const status = next.status ?? 200;
    return new Response(JSON.stringify(next.body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  }) as typeof fetch;
  return {
    calls,
    gate,
    fetchImpl,
    releasePending: () => {
      release?.();
      release = null;
    },
  };
}

describe("session controller", () => {
  it("suppresses double submits while a request is pending", async () => {
    const server = makeFakeServer([
      { body: sessionPayload() },
      { body: sessionPayload({ game_index: 1 }) },
    ]);
    const controller = new SessionController(new ApiClient("http://x", { fetchImpl: server.fetchImpl }));
    await controller.start();
    expect(server.calls).toHaveLength(1);

    server.gate.hold = true;
    const first = controller.submitAction(0);
    const second = controller.submitAction(0); // still pending -> suppressed
    const flag = controller.flagQuestionable(); // likewise
    expect(await second).toEqual({ status: "suppressed" });
    expect(await flag).toEqual({ status: "suppressed" });
    expect(controller.view?.pending).toBe(true);

    server.gate.hold = false;
    server.releasePending();
    const result = await first;
    expect(result.status).toBe("ok");
    expect(controller.view?.pending).toBe(false);
    // exactly one move request reached the wire
    expect(server.calls.filter((c) => c.path.endsWith("/move"))).toHaveLength(1);
  });

  it("rejects illegal selections locally without a network call", async () => {
    const server = makeFakeServer([{ body: sessionPayload() }]);
    const controller = new SessionController(new ApiClient("http://x", { fetchImpl: server.fetchImpl }));
    await controller.start();
    const result = await controller.submitAction(11); // not in legal_action_ids
    expect(result.status).toBe("rejected");
    expect(server.calls).toHaveLength(1); // only the session create
  });

  it("surfaces server rejections in the view", async () => {
    const server = makeFakeServer([
      { body: sessionPayload() },
      { status: 400, body: { detail: "illegal move: discard slot 0" } },
    ]);
    const controller = new SessionController(new ApiClient("http://x", { fetchImpl: server.fetchImpl }));
    await controller.start();
    const result = await controller.submitAction(0);
    expect(result).toEqual({ status: "rejected", reason: "illegal move: discard slot 0" });
    expect(controller.view?.error).toBe("illegal move: discard slot 0");
    expect(controller.view?.pending).toBe(false);
  });

  it("flags the bot's most recent move and acknowledges it", async () => {
    const payload = sessionPayload();
    const server = makeFakeServer([
      { body: payload },
      { body: { ok: true, game_index: 1, turn: 1 } },
      { body: payload },
    ]);
    const controller = new SessionController(new ApiClient("http://x", { fetchImpl: server.fetchImpl }));
    await controller.start();
    const result = await controller.flagQuestionable();
    expect(result.status).toBe("ok");
    expect(controller.view?.notice).toBe(FLAG_ACK_NOTICE);
    const flagCall = server.calls.find((c) => c.path.endsWith("/questionable"));
    expect(flagCall?.body).toEqual({ game_index: 1, turn: 1 });
  });

  it("refuses the questionable button before the bot has moved", async () => {
    const server = makeFakeServer([{ body: sessionPayload({ history: [] }) }]);
    const controller = new SessionController(new ApiClient("http://x", { fetchImpl: server.fetchImpl }));
    await controller.start();
    const result = await controller.flagQuestionable();
    expect(result.status).toBe("rejected");
    expect(server.calls).toHaveLength(1);
  });

  it("keeps incomplete surveys off the wire", async () => {
    const server = makeFakeServer([
      { body: sessionPayload({ phase: "block_survey", observation: null }) },
    ]);
    const controller = new SessionController(new ApiClient("http://x", { fetchImpl: server.fetchImpl }));
    await controller.start();
    const result = await controller.submitBlockSurvey({ B1: 3 });
    expect(result.status).toBe("rejected");
    expect(server.calls).toHaveLength(1);

    const full = Object.fromEntries(BLOCK_SURVEY_ITEMS.map((i) => [i.id, 4]));
    const queued = makeFakeServer([
      { body: sessionPayload({ phase: "block_survey", observation: null }) },
      { body: sessionPayload({ phase: "playing", game_index: 4, block: 1, bot: "second" }) },
    ]);
    const controller2 = new SessionController(
      new ApiClient("http://x", { fetchImpl: queued.fetchImpl }),
    );
    await controller2.start();
    const ok = await controller2.submitBlockSurvey(full);
    expect(ok.status).toBe("ok");
    expect(queued.calls[1]?.body).toEqual({ block: 0, items: full });
  });
});
