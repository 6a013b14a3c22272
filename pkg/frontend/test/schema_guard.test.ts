import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { GraphViewModel } from "../src/graphview";
import { SessionRunner } from "../src/session";
import { WarmstartFlow } from "../src/warmstart";
import type { ActivityView, GraphView } from "../src/schema";
import { guard } from "./support/guard";
import { RecordedServer, loadRecording, type Exchange } from "./support/recorded";

const recording = loadRecording();

function schemaKeyFor(exchange: Exchange): string | null {
  const { method, path } = exchange;
  if (method === "GET" && /\/view(\?|$)/.test(path)) return "learner_view";
  if (method === "POST" && path.endsWith("/warmstart")) return "warmstart_checklist";
  if (method === "POST" && path.endsWith("/warmstart/answers")) return "warmstart_result";
  if (method === "POST" && path.endsWith("/sessions")) return "session";
  if (method === "GET" && path.includes("/next")) return "activity";
  if (method === "POST" && /\/sessions\/.*\/answers$/.test(path)) return "answer_result";
  if (method === "GET" && path.endsWith("/status")) return "book_status";
  return null;
}

describe("schema access guard", () => {
  it("throws on reads of fields outside the schema", () => {
    const payload = guard(
      { learner_id: "l", book_id: "b", nodes: [], edges: [], changed: [], secret: 1 },
      "learner_view",
    ) as unknown as Record<string, unknown>;
    expect(payload.learner_id).toBe("l");
    expect(() => payload.secret).toThrow(/schema violation/);
  });

  it("full client flow reads only schema-defined fields", async () => {
    const server = new RecordedServer(recording, (payload, exchange) => {
      const key = schemaKeyFor(exchange);
      return key ? guard(payload, key) : payload;
    });
    const api = new ApiClient("", server.fetch);
    const model = new GraphViewModel();

    model.setData((await api.learnerView(recording.learner_id, recording.book_id)) as GraphView);

    const flow = new WarmstartFlow(api, recording.learner_id, recording.book_id);
    const checklist = await flow.start(8);
    checklist.words.forEach((w, i) => flow.answer(w.family, i % 2 === 0));
    await flow.submit();
    model.setData((await api.learnerView(recording.learner_id, recording.book_id)) as GraphView);

    const key = new Map<string, string>();
    for (const e of recording.exchanges) {
      if (e.method === "POST" && /\/sessions\/.*\/answers$/.test(e.path)) {
        const body = e.request as { activity_id: string; chosen: string };
        key.set(body.activity_id, body.chosen);
      }
    }
    const runner = new SessionRunner(api, recording.learner_id, recording.book_id, {
      onChanged: (changed) => model.applyChanges(changed, 1),
    });
    const summary = await runner.run("testing", (activity: ActivityView) =>
      key.get(activity.activity_id)!,
    );
    expect(summary.answered).toBe(20);

    model.setData((await api.learnerView(recording.learner_id, recording.book_id)) as GraphView);
    model.scene(2); // rendering path also stays inside the schema
  });
});
