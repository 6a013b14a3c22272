import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { GraphViewModel } from "../src/graphview";
import { SessionRunner } from "../src/session";
import { WarmstartFlow } from "../src/warmstart";
import type { ActivityView, ChangedNode, GraphView } from "../src/schema";
import { RecordedServer, loadRecording } from "./support/recorded";

const recording = loadRecording();

function answersFromRecording(): Map<string, string> {
  const byActivity = new Map<string, string>();
  for (const e of recording.exchanges) {
    if (e.method === "POST" && /\/sessions\/.*\/answers$/.test(e.path)) {
      const body = e.request as { activity_id: string; chosen: string };
      byActivity.set(body.activity_id, body.chosen);
    }
  }
  return byActivity;
}

describe("recorded full flow", () => {
  it("completes warm start and a testing session against recorded traffic", async () => {
    const server = new RecordedServer(recording);
    const api = new ApiClient("", server.fetch);
    const model = new GraphViewModel();

    const initial = (await api.learnerView(recording.learner_id, recording.book_id)) as GraphView;
    model.setData(initial);
    expect(initial.nodes.every((n) => n.band === "grey")).toBe(true);

    // --- warm start: batch of 8, atomic submit
    const flow = new WarmstartFlow(api, recording.learner_id, recording.book_id);
    const checklist = await flow.start(8);
    expect(checklist.words).toHaveLength(8);
    expect(flow.complete).toBe(false);
    await expect(flow.submit()).rejects.toThrow(/answered/);
    checklist.words.forEach((w, i) => flow.answer(w.family, i % 2 === 0));
    expect(flow.complete).toBe(true);
    const summary = await flow.submit();
    expect(summary.updated).toBe(8);

    const warmed = (await api.learnerView(recording.learner_id, recording.book_id)) as GraphView;
    model.setData(warmed);
    const bands = new Set(warmed.nodes.map((n) => n.band));
    expect(bands).toContain("green");
    expect(bands).toContain("red");

    // --- testing session: answers replayed from the recording
    const key = answersFromRecording();
    const changedEvents: ChangedNode[][] = [];
    let activities = 0;
    const runner = new SessionRunner(api, recording.learner_id, recording.book_id, {
      onActivity: () => {
        activities += 1;
      },
      onChanged: (changed) => {
        changedEvents.push(changed);
        model.applyChanges(changed, 1000 + changedEvents.length);
        expect(model.animating).toBe(true); // recolor pulse started
      },
    });
    const summaryAfter = await runner.run("testing", (activity: ActivityView) => {
      expect(activity.items.length).toBeGreaterThanOrEqual(3);
      expect(activity.items.length).toBeLessThanOrEqual(4);
      expect(activity.options).toHaveLength(4);
      const chosen = key.get(activity.activity_id);
      expect(chosen, `no recorded answer for ${activity.activity_id}`).toBeDefined();
      return chosen!;
    });

    expect(activities).toBe(20);
    expect(changedEvents).toHaveLength(20); // every testing answer recolors
    expect(summaryAfter.answered).toBe(20);
    expect(summaryAfter.correct).toBeLessThan(20); // the recording includes mistakes

    // after the last answer the model carries exactly the server's bands
    const last = changedEvents[changedEvents.length - 1];
    for (const change of last) {
      const node = model.node(change.family);
      expect(node).toBeDefined();
      expect(node!.band).toBe(change.band);
      expect(node!.mastery).toBe(change.new);
    }

    // --- final view and family expansion
    const final = (await api.learnerView(recording.learner_id, recording.book_id)) as GraphView;
    model.setData(final);
    for (const node of final.nodes) {
      expect(model.node(node.id)!.band).toBe(node.band); // server is the source of truth
    }
    const expandExchange = recording.exchanges.find((e) => e.path.includes("expand="));
    expect(expandExchange).toBeDefined();
    const expandId = decodeURIComponent(expandExchange!.path.split("expand=")[1]);
    const expanded = await api.learnerView(recording.learner_id, recording.book_id, expandId);
    const expandedNode = expanded.nodes.find((n) => n.id === expandId)!;
    expect(expandedNode.expanded!.members.length).toBeGreaterThan(1);
    model.setExpanded(expandedNode);
    expect(model.node(expandId)!.expanded!.members).toEqual(expandedNode.expanded!.members);

    expect(server.remaining).toBe(1); // only the unconsumed status probe stays
  });

  it("never exposes an answer key in any client-bound payload", () => {
    const forbidden = new Set(["answer", "answers", "answer_label", "target_family",
                               "target_unit", "original_text"]);
    const walkKeys = (value: unknown, hit: (key: string) => void): void => {
      if (Array.isArray(value)) {
        value.forEach((v) => walkKeys(v, hit));
      } else if (value && typeof value === "object") {
        for (const [key, child] of Object.entries(value)) {
          hit(key);
          walkKeys(child, hit);
        }
      }
    };
    for (const e of recording.exchanges) {
      if (e.method === "GET" && e.path.includes("/next")) {
        walkKeys(e.response, (key) => expect(forbidden.has(key), `leaked ${key}`).toBe(false));
      }
    }
  });

  it("guards against double submission of the same activity", async () => {
    const server = new RecordedServer(recording);
    const api = new ApiClient("", server.fetch);
    const key = answersFromRecording();
    const runner = new SessionRunner(api, recording.learner_id, recording.book_id);
    await runner.start("testing");
    await runner.next();
    const activity = runner.activity!;
    const chosen = key.get(activity.activity_id)!;
    const [first, second] = await Promise.all([
      runner.choose(chosen),
      runner.choose(chosen),
    ]);
    const results = [first, second].filter((r) => r !== null);
    expect(results).toHaveLength(1); // the concurrent click is dropped
    expect(await runner.choose(chosen)).toBeNull(); // and so is a repeat
  });

  it("builds learning-mode aid links from url templates without leaking targets", () => {
    const runner = new SessionRunner(new ApiClient(), "l", "b");
    const fake: ActivityView = {
      activity_id: "a1",
      mode: "learning",
      items: [{ sentence_id: 0, text: "the ____ glows", gap_spans: [[4, 8]] }],
      options: ["reef", "storm", "wave", "cliff"],
      aids: [{ kind: "dictionary", url_template: "https://dict.example/{word}" }],
    };
    (runner as unknown as { current: ActivityView }).current = fake;
    const links = runner.aidLinks("storm");
    expect(links).toEqual([{ kind: "dictionary", url: "https://dict.example/storm" }]);
  });
});
