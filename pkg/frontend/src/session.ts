import type { ApiClient } from "./api";
import {
  isComplete,
  type ActivityView,
  type AnswerResult,
  type ChangedNode,
  type Mode,
  type SessionInfo,
} from "./schema";

export interface SessionEvents {
  onActivity?: (activity: ActivityView) => void;
  onResult?: (result: AnswerResult) => void;
  /** Fired after each testing answer with the server's changed-node list. */
  onChanged?: (changed: ChangedNode[]) => void;
  onComplete?: (summary: { answered: number; correct: number }) => void;
}

/**
 * Drives one learning or testing session: fetch activity, submit choice,
 * surface the changed set, advance. One in-flight mutation at a time; a
 * second click while submitting is ignored.
 */
export class SessionRunner {
  private info: SessionInfo | null = null;
  private current: ActivityView | null = null;
  private inFlight = false;
  private answered = new Set<string>();
  private lastResult: AnswerResult | null = null;
  private summary: { answered: number; correct: number } | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly learnerId: string,
    private readonly bookId: string,
    private readonly events: SessionEvents = {},
  ) {}

  async start(mode: Mode): Promise<SessionInfo> {
    this.info = await this.api.startSession(this.learnerId, this.bookId, mode);
    this.current = null;
    this.answered.clear();
    return this.info;
  }

  get session(): SessionInfo | null {
    return this.info;
  }

  get activity(): ActivityView | null {
    return this.current;
  }

  get result(): AnswerResult | null {
    return this.lastResult;
  }

  /** Aid links for an option, learning mode only. */
  aidLinks(word: string): { kind: string; url: string }[] {
    if (!this.current || this.current.mode !== "learning" || !this.current.aids) {
      return [];
    }
    return this.current.aids.map((a) => ({
      kind: a.kind,
      url: a.url_template.replace("{word}", encodeURIComponent(word)),
    }));
  }

  /** Fetch the next (or current unanswered) activity; true while running. */
  async next(): Promise<boolean> {
    if (!this.info) {
      throw new Error("session not started");
    }
    const response = await this.api.nextActivity(this.info.session_id);
    if (isComplete(response)) {
      this.current = null;
      this.summary = response.summary;
      this.events.onComplete?.(response.summary);
      return false;
    }
    this.current = response;
    this.lastResult = null;
    this.events.onActivity?.(response);
    return true;
  }

  /** Submit a choice; ignores double-clicks and repeated submissions. */
  async choose(option: string): Promise<AnswerResult | null> {
    if (!this.info || !this.current || this.inFlight) {
      return null;
    }
    if (this.answered.has(this.current.activity_id)) {
      return null;
    }
    if (!this.current.options.includes(option)) {
      throw new Error(`not an option: ${option}`);
    }
    this.inFlight = true;
    try {
      const result = await this.api.submitAnswer(
        this.info.session_id, this.current.activity_id, option,
      );
      this.answered.add(this.current.activity_id);
      this.lastResult = result;
      this.events.onResult?.(result);
      if (result.changed.length > 0) {
        this.events.onChanged?.(result.changed);
      }
      return result;
    } finally {
      this.inFlight = false;
    }
  }

  /** Run the whole session with a choice callback; returns the summary. */
  async run(
    mode: Mode,
    pick: (activity: ActivityView) => string | Promise<string>,
  ): Promise<{ answered: number; correct: number }> {
    await this.start(mode);
    while (await this.next()) {
      const option = await pick(this.current!);
      await this.choose(option);
    }
    return this.summary ?? { answered: 0, correct: 0 };
  }
}
