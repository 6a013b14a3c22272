import type { ApiClient } from "./api";
import type { WarmstartChecklist, WarmstartSummary } from "./schema";

/**
 * Yes/No warm-start flow. Answers accumulate locally and are submitted as
 * one atomic batch; abandoning midway changes nothing server-side.
 */
export class WarmstartFlow {
  private checklist: WarmstartChecklist | null = null;
  private answers = new Map<string, boolean>();
  private submitted = false;

  constructor(
    private readonly api: ApiClient,
    private readonly learnerId: string,
    private readonly bookId: string,
  ) {}

  async start(size?: number): Promise<WarmstartChecklist> {
    this.checklist = await this.api.warmstartChecklist(this.learnerId, this.bookId, size);
    this.answers.clear();
    this.submitted = false;
    return this.checklist;
  }

  get words(): { family: string; label: string; known: boolean | null }[] {
    if (!this.checklist) return [];
    return this.checklist.words.map((w) => ({
      family: w.family,
      label: w.label,
      known: this.answers.has(w.family) ? this.answers.get(w.family)! : null,
    }));
  }

  answer(family: string, known: boolean): void {
    if (!this.checklist || !this.checklist.words.some((w) => w.family === family)) {
      throw new Error(`not on the checklist: ${family}`);
    }
    this.answers.set(family, known);
  }

  get complete(): boolean {
    return this.checklist !== null && this.answers.size === this.checklist.words.length;
  }

  /** Batch submit; refuses partial checklists (every word needs an answer). */
  async submit(): Promise<WarmstartSummary> {
    if (!this.checklist) {
      throw new Error("warm start not started");
    }
    if (!this.complete) {
      throw new Error("all words must be answered before submitting");
    }
    if (this.submitted) {
      throw new Error("already submitted");
    }
    const payload = this.checklist.words.map((w) => ({
      family: w.family,
      known: this.answers.get(w.family)!,
    }));
    const summary = await this.api.submitWarmstart(this.learnerId, this.bookId, payload);
    this.submitted = true;
    return summary;
  }
}
