// Payload types mirroring the server's JSON schemas. The client renders only
// what the server sends; it never derives mastery or bands itself.

export type Band = "grey" | "yellow" | "green" | "red";
export type Mode = "learning" | "testing";

export interface FamilyMember {
  lemma: string;
  pos: string;
  level: number;
}

export interface ViewNode {
  id: string;
  label: string;
  mastery: number;
  band: Band;
  selected: boolean;
  expanded?: { members: FamilyMember[] };
}

export interface ViewEdge {
  a: string;
  b: string;
  weight: number;
}

export interface GraphView {
  learner_id: string;
  book_id: string;
  nodes: ViewNode[];
  edges: ViewEdge[];
  changed: string[];
}

export interface ChecklistWord {
  family: string;
  label: string;
}

export interface WarmstartChecklist {
  learner_id: string;
  book_id: string;
  words: ChecklistWord[];
}

export interface WarmstartSummary {
  learner_id: string;
  book_id: string;
  updated: number;
  above_half: number;
  below_half: number;
  touched: number;
}

export interface SessionInfo {
  session_id: string;
  learner_id: string;
  book_id: string;
  mode: Mode;
  size: number;
  position: number;
}

export interface ActivityItem {
  sentence_id: number;
  text: string;
  gap_spans: [number, number][];
}

export interface Aid {
  kind: string;
  url_template: string;
}

export interface ActivityView {
  activity_id: string;
  mode: Mode;
  items: ActivityItem[];
  options: string[];
  aids?: Aid[];
}

export interface SessionComplete {
  complete: true;
  summary: { answered: number; correct: number };
}

export type NextResponse = ActivityView | SessionComplete;

export function isComplete(next: NextResponse): next is SessionComplete {
  return (next as SessionComplete).complete === true;
}

export interface ChangedNode {
  family: string;
  old: number;
  new: number;
  band: Band;
}

export interface AnswerResult {
  activity_id: string;
  correct: boolean;
  answer: string;
  changed: ChangedNode[];
}

export interface BookStatus {
  book_id: string;
  title: string;
  status: "ingesting" | "building" | "ready" | "failed";
  reason: string | null;
  counts: Record<string, number> | null;
}

// Field whitelists, one per payload type, used by the schema-access guard in
// tests: the client must never read a field absent from the server schemas.
export const KNOWN_FIELDS: Record<string, Record<string, readonly string[]>> = {
  learner_view: {
    "": ["learner_id", "book_id", "nodes", "edges", "changed"],
    nodes: ["id", "label", "mastery", "band", "selected", "expanded"],
    "nodes.expanded": ["members"],
    "nodes.expanded.members": ["lemma", "pos", "level"],
    edges: ["a", "b", "weight"],
    changed: [],
  },
  warmstart_checklist: {
    "": ["learner_id", "book_id", "words"],
    words: ["family", "label"],
  },
  warmstart_result: {
    "": ["learner_id", "book_id", "updated", "above_half", "below_half", "touched"],
  },
  session: {
    "": ["session_id", "learner_id", "book_id", "mode", "size", "position"],
  },
  activity: {
    "": ["activity_id", "mode", "items", "options", "aids", "complete", "summary"],
    items: ["sentence_id", "text", "gap_spans"],
    "items.gap_spans": [],
    options: [],
    aids: ["kind", "url_template"],
    summary: ["answered", "correct"],
  },
  answer_result: {
    "": ["activity_id", "correct", "answer", "changed"],
    changed: ["family", "old", "new", "band"],
  },
  book_status: {
    "": ["book_id", "title", "status", "reason", "counts"],
    counts: [],
  },
};
