/** Payload shapes served by the btlint review session API. */

export interface SpanDoc {
  file: string;
  line: number;
  column: number;
}

export interface UnitDoc {
  id: string;
  attrs: Record<string, string | string[]>;
  span?: SpanDoc;
}

export interface EdgeDoc {
  parent: string;
  child: string;
  etype: string;
}

export interface ModelDoc {
  id: string;
  init: boolean;
  units: UnitDoc[];
  edges: EdgeDoc[];
}

export interface ModelsDoc {
  models: ModelDoc[];
}

export interface RelationDoc {
  id: string;
  kind: string;
  parent: string;
  child: string;
  pairs: [string, string][];
  similarity: number;
}

export interface RelationsDoc {
  schema_version: number;
  relations: RelationDoc[];
}

export interface DefectDoc {
  type: string;
  models: string[];
  relations: string[];
  status: string;
  issue: string;
}

export interface DefectsDoc {
  schema_version: number;
  defects: DefectDoc[];
}

export type Verdict = "accepted" | "rejected";

export interface DecisionDoc {
  relation_id: string;
  verdict: Verdict;
  pair_verdicts: Record<string, string>;
  note: string;
  timestamp: string;
}

export interface DecisionsDoc {
  decisions: DecisionDoc[];
}
