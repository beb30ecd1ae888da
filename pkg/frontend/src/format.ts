/** Presentation helpers: indented outlines matching the canonical source
 * form. Pure formatting; no similarity or defect logic lives here. */

import type { ModelDoc, UnitDoc } from "./types.js";

const DELIMS: Record<string, [string, string]> = {
  "state-realisation": ["[", "]"],
  selection: ["?", "?"],
  event: ["??", "??"],
  guard: ["???", "???"],
  "internal-input": [">", "<"],
  "internal-output": ["<", ">"],
  "external-input": [">>", "<<"],
  "external-output": ["<<", ">>"],
};

function scalar(value: string | string[] | undefined): string {
  return typeof value === "string" ? value : "";
}

function setValue(value: string | string[] | undefined): string[] {
  return Array.isArray(value) ? [...value].sort() : [];
}

/** One unit as it would appear on its source line. */
export function unitLabel(unit: UnitDoc): string {
  const cname = scalar(unit.attrs["cname"]) || "?";
  const bname = scalar(unit.attrs["bname"]) || "?";
  const btype = scalar(unit.attrs["btype"]);
  const [open, close] = DELIMS[btype] ?? ["<?", "?>"];
  const parts = [`${cname} ${open}${bname}${close}`];
  const tlink = setValue(unit.attrs["tlink"]);
  if (tlink.length) parts.push(`@${tlink.join(",")}`);
  const status = scalar(unit.attrs["status"]);
  if (status && status !== "original") parts.push(`!${status}`);
  const op = scalar(unit.attrs["op"]);
  if (op) parts.push(`op=${op}`);
  const label = scalar(unit.attrs["label"]);
  if (label) parts.push(`label=${label}`);
  const rel = setValue(unit.attrs["rel"]);
  if (rel.length) parts.push(`rel="${rel.join("; ")}"`);
  return parts.join(" ");
}

export interface OutlineRow {
  unit: UnitDoc;
  depth: number;
  etype: string | null;
}

/** Root-first rows of the model tree, children in document order. */
export function outline(model: ModelDoc): OutlineRow[] {
  const children = new Map<string, { child: string; etype: string }[]>();
  const hasParent = new Set<string>();
  for (const edge of model.edges) {
    hasParent.add(edge.child);
    const bucket = children.get(edge.parent) ?? [];
    bucket.push({ child: edge.child, etype: edge.etype });
    children.set(edge.parent, bucket);
  }
  const byId = new Map(model.units.map((u) => [u.id, u]));
  const root = model.units.find((u) => !hasParent.has(u.id));
  if (!root) return [];

  const rows: OutlineRow[] = [];
  const walk = (unitId: string, depth: number, etype: string | null) => {
    const unit = byId.get(unitId);
    if (!unit) return;
    rows.push({ unit, depth, etype });
    for (const { child, etype: childType } of children.get(unitId) ?? []) {
      walk(child, depth + 1, childType);
    }
  };
  walk(root.id, 0, null);
  return rows;
}

export function spanLabel(unit: UnitDoc): string {
  if (!unit.span) return "";
  return `${unit.span.file}:${unit.span.line}`;
}

const EDGE_KEYWORD: Record<string, string> = {
  sequential: "",
  parallel: "par ",
  atomic: "atom ",
  alternative: "alt ",
};

export function edgePrefix(etype: string | null): string {
  if (etype === null) return "";
  return EDGE_KEYWORD[etype] ?? "";
}
