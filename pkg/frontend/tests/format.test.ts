import { describe, expect, it } from "vitest";

import { edgePrefix, outline, unitLabel } from "../src/format.js";
import type { ModelDoc, UnitDoc } from "../src/types.js";

function unit(id: string, attrs: UnitDoc["attrs"]): UnitDoc {
  return { id, attrs };
}

describe("unitLabel", () => {
  it("renders the canonical source line", () => {
    const label = unitLabel(unit("w0", {
      cname: "DOOR",
      bname: "Closed",
      btype: "state-realisation",
      tlink: ["R4", "R1"],
      status: "original",
      rel: [],
    }));
    expect(label).toBe("DOOR [Closed] @R1,R4");
  });

  it("shows non-default status, operator, label and relations", () => {
    const label = unitLabel(unit("w1", {
      cname: "OVEN",
      bname: "Cooking",
      btype: "guard",
      tlink: [],
      status: "implied",
      op: "reversion:HOME",
      label: "L1",
      rel: ["where(in) OVEN"],
    }));
    expect(label).toBe(
      'OVEN ???Cooking??? !implied op=reversion:HOME label=L1 rel="where(in) OVEN"',
    );
  });

  it("uses each behavior-type delimiter", () => {
    const cases: Record<string, string> = {
      selection: "A ?b?",
      event: "A ??b??",
      "internal-input": "A >b<",
      "internal-output": "A <b>",
      "external-input": "A >>b<<",
      "external-output": "A <<b>>",
    };
    for (const [btype, expected] of Object.entries(cases)) {
      expect(unitLabel(unit("w", { cname: "A", bname: "b", btype }))).toBe(expected);
    }
  });
});

describe("outline", () => {
  const model: ModelDoc = {
    id: "m",
    init: false,
    units: [
      unit("w0", { cname: "A", bname: "a", btype: "event" }),
      unit("w1", { cname: "B", bname: "b", btype: "event" }),
      unit("w2", { cname: "C", bname: "c", btype: "event" }),
    ],
    edges: [
      { parent: "w0", child: "w1", etype: "parallel" },
      { parent: "w0", child: "w2", etype: "sequential" },
    ],
  };

  it("walks the tree root-first with depths and edge kinds", () => {
    const rows = outline(model);
    expect(rows.map((r) => [r.unit.id, r.depth, r.etype])).toEqual([
      ["w0", 0, null],
      ["w1", 1, "parallel"],
      ["w2", 1, "sequential"],
    ]);
  });

  it("renders edge keywords only for non-sequential edges", () => {
    expect(edgePrefix(null)).toBe("");
    expect(edgePrefix("sequential")).toBe("");
    expect(edgePrefix("parallel")).toBe("par ");
    expect(edgePrefix("atomic")).toBe("atom ");
    expect(edgePrefix("alternative")).toBe("alt ");
  });
});
