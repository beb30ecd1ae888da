/** The review single-page app.
 *
 * All state shown on screen originates from the session API: the model
 * set, the relation candidates, the defect report and the decision log.
 * Accepting or rejecting a candidate POSTs the verdict and re-renders the
 * defect panel from the response body, so the panel always equals what
 * GET /api/defects would return.
 */

import { ApiError, ReviewApi } from "./api.js";
import { edgePrefix, outline, spanLabel, unitLabel } from "./format.js";
import type {
  DecisionDoc,
  DecisionsDoc,
  DefectsDoc,
  ModelDoc,
  ModelsDoc,
  RelationDoc,
  RelationsDoc,
  Verdict,
} from "./types.js";

const KIND_ORDER = [
  "root-root",
  "branch-root",
  "leaf-root",
  "multi-preconditions",
  "sub-path",
  "branch-branch",
  "leaf-branch",
  "leaf-leaf",
];

const RELATION_LABEL: Record<string, string> = {
  incomplete: "no relation",
  ambiguous: "multi-preconditions relation",
  incorrect: "non-root relation",
  redundant: "sub-path relation",
};

interface AppState {
  models: ModelsDoc | null;
  relations: RelationsDoc | null;
  defects: DefectsDoc | null;
  defectsRaw: string | null;
  decisions: DecisionsDoc | null;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class ReviewApp {
  readonly state: AppState = {
    models: null,
    relations: null,
    defects: null,
    defectsRaw: null,
    decisions: null,
  };

  private work: Promise<void> = Promise.resolve();
  private toastTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly root: HTMLElement,
    readonly api: ReviewApi,
  ) {
    this.renderSkeleton();
  }

  /** Waits until every queued user action has been processed. */
  settle(): Promise<void> {
    return this.work;
  }

  /** The parsed document currently backing the defect panel. */
  defectsData(): DefectsDoc | null {
    return this.state.defects;
  }

  /** The exact response body the defect panel was rendered from. */
  defectsRaw(): string | null {
    return this.state.defectsRaw;
  }

  async load(): Promise<void> {
    try {
      const [models, relations, defectsRaw, decisions] = await Promise.all([
        this.api.models(),
        this.api.relations(),
        this.api.defectsRaw(),
        this.api.decisions(),
      ]);
      this.state.models = models;
      this.state.relations = relations;
      this.state.defects = JSON.parse(defectsRaw) as DefectsDoc;
      this.state.defectsRaw = defectsRaw;
      this.state.decisions = decisions;
      this.hideBanner();
      this.renderAll();
    } catch (error) {
      this.showBanner(error);
    }
  }

  decide(relationId: string, verdict: Verdict): Promise<void> {
    this.work = this.work.then(() => this.performDecide(relationId, verdict));
    return this.work;
  }

  private async performDecide(relationId: string, verdict: Verdict): Promise<void> {
    const note = this.noteFor(relationId);
    try {
      const body = await this.api.decideRaw(relationId, verdict, note);
      this.state.defectsRaw = body;
      this.state.defects = JSON.parse(body) as DefectsDoc;
      this.state.decisions = await this.api.decisions();
      this.hideBanner();
      this.renderRelations();
      this.renderDefects();
      this.renderHistory();
    } catch (error) {
      if (error instanceof ApiError) {
        // Stale or malformed: surface it, change nothing.
        this.showToast(`decision not recorded: ${error.message}`);
      } else {
        this.showBanner(error);
      }
    }
  }

  cardFor(relationId: string): HTMLElement | null {
    for (const card of this.root.querySelectorAll<HTMLElement>("[data-relation-id]")) {
      if (card.dataset["relationId"] === relationId) return card;
    }
    return null;
  }

  private noteFor(relationId: string): string {
    const input = this.cardFor(relationId)?.querySelector<HTMLInputElement>("input.note");
    return input?.value ?? "";
  }

  private effectiveDecisions(): Map<string, DecisionDoc> {
    const effective = new Map<string, DecisionDoc>();
    for (const d of this.state.decisions?.decisions ?? []) {
      effective.set(d.relation_id, d);
    }
    return effective;
  }

  // --- rendering -----------------------------------------------------------

  private renderSkeleton(): void {
    this.root.innerHTML = "";
    const header = el("header");
    header.append(el("h1", undefined, "btlint review"));
    const banner = el("div", "banner hidden");
    banner.id = "banner";
    const toast = el("div", "toast hidden");
    toast.id = "toast";
    header.append(banner, toast);

    const main = el("main");
    for (const id of ["models", "relations", "defects", "history"]) {
      const section = el("section");
      section.id = `${id}-section`;
      main.append(section);
    }
    this.root.append(header, main);
  }

  private section(id: string): HTMLElement {
    return this.root.querySelector(`#${id}-section`) as HTMLElement;
  }

  private renderAll(): void {
    this.renderModels();
    this.renderRelations();
    this.renderDefects();
    this.renderHistory();
  }

  private renderModels(): void {
    const host = this.section("models");
    host.innerHTML = "";
    host.append(el("h2", undefined, "Models"));
    for (const model of this.state.models?.models ?? []) {
      host.append(this.modelOutline(model, new Set()));
    }
  }

  private modelOutline(model: ModelDoc, highlight: Set<string>): HTMLElement {
    const box = el("div", "model");
    const title = model.init ? `${model.id} (init)` : model.id;
    box.append(el("h3", undefined, title));
    const pre = el("pre", "outline");
    for (const row of outline(model)) {
      const line = el("span", "line");
      line.dataset["unit"] = `${model.id}.${row.unit.id}`;
      if (highlight.has(row.unit.id)) line.classList.add("hit");
      line.textContent =
        "  ".repeat(row.depth) + edgePrefix(row.etype) + unitLabel(row.unit);
      const span = spanLabel(row.unit);
      if (span) line.title = span;
      pre.append(line, document.createTextNode("\n"));
    }
    box.append(pre);
    return box;
  }

  private renderRelations(): void {
    const host = this.section("relations");
    host.innerHTML = "";
    host.append(el("h2", undefined, "Relation candidates"));
    const relations = this.state.relations?.relations ?? [];
    const models = new Map((this.state.models?.models ?? []).map((m) => [m.id, m]));
    const effective = this.effectiveDecisions();
    for (const kind of KIND_ORDER) {
      const group = relations.filter((r) => r.kind === kind);
      if (!group.length) continue;
      const wrap = el("div", "kind-group");
      wrap.append(el("h3", undefined, `${kind} (${group.length})`));
      for (const relation of group) {
        wrap.append(this.candidateCard(relation, models, effective.get(relation.id)));
      }
      host.append(wrap);
    }
  }

  private candidateCard(
    relation: RelationDoc,
    models: Map<string, ModelDoc>,
    decision: DecisionDoc | undefined,
  ): HTMLElement {
    const card = el("article", "candidate");
    card.dataset["relationId"] = relation.id;

    const head = el("div", "candidate-head");
    head.append(el("span", "kind-badge", relation.kind));
    head.append(
      el("span", "pairing", `${relation.parent} → ${relation.child}`),
    );
    head.append(el("span", "similarity", `similarity ${relation.similarity}`));
    const stateBadge = el(
      "span",
      decision ? `decision ${decision.verdict}` : "decision undecided",
      decision ? decision.verdict : "undecided",
    );
    head.append(stateBadge);
    card.append(head);

    const trees = el("div", "candidate-trees");
    const parentModel = models.get(relation.parent);
    const childModel = models.get(relation.child);
    if (parentModel && childModel) {
      trees.append(
        this.modelOutline(parentModel, new Set(relation.pairs.map((p) => p[0]))),
        this.modelOutline(childModel, new Set(relation.pairs.map((p) => p[1]))),
      );
    }
    card.append(trees);

    const act = el("div", "candidate-act");
    const note = el("input", "note");
    note.placeholder = "note";
    act.append(note);
    for (const verdict of ["accepted", "rejected"] as const) {
      const button = el("button", `verdict-${verdict}`,
                        verdict === "accepted" ? "accept" : "reject");
      button.dataset["verdict"] = verdict;
      button.addEventListener("click", () => {
        void this.decide(relation.id, verdict);
      });
      act.append(button);
    }
    card.append(act);
    return card;
  }

  private renderDefects(): void {
    const host = this.section("defects");
    host.innerHTML = "";
    host.append(el("h2", undefined, "Defects"));
    const defects = this.state.defects?.defects ?? [];
    if (!defects.length) {
      host.append(el("p", "empty", "no defects detected"));
      return;
    }
    const table = el("table", "defect-table");
    const head = el("tr");
    for (const column of ["BM", "Integration Relation", "Defects Type", "Issue"]) {
      head.append(el("th", undefined, column));
    }
    table.append(head);
    for (const defect of defects) {
      const row = el("tr", `status-${defect.status}`);
      row.dataset["models"] = defect.models.join(",");
      row.append(el("td", undefined, defect.models.join(", ")));
      row.append(el("td", undefined, RELATION_LABEL[defect.type] ?? defect.type));
      const typeCell = el("td");
      typeCell.append(el("span", "defect-type", defect.type));
      typeCell.append(el("span", `status-badge ${defect.status}`, defect.status));
      row.append(typeCell);
      row.append(el("td", "issue", defect.issue));
      table.append(row);
    }
    host.append(table);
  }

  private renderHistory(): void {
    const host = this.section("history");
    host.innerHTML = "";
    host.append(el("h2", undefined, "Decision history"));
    const log = this.state.decisions?.decisions ?? [];
    if (!log.length) {
      host.append(el("p", "empty", "no decisions yet"));
      return;
    }
    const list = el("ol", "history");
    for (const d of log) {
      const item = el("li", `history-${d.verdict}`);
      item.textContent = `${d.verdict}: ${d.relation_id}` +
        (d.note ? ` — ${d.note}` : "");
      item.title = d.timestamp;
      list.append(item);
    }
    host.append(list);
  }

  // --- banners and toasts -----------------------------------------------------

  private showBanner(error: unknown): void {
    const banner = this.root.querySelector("#banner") as HTMLElement;
    banner.textContent =
      "connection to the review session lost — retrying may help " +
      `(${error instanceof Error ? error.message : String(error)})`;
    banner.classList.remove("hidden");
  }

  private hideBanner(): void {
    (this.root.querySelector("#banner") as HTMLElement).classList.add("hidden");
  }

  private showToast(message: string): void {
    const toast = this.root.querySelector("#toast") as HTMLElement;
    toast.textContent = message;
    toast.classList.remove("hidden");
    if (this.toastTimer) clearTimeout(this.toastTimer);
    this.toastTimer = setTimeout(() => toast.classList.add("hidden"), 4000);
  }
}

export function mountApp(root: HTMLElement, api: ReviewApi): ReviewApp {
  const app = new ReviewApp(root, api);
  void app.load();
  return app;
}
