import type {
  AnswerPayload,
  Interpretation,
  TableDetail,
  TermProvenance,
} from "./types.js";

// provenance kind -> css class; the console shows exactly the kinds the
// engine reports
const KIND_CLASSES: Record<string, string> = {
  "exact": "term-exact",
  "approximate": "term-approximate",
  "machine-learnt abductive match": "term-abductive-ml",
  "rule-based abductive match": "term-abductive-rule",
  "placeholder": "term-placeholder",
  "unmatched": "term-unmatched",
  "stopword": "term-stopword",
};

export function kindClass(kind: string): string {
  return KIND_CLASSES[kind] ?? "term-unknown";
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function errorPanel(message: string): HTMLElement {
  const panel = el("div", "error-panel");
  panel.setAttribute("role", "alert");
  panel.append(el("strong", undefined, "cannot render response"), " ", message);
  return panel;
}

function isAbductive(kind: string): boolean {
  return kind.includes("abductive");
}

function termTitle(term: TermProvenance): string {
  const parts: string[] = [term.kind];
  if (term.target) {
    parts.push(`-> ${term.target}`);
  }
  if (term.confidence !== null && term.confidence !== undefined) {
    parts.push(`confidence ${(term.confidence * 100).toFixed(0)}%`);
  }
  return parts.join(" ");
}

function malformedInterpretation(interp: unknown): string | null {
  if (!interp || typeof interp !== "object") {
    return "interpretation payload missing";
  }
  const record = interp as Record<string, unknown>;
  if (!Array.isArray(record.terms)) {
    return "interpretation has no term list";
  }
  if (typeof record.doubt !== "boolean") {
    return "interpretation has no doubt flag";
  }
  return null;
}

/**
 * The annotated question view: one span per term, colored by match kind;
 * abductive fills render their bracketed column inline with a confidence
 * tooltip; a doubt banner appears exactly when the engine flagged doubt.
 */
export function renderInterpretation(interp: Interpretation): HTMLElement {
  const problem = malformedInterpretation(interp);
  if (problem) {
    return errorPanel(problem);
  }
  const container = el("div", "interpretation");

  if (interp.doubt) {
    const banner = el("div", "doubt-banner");
    banner.append(el("span", "doubt-icon", "?"),
                  interp.note ?? `We think you meant: ${interp.rewritten}`);
    container.append(banner);
  }

  const line = el("p", "terms");
  for (const term of interp.terms) {
    const span = el("span", `term ${kindClass(term.kind)}`);
    span.title = termTitle(term);
    if (isAbductive(term.kind) && term.target) {
      span.append(
        el("s", "term-original", term.term),
        " ",
        el("b", "term-fill", `[${term.target.toLowerCase()}]`),
      );
      if (term.confidence !== null && term.confidence !== undefined) {
        span.append(el("sub", "term-confidence",
                       `${(term.confidence * 100).toFixed(0)}%`));
      }
    } else {
      span.textContent = term.term;
    }
    line.append(span, " ");
  }
  container.append(line);

  if (interp.sql) {
    container.append(el("pre", "sql", interp.sql));
  }
  return container;
}

export function renderAnswer(payload: AnswerPayload): HTMLElement {
  const panel = el("div", "answer");
  const { answer } = payload;
  if (answer.kind === "none") {
    panel.append(el("p", "no-answer",
                    `no answer${answer.diagnostic ? ` (${answer.diagnostic})` : ""}`));
    return panel;
  }
  const list = el("ul", "answer-values");
  for (const value of answer.values) {
    list.append(el("li", undefined, value));
  }
  panel.append(list);
  if (payload.questionType) {
    panel.append(el("p", "question-type", payload.questionType));
  }
  return panel;
}

/**
 * Candidate parses with expandable score breakdowns, the engine's full
 * debugging payload.
 */
export function renderCandidates(payload: AnswerPayload): HTMLElement {
  const container = el("div", "candidates");
  container.append(el("h3", undefined,
                      `${payload.candidateCount} candidate parse(s)`));
  for (const candidate of payload.candidates) {
    const details = el("details", candidate.chosen ? "candidate chosen" : "candidate");
    const summary = el("summary");
    summary.append(
      el("span", "candidate-score", candidate.score.toFixed(2)),
      " ",
      el("span", undefined, JSON.stringify(candidate.parse.filters ?? [])),
      candidate.chosen ? el("em", undefined, " (chosen)") : "",
    );
    details.append(summary);
    const table = el("table", "features");
    for (const [feature, value] of Object.entries(candidate.features)) {
      const row = el("tr");
      row.append(el("td", undefined, feature), el("td", undefined, String(value)));
      table.append(row);
    }
    details.append(table);
    container.append(details);
  }
  return container;
}

/**
 * The comprehended table: derived/split columns included so the user sees
 * what the engine sees; cells contributing to the answer are highlighted.
 */
export function renderTable(
  detail: TableDetail,
  highlight: ReadonlySet<string> = new Set(),
): HTMLElement {
  const wrap = el("div", "table-view");
  const table = el("table", "data");
  const head = el("tr");
  for (const column of detail.columns) {
    const cell = el("th", `role-${column.role}`);
    cell.append(column.name, el("small", undefined, ` ${column.role}`));
    if (column.origin) {
      cell.classList.add("derived");
    }
    head.append(cell);
  }
  table.append(head);
  detail.rows.forEach((row, rowIndex) => {
    const tr = el("tr", detail.totalRows.includes(rowIndex) ? "total-row" : "");
    detail.columns.forEach((column, columnIndex) => {
      const td = el("td", undefined, row[columnIndex] ?? "");
      if (highlight.has(`${column.id}:${rowIndex}`)) {
        td.classList.add("answer-cell");
      }
      tr.append(td);
    });
    table.append(tr);
  });
  wrap.append(table);
  return wrap;
}

export function highlightedCells(payload: AnswerPayload): Set<string> {
  return new Set(payload.answer.cells.map((c) => `${c.column}:${c.row}`));
}
