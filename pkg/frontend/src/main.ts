import { ApiClient } from "./api.js";
import {
  ConsoleState, editDraft, initialState, selectTable, submitQuestion,
} from "./state.js";
import {
  errorPanel, highlightedCells, renderAnswer, renderCandidates,
  renderInterpretation, renderTable,
} from "./render.js";

const api = new ApiClient("");
let state: ConsoleState = initialState;

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id}`);
  }
  return node as T;
}

async function refreshTable(): Promise<void> {
  const host = byId<HTMLDivElement>("table-panel");
  host.replaceChildren();
  if (!state.tableId) {
    return;
  }
  try {
    const detail = await api.table(state.tableId);
    const highlight = state.last ? highlightedCells(state.last) : new Set<string>();
    host.replaceChildren(renderTable(detail, highlight));
  } catch (err) {
    host.replaceChildren(errorPanel(err instanceof Error ? err.message : String(err)));
  }
}

function renderState(): void {
  const error = byId<HTMLDivElement>("error");
  error.replaceChildren();
  if (state.error) {
    error.replaceChildren(errorPanel(state.error));
  }
  const response = byId<HTMLDivElement>("response");
  response.replaceChildren();
  if (state.last) {
    response.append(
      renderAnswer(state.last),
      renderInterpretation(state.last.interpretation),
      renderCandidates(state.last),
    );
  }
  const history = byId<HTMLUListElement>("history");
  history.replaceChildren();
  for (const turn of state.history) {
    const item = document.createElement("li");
    const values = turn.response.answer.values;
    item.textContent = `${turn.question} -> ${values.length ? values.join("; ") : "(no answer)"}`;
    history.append(item);
  }
  byId<HTMLInputElement>("question").value = state.draft;
}

async function onAsk(): Promise<void> {
  const button = byId<HTMLButtonElement>("ask");
  button.disabled = true; // at most one in-flight question
  try {
    state = await submitQuestion(state, api);
  } finally {
    button.disabled = false;
  }
  renderState();
  await refreshTable();
}

async function boot(): Promise<void> {
  const picker = byId<HTMLSelectElement>("table-picker");
  try {
    const tables = await api.tables();
    for (const entry of tables) {
      const option = document.createElement("option");
      option.value = entry.id;
      option.textContent = entry.id;
      picker.append(option);
    }
    if (tables.length) {
      state = selectTable(state, tables[0]!.id);
      picker.value = tables[0]!.id;
    }
  } catch (err) {
    byId<HTMLDivElement>("error").replaceChildren(
      errorPanel(err instanceof Error ? err.message : String(err)));
  }
  picker.addEventListener("change", () => {
    state = selectTable(state, picker.value);
    void refreshTable();
  });
  byId<HTMLInputElement>("question").addEventListener("input", (event) => {
    state = editDraft(state, (event.target as HTMLInputElement).value);
  });
  byId<HTMLButtonElement>("ask").addEventListener("click", () => void onAsk());
  byId<HTMLInputElement>("question").addEventListener("keydown", (event) => {
    if (event.key === "Enter") {
      void onAsk();
    }
  });
  await refreshTable();
}

void boot();
