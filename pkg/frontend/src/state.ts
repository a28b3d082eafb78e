import type { AnswerPayload } from "./types.js";

export interface Turn {
  readonly question: string;
  readonly tableId: string;
  readonly response: AnswerPayload;
}

export interface ConsoleState {
  readonly tableId: string | null;
  readonly draft: string;
  readonly last: AnswerPayload | null;
  readonly history: readonly Turn[];
  readonly error: string | null;
}

export const initialState: ConsoleState = {
  tableId: null,
  draft: "",
  last: null,
  history: [],
  error: null,
};

export interface Asker {
  ask(question: string, tableId: string): Promise<AnswerPayload>;
}

export function selectTable(state: ConsoleState, tableId: string): ConsoleState {
  return { ...state, tableId, error: null };
}

export function editDraft(state: ConsoleState, draft: string): ConsoleState {
  return { ...state, draft };
}

/**
 * Send the draft question. On success the turn is appended to the history
 * (append-only) and the draft cleared; on any failure the state keeps the
 * draft and history untouched and carries an inline error message.
 */
export async function submitQuestion(
  state: ConsoleState,
  api: Asker,
): Promise<ConsoleState> {
  if (!state.tableId) {
    return { ...state, error: "pick a table first" };
  }
  const question = state.draft.trim();
  if (!question) {
    return { ...state, error: "type a question first" };
  }
  try {
    const response = await api.ask(question, state.tableId);
    const turn: Turn = { question, tableId: state.tableId, response };
    return {
      ...state,
      draft: "",
      last: response,
      history: [...state.history, turn],
      error: null,
    };
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    return { ...state, error: message };
  }
}
