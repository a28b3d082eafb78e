import { describe, expect, it } from "vitest";

import {
  editDraft, initialState, selectTable, submitQuestion,
} from "../src/state.js";
import type { AnswerPayload } from "../src/types.js";

const fakeResponse = {
  answer: { kind: "scalar", values: ["Octane"], cells: [], diagnostic: null },
  interpretation: {
    rewritten: "q", note: null, doubt: false, sql: null, parse: {},
    terms: [], fills: [],
  },
  questionType: "LOOKUP",
  candidateCount: 1,
  candidates: [],
  unmatchedTerms: [],
} satisfies AnswerPayload;

function okApi() {
  const calls: Array<{ question: string; tableId: string }> = [];
  return {
    calls,
    ask: async (question: string, tableId: string) => {
      calls.push({ question, tableId });
      return fakeResponse;
    },
  };
}

describe("submitQuestion", () => {
  it("appends a turn and clears the draft", async () => {
    const api = okApi();
    let state = selectTable(initialState, "credits.csv");
    state = editDraft(state, "in what movie?");
    const next = await submitQuestion(state, api);
    expect(next.history).toHaveLength(1);
    expect(next.history[0]!.question).toBe("in what movie?");
    expect(next.draft).toBe("");
    expect(next.error).toBeNull();
    expect(api.calls).toEqual([{ question: "in what movie?", tableId: "credits.csv" }]);
  });

  it("keeps the history append-only across turns", async () => {
    const api = okApi();
    let state = selectTable(initialState, "credits.csv");
    state = await submitQuestion(editDraft(state, "first?"), api);
    const firstHistory = state.history;
    state = await submitQuestion(editDraft(state, "second?"), api);
    expect(state.history).toHaveLength(2);
    expect(firstHistory).toHaveLength(1); // earlier snapshot untouched
    expect(state.history[0]).toBe(firstHistory[0]);
  });

  it("server errors keep draft and history, surface inline", async () => {
    const api = {
      ask: async () => {
        throw new Error("no table 'ghost.csv'");
      },
    };
    let state = selectTable(initialState, "ghost.csv");
    state = editDraft(state, "anything?");
    const next = await submitQuestion(state, api);
    expect(next.error).toContain("ghost.csv");
    expect(next.draft).toBe("anything?");
    expect(next.history).toHaveLength(0);
  });

  it("requires a table and a non-empty draft", async () => {
    const api = okApi();
    const noTable = await submitQuestion(editDraft(initialState, "q?"), api);
    expect(noTable.error).toMatch(/table/);
    const noDraft = await submitQuestion(
      selectTable(initialState, "credits.csv"), api);
    expect(noDraft.error).toMatch(/question/);
    expect(api.calls).toHaveLength(0);
  });

  it("re-asking after rephrasing adds a new turn on the same table", async () => {
    const api = okApi();
    let state = selectTable(initialState, "credits.csv");
    state = await submitQuestion(editDraft(state, "where barton?"), api);
    state = await submitQuestion(editDraft(state, "in what movie was barton?"), api);
    expect(state.history.map((t) => t.tableId)).toEqual(
      ["credits.csv", "credits.csv"]);
  });
});
