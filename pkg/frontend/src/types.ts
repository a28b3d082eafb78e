// Payload shapes of the engine's HTTP API. The console renders these
// verbatim; it never re-interprets matches on the client side.

export interface TermProvenance {
  term: string;
  index: number;
  target: string | null;
  kind: string; // exact | approximate | machine-learnt abductive match |
  //              rule-based abductive match | placeholder | unmatched | stopword
  confidence: number | null;
  used: boolean;
}

export interface AbductionFill {
  kind: string;
  column: string;
  heading: string;
  confidence: number | null;
  method: string;
}

export interface Interpretation {
  rewritten: string;
  note: string | null;
  doubt: boolean;
  sql: string | null;
  parse: Record<string, unknown>;
  terms: TermProvenance[];
  fills: AbductionFill[];
}

export interface AnswerCell {
  column: string;
  row: number;
}

export interface AnswerBody {
  kind: string; // scalar | list | boolean | none
  values: string[];
  cells: AnswerCell[];
  diagnostic: string | null;
}

export interface CandidatePayload {
  parse: Record<string, unknown>;
  score: number;
  features: Record<string, number>;
  chosen: boolean;
}

export interface AnswerPayload {
  answer: AnswerBody;
  interpretation: Interpretation;
  questionType: string | null;
  candidateCount: number;
  candidates: CandidatePayload[];
  unmatchedTerms: string[];
}

export interface ColumnInfo {
  id: string;
  name: string;
  role: string; // dimension | metric | date | time
  origin: string | null;
}

export interface TableDetail {
  id: string;
  name: string;
  columns: ColumnInfo[];
  bodyRows: number[];
  totalRows: number[];
  rows: string[][];
}

export interface TableListEntry {
  id: string;
}

export interface ApiError {
  error: { code: string; message: string };
}
