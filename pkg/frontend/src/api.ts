import type { AnswerPayload, TableDetail, TableListEntry } from "./types.js";

export class ApiRequestError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function parseError(response: Response): Promise<never> {
  let message = `${response.status}`;
  try {
    const body = await response.json();
    if (body?.error?.message) {
      message = body.error.message;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiRequestError(response.status, message);
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path);
    if (!response.ok) {
      await parseError(response);
    }
    return response.json() as Promise<T>;
  }

  async tables(): Promise<TableListEntry[]> {
    const body = await this.get<{ tables: TableListEntry[] }>("/tables");
    return body.tables;
  }

  async table(id: string): Promise<TableDetail> {
    return this.get<TableDetail>(`/tables/${id}`);
  }

  async ask(question: string, tableId: string): Promise<AnswerPayload> {
    const response = await fetch(this.baseUrl + "/answer", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ question, tableId }),
    });
    if (!response.ok) {
      await parseError(response);
    }
    return response.json() as Promise<AnswerPayload>;
  }
}
