// Typed client for the screening service. The UI talks to the documented
// v1 endpoints only; every call site goes through this module.

import type { ApiErrorBody, RiskReport, TaskName } from './types';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    detail: string,
  ) {
    super(`${code}: ${detail}`);
  }
}

async function raise(response: Response): Promise<never> {
  let code = 'unknown_error';
  let detail = `HTTP ${response.status}`;
  try {
    const body = (await response.json()) as ApiErrorBody;
    code = body.error.code;
    detail = body.error.detail;
  } catch {
    // non-JSON error body; keep the defaults
  }
  throw new ApiError(response.status, code, detail);
}

export class ScreeningApi {
  constructor(private readonly baseUrl: string = '') {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async health(): Promise<boolean> {
    try {
      const response = await fetch(this.url('/healthz'));
      return response.ok;
    } catch {
      return false;
    }
  }

  async createSession(participant = '', region = '*'): Promise<string> {
    const response = await fetch(this.url('/api/v1/sessions'), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ participant, region }),
    });
    if (!response.ok) await raise(response);
    const body = (await response.json()) as { session_id: string };
    return body.session_id;
  }

  async uploadArtifact(sessionId: string, task: TaskName, data: Blob | ArrayBuffer): Promise<void> {
    const response = await fetch(
      this.url(`/api/v1/sessions/${sessionId}/tasks/${task}`),
      { method: 'PUT', body: data },
    );
    if (!response.ok) await raise(response);
  }

  async analyze(sessionId: string): Promise<RiskReport> {
    const response = await fetch(
      this.url(`/api/v1/sessions/${sessionId}/analyze`),
      { method: 'POST' },
    );
    if (!response.ok) await raise(response);
    return (await response.json()) as RiskReport;
  }

  async getReport(sessionId: string): Promise<RiskReport> {
    const response = await fetch(this.url(`/api/v1/sessions/${sessionId}/report`));
    if (!response.ok) await raise(response);
    return (await response.json()) as RiskReport;
  }

  /** Poll the report with exponential backoff until it exists. */
  async pollReport(
    sessionId: string,
    options: { maxAttempts?: number; baseDelayMs?: number; sleep?: (ms: number) => Promise<void> } = {},
  ): Promise<RiskReport> {
    const maxAttempts = options.maxAttempts ?? 8;
    const baseDelay = options.baseDelayMs ?? 500;
    const sleep = options.sleep ?? ((ms) => new Promise((r) => setTimeout(r, ms)));
    let lastError: unknown = null;
    for (let attempt = 0; attempt < maxAttempts; attempt++) {
      try {
        return await this.getReport(sessionId);
      } catch (err) {
        if (!(err instanceof ApiError) || err.code !== 'not_analyzed') throw err;
        lastError = err;
        await sleep(baseDelay * 2 ** attempt);
      }
    }
    throw lastError;
  }
}
