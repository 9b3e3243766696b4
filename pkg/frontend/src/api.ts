// Thin client over the session service. The console never mutates state
// locally: every transition is one service call whose response replaces
// the rendered view.

import type { ConvergenceRow, CreateSessionRequest, SessionView } from './types.js'

export class ApiError extends Error {
  readonly status: number
  readonly detail: string

  constructor(status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`)
    this.status = status
    this.detail = detail
  }
}

/** Network-level failure (service unreachable); callers offer a retry. */
export class OfflineError extends Error {
  constructor(cause: unknown) {
    super('service unreachable')
    this.cause = cause
  }
}

async function parseDetail(res: Response): Promise<string> {
  try {
    const body = await res.json()
    if (typeof body?.detail === 'string') return body.detail
    return JSON.stringify(body)
  } catch {
    return res.statusText
  }
}

export class ApiClient {
  constructor(private readonly baseUrl: string = '') {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let res: Response
    try {
      res = await fetch(this.baseUrl + path, init)
    } catch (err) {
      throw new OfflineError(err)
    }
    if (!res.ok) {
      throw new ApiError(res.status, await parseDetail(res))
    }
    return (await res.json()) as T
  }

  createSession(req: CreateSessionRequest): Promise<SessionView> {
    return this.request('/api/v1/sessions', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(req),
    })
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request(`/api/v1/sessions/${sessionId}`)
  }

  recordDraw(sessionId: string, stackId: string, choice: string): Promise<SessionView> {
    return this.request(`/api/v1/sessions/${sessionId}/draws`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ stack_id: stackId, choice }),
    })
  }

  requestExtension(
    sessionId: string,
    method: 'multinomial' | 'polya',
    multiplier: 2 | 3,
    trials: number,
    seed: number,
  ): Promise<SessionView> {
    return this.request(`/api/v1/sessions/${sessionId}/extension`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ method, multiplier, trials, seed }),
    })
  }

  fetchConvergence(model: string, kmax: number): Promise<{ rows: ConvergenceRow[] }> {
    const params = new URLSearchParams({ model, kmax: String(kmax) })
    return this.request(`/api/v1/analysis/convergence?${params}`)
  }
}
