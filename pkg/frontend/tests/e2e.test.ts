// End-to-end: the console flow against the real session service.
// Creates a session through the wizard logic (budget 1% -> k=6), enters
// a scripted two-candidate draw sequence until the threshold-crossing
// ballot flips the banner to AcceptReported, and reloads mid-session to
// confirm the console holds no state of its own.

import { spawn, type ChildProcess } from 'node:child_process'
import { mkdtempSync } from 'node:fs'
import { tmpdir } from 'node:os'
import { join } from 'node:path'
import { afterAll, beforeAll, describe, expect, it } from 'vitest'

import { ApiClient, ApiError } from '../src/api.js'
import type { SessionView } from '../src/types.js'
import { adjustmentSummary, bannerFor, toViewModel } from '../src/viewmodel.js'
import { buildRequest, validateForm, type WizardForm } from '../src/wizard.js'

const PORT = 8655
const BASE = `http://127.0.0.1:${PORT}`

let service: ChildProcess

async function waitForService(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const res = await fetch(`${BASE}/api/v1/sessions/probe`)
      if (res.status === 404) return
    } catch {
      /* not up yet */
    }
    await new Promise((r) => setTimeout(r, 150))
  }
  throw new Error('service did not come up')
}

beforeAll(async () => {
  const dataDir = mkdtempSync(join(tmpdir(), 'kcut-e2e-'))
  service = spawn(
    'python3',
    [
      '-c',
      'import sys, uvicorn; from kcut.service import create_app; ' +
        `uvicorn.run(create_app(sys.argv[1]), host="127.0.0.1", port=${PORT}, log_level="error")`,
      dataDir,
    ],
    { stdio: 'ignore' },
  )
  await waitForService()
}, 30_000)

afterAll(() => {
  service?.kill()
})

const form: WizardForm = {
  candidates: ['A', 'B'],
  reportedWinner: 'A',
  reportedTallies: { A: 700, B: 300 },
  nTotal: 1000,
  alpha: 0.05,
  sStar: 1000,
  seed: 42,
  manifest: [
    { stack_id: 'box-1', count: 600 },
    { stack_id: 'box-2', count: 400 },
  ],
  mode: 'budget',
  budget: 0.01,
}

describe('console end-to-end session', () => {
  const api = new ApiClient(BASE)
  let view: SessionView

  it('wizard with a 1% budget creates the session and shows k=6', async () => {
    expect(validateForm(form)).toEqual({ ok: true })
    view = await api.createSession(buildRequest(form))
    const summary = adjustmentSummary(view)
    expect(summary.k).toBe(6)
    expect(summary.adjustedAlpha).toBeCloseTo(0.0401, 3)
    expect(summary.sPrime).toBe(4)
    expect(bannerFor(view.status).tone).toBe('active')
    expect(toViewModel(view).instructionText).toContain('perform 6 cuts')
  })

  it('reloading mid-session reproduces the exact view from the service', async () => {
    for (let i = 0; i < 5; i++) {
      view = await api.recordDraw(view.session_id, 'box-1', 'A')
    }
    expect(view.s).toBe(5)
    expect(view.status).toBe('Continue')
    const reloaded = await api.getSession(view.session_id)
    expect(reloaded).toEqual(view) // console holds no authoritative state
  })

  it('the threshold-crossing ballot flips the banner to AcceptReported', async () => {
    // alpha' ~ 0.0401 needs ten 1.4x winner multipliers; five recorded so far
    for (let i = 0; i < 4; i++) {
      view = await api.recordDraw(view.session_id, 'box-1', 'A')
      expect(view.status).toBe('Continue')
    }
    view = await api.recordDraw(view.session_id, 'box-1', 'A')
    expect(view.status).toBe('AcceptReported')
    const vm = toViewModel(view)
    expect(vm.banner.tone).toBe('success')
    expect(vm.terminal).toBe(true)
    expect(vm.pairs[0].crossed).toBe(true)
  })

  it('draw entry on the finalized session surfaces the conflict inline', async () => {
    const err = await api.recordDraw(view.session_id, 'box-1', 'A').catch((e) => e)
    expect(err).toBeInstanceOf(ApiError)
    expect(err.status).toBe(409)
    expect(err.detail).toContain('finalized')
  })

  it('a fresh load after finalization still shows the terminal state', async () => {
    const reloaded = await api.getSession(view.session_id)
    expect(reloaded).toEqual(view)
    expect(toViewModel(reloaded).banner.status).toBe('AcceptReported')
  })

  it('the convergence explorer fetches real Table rows', async () => {
    const { rows } = await api.fetchConvergence('empirical', 6)
    expect(rows).toHaveLength(6)
    expect(rows[5].vd).toBeCloseTo(0.000719, 5)
  })
})
