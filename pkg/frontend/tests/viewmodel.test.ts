import { describe, expect, it } from 'vitest'

import type { SessionView } from '../src/types.js'
import {
  adjustmentSummary,
  bannerFor,
  formatQuantity,
  instructionText,
  toViewModel,
} from '../src/viewmodel.js'

function sampleView(overrides: Partial<SessionView> = {}): SessionView {
  return {
    session_id: 'abc',
    version: 3,
    status: 'Continue',
    contest: {
      candidates: ['A', 'B'],
      reported_winner: 'A',
      reported_tallies: { A: 700, B: 300 },
      n_total: 1000,
    },
    alpha: 0.05,
    adjusted_alpha: 0.0401,
    k: 6,
    s_star: 1000,
    s: 2,
    delta: 7.19e-4,
    eps2: 0.00225,
    risk_adjustment: {
      s: 1000,
      delta: 7.19e-4,
      eps1: 8.78e-4,
      s_prime: 4,
      eps2: 0.00225,
      bound: 9.9e-3,
    },
    pairs: [
      { winner: 'A', loser: 'B', log_likelihood_ratio: 1.6, threshold: 3.2 },
    ],
    plan: { seed: 42, k: 6, s_star: 1000, allocations: [], overflow_positions: [] },
    remaining_plan: { allocations: [], overflow_positions: [] },
    next_instruction: { method: 'kcut', k: 6, stack_id: 'box-1', remaining_in_stack: 5 },
    ...overrides,
  }
}

describe('banner mapping', () => {
  it('passes the service status through untouched', () => {
    for (const status of ['Continue', 'AcceptReported', 'EscalateToFullCount'] as const) {
      expect(bannerFor(status).status).toBe(status)
    }
  })

  it('tones match the three outcomes', () => {
    expect(bannerFor('Continue').tone).toBe('active')
    expect(bannerFor('AcceptReported').tone).toBe('success')
    expect(bannerFor('EscalateToFullCount').tone).toBe('alert')
  })
})

describe('toViewModel', () => {
  it('derives progress against s_star', () => {
    const vm = toViewModel(sampleView({ s: 250 }))
    expect(vm.progress).toBeCloseTo(0.25)
    expect(vm.drawsCap).toBe(1000)
  })

  it('clamps progress at 1', () => {
    const vm = toViewModel(sampleView({ s: 2000 }))
    expect(vm.progress).toBe(1)
  })

  it('pair progress fraction is llr over threshold', () => {
    const vm = toViewModel(sampleView())
    expect(vm.pairs[0].fraction).toBeCloseTo(0.5)
    expect(vm.pairs[0].crossed).toBe(false)
  })

  it('never re-derives status client-side', () => {
    // llr above threshold but service says Continue: view model says Continue
    const vm = toViewModel(
      sampleView({
        pairs: [{ winner: 'A', loser: 'B', log_likelihood_ratio: 9, threshold: 3 }],
      }),
    )
    expect(vm.banner.status).toBe('Continue')
    expect(vm.terminal).toBe(false)
  })

  it('terminal states disable drawing', () => {
    expect(toViewModel(sampleView({ status: 'AcceptReported' })).terminal).toBe(true)
    expect(toViewModel(sampleView({ status: 'EscalateToFullCount' })).terminal).toBe(true)
  })
})

describe('instruction text', () => {
  it('renders a k-cut instruction', () => {
    const text = instructionText({
      method: 'kcut',
      k: 3,
      stack_id: '5',
      remaining_in_stack: 2,
    })
    expect(text).toBe(
      'Stack 5: perform 3 cuts, take the top ballot (2 draw(s) left in this stack)',
    )
  })

  it('renders a position instruction', () => {
    const text = instructionText({ method: 'position', stack_id: 'box-2', position: 17 })
    expect(text).toContain('position 17')
  })

  it('null instruction maps to null', () => {
    expect(instructionText(null)).toBeNull()
  })
})

describe('adjustment summary', () => {
  it('extracts the quantities the auditor must record', () => {
    const s = adjustmentSummary(sampleView())
    expect(s).toEqual({
      k: 6,
      alpha: 0.05,
      adjustedAlpha: 0.0401,
      delta: 7.19e-4,
      eps2: 0.00225,
      sPrime: 4,
      eps1: 8.78e-4,
      bound: 9.9e-3,
    })
  })
})

describe('formatQuantity', () => {
  it('uses fixed notation for moderate values', () => {
    expect(formatQuantity(0.04012)).toBe('0.0401')
    expect(formatQuantity(1.5)).toBe('1.5')
    expect(formatQuantity(0)).toBe('0')
  })

  it('uses scientific notation for tiny values', () => {
    expect(formatQuantity(7.19e-4)).toBe('7.19e-4')
  })
})
