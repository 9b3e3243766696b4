// Derived presentation state for one session view. Status is always the
// service's own status string; nothing here re-derives accept/continue.

import type { Instruction, SessionStatus, SessionView } from './types.js'

export type Banner = {
  status: SessionStatus
  label: string
  tone: 'active' | 'success' | 'alert'
}

export type PairProgress = {
  winner: string
  loser: string
  llr: number
  threshold: number
  /** llr / threshold clamped to [0, 1]; 1 means this pair has crossed. */
  fraction: number
  crossed: boolean
}

export type SessionViewModel = {
  view: SessionView
  banner: Banner
  drawsDone: number
  drawsCap: number
  /** draws / s_star clamped to [0, 1] */
  progress: number
  pairs: PairProgress[]
  instructionText: string | null
  terminal: boolean
}

const BANNERS: Record<SessionStatus, Omit<Banner, 'status'>> = {
  Continue: { label: 'Audit in progress - keep drawing ballots', tone: 'active' },
  AcceptReported: { label: 'Reported outcome confirmed at the adjusted risk limit', tone: 'success' },
  EscalateToFullCount: { label: 'Evidence insufficient - escalate to a full hand count', tone: 'alert' },
}

export function bannerFor(status: SessionStatus): Banner {
  const base = BANNERS[status]
  return { status, ...base }
}

export function instructionText(instruction: Instruction): string | null {
  if (instruction === null) return null
  if (instruction.method === 'kcut') {
    const plural = instruction.k === 1 ? 'cut' : 'cuts'
    return (
      `Stack ${instruction.stack_id}: perform ${instruction.k} ${plural}, ` +
      `take the top ballot (${instruction.remaining_in_stack} draw(s) left in this stack)`
    )
  }
  return `Stack ${instruction.stack_id}: count down to ballot position ${instruction.position} (0 = top)`
}

export function pairProgress(view: SessionView): PairProgress[] {
  return view.pairs.map((p) => {
    const fraction =
      p.threshold <= 0 ? 1 : Math.min(Math.max(p.log_likelihood_ratio / p.threshold, 0), 1)
    return {
      winner: p.winner,
      loser: p.loser,
      llr: p.log_likelihood_ratio,
      threshold: p.threshold,
      fraction,
      crossed: p.log_likelihood_ratio >= p.threshold,
    }
  })
}

export function toViewModel(view: SessionView): SessionViewModel {
  const cap = view.s_star
  return {
    view,
    banner: bannerFor(view.status),
    drawsDone: view.s,
    drawsCap: cap,
    progress: cap > 0 ? Math.min(view.s / cap, 1) : 1,
    pairs: pairProgress(view),
    instructionText: instructionText(view.next_instruction),
    terminal: view.status !== 'Continue',
  }
}

/** Summary the auditor records on paper after session creation. */
export type AdjustmentSummary = {
  k: number
  alpha: number
  adjustedAlpha: number
  delta: number
  eps2: number
  sPrime: number
  eps1: number
  bound: number
}

export function adjustmentSummary(view: SessionView): AdjustmentSummary {
  return {
    k: view.k,
    alpha: view.alpha,
    adjustedAlpha: view.adjusted_alpha,
    delta: view.risk_adjustment.delta,
    eps2: view.risk_adjustment.eps2,
    sPrime: view.risk_adjustment.s_prime,
    eps1: view.risk_adjustment.eps1,
    bound: view.risk_adjustment.bound,
  }
}

export function formatQuantity(x: number): string {
  if (x === 0) return '0'
  const abs = Math.abs(x)
  if (abs >= 0.001 && abs < 10000) return x.toPrecision(3).replace(/\.?0+$/, '')
  return x.toExponential(2)
}
