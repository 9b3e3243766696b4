// Mirrors of the service's JSON views. Field names match the wire format.

export type Contest = {
  candidates: string[]
  reported_winner: string
  reported_tallies: Record<string, number>
  n_total: number
}

export type RiskAdjustment = {
  s: number
  delta: number
  eps1: number
  s_prime: number
  eps2: number
  bound: number
}

export type PairStatistic = {
  winner: string
  loser: string
  log_likelihood_ratio: number
  threshold: number
}

export type PlanAllocation = { stack_id: string; draws: number }
export type OverflowPosition = { stack_id: string; position: number }

export type Plan = {
  seed: number
  k: number
  s_star: number
  allocations: PlanAllocation[]
  overflow_positions: OverflowPosition[]
}

export type Instruction =
  | { method: 'kcut'; k: number; stack_id: string; remaining_in_stack: number }
  | { method: 'position'; stack_id: string; position: number }
  | null

export type SessionStatus = 'Continue' | 'AcceptReported' | 'EscalateToFullCount'

export type SessionView = {
  session_id: string
  version: number
  status: SessionStatus
  contest: Contest
  alpha: number
  adjusted_alpha: number
  k: number
  s_star: number
  s: number
  delta: number
  eps2: number
  risk_adjustment: RiskAdjustment
  pairs: PairStatistic[]
  plan: Plan
  remaining_plan: { allocations: PlanAllocation[]; overflow_positions: OverflowPosition[] }
  next_instruction: Instruction
  extension?: { d: number; unlikely_to_complete: boolean; s_star: number }
}

export type ConvergenceRow = { k: number; model: string; vd: number; eps: number }

export type ManifestRow = { stack_id: string; count: number }

export type CreateSessionRequest = {
  contest: Contest
  alpha: number
  manifest: ManifestRow[]
  s_star: number
  seed: number
  k?: number
  budget?: number
  eps1_target?: number
  model?: string
  cut_records?: string
}
