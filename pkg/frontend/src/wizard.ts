// Setup wizard: validates the form, builds the create-session request,
// and interprets the service's answer. Budget and explicit k are
// mutually exclusive; whichever is set disables the other.

import type { CreateSessionRequest, ManifestRow } from './types.js'

export type WizardForm = {
  candidates: string[]
  reportedWinner: string
  reportedTallies: Record<string, number>
  nTotal: number
  alpha: number
  sStar: number
  seed: number
  manifest: ManifestRow[]
  mode: 'budget' | 'k'
  budget?: number
  k?: number
  cutRecordsCsv?: string
}

export type ValidationResult = { ok: true } | { ok: false; errors: string[] }

export function kFieldDisabled(form: Pick<WizardForm, 'mode'>): boolean {
  return form.mode === 'budget'
}

export function budgetFieldDisabled(form: Pick<WizardForm, 'mode'>): boolean {
  return form.mode === 'k'
}

export function validateForm(form: WizardForm): ValidationResult {
  const errors: string[] = []
  if (form.candidates.length < 2) errors.push('at least two candidates are required')
  if (new Set(form.candidates).size !== form.candidates.length)
    errors.push('candidate names must be unique')
  if (!form.candidates.includes(form.reportedWinner))
    errors.push('reported winner must be one of the candidates')
  const tallySum = form.candidates.reduce(
    (acc, c) => acc + (form.reportedTallies[c] ?? 0),
    0,
  )
  if (tallySum > form.nTotal) errors.push('reported tallies exceed ballots cast')
  if (!(form.alpha > 0 && form.alpha < 1)) errors.push('risk limit must lie in (0, 1)')
  if (!(form.sStar >= 1)) errors.push('sample-size cap must be at least 1')
  if (form.manifest.length === 0) errors.push('manifest needs at least one stack')
  if (form.manifest.some((r) => !r.stack_id || r.count < 1))
    errors.push('every stack needs an id and a positive count')
  const ids = form.manifest.map((r) => r.stack_id)
  if (new Set(ids).size !== ids.length) errors.push('stack ids must be unique')
  if (form.mode === 'budget') {
    if (!(form.budget !== undefined && form.budget > 0 && form.budget < 1))
      errors.push('adjustment budget must lie in (0, 1)')
  } else {
    if (!(form.k !== undefined && Number.isInteger(form.k) && form.k >= 1))
      errors.push('cut count k must be a positive integer')
  }
  return errors.length ? { ok: false, errors } : { ok: true }
}

export function buildRequest(form: WizardForm): CreateSessionRequest {
  const req: CreateSessionRequest = {
    contest: {
      candidates: form.candidates,
      reported_winner: form.reportedWinner,
      reported_tallies: form.reportedTallies,
      n_total: form.nTotal,
    },
    alpha: form.alpha,
    manifest: form.manifest,
    s_star: form.sStar,
    seed: form.seed,
  }
  if (form.mode === 'budget') req.budget = form.budget
  else req.k = form.k
  if (form.cutRecordsCsv && form.cutRecordsCsv.trim().length > 0)
    req.cut_records = form.cutRecordsCsv
  return req
}

export function parseManifestCsv(text: string): ManifestRow[] {
  const lines = text.split('\n').map((l) => l.trim()).filter((l) => l.length > 0)
  if (lines.length === 0 || lines[0] !== 'stack_id,count') {
    throw new Error("manifest must start with header 'stack_id,count'")
  }
  return lines.slice(1).map((line) => {
    const [sid, count] = line.split(',')
    const parsed = Number(count)
    if (!sid || !Number.isFinite(parsed)) throw new Error(`bad manifest row: ${line}`)
    return { stack_id: sid.trim(), count: parsed }
  })
}

/**
 * Service rejections are shown verbatim; a bound that consumes the risk
 * limit is the one blocking case worth calling out specially.
 */
export function rejectionBanner(detail: string): { blocking: boolean; message: string } {
  return {
    blocking: detail.includes('AdjustmentExhaustsRiskLimit') || detail.includes('BudgetUnreachable'),
    message: detail,
  }
}
