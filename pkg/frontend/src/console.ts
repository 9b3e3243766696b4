// DOM wiring. All state lives in the service; this layer renders the
// latest SessionView and forwards form submissions.

import { ApiClient, ApiError, OfflineError } from './api.js'
import { convergenceChartSvg } from './chart.js'
import type { SessionView } from './types.js'
import {
  adjustmentSummary,
  formatQuantity,
  toViewModel,
} from './viewmodel.js'
import {
  buildRequest,
  parseManifestCsv,
  rejectionBanner,
  validateForm,
  type WizardForm,
} from './wizard.js'

const SESSION_KEY = 'kcut-session-id'

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id)
  if (!node) throw new Error(`missing element #${id}`)
  return node as T
}

function setText(id: string, text: string): void {
  el(id).textContent = text
}

function showError(id: string, message: string | null): void {
  const node = el(id)
  node.textContent = message ?? ''
  node.classList.toggle('hidden', message === null)
}

export class AuditConsole {
  private view: SessionView | null = null

  constructor(private readonly api: ApiClient) {}

  async start(): Promise<void> {
    this.bindWizard()
    this.bindDrawEntry()
    this.bindExplorer()
    const existing = window.localStorage.getItem(SESSION_KEY)
    if (existing) {
      try {
        this.render(await this.api.getSession(existing))
      } catch {
        window.localStorage.removeItem(SESSION_KEY)
      }
    }
  }

  private readWizardForm(): WizardForm {
    const candidates = el<HTMLInputElement>('wiz-candidates').value
      .split(',')
      .map((c) => c.trim())
      .filter((c) => c.length > 0)
    const tallies: Record<string, number> = {}
    el<HTMLInputElement>('wiz-tallies').value.split(',').forEach((part) => {
      const [name, v] = part.split(':')
      if (name && v !== undefined) tallies[name.trim()] = Number(v)
    })
    const mode = el<HTMLInputElement>('wiz-mode-budget').checked ? 'budget' : 'k'
    return {
      candidates,
      reportedWinner: el<HTMLInputElement>('wiz-winner').value.trim(),
      reportedTallies: tallies,
      nTotal: Number(el<HTMLInputElement>('wiz-ntotal').value),
      alpha: Number(el<HTMLInputElement>('wiz-alpha').value),
      sStar: Number(el<HTMLInputElement>('wiz-sstar').value),
      seed: Number(el<HTMLInputElement>('wiz-seed').value),
      manifest: parseManifestCsv(el<HTMLTextAreaElement>('wiz-manifest').value),
      mode,
      budget: Number(el<HTMLInputElement>('wiz-budget').value) || undefined,
      k: Number(el<HTMLInputElement>('wiz-k').value) || undefined,
    }
  }

  private bindWizard(): void {
    const syncMode = () => {
      const budgetMode = el<HTMLInputElement>('wiz-mode-budget').checked
      el<HTMLInputElement>('wiz-budget').disabled = !budgetMode
      el<HTMLInputElement>('wiz-k').disabled = budgetMode
    }
    el('wiz-mode-budget').addEventListener('change', syncMode)
    el('wiz-mode-k').addEventListener('change', syncMode)
    syncMode()

    el('wiz-submit').addEventListener('click', async () => {
      let form: WizardForm
      try {
        form = this.readWizardForm()
      } catch (err) {
        showError('wiz-error', String(err instanceof Error ? err.message : err))
        return
      }
      const check = validateForm(form)
      if (!check.ok) {
        showError('wiz-error', check.errors.join('; '))
        return
      }
      showError('wiz-error', null)
      try {
        const view = await this.api.createSession(buildRequest(form))
        window.localStorage.setItem(SESSION_KEY, view.session_id)
        this.renderAdjustmentSummary(view)
        this.render(view)
      } catch (err) {
        if (err instanceof ApiError) {
          const banner = rejectionBanner(err.detail)
          showError('wiz-error', banner.blocking ? `BLOCKED: ${banner.message}` : banner.message)
        } else if (err instanceof OfflineError) {
          showError('wiz-error', 'service unreachable - check the server and retry')
        } else {
          throw err
        }
      }
    })
  }

  private renderAdjustmentSummary(view: SessionView): void {
    const s = adjustmentSummary(view)
    setText(
      'adjustment-summary',
      `k=${s.k}  alpha'=${formatQuantity(s.adjustedAlpha)}  ` +
        `delta=${formatQuantity(s.delta)}  eps2=${formatQuantity(s.eps2)}  ` +
        `s'=${s.sPrime}  bound=${formatQuantity(s.bound)}`,
    )
  }

  private bindDrawEntry(): void {
    el('draw-submit').addEventListener('click', async () => {
      if (!this.view) return
      const stackId = el<HTMLInputElement>('draw-stack').value.trim()
      const choice = el<HTMLInputElement>('draw-choice').value.trim()
      try {
        this.render(await this.api.recordDraw(this.view.session_id, stackId, choice))
        showError('draw-error', null)
      } catch (err) {
        if (err instanceof ApiError) {
          showError('draw-error', err.detail)
        } else if (err instanceof OfflineError) {
          showError('draw-error', 'service unreachable - the draw was not recorded; retry')
        } else {
          throw err
        }
      }
    })
  }

  private bindExplorer(): void {
    el('explorer-run').addEventListener('click', async () => {
      const model = el<HTMLSelectElement>('explorer-model').value
      const kmax = Number(el<HTMLInputElement>('explorer-kmax').value)
      try {
        const { rows } = await this.api.fetchConvergence(model, kmax)
        el('explorer-chart').innerHTML = convergenceChartSvg(rows)
        el('explorer-table').innerHTML = rows
          .map(
            (r) =>
              `<tr><td>${r.k}</td><td>${formatQuantity(r.vd)}</td>` +
              `<td>${formatQuantity(r.eps)}</td></tr>`,
          )
          .join('')
      } catch (err) {
        showError('explorer-error', err instanceof Error ? err.message : String(err))
      }
    })
  }

  render(view: SessionView): void {
    this.view = view
    const vm = toViewModel(view)
    el('session-panel').classList.remove('hidden')
    setText('session-id', view.session_id)
    setText('session-version', String(view.version))
    const banner = el('status-banner')
    banner.textContent = vm.banner.label
    banner.dataset.status = vm.banner.status
    banner.className = `banner ${vm.banner.tone}`
    setText('session-progress', `${vm.drawsDone} / ${vm.drawsCap} draws`)
    el('pair-table').innerHTML = vm.pairs
      .map(
        (p) =>
          `<tr><td>${p.winner} vs ${p.loser}</td>` +
          `<td>${formatQuantity(p.llr)} / ${formatQuantity(p.threshold)}</td>` +
          `<td>${(100 * p.fraction).toFixed(0)}%${p.crossed ? ' (crossed)' : ''}</td></tr>`,
      )
      .join('')
    setText('instruction', vm.instructionText ?? 'No planned draws remain.')
    el<HTMLButtonElement>('draw-submit').disabled = vm.terminal
    el<HTMLInputElement>('draw-stack').disabled = vm.terminal
    el<HTMLInputElement>('draw-choice').disabled = vm.terminal
  }
}

export function boot(): void {
  const api = new ApiClient('')
  void new AuditConsole(api).start()
}
