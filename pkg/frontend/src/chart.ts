// Log-scale convergence chart, rendered as a standalone SVG string.
// Values at or below the floor (a uniform source's vd) draw along the
// bottom edge rather than exploding the log scale.

import type { ConvergenceRow } from './types.js'

export const LOG_FLOOR = 1e-12

export type ChartGeometry = {
  width: number
  height: number
  margin: number
}

export const DEFAULT_GEOMETRY: ChartGeometry = { width: 640, height: 320, margin: 40 }

export function logClamp(value: number): number {
  return Math.log10(Math.max(value, LOG_FLOOR))
}

/** Map k (1..kMax) to an x pixel; a single point sits at the left edge. */
export function xScale(k: number, kMax: number, geom: ChartGeometry): number {
  const span = geom.width - 2 * geom.margin
  if (kMax <= 1) return geom.margin
  return geom.margin + ((k - 1) / (kMax - 1)) * span
}

export function yScale(
  value: number,
  loExp: number,
  hiExp: number,
  geom: ChartGeometry,
): number {
  const span = geom.height - 2 * geom.margin
  const v = logClamp(value)
  if (hiExp === loExp) return geom.height - geom.margin
  return geom.height - geom.margin - ((v - loExp) / (hiExp - loExp)) * span
}

export function seriesPath(
  rows: ConvergenceRow[],
  pick: (r: ConvergenceRow) => number,
  geom: ChartGeometry = DEFAULT_GEOMETRY,
): string {
  if (rows.length === 0) return ''
  const kMax = Math.max(...rows.map((r) => r.k))
  const exps = rows.map((r) => logClamp(pick(r)))
  const loExp = Math.min(...exps, Math.log10(LOG_FLOOR))
  const hiExp = Math.max(...exps, 0)
  return rows
    .map((r, i) => {
      const x = xScale(r.k, kMax, geom)
      const y = yScale(pick(r), loExp, hiExp, geom)
      return `${i === 0 ? 'M' : 'L'}${x.toFixed(1)},${y.toFixed(1)}`
    })
    .join(' ')
}

export function convergenceChartSvg(
  rows: ConvergenceRow[],
  geom: ChartGeometry = DEFAULT_GEOMETRY,
): string {
  const vdPath = seriesPath(rows, (r) => r.vd, geom)
  const epsPath = seriesPath(rows, (r) => r.eps, geom)
  const ticks = rows
    .map((r) => {
      const x = xScale(r.k, Math.max(...rows.map((q) => q.k)), geom)
      return (
        `<text x="${x.toFixed(1)}" y="${geom.height - geom.margin / 3}" ` +
        `text-anchor="middle" class="tick">${r.k}</text>`
      )
    })
    .join('')
  return (
    `<svg viewBox="0 0 ${geom.width} ${geom.height}" role="img" ` +
    `aria-label="distance from uniform vs number of cuts">` +
    `<path d="${vdPath}" class="series vd" fill="none"/>` +
    `<path d="${epsPath}" class="series eps" fill="none"/>` +
    `${ticks}</svg>`
  )
}
