/** Grouped means and standard errors over raw metric rows. */

import { MetricsRow } from './csv.js';

export interface SeriesPoint {
  x: string;
  mean: number;
  se: number;
  n: number;
}

export function meanAndSe(values: number[]): { mean: number; se: number } {
  const n = values.length;
  if (n === 0) {
    throw new Error('empty sample');
  }
  const mean = values.reduce((a, b) => a + b, 0) / n;
  if (n === 1) {
    return { mean, se: 0 };
  }
  const variance = values.reduce((a, b) => a + (b - mean) * (b - mean), 0) / (n - 1);
  return { mean, se: Math.sqrt(variance / n) };
}

export type YColumn = 'expected_fidelity_sum' | 'accepted_requests';

/** One line per algorithm: mean y per swept value, across seeds. */
export function groupSeries(rows: MetricsRow[], y: YColumn): Map<string, SeriesPoint[]> {
  const byAlgo = new Map<string, Map<string, number[]>>();
  const valueOrder: string[] = [];
  for (const row of rows) {
    if (!byAlgo.has(row.algorithm)) {
      byAlgo.set(row.algorithm, new Map());
    }
    const byValue = byAlgo.get(row.algorithm)!;
    if (!byValue.has(row.paramValue)) {
      byValue.set(row.paramValue, []);
      if (!valueOrder.includes(row.paramValue)) {
        valueOrder.push(row.paramValue);
      }
    }
    byValue
      .get(row.paramValue)!
      .push(y === 'expected_fidelity_sum' ? row.expectedFidelitySum : row.acceptedRequests);
  }
  const out = new Map<string, SeriesPoint[]>();
  for (const [algo, byValue] of byAlgo) {
    const points: SeriesPoint[] = [];
    for (const value of valueOrder) {
      const sample = byValue.get(value);
      if (!sample) {
        continue; // absent cell stays a gap, never a zero
      }
      const { mean, se } = meanAndSe(sample);
      points.push({ x: value, mean, se, n: sample.length });
    }
    out.set(algo, points);
  }
  return out;
}
