/** Figure builders for each harness CSV family. */

import { mkdirSync, writeFileSync } from 'node:fs';
import { join } from 'node:path';

import { readKappa, readMetrics, readRatios, readRatioSummary } from './csv.js';
import { groupSeries, meanAndSe, YColumn } from './stats.js';
import { gridChart, lineChart, Line } from './svg.js';

export interface RenderResult {
  files: string[];
}

function numericOrIndex(values: string[]): Map<string, number> {
  const out = new Map<string, number>();
  const allNumeric = values.every((v) => Number.isFinite(Number(v)));
  values.forEach((v, i) => out.set(v, allNumeric ? Number(v) : i));
  return out;
}

export function renderSweep(input: string, outDir: string, yColumns?: YColumn[]): RenderResult {
  const rows = readMetrics(input);
  if (rows.length === 0) {
    throw new Error(`${input}: no data rows`);
  }
  const paramName = rows[0]!.paramName || 'param_value';
  mkdirSync(outDir, { recursive: true });
  const files: string[] = [];
  for (const y of yColumns ?? (['expected_fidelity_sum', 'accepted_requests'] as YColumn[])) {
    const series = groupSeries(rows, y);
    const valueSet = [...new Set(rows.map((r) => r.paramValue))];
    const coords = numericOrIndex(valueSet);
    const lines: Line[] = [...series.entries()].map(([algo, points]) => ({
      label: algo,
      points: points
        .map((p) => ({ x: coords.get(p.x)!, y: p.mean, se: p.se }))
        .sort((a, b) => a.x - b.x),
    }));
    const ticks = [...coords.entries()]
      .map(([label, at]) => ({ at, label }))
      .sort((a, b) => a.at - b.at);
    const svg = lineChart({
      title: `${y} vs ${paramName}`,
      xLabel: paramName,
      yLabel: y,
      xTicks: ticks,
      lines,
    });
    const file = join(outDir, `sweep_${y}_${paramName}.svg`);
    writeFileSync(file, svg);
    files.push(file);
  }
  return { files };
}

export function renderRatioGrid(input: string, outDir: string): RenderResult {
  // accepts either the raw per-path file or the per-cell summary
  let cells = new Map<string, { n: number; mean: number }>();
  try {
    for (const row of readRatioSummary(input)) {
      cells.set(`${row.tauMs}|${row.numSlots}`, { n: row.n, mean: row.meanRatio });
    }
  } catch {
    const samples = new Map<string, number[]>();
    for (const row of readRatios(input)) {
      const key = `${row.tauMs}|${row.numSlots}`;
      if (!samples.has(key)) {
        samples.set(key, []);
      }
      samples.get(key)!.push(row.ratio);
    }
    cells = new Map(
      [...samples.entries()].map(([key, vals]) => [
        key,
        { n: vals.length, mean: meanAndSe(vals).mean },
      ]),
    );
  }
  if (cells.size === 0) {
    throw new Error(`${input}: no ratio cells`);
  }
  const taus = [...new Set([...cells.keys()].map((k) => Number(k.split('|')[0])))].sort((a, b) => a - b);
  const slots = [...new Set([...cells.keys()].map((k) => Number(k.split('|')[1])))].sort((a, b) => a - b);
  mkdirSync(outDir, { recursive: true });
  const svg = gridChart({
    title: 'max/min fidelity ratio',
    xLabel: 'slot length (ms)',
    yLabel: 'slots per batch',
    xValues: taus,
    yValues: slots,
    cell: (tau, ns) => cells.get(`${tau}|${ns}`)?.mean,
    floor: 1.0,
  });
  const file = join(outDir, 'ratio_grid.svg');
  writeFileSync(file, svg);
  return { files: [file] };
}

export function renderKappa(input: string, outDir: string): RenderResult {
  const rows = readKappa(input);
  if (rows.length === 0) {
    throw new Error(`${input}: no data rows`);
  }
  mkdirSync(outDir, { recursive: true });
  const files: string[] = [];
  for (const fidelitySet of [...new Set(rows.map((r) => r.fidelitySet))]) {
    const subset = rows.filter((r) => r.fidelitySet === fidelitySet);
    const lines: Line[] = [...new Set(subset.map((r) => r.shape))].map((shape) => ({
      label: shape,
      points: subset
        .filter((r) => r.shape === shape)
        .map((r) => ({ x: r.kappa, y: r.fidelity, se: 0 }))
        .sort((a, b) => a.x - b.x),
    }));
    const kappas = [...new Set(subset.map((r) => r.kappa))].sort((a, b) => a - b);
    const svg = lineChart({
      title: `tree fidelity vs decoherence exponent (${fidelitySet} links)`,
      xLabel: 'kappa',
      yLabel: 'fidelity',
      xTicks: kappas.map((k) => ({ at: k, label: String(k) })),
      lines,
    });
    const file = join(outDir, `kappa_${fidelitySet}.svg`);
    writeFileSync(file, svg);
    files.push(file);
  }
  return { files };
}
