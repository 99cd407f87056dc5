/**
 * Readers for the three harness CSV families.
 *
 * All files are plain comma-separated text with a single header row and no
 * quoting (the harness never emits commas inside fields).
 */

import { readFileSync } from 'node:fs';

export interface Table {
  header: string[];
  rows: string[][];
}

export function readCsv(path: string): Table {
  const text = readFileSync(path, 'utf8');
  const lines = text.split('\n').filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new Error(`${path}: empty CSV`);
  }
  const header = lines[0]!.split(',');
  const rows = lines.slice(1).map((l) => l.split(','));
  for (const [i, row] of rows.entries()) {
    if (row.length !== header.length) {
      throw new Error(`${path}: row ${i + 2} has ${row.length} fields, header has ${header.length}`);
    }
  }
  return { header, rows };
}

export function requireColumns(table: Table, names: string[], path: string): Map<string, number> {
  const index = new Map<string, number>();
  for (const name of names) {
    const at = table.header.indexOf(name);
    if (at < 0) {
      throw new Error(`${path}: missing column '${name}' (header: ${table.header.join(',')})`);
    }
    index.set(name, at);
  }
  return index;
}

export interface MetricsRow {
  scenarioId: string;
  seed: number;
  algorithm: string;
  paramName: string;
  paramValue: string;
  expectedFidelitySum: number;
  acceptedRequests: number;
  runtimeMs: number;
}

export function readMetrics(path: string): MetricsRow[] {
  const table = readCsv(path);
  const col = requireColumns(
    table,
    ['scenario_id', 'seed', 'algorithm', 'param_name', 'param_value',
      'expected_fidelity_sum', 'accepted_requests', 'runtime_ms'],
    path,
  );
  return table.rows.map((row) => ({
    scenarioId: row[col.get('scenario_id')!]!,
    seed: Number(row[col.get('seed')!]),
    algorithm: row[col.get('algorithm')!]!,
    paramName: row[col.get('param_name')!]!,
    paramValue: row[col.get('param_value')!]!,
    expectedFidelitySum: Number(row[col.get('expected_fidelity_sum')!]),
    acceptedRequests: Number(row[col.get('accepted_requests')!]),
    runtimeMs: Number(row[col.get('runtime_ms')!]),
  }));
}

export interface SummaryRow {
  paramName: string;
  paramValue: string;
  algorithm: string;
  n: number;
  meanExpectedFidelitySum: number;
  seExpectedFidelitySum: number;
  meanAcceptedRequests: number;
  seAcceptedRequests: number;
}

export function readSummary(path: string): SummaryRow[] {
  const table = readCsv(path);
  const col = requireColumns(
    table,
    ['param_name', 'param_value', 'algorithm', 'n',
      'mean_expected_fidelity_sum', 'se_expected_fidelity_sum',
      'mean_accepted_requests', 'se_accepted_requests'],
    path,
  );
  return table.rows.map((row) => ({
    paramName: row[col.get('param_name')!]!,
    paramValue: row[col.get('param_value')!]!,
    algorithm: row[col.get('algorithm')!]!,
    n: Number(row[col.get('n')!]),
    meanExpectedFidelitySum: Number(row[col.get('mean_expected_fidelity_sum')!]),
    seExpectedFidelitySum: Number(row[col.get('se_expected_fidelity_sum')!]),
    meanAcceptedRequests: Number(row[col.get('mean_accepted_requests')!]),
    seAcceptedRequests: Number(row[col.get('se_accepted_requests')!]),
  }));
}

export interface RatioRow {
  tauMs: number;
  numSlots: number;
  ratio: number;
}

export function readRatios(path: string): RatioRow[] {
  const table = readCsv(path);
  const col = requireColumns(table, ['tau_ms', 'num_slots', 'ratio'], path);
  return table.rows.map((row) => ({
    tauMs: Number(row[col.get('tau_ms')!]),
    numSlots: Number(row[col.get('num_slots')!]),
    ratio: Number(row[col.get('ratio')!]),
  }));
}

export interface RatioSummaryRow {
  tauMs: number;
  numSlots: number;
  n: number;
  meanRatio: number;
}

export function readRatioSummary(path: string): RatioSummaryRow[] {
  const table = readCsv(path);
  const col = requireColumns(table, ['tau_ms', 'num_slots', 'n', 'mean_ratio'], path);
  return table.rows.map((row) => ({
    tauMs: Number(row[col.get('tau_ms')!]),
    numSlots: Number(row[col.get('num_slots')!]),
    n: Number(row[col.get('n')!]),
    meanRatio: Number(row[col.get('mean_ratio')!]),
  }));
}

export interface KappaRow {
  kappa: number;
  fidelitySet: string;
  shape: string;
  fidelity: number;
}

export function readKappa(path: string): KappaRow[] {
  const table = readCsv(path);
  const col = requireColumns(table, ['kappa', 'fidelity_set', 'shape', 'fidelity'], path);
  return table.rows.map((row) => ({
    kappa: Number(row[col.get('kappa')!]),
    fidelitySet: row[col.get('fidelity_set')!]!,
    shape: row[col.get('shape')!]!,
    fidelity: Number(row[col.get('fidelity')!]),
  }));
}
