import assert from 'node:assert/strict';
import { mkdtempSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { dirname, join } from 'node:path';
import { test } from 'node:test';
import { fileURLToPath } from 'node:url';

import { readCsv, readKappa, readMetrics, readRatioSummary, readSummary } from '../csv.js';

const fixtures = join(dirname(fileURLToPath(import.meta.url)), '..', '..', 'fixtures');

test('metrics fixture parses with expected columns', () => {
  const rows = readMetrics(join(fixtures, 'sweep_raw.csv'));
  assert.ok(rows.length > 0);
  assert.ok(rows.every((r) => Number.isFinite(r.expectedFidelitySum)));
  assert.ok(rows.every((r) => r.algorithm === 'flto' || r.algorithm === 'nesting'));
});

test('summary fixture parses', () => {
  const rows = readSummary(join(fixtures, 'sweep_summary.csv'));
  assert.equal(rows.length, 6); // 3 values x 2 algorithms
  assert.ok(rows.every((r) => r.n === 3));
});

test('ratio summary and kappa fixtures parse', () => {
  assert.ok(readRatioSummary(join(fixtures, 'fig3_summary.csv')).length > 0);
  assert.equal(readKappa(join(fixtures, 'kappa.csv')).length, 3 * 4);
});

test('missing column is a loud error', () => {
  const dir = mkdtempSync(join(tmpdir(), 'plots-'));
  const bad = join(dir, 'bad.csv');
  writeFileSync(bad, 'a,b\n1,2\n');
  assert.throws(() => readMetrics(bad), /missing column/);
});

test('ragged row is a loud error', () => {
  const dir = mkdtempSync(join(tmpdir(), 'plots-'));
  const bad = join(dir, 'ragged.csv');
  writeFileSync(bad, 'a,b\n1,2,3\n');
  assert.throws(() => readCsv(bad), /has 3 fields/);
});

test('empty file is a loud error', () => {
  const dir = mkdtempSync(join(tmpdir(), 'plots-'));
  const bad = join(dir, 'empty.csv');
  writeFileSync(bad, '');
  assert.throws(() => readCsv(bad), /empty CSV/);
});
