#!/usr/bin/env node
/**
 * Render harness CSV output into SVG figures.
 *
 * Usage:
 *   swapsched-render sweep      --in sweep_raw.csv --out figures/
 *   swapsched-render ratio-grid --in fig3_summary.csv --out figures/
 *   swapsched-render kappa      --in kappa.csv --out figures/
 */

import { renderKappa, renderRatioGrid, renderSweep } from './figures.js';

function parseArgs(argv: string[]): { kind: string; input: string; outDir: string } {
  const [kind, ...rest] = argv;
  let input = '';
  let outDir = '';
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (value === undefined) {
      throw new Error(`missing value for ${flag}`);
    }
    if (flag === '--in') {
      input = value;
    } else if (flag === '--out') {
      outDir = value;
    } else {
      throw new Error(`unknown flag ${flag}`);
    }
  }
  if (!kind || !input || !outDir) {
    throw new Error('usage: render <sweep|ratio-grid|kappa> --in <csv> --out <dir>');
  }
  return { kind, input, outDir };
}

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  const renderers: Record<string, (input: string, outDir: string) => { files: string[] }> = {
    sweep: renderSweep,
    'ratio-grid': renderRatioGrid,
    kappa: renderKappa,
  };
  const renderer = renderers[args.kind];
  if (!renderer) {
    console.error(`unknown figure kind '${args.kind}'`);
    return 2;
  }
  try {
    const result = renderer(args.input, args.outDir);
    for (const file of result.files) {
      console.log(file);
    }
    return 0;
  } catch (err) {
    console.error((err as Error).message);
    return 1;
  }
}

process.exit(main(process.argv.slice(2)));
