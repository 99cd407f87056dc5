/** Minimal SVG assembly: line charts with error bars and value grids. */

export const PALETTE = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b'];

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { left: 70, right: 170, top: 40, bottom: 60 };

function esc(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;').replace(/"/g, '&quot;');
}

export interface Line {
  label: string;
  points: { x: number; y: number; se: number }[];
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xTicks: { at: number; label: string }[];
  lines: Line[];
}

function niceRange(lo: number, hi: number): [number, number] {
  if (lo === hi) {
    const pad = Math.abs(lo) * 0.1 || 1;
    return [lo - pad, hi + pad];
  }
  const pad = (hi - lo) * 0.08;
  return [lo - pad, hi + pad];
}

export function lineChart(spec: ChartSpec): string {
  const xs = spec.lines.flatMap((l) => l.points.map((p) => p.x));
  const ys = spec.lines.flatMap((l) => l.points.flatMap((p) => [p.y - p.se, p.y + p.se]));
  if (xs.length === 0) {
    throw new Error(`no data for figure '${spec.title}'`);
  }
  const [x0, x1] = niceRange(Math.min(...xs), Math.max(...xs));
  const [y0, y1] = niceRange(Math.min(...ys), Math.max(...ys));
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const px = (x: number) => MARGIN.left + ((x - x0) / (x1 - x0)) * plotW;
  const py = (y: number) => MARGIN.top + (1 - (y - y0) / (y1 - y0)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(`<text x="${WIDTH / 2}" y="20" text-anchor="middle" font-size="15">${esc(spec.title)}</text>`);

  // axes
  const axisY = HEIGHT - MARGIN.bottom;
  parts.push(`<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${axisY}" stroke="black"/>`);
  parts.push(`<line x1="${MARGIN.left}" y1="${axisY}" x2="${WIDTH - MARGIN.right}" y2="${axisY}" stroke="black"/>`);
  for (const tick of spec.xTicks) {
    const x = px(tick.at);
    parts.push(`<line x1="${x}" y1="${axisY}" x2="${x}" y2="${axisY + 5}" stroke="black"/>`);
    parts.push(`<text x="${x}" y="${axisY + 20}" text-anchor="middle">${esc(tick.label)}</text>`);
  }
  const yTicks = 5;
  for (let i = 0; i <= yTicks; i++) {
    const y = y0 + ((y1 - y0) * i) / yTicks;
    parts.push(`<line x1="${MARGIN.left - 5}" y1="${py(y)}" x2="${MARGIN.left}" y2="${py(y)}" stroke="black"/>`);
    parts.push(`<text x="${MARGIN.left - 9}" y="${py(y) + 4}" text-anchor="end">${y.toPrecision(4)}</text>`);
  }
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 12}" text-anchor="middle">${esc(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">${esc(spec.yLabel)}</text>`,
  );

  spec.lines.forEach((line, idx) => {
    const color = PALETTE[idx % PALETTE.length]!;
    if (line.points.length > 1) {
      const d = line.points.map((p) => `${px(p.x).toFixed(2)},${py(p.y).toFixed(2)}`).join(' ');
      parts.push(`<polyline points="${d}" fill="none" stroke="${color}" stroke-width="1.8"/>`);
    }
    for (const p of line.points) {
      if (p.se > 0) {
        parts.push(
          `<line x1="${px(p.x)}" y1="${py(p.y - p.se)}" x2="${px(p.x)}" y2="${py(p.y + p.se)}" ` +
            `stroke="${color}" stroke-width="1"/>`,
        );
      }
      parts.push(`<circle cx="${px(p.x)}" cy="${py(p.y)}" r="3.2" fill="${color}"/>`);
    }
    const ly = MARGIN.top + 16 * idx;
    const lx = WIDTH - MARGIN.right + 14;
    parts.push(`<rect x="${lx}" y="${ly - 9}" width="12" height="12" fill="${color}"/>`);
    parts.push(`<text x="${lx + 18}" y="${ly + 1}">${esc(line.label)}</text>`);
  });
  parts.push('</svg>');
  return parts.join('\n');
}

export interface GridSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xValues: number[];
  yValues: number[];
  /** missing cells are rendered as gaps */
  cell: (x: number, y: number) => number | undefined;
  floor: number;
}

export function gridChart(spec: GridSpec): string {
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const cw = plotW / spec.xValues.length;
  const ch = plotH / spec.yValues.length;
  const values: number[] = [];
  for (const x of spec.xValues) {
    for (const y of spec.yValues) {
      const v = spec.cell(x, y);
      if (v !== undefined) {
        values.push(v);
      }
    }
  }
  if (values.length === 0) {
    throw new Error(`no data for figure '${spec.title}'`);
  }
  const vmax = Math.max(...values, spec.floor + 1e-9);

  const shade = (v: number) => {
    const t = Math.min(1, Math.max(0, (v - spec.floor) / (vmax - spec.floor)));
    const channel = Math.round(245 - t * 160);
    return `rgb(255,${channel},${Math.round(235 - t * 200)})`;
  };

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(`<text x="${WIDTH / 2}" y="20" text-anchor="middle" font-size="15">${esc(spec.title)}</text>`);
  spec.xValues.forEach((x, xi) => {
    spec.yValues.forEach((y, yi) => {
      const v = spec.cell(x, y);
      const gx = MARGIN.left + xi * cw;
      const gy = MARGIN.top + (spec.yValues.length - 1 - yi) * ch;
      if (v === undefined) {
        parts.push(
          `<rect x="${gx}" y="${gy}" width="${cw}" height="${ch}" fill="none" ` +
            `stroke="#bbb" stroke-dasharray="3,3"/>`,
        );
      } else {
        parts.push(
          `<rect x="${gx}" y="${gy}" width="${cw}" height="${ch}" fill="${shade(v)}" stroke="#666"/>`,
        );
        parts.push(
          `<text x="${gx + cw / 2}" y="${gy + ch / 2 + 4}" text-anchor="middle">${v.toFixed(3)}</text>`,
        );
      }
    });
    parts.push(
      `<text x="${MARGIN.left + xi * cw + cw / 2}" y="${HEIGHT - MARGIN.bottom + 20}" ` +
        `text-anchor="middle">${x}</text>`,
    );
  });
  spec.yValues.forEach((y, yi) => {
    parts.push(
      `<text x="${MARGIN.left - 10}" y="${MARGIN.top + (spec.yValues.length - 1 - yi) * ch + ch / 2 + 4}" ` +
        `text-anchor="end">${y}</text>`,
    );
  });
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 12}" text-anchor="middle">${esc(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">${esc(spec.yLabel)}</text>`,
  );
  parts.push('</svg>');
  return parts.join('\n');
}
