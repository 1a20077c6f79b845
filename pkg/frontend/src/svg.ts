/** Hand-rolled SVG line charts: scales, axes, legend, optional markers. */

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  dash?: string;
  markers?: boolean;
}

export interface VLine {
  value: number;
  label: string;
  color: string;
}

export interface ChartOpts {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  yLog?: boolean;
  yMin?: number;
  yMax?: number;
  vLines?: VLine[];
}

const W = 720;
const H = 460;
const ML = 78;
const MR = 24;
const MT = 46;
const MB = 62;
const PW = W - ML - MR;
const PH = H - MT - MB;

export const PALETTE = [
  "#4361ee",
  "#e63946",
  "#2d6a4f",
  "#f4a261",
  "#7b2cbf",
  "#0096c7",
  "#d45087",
  "#665191",
];

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function niceTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= rough) ?? rough;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function decadeTicks(min: number, max: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(min) - 1e-9); 10 ** e <= max * (1 + 1e-9); e++) {
    ticks.push(10 ** e);
  }
  return ticks;
}

function fmtTick(v: number, log: boolean): string {
  if (log) {
    const e = Math.round(Math.log10(v));
    return e >= -2 && e <= 2 ? String(v) : `1e${e}`;
  }
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) return String(Number(v.toPrecision(4)));
  return v.toExponential(0);
}

/** Build a complete SVG document for a line chart. */
export function buildChart(opts: ChartOpts): string {
  const { series } = opts;
  const yLog = opts.yLog ?? false;

  const allX = series.flatMap((s) => s.x);
  const vx = (opts.vLines ?? []).map((v) => v.value);
  const xMin = Math.min(...allX, ...(vx.length ? vx : [Infinity]));
  const xMax = Math.max(...allX, ...(vx.length ? vx : [-Infinity]));
  const allY = series.flatMap((s) => s.y).filter((y) => !yLog || y > 0);
  let yMin = opts.yMin ?? Math.min(...allY);
  let yMax = opts.yMax ?? Math.max(...allY);
  if (yLog) {
    yMin = 10 ** Math.floor(Math.log10(yMin));
    yMax = 10 ** Math.ceil(Math.log10(yMax));
  } else {
    const pad = 0.06 * (yMax - yMin || 1);
    if (opts.yMin === undefined) yMin -= pad;
    if (opts.yMax === undefined) yMax += pad;
  }

  const xOf = (v: number) => ML + ((v - xMin) / (xMax - xMin || 1)) * PW;
  const yOf = (v: number) => {
    const t = yLog
      ? (Math.log10(v) - Math.log10(yMin)) / (Math.log10(yMax) - Math.log10(yMin) || 1)
      : (v - yMin) / (yMax - yMin || 1);
    return MT + PH - t * PH;
  };

  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">\n`;
  s += `<rect width="${W}" height="${H}" fill="#fff"/>\n`;
  s += `<text x="${ML}" y="${MT - 18}" font-size="15" font-weight="600" fill="#222">${esc(opts.title)}</text>\n`;

  const yTicks = yLog ? decadeTicks(yMin, yMax) : niceTicks(yMin, yMax, 6);
  for (const v of yTicks) {
    const y = yOf(v);
    s += `<line x1="${ML}" y1="${y.toFixed(1)}" x2="${ML + PW}" y2="${y.toFixed(1)}" stroke="#eee" stroke-width="0.7"/>\n`;
    s += `<line x1="${ML - 4}" y1="${y.toFixed(1)}" x2="${ML}" y2="${y.toFixed(1)}" stroke="#333" stroke-width="0.7"/>\n`;
    s += `<text x="${ML - 7}" y="${(y + 3.5).toFixed(1)}" text-anchor="end" font-size="10" fill="#444">${esc(fmtTick(v, yLog))}</text>\n`;
  }
  const xTicks = niceTicks(xMin, xMax, 8);
  for (const v of xTicks) {
    const x = xOf(v);
    s += `<line x1="${x.toFixed(1)}" y1="${MT + PH}" x2="${x.toFixed(1)}" y2="${MT + PH + 4}" stroke="#333" stroke-width="0.7"/>\n`;
    s += `<text x="${x.toFixed(1)}" y="${MT + PH + 17}" text-anchor="middle" font-size="10" fill="#444">${esc(fmtTick(v, false))}</text>\n`;
  }

  for (const vl of opts.vLines ?? []) {
    const x = xOf(vl.value);
    s += `<line class="marker" x1="${x.toFixed(1)}" y1="${MT}" x2="${x.toFixed(1)}" y2="${MT + PH}" stroke="${vl.color}" stroke-width="1.2" stroke-dasharray="6,4"/>\n`;
    s += `<text x="${(x + 5).toFixed(1)}" y="${MT + 14}" font-size="10" fill="${vl.color}">${esc(vl.label)}</text>\n`;
  }

  for (const sr of series) {
    const pts = sr.x
      .map((x, i) => `${xOf(x).toFixed(1)},${yOf(sr.y[i]).toFixed(1)}`)
      .join(" ");
    s += `<polyline fill="none" stroke="${sr.color}" stroke-width="1.8" ${sr.dash ? `stroke-dasharray="${sr.dash}" ` : ""}points="${pts}"/>\n`;
    if (sr.markers) {
      for (let i = 0; i < sr.x.length; i++) {
        s += `<circle cx="${xOf(sr.x[i]).toFixed(1)}" cy="${yOf(sr.y[i]).toFixed(1)}" r="2.4" fill="${sr.color}"/>\n`;
      }
    }
  }

  s += `<line x1="${ML}" y1="${MT}" x2="${ML}" y2="${MT + PH}" stroke="#333" stroke-width="1"/>\n`;
  s += `<line x1="${ML}" y1="${MT + PH}" x2="${ML + PW}" y2="${MT + PH}" stroke="#333" stroke-width="1"/>\n`;
  s += `<text class="x-label" x="${ML + PW / 2}" y="${H - 14}" text-anchor="middle" font-size="12" fill="#222">${esc(opts.xLabel)}</text>\n`;
  s += `<text class="y-label" x="20" y="${MT + PH / 2}" text-anchor="middle" font-size="12" fill="#222" transform="rotate(-90,20,${MT + PH / 2})">${esc(opts.yLabel)}</text>\n`;

  const legendW = Math.max(...series.map((sr) => sr.label.length)) * 6.2 + 30;
  const lx = ML + PW - legendW - 6;
  let ly = MT + 10;
  s += `<rect x="${lx - 6}" y="${ly - 10}" width="${legendW + 8}" height="${series.length * 15 + 8}" rx="3" fill="white" fill-opacity="0.88" stroke="#ddd" stroke-width="0.6"/>\n`;
  for (const sr of series) {
    s += `<line x1="${lx}" y1="${ly}" x2="${lx + 18}" y2="${ly}" stroke="${sr.color}" stroke-width="2" ${sr.dash ? `stroke-dasharray="${sr.dash}" ` : ""}/>\n`;
    s += `<text x="${lx + 23}" y="${ly + 3.5}" font-size="10.5" fill="#333">${esc(sr.label)}</text>\n`;
    ly += 15;
  }

  s += "</svg>\n";
  return s;
}
