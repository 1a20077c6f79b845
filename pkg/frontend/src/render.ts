/** Render one figure CSV (plus optional manifest) to an SVG document. */
import { FIGURE_IDS, FigureId, Manifest, chartForFigure } from "./figures";
import { parseCsv } from "./csv";
import { buildChart } from "./svg";

export function isFigureId(value: string): value is FigureId {
  return (FIGURE_IDS as readonly string[]).includes(value);
}

export function renderFigure(
  figure: FigureId,
  csvText: string,
  fileName: string,
  manifest?: Manifest,
): string {
  const table = parseCsv(csvText, fileName);
  return buildChart(chartForFigure(figure, table, fileName, manifest));
}
