/**
 * Figure catalogue: which CSV schema each figure id expects and how the rows
 * map onto chart series. Rendering never recomputes simulation quantities;
 * everything comes from the CSV plus (optionally) the run manifest, which
 * carries the design-point markers.
 */
import { Table, numericColumn, stringColumn } from "./csv";
import { ChartOpts, PALETTE, Series, VLine } from "./svg";

export const FIGURE_IDS = ["fig1", "fig2a", "fig2b", "fig3"] as const;
export type FigureId = (typeof FIGURE_IDS)[number];

export interface Manifest {
  metadata?: Record<string, unknown>;
}

const POLICY_LABELS: Record<string, string> = {
  none: "no backscattering",
  dib: "distance-inversion",
  fb: "full backscattering",
  perfect_bf: "full-CSI beamforming",
  htb: "target tracking",
};

const SERIES_LABELS: Record<string, string> = {
  mc_inner_total: "inner receiver (simulated)",
  mc_edge_total: "edge receiver (simulated)",
  analytic_inner_total: "inner receiver (analysis)",
  analytic_edge_total: "edge receiver (analysis)",
};

interface GroupedSeries {
  key: string;
  x: number[];
  y: number[];
}

function groupSeries(
  keys: string[],
  x: number[],
  y: number[],
): GroupedSeries[] {
  const order: string[] = [];
  const byKey = new Map<string, GroupedSeries>();
  keys.forEach((key, i) => {
    let group = byKey.get(key);
    if (!group) {
      group = { key, x: [], y: [] };
      byKey.set(key, group);
      order.push(key);
    }
    group.x.push(x[i]);
    group.y.push(y[i]);
  });
  return order.map((key) => byKey.get(key)!);
}

function toSeries(
  groups: GroupedSeries[],
  label: (key: string) => string,
  style?: (key: string, index: number) => Partial<Series>,
): Series[] {
  return groups.map((group, i) => ({
    label: label(group.key),
    x: group.x,
    y: group.y,
    color: PALETTE[i % PALETTE.length],
    ...(style ? style(group.key, i) : {}),
  }));
}

function metadataNumber(manifest: Manifest | undefined, key: string): number | undefined {
  const value = manifest?.metadata?.[key];
  return typeof value === "number" && Number.isFinite(value) ? value : undefined;
}

export function chartForFigure(
  figure: FigureId,
  table: Table,
  fileName: string,
  manifest?: Manifest,
): ChartOpts {
  switch (figure) {
    case "fig1": {
      const x = numericColumn(table, "pt_dbm", fileName);
      const y = numericColumn(table, "mean_w", fileName);
      const groups = groupSeries(stringColumn(table, "policy", fileName), x, y);
      return {
        title: "Average harvested power vs transmit power",
        xLabel: "Transmit power (dBm)",
        yLabel: "Average harvested power (W)",
        yLog: true,
        series: toSeries(groups, (k) => POLICY_LABELS[k] ?? k, () => ({ markers: true })),
      };
    }
    case "fig2a": {
      const x = numericColumn(table, "delta_m", fileName);
      const y = numericColumn(table, "mean_w", fileName);
      const groups = groupSeries(stringColumn(table, "series", fileName), x, y);
      const vLines: VLine[] = [];
      const deltaStar = metadataNumber(manifest, "delta_star_m");
      if (deltaStar !== undefined) {
        vLines.push({
          value: deltaStar,
          label: `balance threshold = ${deltaStar.toFixed(2)} m`,
          color: "#333",
        });
      }
      return {
        title: "Harvested power vs reflection threshold",
        xLabel: "Reflection threshold (m)",
        yLabel: "Average harvested power (W)",
        yLog: true,
        vLines,
        series: toSeries(groups, (k) => SERIES_LABELS[k] ?? k, (key) =>
          key.startsWith("analytic") ? { dash: "5,4" } : { markers: true },
        ),
      };
    }
    case "fig2b": {
      const x = numericColumn(table, "p", fileName);
      const y = numericColumn(table, "mean_w", fileName);
      const groups = groupSeries(stringColumn(table, "series", fileName), x, y);
      const vLines: VLine[] = [];
      const pStar = metadataNumber(manifest, "p_star");
      if (pStar !== undefined) {
        vLines.push({
          value: pStar,
          label: `optimal probability = ${pStar.toFixed(3)}`,
          color: "#333",
        });
      }
      return {
        title: "Edge harvested power vs reflection probability",
        xLabel: "Reflection probability",
        yLabel: "Average harvested power (W)",
        yLog: true,
        vLines,
        series: toSeries(groups, (k) => SERIES_LABELS[k] ?? k, (key) =>
          key.startsWith("analytic") ? { dash: "5,4" } : { markers: true },
        ),
      };
    }
    case "fig3": {
      const x = numericColumn(table, "pt_dbm", fileName);
      const y = numericColumn(table, "fraction", fileName);
      const policies = stringColumn(table, "policy", fileName);
      const gammas = stringColumn(table, "gamma_w", fileName);
      const densities = stringColumn(table, "density_per_m2", fileName);
      const keys = policies.map(
        (p, i) => `${p}|${Number(gammas[i]).toExponential(0)}|${densities[i]}`,
      );
      const groups = groupSeries(keys, x, y);
      return {
        title: "Receivers meeting their harvesting target",
        xLabel: "Transmit power (dBm)",
        yLabel: "Satisfied fraction",
        yMin: 0,
        yMax: 1.02,
        series: toSeries(
          groups,
          (key) => {
            const [policy, gamma, density] = key.split("|");
            return `${POLICY_LABELS[policy] ?? policy}, target ${gamma} W, density ${density}`;
          },
          (key) => (key.startsWith("fb") ? { dash: "5,4" } : { markers: true }),
        ),
      };
    }
  }
}
