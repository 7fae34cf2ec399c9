import * as echarts from "echarts";

import { column, InputError, readCsv, requireColumns, Table } from "./csv";
import { logLogSlope } from "./fit";
import { fetchCoefficients, fetchPotentialScan } from "./gwpdCli";

export interface RenderOptions {
  inputs: string[];
  config?: string;
  row?: number;
  width: number;
  height: number;
  title?: string;
}

const LOG_FLOOR = 1e-18;

function renderSvg(option: echarts.EChartsOption, opts: RenderOptions): string {
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width: opts.width,
    height: opts.height,
  });
  chart.setOption({ animation: false, ...option });
  const svg = chart.renderToSVGString();
  chart.dispose();
  return svg;
}

function firstInput(opts: RenderOptions): Table & { path: string } {
  if (opts.inputs.length === 0) {
    throw new InputError("an input CSV is required (--in)");
  }
  const path = opts.inputs[0];
  return { path, ...readCsv(path) };
}

/** |X(t) - X(0)| on a log axis for the conserved quantities of a run. */
export function conservationChart(opts: RenderOptions): string {
  const table = firstInput(opts);
  requireColumns(table, ["t", "norm", "E", "E_eff"], table.path);
  const t = column(table, "t");
  const series = ["norm", "E", "E_eff"].map((name) => {
    const values = column(table, name);
    return {
      name: `|${name}(t) - ${name}(0)|`,
      type: "line" as const,
      showSymbol: false,
      data: t.map((ti, i) => [ti, Math.max(Math.abs(values[i] - values[0]), LOG_FLOOR)]),
    };
  });
  return renderSvg(
    {
      title: { text: opts.title ?? "conservation drifts" },
      legend: { top: 28 },
      xAxis: { type: "value", name: "t" },
      yAxis: { type: "log", name: "drift" },
      series,
    },
    opts,
  );
}

/** Error against dt on log-log axes with the fitted slope annotated. */
export function convergenceChart(opts: RenderOptions): string {
  const table = firstInput(opts);
  requireColumns(table, ["dt", "error"], table.path);
  const dt = column(table, "dt");
  const error = column(table, "error");
  const slope = logLogSlope(dt, error);
  const points = dt.map((d, i) => [d, Math.max(error[i], LOG_FLOOR)]).sort((a, b) => a[0] - b[0]);
  return renderSvg(
    {
      title: { text: opts.title ?? "convergence study" },
      xAxis: { type: "log", name: "dt" },
      yAxis: { type: "log", name: "error" },
      series: [{ type: "line", data: points, label: { show: false } }],
      graphic: [
        {
          type: "text",
          right: 80,
          top: 60,
          style: { text: `slope = ${slope.toFixed(4)}`, fontSize: 16 },
        },
      ],
    },
    opts,
  );
}

export function fidelityChart(opts: RenderOptions): string {
  const table = firstInput(opts);
  requireColumns(table, ["t", "fidelity"], table.path);
  const t = column(table, "t");
  const fid = column(table, "fidelity");
  return renderSvg(
    {
      title: { text: opts.title ?? "fidelity against the grid reference" },
      xAxis: { type: "value", name: "t" },
      yAxis: { type: "value", name: "fidelity", min: Math.min(...fid, 0.99), max: 1.0 },
      series: [{ type: "line", showSymbol: false, data: t.map((ti, i) => [ti, fid[i]]) }],
    },
    opts,
  );
}

/** One-dimensional snapshot: V(q), the method's effective quadratic
 * potential rebuilt at the logged (q, Im A), and the probability density. */
export function snapshotChart(opts: RenderOptions): string {
  const table = firstInput(opts);
  if (!opts.config) {
    throw new InputError("snapshot plots need --config (the run's configuration file)");
  }
  requireColumns(table, ["t", "q0", "ImA00"], table.path);
  if (table.columns.includes("q1")) {
    throw new InputError("snapshot plots are one-dimensional");
  }
  const index = opts.row === undefined ? table.rows.length - 1 : opts.row;
  if (index < 0 || index >= table.rows.length) {
    throw new InputError(`row ${index} out of range (0..${table.rows.length - 1})`);
  }
  const row = table.rows[index];
  const coeffs = fetchCoefficients(opts.config, [row.q0], [row.ImA00]);
  const sigma = Math.sqrt(coeffs.hbar / (2.0 * row.ImA00));
  const qs = column(table, "q0");
  const lo = Math.min(...qs) - 6 * sigma;
  const hi = Math.max(...qs) + 6 * sigma;
  const scan = fetchPotentialScan(opts.config, lo, hi, 301);
  const vEff = scan.q.map((x) => {
    const d = x - row.q0;
    return coeffs.v0 + coeffs.v1[0] * d + 0.5 * coeffs.v2[0][0] * d * d;
  });
  const density = scan.q.map((x) => {
    const d = x - row.q0;
    return Math.exp((-0.5 * d * d) / (sigma * sigma)) / Math.sqrt(2 * Math.PI * sigma * sigma);
  });
  const vMax = Math.max(...scan.v.filter((v) => Number.isFinite(v)));
  return renderSvg(
    {
      title: { text: opts.title ?? `snapshot at t = ${row.t} (${coeffs.method})` },
      legend: { top: 28 },
      xAxis: { type: "value", name: "q", min: lo, max: hi },
      yAxis: [
        { type: "value", name: "energy", max: vMax },
        { type: "value", name: "density" },
      ],
      series: [
        {
          name: "V",
          type: "line",
          showSymbol: false,
          data: scan.q.map((x, i) => [x, scan.v[i]]),
        },
        {
          name: "V_eff",
          type: "line",
          showSymbol: false,
          data: scan.q.map((x, i) => [x, vEff[i]]),
        },
        {
          name: "|psi|^2",
          type: "line",
          showSymbol: false,
          yAxisIndex: 1,
          data: scan.q.map((x, i) => [x, density[i]]),
        },
      ],
    },
    opts,
  );
}

export const CHART_KINDS: Record<string, (opts: RenderOptions) => string> = {
  conservation: conservationChart,
  convergence: convergenceChart,
  fidelity: fidelityChart,
  snapshot: snapshotChart,
};
