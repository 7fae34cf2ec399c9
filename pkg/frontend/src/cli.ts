#!/usr/bin/env node
import { writeFileSync } from "fs";

import { CHART_KINDS, RenderOptions } from "./charts";
import { InputError } from "./csv";

const USAGE = `usage: gwpd-plot <kind> --in data.csv --out figure.svg [options]

kinds: ${Object.keys(CHART_KINDS).join(", ")}

options:
  --in PATH       input CSV (from the gwpd CLI); repeatable
  --out PATH      output image (.svg or .png)
  --config PATH   run configuration (snapshot only)
  --row N         trajectory row for the snapshot (default: last)
  --width N       image width in pixels (default 800)
  --height N      image height in pixels (default 520)
  --title TEXT    figure title
`;

interface ParsedArgs extends RenderOptions {
  kind: string;
  out: string;
}

function parseArgs(argv: string[]): ParsedArgs {
  if (argv.length === 0 || argv[0] === "--help" || argv[0] === "-h") {
    process.stdout.write(USAGE);
    process.exit(argv.length === 0 ? 2 : 0);
  }
  const kind = argv[0];
  if (!(kind in CHART_KINDS)) {
    throw new InputError(`unknown plot kind ${kind}; choose from ${Object.keys(CHART_KINDS).join(", ")}`);
  }
  const opts: ParsedArgs = { kind, inputs: [], out: "", width: 800, height: 520 };
  for (let i = 1; i < argv.length; i += 1) {
    const [flag, inline] = argv[i].split(/=(.*)/s, 2);
    const next = (): string => {
      if (inline !== undefined) return inline;
      i += 1;
      if (i >= argv.length) throw new InputError(`${flag} expects a value`);
      return argv[i];
    };
    switch (flag) {
      case "--in":
        opts.inputs.push(next());
        break;
      case "--out":
        opts.out = next();
        break;
      case "--config":
        opts.config = next();
        break;
      case "--row":
        opts.row = Number(next());
        break;
      case "--width":
        opts.width = Number(next());
        break;
      case "--height":
        opts.height = Number(next());
        break;
      case "--title":
        opts.title = next();
        break;
      default:
        throw new InputError(`unknown option ${flag}`);
    }
  }
  if (opts.inputs.length === 0) throw new InputError("--in is required");
  if (!opts.out) throw new InputError("--out is required");
  return opts;
}

function writeImage(path: string, svg: string): void {
  if (path.endsWith(".svg")) {
    writeFileSync(path, svg);
    return;
  }
  if (path.endsWith(".png")) {
    // rasterize lazily so SVG-only use never needs the native module
    const { Resvg } = require("@resvg/resvg-js") as typeof import("@resvg/resvg-js");
    writeFileSync(path, new Resvg(svg).render().asPng());
    return;
  }
  throw new InputError(`unsupported output format for ${path}; use .svg or .png`);
}

function main(): number {
  let args: ParsedArgs;
  try {
    args = parseArgs(process.argv.slice(2));
    const svg = CHART_KINDS[args.kind](args);
    writeImage(args.out, svg);
  } catch (err) {
    if (err instanceof InputError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 1;
    }
    throw err;
  }
  process.stdout.write(`wrote ${args.out}\n`);
  return 0;
}

// echarts keeps a platform timer alive after SSR rendering; exit explicitly
process.exit(main());
