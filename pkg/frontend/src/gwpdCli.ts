import { execFileSync } from "child_process";

import { InputError } from "./csv";

export interface CoefficientPayload {
  method: string;
  hbar: number;
  q: number[];
  im_a: number[][];
  v0: number;
  v1: number[];
  v2: number[][];
}

export interface PotentialScan {
  hbar: number;
  q: number[];
  v: number[];
}

function runGwpd(args: string[]): string {
  try {
    return execFileSync("gwpd", args, { encoding: "utf8" });
  } catch (err) {
    throw new InputError(
      `failed to invoke the gwpd CLI (${(err as Error).message}); ` +
        "snapshot plots need the simulation package on PATH",
    );
  }
}

/** Rebuild the method's quadratic coefficients at a logged (q, Im A) point
 * by asking the simulation CLI, so the figure uses the same math as the
 * trajectory that produced it. */
export function fetchCoefficients(config: string, q: number[], imA: number[]): CoefficientPayload {
  const out = runGwpd([
    "list-methods",
    "--emit-coeffs",
    "--config",
    config,
    "--q",
    q.join(","),
    "--im-a",
    imA.join(","),
  ]);
  return JSON.parse(out) as CoefficientPayload;
}

export function fetchPotentialScan(config: string, lo: number, hi: number, n: number): PotentialScan {
  const out = runGwpd([
    "list-methods",
    "--emit-potential",
    "--config",
    config,
    `--q-grid=${lo}:${hi}:${n}`,
  ]);
  return JSON.parse(out) as PotentialScan;
}
