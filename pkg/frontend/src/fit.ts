/** Least-squares slope of log(error) against log(dt). */
export function logLogSlope(dt: number[], error: number[]): number {
  const pts = dt
    .map((d, i) => [Math.log(d), Math.log(error[i])])
    .filter(([x, y]) => Number.isFinite(x) && Number.isFinite(y));
  if (pts.length < 2) {
    return NaN;
  }
  const n = pts.length;
  const mx = pts.reduce((s, p) => s + p[0], 0) / n;
  const my = pts.reduce((s, p) => s + p[1], 0) / n;
  let num = 0;
  let den = 0;
  for (const [x, y] of pts) {
    num += (x - mx) * (y - my);
    den += (x - mx) * (x - mx);
  }
  return num / den;
}
