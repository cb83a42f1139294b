/** Pure data helpers behind the frontier chart. Everything shown on
 * the chart comes straight from one API response; these functions only
 * reshape it. */
import type { FrontierPoint, FrontierResponse, SwitchMarker } from "./api.js";

export interface CurvePoint {
  lambda: number;
  c_s: number | null;
  c_t: number | null;
  total: number | null;
  feasible: boolean;
  support: string[];
}

export function curvePoints(points: FrontierPoint[]): CurvePoint[] {
  return points.map((pt) => ({
    lambda: pt.lambda,
    c_s: pt.solution.cost ? pt.solution.cost.c_s : null,
    c_t: pt.solution.cost ? pt.solution.cost.c_t : null,
    total: pt.solution.cost ? pt.solution.cost.total : null,
    feasible: pt.solution.feasible,
    support: Object.keys(pt.solution.action).sort(),
  }));
}

export function isNonDecreasing(values: number[], eps = 1e-9): boolean {
  for (let i = 1; i < values.length; i += 1) {
    const prev = values[i - 1];
    const next = values[i];
    if (prev === undefined || next === undefined) return false;
    if (next < prev - eps) return false;
  }
  return true;
}

export interface ChartMarker {
  lambda: number;
  label: string;
}

function supportLabel(support: string[]): string {
  return support.length > 0 ? support.join("+") : "none";
}

/** One marker per support change, placed at the lambda where the new
 * support first appears and labeled with both variable sets. */
export function switchMarkers(switches: SwitchMarker[]): ChartMarker[] {
  return switches.map((sw) => ({
    lambda: sw.to_lambda,
    label: `${supportLabel(sw.from_support)} → ${supportLabel(sw.to_support)}`,
  }));
}

export function feasibleCurve(
  points: CurvePoint[],
  key: "c_s" | "c_t",
): Array<{ lambda: number; value: number }> {
  const out: Array<{ lambda: number; value: number }> = [];
  for (const pt of points) {
    const value = pt[key];
    if (pt.feasible && value !== null) out.push({ lambda: pt.lambda, value });
  }
  return out;
}

export function frontierSummary(response: FrontierResponse): string {
  const feasible = response.points.filter((pt) => pt.solution.feasible).length;
  return `${feasible}/${response.points.length} points feasible, ${response.switches.length} support switch(es)`;
}
