/** Quality trend chart model: constraints drawn into the display.
 *
 * Forecast points carry their p10/p90 whiskers and are colored by class
 * so an operator reads "heading low" from the picture, not from numbers.
 * Lab values overlay the forecasts once they arrive; change-point events
 * become vertical markers.
 */

import type { ChangePoint, Forecast, QualityClass } from "./types";

export const CLASS_COLORS: Record<QualityClass, string> = {
  low: "#c0392b",
  in_specification: "#5d6d7e",
  high: "#b9770e",
};

export interface TrendPoint {
  reelId: string;
  /** x position: reel index in the series */
  index: number;
  value: number;
  whiskerLow: number;
  whiskerHigh: number;
  cls: QualityClass;
  color: string;
  anomaly: boolean;
  labValue: number | null;
}

export interface TrendChart {
  parameter: string;
  empty: boolean;
  specLow: number | null;
  specHigh: number | null;
  points: TrendPoint[];
  /** vertical markers at detection time, ms */
  markers: { at: number; direction: string }[];
}

export interface TrendInputs {
  parameter: string;
  forecasts: Forecast[];
  specLimits?: [number, number];
  /** lab results keyed by reel id, merged in as they arrive */
  labValues?: Map<string, number>;
  changePoints?: ChangePoint[];
}

export function buildTrendChart(inputs: TrendInputs): TrendChart {
  const forecasts = inputs.forecasts.filter(
    (f) => f.parameter === inputs.parameter,
  );
  const points = forecasts.map((f, index) => ({
    reelId: f.reel_id,
    index,
    value: f.point_estimate,
    whiskerLow: f.interval[0],
    whiskerHigh: f.interval[1],
    cls: f.class,
    color: CLASS_COLORS[f.class],
    anomaly: f.anomaly_flag,
    labValue: inputs.labValues?.get(f.reel_id) ?? null,
  }));
  const markers = (inputs.changePoints ?? [])
    .filter((e) => e.parameter === inputs.parameter)
    .map((e) => ({ at: e.detected_at, direction: e.direction }));
  return {
    parameter: inputs.parameter,
    empty: points.length === 0,
    specLow: inputs.specLimits?.[0] ?? null,
    specHigh: inputs.specLimits?.[1] ?? null,
    points,
    markers,
  };
}
