/** Console state and its pure transitions. Errors never clear inputs or the
 * last field view; a successful result clears the error banner. */

import { ApiError, FieldResponse, PumpPoint, ServiceError } from "./types.js";

export type PanelId = 1 | 2;

export interface Panel1Inputs {
  head: number;
  omega: number;
}

export interface Panel2Inputs {
  omegaMeasured: number;
  pfMeasured: number;
  omegaNew: number;
  calibratedHead: number | null;
}

export interface PanelState {
  activePanel: PanelId;
  panel1: Panel1Inputs;
  panel2: Panel2Inputs;
  operatingPoint: PumpPoint | null;
  errorBanner: string | null;
  field: string | null;
  fieldView: FieldResponse | null;
}

export function initialState(): PanelState {
  return {
    activePanel: 1,
    panel1: { head: 61.87, omega: 5000 },
    panel2: { omegaMeasured: 5000, pfMeasured: 4.0, omegaNew: 5000, calibratedHead: null },
    operatingPoint: null,
    errorBanner: null,
    field: null,
    fieldView: null,
  };
}

export function withOperatingPoint(state: PanelState, point: PumpPoint): PanelState {
  return { ...state, operatingPoint: point, errorBanner: null };
}

export function withError(state: PanelState, message: string): PanelState {
  return { ...state, errorBanner: message };
}

export function withFieldView(state: PanelState, view: FieldResponse): PanelState {
  return { ...state, field: view.field, fieldView: view };
}

export function withCalibration(state: PanelState, head: number): PanelState {
  return {
    ...state,
    panel2: { ...state.panel2, calibratedHead: head },
    errorBanner: null,
  };
}

/** Operator-facing message for a service error; range violations name the
 * admissible interval and the offending flow. */
export function errorMessage(error: unknown): string {
  if (error instanceof ApiError) {
    const body: ServiceError = error.body;
    if (body.reason === "flow_out_of_range") {
      const low = body.pf_min ?? 3;
      const high = body.pf_max ?? 5;
      const flow =
        body.computed_flow === null || body.computed_flow === undefined
          ? "the requested flow"
          : `${body.computed_flow.toFixed(3)} l/min`;
      return `Pump flow ${flow} is outside the admissible range [${low}, ${high}] l/min.`;
    }
    if (body.reason === "no_real_root") {
      return "No pump flow matches this head at the selected speed.";
    }
    return body.detail || body.reason;
  }
  return "Service unreachable; inputs kept.";
}
