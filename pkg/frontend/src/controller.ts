/** Orchestrates panel actions, the live curve, and the field view against
 * the service client. Holds all console state; the display is a thin sink
 * so the logic runs headless under test. */

import { RomServiceClient } from "./api.js";
import { Debouncer, SingleFlight } from "./scheduler.js";
import {
  PanelId,
  PanelState,
  errorMessage,
  initialState,
  withCalibration,
  withError,
  withFieldView,
  withOperatingPoint,
} from "./state.js";
import { CurveResponse, FieldResponse, PumpPoint } from "./types.js";

export interface ConsoleDisplay {
  renderState(state: PanelState): void;
  renderCurve(curve: CurveResponse): void;
}

export interface ConsoleOptions {
  modelId?: string;
  fieldStride?: number;
  curveSamples?: number;
  debounceMs?: number;
}

export class ConsoleController {
  state: PanelState = initialState();

  private readonly curveDebounce: Debouncer;
  private readonly curveFlight: SingleFlight<number, CurveResponse>;
  private readonly fieldFlight: SingleFlight<{ field: string; flow: number }, FieldResponse>;
  private readonly modelId: string | undefined;
  private readonly fieldStride: number;
  private readonly curveSamples: number;

  constructor(
    private readonly client: RomServiceClient,
    private readonly display: ConsoleDisplay,
    options: ConsoleOptions = {},
  ) {
    this.modelId = options.modelId;
    this.fieldStride = options.fieldStride ?? 200;
    this.curveSamples = options.curveSamples ?? 41;
    this.curveDebounce = new Debouncer(options.debounceMs ?? 150);
    this.curveFlight = new SingleFlight(
      (omega: number) => this.client.pumpCurve(omega, this.curveSamples),
      (curve) => this.display.renderCurve(curve),
      (error) => this.fail(error),
    );
    this.fieldFlight = new SingleFlight(
      (request: { field: string; flow: number }) =>
        this.client.evaluateField(this.modelId as string, request.field, [request.flow], this.fieldStride),
      (view) => this.update(withFieldView(this.state, view)),
      (error) => this.fail(error),
    );
  }

  private update(state: PanelState): void {
    this.state = state;
    this.display.renderState(state);
  }

  private fail(error: unknown): void {
    this.update(withError(this.state, errorMessage(error)));
  }

  private applyOperatingPoint(point: PumpPoint): void {
    this.update(withOperatingPoint(this.state, point));
    if (this.modelId && this.state.field) {
      this.fieldFlight.request({ field: this.state.field, flow: point.flow });
    }
  }

  selectPanel(panel: PanelId): void {
    this.update({ ...this.state, activePanel: panel });
  }

  /** Panel 1: head and speed in, service-computed flow out. */
  async panel1Submit(head: number, omega: number): Promise<void> {
    this.update({ ...this.state, panel1: { head, omega } });
    try {
      this.applyOperatingPoint(await this.client.pumpInverse(omega, head));
    } catch (error) {
      this.fail(error);
    }
  }

  /** Panel 2, step 1: calibrate the head from a measured (speed, flow) pair. */
  async panel2Calibrate(omegaMeasured: number, pfMeasured: number): Promise<void> {
    this.update({
      ...this.state,
      panel2: { ...this.state.panel2, omegaMeasured, pfMeasured, omegaNew: omegaMeasured },
    });
    try {
      const point = await this.client.pumpCalibrate(omegaMeasured, pfMeasured);
      this.update(withCalibration(this.state, point.head));
      this.applyOperatingPoint(point);
    } catch (error) {
      this.fail(error);
    }
  }

  /** Panel 2, step 2: hold the calibrated head, vary the speed. */
  async panel2Predict(omegaNew: number): Promise<void> {
    const head = this.state.panel2.calibratedHead;
    if (head === null) {
      this.fail(new Error("calibrate first"));
      return;
    }
    this.update({ ...this.state, panel2: { ...this.state.panel2, omegaNew } });
    try {
      this.applyOperatingPoint(await this.client.pumpInverse(omegaNew, head));
    } catch (error) {
      this.fail(error);
    }
  }

  /** Speed slider: debounced live curve refresh, one request in flight. */
  omegaChanged(omega: number): void {
    this.curveDebounce.schedule(() => this.curveFlight.request(omega));
  }

  /** Immediate curve fetch (initial render). */
  refreshCurve(omega: number): void {
    this.curveFlight.request(omega);
  }

  selectField(field: string): void {
    this.update({ ...this.state, field });
    const flow = this.state.operatingPoint?.flow;
    if (this.modelId && flow !== undefined) {
      this.fieldFlight.request({ field, flow });
    }
  }
}
