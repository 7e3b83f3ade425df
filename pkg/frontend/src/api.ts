/** Typed client over the service's JSON endpoints. The console never
 * computes pump or ROM quantities itself; every displayed number passes
 * through this client. */

import {
  ApiError,
  CurveResponse,
  FieldResponse,
  HealthResponse,
  ModelMetadata,
  PumpPoint,
  ServiceError,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class RomServiceClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const payload = await response.json().catch(() => null);
    if (!response.ok) {
      const body: ServiceError =
        payload && typeof payload.reason === "string"
          ? payload
          : { reason: "http_error", detail: `HTTP ${response.status}` };
      throw new ApiError(response.status, body);
    }
    return payload as T;
  }

  health(): Promise<HealthResponse> {
    return this.request("/health");
  }

  modelMetadata(modelId: string): Promise<ModelMetadata> {
    return this.request(`/models/${encodeURIComponent(modelId)}`);
  }

  pumpForward(omega: number, pf: number): Promise<PumpPoint> {
    return this.request(`/pump/forward?omega=${omega}&pf=${pf}`);
  }

  pumpInverse(omega: number, dp: number): Promise<PumpPoint> {
    return this.request(`/pump/inverse?omega=${omega}&dp=${dp}`);
  }

  pumpCalibrate(omega: number, pf: number): Promise<PumpPoint> {
    return this.request(`/pump/calibrate?omega=${omega}&pf=${pf}`);
  }

  pumpCurve(omega: number, n: number): Promise<CurveResponse> {
    return this.request(`/pump/curve?omega=${omega}&n=${n}`);
  }

  evaluateField(
    modelId: string,
    field: string,
    parameter: number[],
    stride?: number,
  ): Promise<FieldResponse> {
    return this.request(`/models/${encodeURIComponent(modelId)}/evaluate`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(
        stride === undefined ? { field, parameter } : { field, parameter, stride },
      ),
    });
  }
}
