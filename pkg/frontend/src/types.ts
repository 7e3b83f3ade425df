/** DTOs mirrored from the service's response models. */

export interface FieldStats {
  min: number;
  max: number;
  mean: number;
}

export interface FieldResponse {
  field: string;
  parameter: number[];
  stats: FieldStats;
  values: number[] | null;
  extrapolated: boolean;
}

export interface PumpPoint {
  speed: number;
  flow: number;
  head: number;
}

export interface CurvePoint {
  flow: number;
  head: number;
}

export interface CurveResponse {
  omega: number;
  points: CurvePoint[];
}

export interface FieldMeta {
  n_dof: number;
  rank: number;
}

export interface ModelMetadata {
  id: string;
  format_version: number;
  energy_threshold: number;
  n_snapshots: number;
  parameter_dim: number;
  fields: Record<string, FieldMeta>;
  training_bounds: number[][];
  parameter_range: number[][] | null;
}

export interface HealthResponse {
  status: string;
  models: number;
}

/** Error body produced by the service's domain-error handler. */
export interface ServiceError {
  reason: string;
  detail: string;
  computed_flow?: number | null;
  pf_min?: number | null;
  pf_max?: number | null;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ServiceError,
  ) {
    super(body.detail || body.reason);
    this.name = "ApiError";
  }
}
