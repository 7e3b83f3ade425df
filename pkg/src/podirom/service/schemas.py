"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    models: int


class LoadModelRequest(BaseModel):
    path: str
    id: str | None = None


class FieldMeta(BaseModel):
    n_dof: int
    rank: int


class ModelMetadata(BaseModel):
    id: str
    format_version: int
    energy_threshold: float
    n_snapshots: int
    parameter_dim: int
    fields: dict[str, FieldMeta]
    training_bounds: list[list[float]]
    parameter_range: list[list[float]] | None = None


class EvaluateRequest(BaseModel):
    field: str
    parameter: list[float]
    stride: int | None = Field(default=None, ge=1)


class FieldStats(BaseModel):
    min: float
    max: float
    mean: float


class FieldResponse(BaseModel):
    field: str
    parameter: list[float]
    stats: FieldStats
    values: list[float] | None = None
    extrapolated: bool


class PumpPointResponse(BaseModel):
    speed: float
    flow: float
    head: float


class PumpHeadResponse(BaseModel):
    speed: float
    flow: float
    head: float


class CurvePoint(BaseModel):
    flow: float
    head: float


class CurveResponse(BaseModel):
    omega: float
    points: list[CurvePoint]


class ErrorBody(BaseModel):
    reason: str
    detail: str
    computed_flow: float | None = None
    pf_min: float | None = None
    pf_max: float | None = None
