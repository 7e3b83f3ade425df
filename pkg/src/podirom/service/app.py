"""HTTP service exposing trained surrogate evaluation and pump analytics.

Models load into an immutable registry (load-once per id; reloading the same
content under the same id is a conflict). Evaluation handlers are pure reads
of immutable state, so concurrent requests return results identical to
sequential execution.
"""

from __future__ import annotations

import hashlib
import os
import threading
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse

from .. import pump
from ..errors import (
    AmbiguousRoot,
    CorruptModel,
    DimensionMismatch,
    FlowOutOfRange,
    IoFailure,
    NoRealRoot,
    ParameterOutOfRange,
    RomError,
    UnknownField,
    VersionMismatch,
)
from ..pipeline import RomModel, evaluate_field, load_model_bytes
from .schemas import (
    CurvePoint,
    CurveResponse,
    EvaluateRequest,
    FieldMeta,
    FieldResponse,
    FieldStats,
    HealthResponse,
    LoadModelRequest,
    ModelMetadata,
    PumpHeadResponse,
    PumpPointResponse,
)

DEFAULT_MAX_PAYLOAD = 256 * 1024 * 1024
MODEL_SUFFIX = ".podi"

_ERROR_STATUS = {
    UnknownField: 404,
    DimensionMismatch: 422,
    ParameterOutOfRange: 422,
    FlowOutOfRange: 422,
    NoRealRoot: 422,
    AmbiguousRoot: 422,
    CorruptModel: 400,
    VersionMismatch: 400,
    IoFailure: 400,
}

_ACCEPTABLE_MEDIA = {"*/*", "application/*", "application/json", "text/html"}


class ModelRegistry:
    """Load-once model store: concurrent reads, exclusive insertion."""

    def __init__(self):
        self._models: dict[str, RomModel] = {}
        self._lock = threading.Lock()

    def add(self, model_id: str, model: RomModel) -> None:
        with self._lock:
            if model_id in self._models:
                raise KeyError(model_id)
            self._models[model_id] = model

    def get(self, model_id: str) -> RomModel | None:
        return self._models.get(model_id)

    def __len__(self) -> int:
        return len(self._models)


def _model_id_for(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:12]


def _metadata(model_id: str, model: RomModel) -> ModelMetadata:
    return ModelMetadata(
        id=model_id,
        format_version=model.format_version,
        energy_threshold=model.energy_threshold,
        n_snapshots=model.n_snapshots,
        parameter_dim=model.parameter_dim,
        fields={
            label: FieldMeta(n_dof=rom.n_dof, rank=rom.rank)
            for label, rom in model.fields.items()
        },
        training_bounds=model.training_bounds.tolist(),
        parameter_range=(
            None if model.parameter_range is None else model.parameter_range.tolist()
        ),
    )


def create_app(
    model_dir: str | None = None,
    max_payload_bytes: int | None = None,
    pump_curve: pump.PumpCurve | None = None,
    console_dir: str | None = None,
) -> FastAPI:
    """Build the service; ``model_dir`` (or env PODIROM_MODEL_DIR) is scanned
    for ``*.podi`` files at startup. ``console_dir`` optionally mounts a built
    browser console at /console."""
    model_dir = model_dir or os.environ.get("PODIROM_MODEL_DIR")
    console_dir = console_dir or os.environ.get("PODIROM_CONSOLE_DIR")
    if max_payload_bytes is None:
        max_payload_bytes = int(
            os.environ.get("PODIROM_MAX_PAYLOAD_BYTES", DEFAULT_MAX_PAYLOAD)
        )
    curve = pump_curve or pump.PumpCurve()

    app = FastAPI(title="podirom service", version="0.1.0")
    registry = ModelRegistry()
    app.state.registry = registry

    if console_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/console", StaticFiles(directory=console_dir, html=True), name="console")

    if model_dir:
        for path in sorted(Path(model_dir).glob(f"*{MODEL_SUFFIX}")):
            data = path.read_bytes()
            registry.add(_model_id_for(data), load_model_bytes(data))

    @app.exception_handler(RomError)
    async def rom_error_handler(_request: Request, exc: RomError):
        status = 400
        for klass, code in _ERROR_STATUS.items():
            if isinstance(exc, klass):
                status = code
                break
        body = {"reason": exc.code, "detail": str(exc)}
        if isinstance(exc, FlowOutOfRange):
            body.update(
                computed_flow=exc.computed_flow, pf_min=exc.pf_min, pf_max=exc.pf_max
            )
        if isinstance(exc, ParameterOutOfRange):
            body.update(parameter=exc.parameter, low=exc.low, high=exc.high)
        return JSONResponse(status_code=status, content=body)

    @app.middleware("http")
    async def require_json_capable_accept(request: Request, call_next):
        accept = request.headers.get("accept")
        if accept is not None:
            offered = {part.split(";")[0].strip().lower() for part in accept.split(",")}
            if not offered & _ACCEPTABLE_MEDIA:
                return JSONResponse(
                    status_code=406,
                    content={"reason": "not_acceptable", "detail": f"cannot satisfy Accept: {accept}"},
                )
        return await call_next(request)

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", models=len(registry))

    @app.post("/models", response_model=ModelMetadata, status_code=201)
    async def add_model(request: Request):
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("application/octet-stream"):
            data = await request.body()
            if len(data) > max_payload_bytes:
                return JSONResponse(
                    status_code=413,
                    content={"reason": "payload_too_large", "detail": "model upload exceeds limit"},
                )
            model_id = request.query_params.get("id") or _model_id_for(data)
        else:
            payload = LoadModelRequest.model_validate(await request.json())
            try:
                data = Path(payload.path).read_bytes()
            except OSError as exc:
                raise IoFailure(f"cannot read model file: {exc}") from exc
            model_id = payload.id or _model_id_for(data)
        model = load_model_bytes(data)
        try:
            registry.add(model_id, model)
        except KeyError:
            return JSONResponse(
                status_code=409,
                content={"reason": "duplicate_id", "detail": f"model '{model_id}' already loaded"},
            )
        return _metadata(model_id, model)

    def _missing_model(model_id: str) -> JSONResponse:
        return JSONResponse(
            status_code=404,
            content={"reason": "unknown_model", "detail": f"no model '{model_id}'"},
        )

    @app.get("/models/{model_id}", response_model=ModelMetadata)
    def model_metadata(model_id: str):
        model = registry.get(model_id)
        if model is None:
            return _missing_model(model_id)
        return _metadata(model_id, model)

    @app.post("/models/{model_id}/evaluate", response_model=FieldResponse)
    def evaluate(model_id: str, body: EvaluateRequest):
        model = registry.get(model_id)
        if model is None:
            return _missing_model(model_id)
        model.check_parameter_range(body.parameter)
        values = evaluate_field(model, body.field, body.parameter)
        stats = FieldStats(
            min=float(values.min()), max=float(values.max()), mean=float(values.mean())
        )
        sampled = values[:: body.stride].tolist() if body.stride is not None else None
        return FieldResponse(
            field=body.field,
            parameter=list(body.parameter),
            stats=stats,
            values=sampled,
            extrapolated=model.is_extrapolated(body.parameter),
        )

    @app.get("/pump/forward", response_model=PumpHeadResponse)
    def pump_forward(omega: float = Query(gt=0), pf: float = Query()):
        head = pump.head_from_speed_flow(curve, omega, pf)
        return PumpHeadResponse(speed=omega, flow=pf, head=head)

    @app.get("/pump/inverse", response_model=PumpPointResponse)
    def pump_inverse(omega: float = Query(gt=0), dp: float = Query()):
        point = pump.panel1(curve, head=dp, omega=omega)
        return PumpPointResponse(speed=point.speed, flow=point.flow, head=point.head)

    @app.get("/pump/calibrate", response_model=PumpHeadResponse)
    def pump_calibrate(omega: float = Query(gt=0), pf: float = Query()):
        head = pump.panel2_calibrate(curve, omega, pf)
        return PumpHeadResponse(speed=omega, flow=pf, head=head)

    @app.get("/pump/curve", response_model=CurveResponse)
    def pump_curve_samples(omega: float = Query(gt=0), n: int = Query(default=25, ge=2)):
        points = pump.curve_samples(curve, omega, n)
        return CurveResponse(
            omega=omega, points=[CurvePoint(flow=f, head=h) for f, h in points]
        )

    @app.get("/spec")
    def openapi_spec():
        return app.openapi()

    return app
