"""HTTP calculator backend serving trained triage models.

All models load once at startup into immutable memory; request handling
never mutates shared state. Error contract: unknown model id -> 404,
feature-set problems -> 422 naming every offending feature, malformed
body -> 400, bad token -> 401. Responses are JSON with probabilities as
decimal literals, bit-identical to CLI predictions from the same file.
"""

from __future__ import annotations

import math
import os
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .dataset import load_schema
from .errors import ModelFormatError
from .explain import TreeShapExplainer
from .gbtree import GBTModel, predict_proba
from .model_io import load_model

DEFAULT_THRESHOLD = 0.5


class PredictRequest(BaseModel):
    model: str
    features: dict

    model_config = {"protected_namespaces": ()}


class LoadedModel:
    """One model plus everything needed to serve and explain it."""

    def __init__(self, model_id: str, model: GBTModel, units: dict, display: dict):
        self.model_id = model_id
        self.model = model
        self.version = f"{model.task}/{model.training_meta.data_fingerprint or 'unversioned'}"
        ranges = model.training_meta.feature_ranges
        self.manifest = [
            {
                "name": name,
                "display": display.get(name, name),
                "unit": units.get(name, ""),
                "soft_range": list(ranges[name]) if name in ranges else None,
            }
            for name in model.feature_names
        ]
        self.explainer: Optional[TreeShapExplainer] = None


def _load_models(model_dir: Path) -> dict:
    files = sorted(model_dir.glob("*.json"))
    if not files:
        raise ModelFormatError(f"no model files (*.json) in {model_dir}")
    schema = load_schema()
    units = {s.name: s.unit for s in schema}
    display = {s.name: s.display for s in schema}
    registry = {}
    for path in files:
        try:
            model = load_model(path)
        except ModelFormatError as exc:
            raise ModelFormatError(f"refusing to start: {path.name}: {exc}") from None
        entry = LoadedModel(path.stem, model, units, display)
        background = path.with_suffix(".background.csv")
        if background.exists():
            from .dataset import read_matrix_csv

            matrix, _ = read_matrix_csv(background)
            entry.explainer = TreeShapExplainer(model, matrix.X)
        registry[path.stem] = entry
    return registry


def create_app(model_dir, token: Optional[str] = None) -> FastAPI:
    registry = _load_models(Path(model_dir))
    app = FastAPI(title="triagekit service", version=__version__)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.registry = registry

    @app.exception_handler(RequestValidationError)
    async def body_error(request: Request, exc: RequestValidationError):
        # malformed / mistyped bodies are the caller's problem, not a crash
        return JSONResponse(
            status_code=400,
            content={"error": "malformed request body", "detail": str(exc.errors()[:5])},
        )

    def check_token(request: Request):
        if token is None:
            return
        supplied = request.headers.get("authorization", "")
        if supplied != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="missing or invalid token")

    @app.get("/health")
    async def health():
        return {"status": "ok", "model_count": len(registry)}

    @app.get("/models")
    async def models():
        return {
            "models": [
                {"id": m.model_id, "version": m.version, "task": m.model.task,
                 "feature_count": len(m.manifest)}
                for m in registry.values()
            ]
        }

    def get_entry(model_id: str) -> LoadedModel:
        entry = registry.get(model_id)
        if entry is None:
            raise HTTPException(
                status_code=404,
                detail=f"unknown model {model_id!r}; available: {sorted(registry)}",
            )
        return entry

    @app.get("/models/{model_id}/manifest")
    async def manifest(model_id: str):
        entry = get_entry(model_id)
        return {
            "id": entry.model_id,
            "version": entry.version,
            "task": entry.model.task,
            "threshold": DEFAULT_THRESHOLD,
            "features": entry.manifest,
        }

    @app.post("/predict")
    async def predict(body: PredictRequest, request: Request,
                      explain: bool = Query(default=False)):
        check_token(request)
        entry = get_entry(body.model)
        model = entry.model
        wanted = list(model.feature_names)

        problems = []
        values = []
        for name in wanted:
            if name not in body.features:
                problems.append(f"missing feature {name!r}")
        extra = sorted(set(body.features) - set(wanted))
        for name in extra:
            problems.append(f"unexpected feature {name!r}")
        if not problems:
            for name in wanted:
                raw = body.features[name]
                try:
                    value = float(raw)
                except (TypeError, ValueError):
                    problems.append(f"feature {name!r} is not numeric: {raw!r}")
                    continue
                if not math.isfinite(value):
                    problems.append(f"feature {name!r} is not finite: {raw!r}")
                    continue
                values.append(value)
        if problems:
            raise HTTPException(status_code=422, detail=problems)

        warnings = []
        ranges = model.training_meta.feature_ranges
        for name, value in zip(wanted, values):
            if name in ranges:
                lo, hi = ranges[name]
                if not lo <= value <= hi:
                    warnings.append(
                        f"{name}={value} outside the training range [{lo}, {hi}]"
                    )

        probability = predict_proba(model, values)
        label = "positive" if probability >= DEFAULT_THRESHOLD else "negative"
        response = {
            "probability": probability,
            "label": label,
            "threshold": DEFAULT_THRESHOLD,
            "model_version": entry.version,
            "warnings": warnings,
        }
        if explain:
            if entry.explainer is None:
                raise HTTPException(
                    status_code=422,
                    detail=["explanations unavailable: model has no background data"],
                )
            explanation = entry.explainer.explain_row(values)
            response["explanation"] = {
                "base_value": explanation.base_value,
                "predicted_margin": explanation.predicted_margin,
                "space": "log-odds",
                "contributions": [
                    {"feature": name, "value": value, "shap": shap}
                    for name, value, shap in zip(
                        wanted, values, explanation.contributions.tolist()
                    )
                ],
            }
        return response

    return app


def attach_backgrounds(app: FastAPI, backgrounds: dict) -> None:
    """Give models a background matrix so /predict?explain=true works."""
    for model_id, matrix in backgrounds.items():
        entry = app.state.registry.get(model_id)
        if entry is not None:
            entry.explainer = TreeShapExplainer(entry.model, matrix)


def serve(model_dir=None, host: Optional[str] = None, port: Optional[int] = None) -> None:
    """Run the service with uvicorn; env vars fill unset arguments.

    A model directory holds one ``<id>.json`` per model and, optionally,
    ``<id>.background.csv`` enabling SHAP explanations for that model.
    Access logging records method/path/status only; feature payloads and
    any patient identifiers never reach the logs.
    """
    import uvicorn

    model_dir = Path(model_dir or os.environ.get("TRIAGE_MODEL_DIR", "models"))
    host = host or os.environ.get("TRIAGE_HOST", "127.0.0.1")
    port = port or int(os.environ.get("TRIAGE_PORT", "8321"))
    token = os.environ.get("TRIAGE_TOKEN") or None
    app = create_app(model_dir, token=token)
    uvicorn.run(app, host=host, port=port, log_level="info")
