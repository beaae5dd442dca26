"""HTTP prediction service around a saved pipeline container.

Stateless: the loaded pipeline is immutable and shared across requests.
Every response carries the model's schema hash so stale clients can
detect drift.
"""

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .container import FittedPipeline, render_duration
from .errors import SchemaError


class PredictionRequest(BaseModel):
    features: dict[str, float] = {}


def create_app(pipeline: FittedPipeline) -> FastAPI:
    app = FastAPI(title="build-time predictor")

    @app.middleware("http")
    async def add_schema_hash(request: Request, call_next):
        response = await call_next(request)
        response.headers["X-Schema-Hash"] = pipeline.schema_hash
        return response

    @app.exception_handler(SchemaError)
    async def schema_error(request: Request, exc: SchemaError):
        return JSONResponse(
            status_code=400,
            content={"error": str(exc)},
            headers={"X-Schema-Hash": pipeline.schema_hash},
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "family": pipeline.model.family}

    @app.get("/schema")
    def schema():
        return {
            "schema_hash": pipeline.schema_hash,
            "features": list(pipeline.feature_columns),
            "training_means": pipeline.feature_means,
            "foreground": pipeline.foreground_features(),
        }

    @app.post("/predict")
    def predict(request: PredictionRequest):
        seconds = pipeline.predict_request(dict(request.features))
        return {
            "predicted_seconds": seconds,
            "rendered": render_duration(seconds),
            "schema_hash": pipeline.schema_hash,
        }

    return app
