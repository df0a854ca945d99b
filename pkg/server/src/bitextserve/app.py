"""The HTTP layer: routes, request shapes, and error mapping."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .inference import InferenceFailure, ModelBundle, ModelMissing, RequestError


class FillMaskRequest(BaseModel):
    text: str
    topk: int


class EmbedRequest(BaseModel):
    texts: list[str]


class QeRequest(BaseModel):
    source: str
    target: str


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def create_app(bundle: ModelBundle) -> FastAPI:
    """Wire the loaded models into the JSON protocol.

    Endpoints are synchronous and run in the framework's worker threads;
    per-model locks in the bundle serialize actual inference. No request
    mutates server state, so identical payloads always get identical
    responses regardless of ordering.
    """
    app = FastAPI(title=bundle.name, docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def on_bad_request(request: Request, exc: RequestValidationError):
        return _error(400, f"malformed request: {exc.errors()}")

    @app.exception_handler(RequestError)
    async def on_request_error(request: Request, exc: RequestError):
        return _error(400, str(exc))

    @app.exception_handler(ModelMissing)
    async def on_model_missing(request: Request, exc: ModelMissing):
        return _error(503, str(exc))

    @app.exception_handler(InferenceFailure)
    async def on_inference_failure(request: Request, exc: InferenceFailure):
        return _error(500, str(exc))

    @app.exception_handler(Exception)
    async def on_crash(request: Request, exc: Exception):
        return _error(500, f"inference failed: {exc}")

    @app.get("/health")
    def health() -> dict:
        return bundle.descriptor()

    @app.post("/fill_mask")
    def fill_mask(req: FillMaskRequest) -> dict:
        return {"predictions": bundle.mask_filler.predict(req.text, req.topk)}

    @app.post("/embed")
    def embed(req: EmbedRequest) -> dict:
        return {"vectors": bundle.embedder.encode(req.texts)}

    @app.post("/qe")
    def qe(req: QeRequest) -> dict:
        if bundle.quality is None:
            raise ModelMissing("no quality-estimation model is loaded")
        return {"score": bundle.quality.score(req.source, req.target)}

    return app
