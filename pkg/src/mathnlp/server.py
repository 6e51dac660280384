"""HTTP API over a loaded pipeline.

JSON endpoints, UTF-8 throughout. Validation problems come back as 4xx
and storage or model failures as 5xx, both shaped ``{error, code}`` so
clients can branch on ``code`` without parsing messages.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from mathnlp import PIPELINE_VERSION
from mathnlp.errors import (
    InvalidFeedback,
    MathNlpError,
    ModelNotLoaded,
    StorageFailure,
    UnbalancedDelimiter,
)
from mathnlp.feedback import FeedbackLog
from mathnlp.pipeline import Pipeline, analyze_document, result_to_dict


class AnalyzeRequest(BaseModel):
    text: str
    doc_id: str | None = None


class FeedbackRequest(BaseModel):
    doc_id: str
    item_kind: str
    item_value: str
    verdict: str
    editor_id: str


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message, "code": code})


def create_app(pipeline: Pipeline, feedback_log: FeedbackLog) -> FastAPI:
    app = FastAPI(title="mathnlp", version=PIPELINE_VERSION)
    # The review UI is served separately (any static file server), so the
    # API must answer cross-origin browser requests.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(RequestValidationError)
    async def on_validation(request: Request, exc: RequestValidationError):
        # str(exc) would embed server file paths; keep only loc/msg pairs.
        parts = [
            "{}: {}".format(".".join(str(p) for p in err["loc"]), err["msg"])
            for err in exc.errors()
        ]
        return _error_response(400, "validation", "; ".join(parts))

    @app.exception_handler(UnbalancedDelimiter)
    async def on_unbalanced(request: Request, exc: UnbalancedDelimiter):
        return _error_response(400, "unbalanced_delimiter", str(exc))

    @app.exception_handler(InvalidFeedback)
    async def on_invalid_feedback(request: Request, exc: InvalidFeedback):
        return _error_response(400, "invalid_feedback", str(exc))

    @app.exception_handler(ModelNotLoaded)
    async def on_model_not_loaded(request: Request, exc: ModelNotLoaded):
        return _error_response(500, "model_not_loaded", str(exc))

    @app.exception_handler(StorageFailure)
    async def on_storage_failure(request: Request, exc: StorageFailure):
        return _error_response(500, "storage_failure", str(exc))

    @app.exception_handler(MathNlpError)
    async def on_pipeline_error(request: Request, exc: MathNlpError):
        return _error_response(500, "internal", str(exc))

    @app.post("/v1/analyze")
    def analyze(body: AnalyzeRequest) -> dict:
        result = analyze_document(body.text, pipeline, doc_id=body.doc_id)
        return result_to_dict(result)

    @app.post("/v1/feedback")
    def feedback(body: FeedbackRequest) -> dict:
        feedback_log.record(
            doc_id=body.doc_id,
            item_kind=body.item_kind,
            item_value=body.item_value,
            verdict=body.verdict,
            editor_id=body.editor_id,
        )
        return {"ok": True}

    @app.get("/v1/health")
    def health() -> dict:
        return {"status": "ok", "pipeline_version": PIPELINE_VERSION}

    @app.get("/v1/scheme")
    def scheme() -> dict:
        return {
            "classes": [
                {"code": code, "title": title} for code, title in pipeline.scheme_classes()
            ]
        }

    return app
