"""HTTP service exposing the pipelines with pydantic request/response models.

The CLI talks to this app (in-process by default, over the network with
--server); anything that makes a spec unusable - malformed JSON, unknown
fields, failed construction-time validation, precondition violations - maps
to a 422 with a structured detail, which clients surface as an input error.
"""

from __future__ import annotations

from typing import Optional, Tuple

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import Field

from .errors import (
    InsufficientSamplesError,
    InvalidInputError,
    PreconditionError,
    QuadratureError,
    SpecError,
)
from .pipelines import run_check, run_equiv, run_family, run_verify_gig
from .specfile import (
    CheckReport,
    EquivReport,
    FamilyReport,
    SpecFileModel,
    VERSION,
    VerifyGigReport,
    _Strict,
)

_CLIENT_ERRORS = (SpecError, PreconditionError, InsufficientSamplesError,
                  InvalidInputError)


class EquivRequest(_Strict):
    spec_a: SpecFileModel
    spec_b: SpecFileModel


class GridRequest(_Strict):
    lo: float
    hi: float
    n: int = Field(ge=1)


class SampleRequest(_Strict):
    n: int = Field(ge=1)
    seed: int = 0


class FamilyRequest(_Strict):
    spec: SpecFileModel
    theta: list[float]
    grid: Optional[GridRequest] = None
    sample: Optional[SampleRequest] = None


class VerifyGigRequest(_Strict):
    seed: int = 0


class HealthReport(_Strict):
    status: str
    version: str


def create_app() -> FastAPI:
    app = FastAPI(title="repfam", version=VERSION,
                  description="Exponential families generated by matrix group "
                              "actions: diagnostics, equivalence, realization.")

    async def client_error_handler(request: Request, exc: Exception):
        return JSONResponse(
            status_code=422,
            content={"detail": [{"type": type(exc).__name__, "msg": str(exc)}]})

    for exc_type in _CLIENT_ERRORS:
        app.add_exception_handler(exc_type, client_error_handler)

    @app.exception_handler(QuadratureError)
    async def quadrature_error_handler(request: Request, exc: QuadratureError):
        return JSONResponse(
            status_code=500,
            content={"detail": [{"type": "QuadratureError", "msg": str(exc)}]})

    @app.get("/health", response_model=HealthReport)
    def health() -> HealthReport:
        return HealthReport(status="ok", version=VERSION)

    @app.post("/check", response_model=CheckReport)
    def check(spec: SpecFileModel) -> CheckReport:
        return run_check(spec)

    @app.post("/equiv", response_model=EquivReport)
    def equiv(request: EquivRequest) -> EquivReport:
        return run_equiv(request.spec_a, request.spec_b)

    @app.post("/family", response_model=FamilyReport)
    def family(request: FamilyRequest) -> FamilyReport:
        grid: Optional[Tuple[float, float, int]] = None
        if request.grid is not None:
            grid = (request.grid.lo, request.grid.hi, request.grid.n)
        sample_request: Optional[Tuple[int, int]] = None
        if request.sample is not None:
            sample_request = (request.sample.n, request.sample.seed)
        return run_family(request.spec, request.theta, grid=grid,
                          sample_request=sample_request)

    @app.post("/verify-gig", response_model=VerifyGigReport)
    def verify_gig(request: Optional[VerifyGigRequest] = None) -> VerifyGigReport:
        seed = request.seed if request is not None else 0
        return run_verify_gig(seed=seed)

    return app


app = create_app()
