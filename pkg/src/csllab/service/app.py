"""FastAPI service wrapping the laboratory core.

One POST endpoint per subcommand, all sharing the RunRequest/RunResponse
contract.  Domain errors map to HTTP 422 (bad input) or 500 (numerical
failure) with the package exit code in the body, so a thin client can exit
with the documented status without interpreting messages.
"""

from __future__ import annotations

import dataclasses

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__
from ..config import SUBCOMMANDS, parse_config
from ..constants import constants
from ..errors import (
    ConfigError,
    ContractViolationError,
    CslLabError,
    exit_code_for,
)
from ..runner import execute
from .schemas import ConstantsResponse, ErrorResponse, HealthResponse, RunRequest, RunResponse

_CLIENT_FAULTS = (ConfigError, ContractViolationError)


def create_app() -> FastAPI:
    app = FastAPI(
        title="csllab",
        version=__version__,
        description="Collapse-model numerical laboratory: stochastic state-vector "
        "reduction, colored noise, scattering collimation, heating bounds, and "
        "boost arithmetic as a service.",
    )

    @app.exception_handler(CslLabError)
    async def _domain_error(request, exc: CslLabError):
        status = 422 if isinstance(exc, _CLIENT_FAULTS) else 500
        body = ErrorResponse(
            error_class=type(exc).__name__,
            exit_code=exit_code_for(exc),
            detail=str(exc),
        )
        return JSONResponse(status_code=status, content=body.model_dump())

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.get("/constants", response_model=ConstantsResponse)
    def get_constants() -> ConstantsResponse:
        return ConstantsResponse(**dataclasses.asdict(constants()))

    def _make_endpoint(subcommand: str):
        def endpoint(request: RunRequest) -> RunResponse:
            config = parse_config(request.config_text, subcommand, request.seed)
            result = execute(config)
            return RunResponse(
                subcommand=subcommand,
                seed=config.seed,
                config_digest=result.summary["config_digest"],
                files=result.files,
                summary=result.summary,
            )

        endpoint.__name__ = f"run_{subcommand}"
        return endpoint

    for name in SUBCOMMANDS:
        app.post(f"/run/{name}", response_model=RunResponse)(_make_endpoint(name))

    return app


app = create_app()
