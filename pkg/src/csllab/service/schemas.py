"""Pydantic request/response models for the HTTP service.

A run request carries the raw YAML config text plus the mandatory seed; the
service validates it with the same strict parser the CLI uses, so client and
server cannot drift apart on units or schema.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class RunRequest(BaseModel):
    config_text: str = Field(description="YAML config document for the subcommand")
    seed: int | None = Field(default=None, ge=0, lt=2**64,
                             description="overrides a seed key in the document")


class RunResponse(BaseModel):
    subcommand: str
    seed: int
    config_digest: str
    files: dict[str, str] = Field(description="artifact filename -> exact text content")
    summary: dict


class ErrorResponse(BaseModel):
    error_class: str
    exit_code: int
    detail: str


class ConstantsResponse(BaseModel):
    lambda_csl_central: float
    lambda_csl_log10_uncertainty: float
    r_c_standard: float
    lambda_cantilever: float
    gamma_ray_cutoff: float
    bulk_heating_bound: float
    phonon_cutoff_estimate: float
    v_sound_default: float
    v_solar_cmb: float
    c: float
    cantilever_frequency: float


class HealthResponse(BaseModel):
    status: str
    version: str
