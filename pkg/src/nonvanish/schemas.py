"""Pydantic request/response models for the HTTP service and the CLI.

Exact rationals cross this boundary as "numerator/denominator" strings;
decimal fields are annotations only.  Every response repeats the request
under "config" so reports re-parse into a (config, results) pair.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from .errors import SpecValidationError
from .rpoly import MollifierSpec, PRESETS


class SpecParams(BaseModel):
    """Mollifier parameters: a preset name and/or explicit fields.

    Explicit fields override the preset.  Polynomial coefficients are
    rational strings for powers x^1, x^2, ... (constant terms are zero by
    definition).
    """

    model_config = ConfigDict(extra="forbid")

    preset: Optional[Literal["paper", "is-baseline"]] = None
    theta1: Optional[str] = None
    theta2: Optional[str] = None
    p_coeffs: Optional[list[str]] = None
    q_coeffs: Optional[list[str]] = None
    q_for_lengths: Optional[int] = None

    def to_spec(self) -> MollifierSpec:
        if self.preset is not None:
            base = PRESETS[self.preset]
            theta1 = self.theta1 if self.theta1 is not None else base["theta1"]
            theta2 = self.theta2 if self.theta2 is not None else base["theta2"]
            p = self.p_coeffs if self.p_coeffs is not None else base["p_coeffs"]
            q = self.q_coeffs if self.q_coeffs is not None else base["q_coeffs"]
        else:
            if self.theta1 is None or self.theta2 is None:
                raise SpecValidationError("need a preset or explicit theta1/theta2")
            theta1, theta2 = self.theta1, self.theta2
            p = self.p_coeffs or []
            q = self.q_coeffs or []
        return MollifierSpec.make(theta1, theta2, p, q, self.q_for_lengths)


class ProportionRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    spec: SpecParams


class OptimizeRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    dp: int = Field(ge=1, le=12)
    dq: int = Field(ge=0, le=12)
    theta1: str = "1/2"
    theta2: str = "1/2"


class ScanRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    max_dp: int = Field(ge=1, le=12)
    max_dq: int = Field(ge=0, le=12)
    theta1: str = "1/2"
    theta2: str = "1/2"


class MomentsRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    spec: SpecParams
    q: Optional[int] = None
    shifts: list[tuple[float, float]] = Field(default_factory=list)


class ShiftedRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    spec: SpecParams
    q: int
    alpha: float
    beta: float
    method: Literal["jet", "fd"] = "jet"


class EmpiricalRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    spec: SpecParams
    q: int
    threshold: float = 1e-8


class CensusRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    spec: SpecParams
    q_list: list[int]
    threshold: float = 1e-8
    with_moments: bool = True


class KernelPoint(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["cutoff", "pair_plus", "pair_minus"] = "cutoff"
    x: float
    alpha: float = 0.0
    beta: float = 0.0
    contour_re: float = 2.0
    truncation_T: float = 10.0
    node_count: int = 768


class MellinPoint(BaseModel):
    model_config = ConfigDict(extra="forbid")
    i: int = Field(ge=1)
    y: float
    h: float


class KernelsRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    points: list[KernelPoint] = Field(default_factory=list)
    mellin: list[MellinPoint] = Field(default_factory=list)


class OraclesRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    which: Literal["orthogonality", "twisted", "divisor-integral", "divisor-bound"]
    q: Optional[int] = None
    h: Optional[int] = None
    k: Optional[int] = None
    alpha: float = 0.0
    order: int = 1
    z: float = 0.0
    sigma: float = 0.0
    y1: Optional[float] = None
    y2: Optional[float] = None
    count: int = 20
    seed: int = 0


class Report(BaseModel):
    """Envelope all endpoints return: the request echoed plus results."""

    model_config = ConfigDict(extra="forbid")
    command: str
    config: dict
    results: dict


def parse_spec_args(
    preset: Optional[str],
    theta1: Optional[str],
    theta2: Optional[str],
    p_coeffs: Optional[list[str]],
    q_coeffs: Optional[list[str]],
    q_for_lengths: Optional[int] = None,
) -> SpecParams:
    if preset is None and theta1 is None:
        raise SpecValidationError("need --preset or explicit --theta1/--theta2")
    return SpecParams(
        preset=preset,
        theta1=theta1,
        theta2=theta2,
        p_coeffs=p_coeffs,
        q_coeffs=q_coeffs,
        q_for_lengths=q_for_lengths,
    )
