"""Schemas for the reports the CLI prints."""

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field


class VerificationBlock(BaseModel):
    trials: int
    failures: int
    degree_bound: int = Field(..., description="Total degree bounding the per-trial false-pass probability")
    nonvanishing: Optional[int] = Field(None, description="Verification points where the denominator is nonzero")
    first_failure: Optional[List[str]] = None


class SliceEntryModel(BaseModel):
    y: List[str]
    c: Optional[int] = Field(None, description="Annihilator index of the slice; null when unbounded")
    oracle_failure: bool = False


class OrderingModel(BaseModel):
    variables: List[str]
    t_cap: Optional[int] = None
    basis: List[str] = Field(default_factory=list, description="The first c basis monomials")


class ResultBlock(BaseModel):
    """The outcome of one command; fields not relevant to the command are omitted."""

    kind: Literal["annihilator", "rational_rep", "profile", "verify"]
    c: Optional[int] = None
    poly: Optional[str] = Field(None, examples=["x1^2*t + t - x1"])
    numerator: Optional[str] = None
    denominator: Optional[str] = None
    method: Optional[str] = None
    n: Optional[int] = None
    b_size: Optional[int] = None
    y0: Optional[List[str]] = None
    probes: Optional[List[List[str]]] = None
    slice_profile: Optional[List[SliceEntryModel]] = None
    histogram: Optional[Dict[str, int]] = None
    ordering: Optional[OrderingModel] = None
    sample_size: Optional[int] = None
    rounds: Optional[int] = None
    passed: Optional[bool] = None
    verification: Optional[VerificationBlock] = None


class RunReport(BaseModel):
    """Everything needed to reproduce a run and its result."""

    config: Dict[str, Any]
    result: ResultBlock


class ErrorBody(BaseModel):
    message: str
    exit_code: int
    details: Dict[str, Any] = Field(default_factory=dict)


class ErrorReport(BaseModel):
    error: ErrorBody
