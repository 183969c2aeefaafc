"""Schemas for search, reconstruction and whole-run configuration."""

from fractions import Fraction
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core.config import get_settings


def _settings_default(name: str):
    return lambda: getattr(get_settings(), name)


class SearchConfig(BaseModel):
    """Parameters of the growing-sample annihilator search."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_max: int = Field(default_factory=_settings_default("n_max"), ge=1, description="Largest basis index tried")
    initial_samples: int = Field(8, ge=1, description="Size of the first sample")
    growth_factor: str = Field("2", examples=["2", "3/2"], description="Rational factor (> 1) applied to the sample size each round")
    stabilize_window: int = Field(3, ge=2, description="Consecutive rounds that must agree before verification")
    verify_trials: int = Field(64, ge=1, description="Fresh points used to verify a candidate")
    sample_range: int = Field(default_factory=_settings_default("sample_range"), ge=1, description="Uniform sampling draws integers in [-N, N]")
    seed: int = Field(default_factory=_settings_default("seed"), ge=0, description="Seed of the run's random generator")
    undefined_budget: int = Field(10, ge=1, description="Undefined evaluations tolerated per requested point")
    max_samples: int = Field(4096, ge=1, description="Largest sample the search will grow to")

    @field_validator("growth_factor", mode="before")
    @classmethod
    def _check_growth(cls, value):
        try:
            growth = Fraction(str(value))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"growth factor '{value}' is not a rational number")
        if growth <= 1:
            raise ValueError("growth factor must exceed 1")
        return str(growth)

    @property
    def growth(self) -> Fraction:
        return Fraction(self.growth_factor)


class ReconstructConfig(BaseModel):
    """Parameters of the separately-regular reconstruction pipeline."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    search: SearchConfig = Field(default_factory=SearchConfig)
    slices: int = Field(25, ge=1, description="Number of y-slices scanned")
    probe_retries: int = Field(50, ge=1, description="Probe tuples tried before giving up")
    nonvanishing_ratio: float = Field(0.9, gt=0, le=1, description="Share of verification points where Q must not vanish")
    workers: int = Field(1, ge=1, description="Threads used for the slice scan")


class RunConfig(BaseModel):
    """One CLI invocation: merged from a YAML file and command-line flags."""

    model_config = ConfigDict(extra="forbid")

    command: Literal["annihilate", "reconstruct", "slice-scan", "verify", "schema", "golden"]
    field: str = Field("q", examples=["q", "fp", "fp:101"])
    expr: Optional[str] = Field(None, examples=["x1*y1/(1+x1^2)"])
    table: Optional[str] = Field(None, examples=["data/fixtures/powers_of_two.csv"])
    x_vars: int = Field(1, ge=0)
    y_vars: int = Field(0, ge=0)
    t_cap: Optional[int] = Field(1, ge=0, description="Largest power of t in the basis; null for none")
    n_max: int = Field(default_factory=_settings_default("n_max"), ge=1)
    samples: int = Field(8, ge=1)
    grow: str = "2"
    window: int = Field(3, ge=2)
    verify_trials: int = Field(64, ge=1)
    range: int = Field(default_factory=_settings_default("sample_range"), ge=1)
    seed: int = Field(default_factory=_settings_default("seed"), ge=0)
    max_samples: int = Field(4096, ge=1)
    x_sampler: str = Field("uniform", examples=["uniform", "pythagorean", "integers", "grid:-2:2"])
    y_sampler: str = "uniform"
    a_sampler: str = "uniform"
    slices: int = Field(25, ge=1)
    probe_retries: int = Field(50, ge=1)
    direct: bool = False
    relation: Optional[str] = Field(None, examples=["(1+x1^2)*t - x1"])
    numerator: Optional[str] = None
    denominator: Optional[str] = None
    output: Literal["json", "text"] = "text"
    workers: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _check_source(self):
        if self.command in ("schema", "golden"):
            return self
        if (self.expr is None) == (self.table is None):
            raise ValueError("exactly one of expr and table is required")
        if self.x_vars + self.y_vars == 0:
            raise ValueError("the oracle needs at least one argument")
        if self.command in ("reconstruct", "slice-scan") and (self.x_vars < 1 or self.y_vars < 1):
            raise ValueError(f"{self.command} needs x_vars >= 1 and y_vars >= 1")
        return self

    def search_config(self) -> SearchConfig:
        return SearchConfig(
            n_max=self.n_max,
            initial_samples=self.samples,
            growth_factor=self.grow,
            stabilize_window=self.window,
            verify_trials=self.verify_trials,
            sample_range=self.range,
            seed=self.seed,
            max_samples=self.max_samples,
        )

    def reconstruct_config(self) -> ReconstructConfig:
        return ReconstructConfig(
            search=self.search_config(),
            slices=self.slices,
            probe_retries=self.probe_retries,
            workers=self.workers,
        )
