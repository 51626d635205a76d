"""Validated configuration models."""

from __future__ import annotations

from enum import Enum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Standardization(str, Enum):
    """Feature preprocessing applied before clustering."""

    NONE = "none"
    ZSCORE = "zscore"


class EmbedMode(str, Enum):
    """How IPS2 clusters the fused similarity."""

    SPECTRAL = "spectral"
    ROWS = "rows"


class TensorParams(BaseModel):
    """Parameters of the indecomposable tensor similarity."""

    model_config = ConfigDict(frozen=True)

    sigma_t: float = Field(default=1.0, gt=0)
    eps: float = Field(default=1e-4, ge=0, lt=1e-3)
    k: int = Field(default=10, ge=1)


class ClusterConfig(BaseModel):
    """Knobs shared by the SC, PPC and IPS2 pipelines."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    c: int = Field(default=2, ge=2)
    k: int = Field(default=10, ge=1)
    sigma_t: float = Field(default=1.0, gt=0)
    eps: float = Field(default=1e-4, ge=0, lt=1e-3)
    kernel_bandwidth: Literal["median"] | float = "median"
    restarts: int = Field(default=20, ge=1)
    kmeans_max_iter: int = Field(default=300, ge=1)
    kmeans_tol: float = Field(default=1e-6, ge=0)
    embed_mode: EmbedMode = EmbedMode.SPECTRAL
    eig_tol: float = Field(default=1e-10, gt=0)
    eig_max_iter: int = Field(default=1000, ge=1)
    dense_cap: int = Field(default=400, ge=0)
    seed: int = Field(default=0, ge=0)

    @field_validator("kernel_bandwidth")
    @classmethod
    def _positive_bandwidth(cls, value: str | float) -> str | float:
        if not isinstance(value, str) and value <= 0:
            raise ValueError("a fixed kernel bandwidth must be positive")
        return value

    @property
    def tensor(self) -> TensorParams:
        """Tensor parameters carried by this config."""
        return TensorParams(sigma_t=self.sigma_t, eps=self.eps, k=self.k)

    def with_seed(self, seed: int) -> ClusterConfig:
        """Return a copy using ``seed``."""
        return self.model_copy(update={"seed": seed})


class NoiseKind(str, Enum):
    """Additive noise distributions."""

    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"
    RAYLEIGH = "rayleigh"
    GAMMA = "gamma"


class NoiseModel(BaseModel):
    """Additive noise model; unset parameters take the reference experiment values.

    - uniform: samples on the open interval (``low``, ``high``), default (0, 1)
    - gaussian: mean ``mean`` (0) and standard deviation ``std`` (0.5)
    - rayleigh: scale ``scale`` (0.5)
    - gamma: shape ``shape`` (5) and scale ``scale`` (10)
    """

    model_config = ConfigDict(frozen=True)

    kind: NoiseKind
    low: float = 0.0
    high: float = 1.0
    mean: float = 0.0
    std: float = 0.5
    shape: float = 5.0
    scale: float | None = None

    @model_validator(mode="after")
    def _check_params(self) -> NoiseModel:
        if self.kind is NoiseKind.UNIFORM and not self.low < self.high:
            raise ValueError("uniform noise needs low < high")
        if self.kind is NoiseKind.GAUSSIAN and self.std <= 0:
            raise ValueError("gaussian noise needs std > 0")
        if self.kind in (NoiseKind.RAYLEIGH, NoiseKind.GAMMA):
            if self.effective_scale <= 0:
                raise ValueError(f"{self.kind.value} noise needs scale > 0")
        if self.kind is NoiseKind.GAMMA and self.shape <= 0:
            raise ValueError("gamma noise needs shape > 0")
        return self

    @property
    def effective_scale(self) -> float:
        """Scale parameter with the per-kind default applied."""
        if self.scale is not None:
            return self.scale
        return 10.0 if self.kind is NoiseKind.GAMMA else 0.5
