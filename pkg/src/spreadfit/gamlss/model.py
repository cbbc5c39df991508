"""Model containers for the distributional regression layer."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dists import Family, LINKS, n_params
from ..errors import DomainError

INTERCEPT = "const"


class DesignMatrix:
    """Covariate matrix with an explicit leading intercept column.

    Columns carry stable identifiers (x1..x8 in the standard panel); the
    intercept is always first and always all ones.
    """

    def __init__(self, values: np.ndarray, columns: list[str]):
        values = np.asarray(values, dtype=float)
        if values.ndim != 2:
            raise DomainError("design matrix must be 2-d")
        if len(columns) != values.shape[1]:
            raise DomainError("column names do not match matrix width")
        if values.shape[1] > 9:
            raise DomainError(f"at most 9 design columns allowed, got {values.shape[1]}")
        if columns[0] != INTERCEPT or not np.all(values[:, 0] == 1.0):
            raise DomainError("first design column must be the all-ones intercept")
        for j, name in enumerate(columns):
            if np.all(values[:, j] == 0.0):
                raise DomainError(f"design column {name} is constant zero")
        if len(set(columns)) != len(columns):
            raise DomainError("duplicate design column names")
        self.values = values
        self.columns = list(columns)

    @classmethod
    def from_covariates(cls, covariates: np.ndarray, names: list[str]) -> "DesignMatrix":
        covariates = np.atleast_2d(np.asarray(covariates, dtype=float))
        ones = np.ones((covariates.shape[0], 1))
        return cls(np.hstack([ones, covariates]), [INTERCEPT, *names])

    @classmethod
    def intercept_only(cls, n_rows: int) -> "DesignMatrix":
        return cls(np.ones((n_rows, 1)), [INTERCEPT])

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def covariate_names(self) -> list[str]:
        return self.columns[1:]

    def submatrix(self, active: list[str]) -> np.ndarray:
        """Intercept plus the requested covariates, in design order."""
        idx = [0] + [self.columns.index(name) for name in active]
        return self.values[:, idx]


@dataclass
class FitConfig:
    """Tunables of the fitting / specification loop."""

    alpha: float = 0.05
    max_cycles: int = 200
    step_tol: float = 1e-12
    rel_tol: float = 1e-8

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"significance level must lie in (0,1), got {self.alpha}")


@dataclass
class EliminationStep:
    """One backward-elimination event: which coefficient left and why."""

    parameter: int
    column: str
    pvalue: float


@dataclass
class FittedModel:
    """A converged (or capped) maximum-likelihood fit of one family."""

    family: Family
    active: dict[int, list[str]]
    coef: dict[int, np.ndarray]
    se: dict[int, np.ndarray]
    links: dict[int, str]
    loglik: float
    aic: float
    converged: bool
    n_obs: int
    loglik_path: list[float] = field(default_factory=list)
    trace: list[EliminationStep] = field(default_factory=list)

    @property
    def n_coef(self) -> int:
        return sum(len(v) for v in self.coef.values())

    def coefficient_names(self, k: int) -> list[str]:
        return [INTERCEPT, *self.active[k]]


def links_for(family: Family) -> dict[int, str]:
    return {k + 1: link for k, link in enumerate(LINKS[family])}


def parameter_indices(family: Family) -> list[int]:
    return list(range(1, n_params(family) + 1))
