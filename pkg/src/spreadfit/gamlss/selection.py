"""Coefficient significance testing and backward elimination."""

from __future__ import annotations

import numpy as np
from scipy import special as sc

from ..errors import NonConvergence
from .fit import fit
from .model import DesignMatrix, EliminationStep, FitConfig, FittedModel


def wald_pvalues(model: FittedModel) -> dict[tuple[int, str], float]:
    """Two-sided normal test p = 2(1 - Phi(|beta/se|)) per coefficient.

    Keys are (parameter index, column name); intercepts are included but
    are never eligible for elimination.
    """
    out = {}
    for k in model.active:
        names = model.coefficient_names(k)
        for name, beta, se in zip(names, model.coef[k], model.se[k]):
            if not np.isfinite(se) or se <= 0:
                p = 1.0
            else:
                p = float(2.0 * sc.ndtr(-abs(beta / se)))
            out[(k, name)] = p
    return out


def _worst_coefficient(model: FittedModel, pvalues) -> tuple[int, str, float] | None:
    """Most insignificant non-intercept coefficient.

    Ties go to the highest parameter index (kurtosis before skewness
    before scale before location), then the rightmost column.
    """
    worst = None
    for k in model.active:
        for pos, name in enumerate(model.active[k]):
            p = pvalues[(k, name)]
            key = (p, k, pos)
            if worst is None or key > worst[0]:
                worst = (key, k, name)
    if worst is None:
        return None
    (p, _, _), k, name = worst
    return k, name, p


def specify(
    family,
    y,
    X: DesignMatrix,
    config: FitConfig | None = None,
    active: dict[int, list[str]] | None = None,
) -> FittedModel:
    """Backward elimination to a fully significant specification.

    Starts from all supplied covariates in every parameter equation (or
    the given active sets), repeatedly removes the single least
    significant coefficient across all equations and refits, until every
    non-intercept coefficient is significant at the configured level.
    """
    config = config or FitConfig()
    if active is None:
        active = {k: list(X.covariate_names) for k in (1, 2, 3, 4)}
    model = fit(family, y, X, active=active, config=config)
    if not model.converged:
        raise NonConvergence(f"initial fit did not converge for {family}")
    trace: list[EliminationStep] = []
    while True:
        pv = wald_pvalues(model)
        worst = _worst_coefficient(model, pv)
        if worst is None:
            break
        k, name, p = worst
        if p <= config.alpha:
            break
        next_active = {kk: [c for c in cols if not (kk == k and c == name)]
                       for kk, cols in model.active.items()}
        start = {
            kk: _drop_coefficient(model, kk, name) if kk == k else model.coef[kk]
            for kk in model.active
        }
        model = fit(family, y, X, active=next_active, config=config, start=start)
        if not model.converged:
            raise NonConvergence(
                f"refit after removing {name!r} from equation {k} did not converge"
            )
        trace.append(EliminationStep(parameter=k, column=name, pvalue=p))
    model.trace = trace
    return model


def _drop_coefficient(model: FittedModel, k: int, name: str) -> np.ndarray:
    names = model.coefficient_names(k)
    keep = [i for i, n in enumerate(names) if n != name]
    return model.coef[k][keep]
