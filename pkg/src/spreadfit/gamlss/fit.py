"""Maximum-likelihood fitting of the four parameter equations.

The sampler-free fitting loop follows the classic location/scale/shape
cyclic scheme: one damped Newton step per parameter equation per outer
cycle, holding the other equations fixed, with step halving whenever a
proposed update would lower the sample log-likelihood.  Derivatives with
respect to each linear predictor are taken numerically, which keeps every
family on one uniform code path.
"""

from __future__ import annotations

import numpy as np

from ..dists import Family, ParamVector, logpdf_arrays, n_params
from ..errors import MissingCovariate, NonConvergence, SingularDesign
from .model import (
    INTERCEPT,
    DesignMatrix,
    FitConfig,
    FittedModel,
    links_for,
    parameter_indices,
)

_H_GRAD = 1e-5
_H_HESS = 2.5e-4
_VAR_FLOOR = 1e-12
_ETA_DIVERGENCE = 30.0  # |log sigma| or |log tau| beyond this is a runaway fit
_PLATEAU_CYCLES = 25

_TAU_START = {
    Family.JSU: 1.0,
    Family.JSUO: 1.0,
    Family.SEP1: 2.0,
    Family.SEP2: 2.0,
    Family.ST1: 10.0,
    Family.ST2: 10.0,
    Family.ST5: 0.5,
}


def _inv_link(link: str, eta: np.ndarray) -> np.ndarray:
    if link == "identity":
        return eta
    with np.errstate(over="ignore"):
        return np.exp(eta)


def _link(link: str, theta: float) -> float:
    return theta if link == "identity" else float(np.log(theta))


class _Workspace:
    """State of one fit: per-equation design blocks and coefficients."""

    def __init__(self, family, y, X: DesignMatrix, active, config):
        self.family = family
        self.y = np.asarray(y, dtype=float)
        self.config = config
        self.links = links_for(family)
        self.ks = parameter_indices(family)
        self.active = {k: list(active.get(k, [])) for k in self.ks}
        self.Xk = {}
        self.scale = {}
        for k in self.ks:
            m = X.submatrix(self.active[k])
            # work on unit-scaled columns; raw drivers span ~1e8 in
            # magnitude and X'WX would square that condition number
            s = np.max(np.abs(m), axis=0)
            s[s == 0] = 1.0
            scaled = m / s
            if np.linalg.matrix_rank(scaled) < scaled.shape[1]:
                raise SingularDesign(
                    f"rank-deficient design for parameter {k} "
                    f"(columns {[INTERCEPT, *self.active[k]]})"
                )
            self.Xk[k] = scaled
            self.scale[k] = s
        self.beta = {}
        self.eta = {}

    def external_beta(self, k: int) -> np.ndarray:
        return self.beta[k] / self.scale[k]

    def internal_beta(self, k: int, beta: np.ndarray) -> np.ndarray:
        return np.asarray(beta, dtype=float) * self.scale[k]

    # -- likelihood plumbing -------------------------------------------------

    def _terms(self, thetas: dict[int, np.ndarray]) -> np.ndarray:
        nu = thetas.get(3, 0.0)
        tau = thetas.get(4, 1.0)
        return logpdf_arrays(self.family, self.y, thetas[1], thetas[2], nu, tau)

    def thetas(self) -> dict[int, np.ndarray]:
        return {k: _inv_link(self.links[k], self.eta[k]) for k in self.ks}

    def loglik(self) -> float:
        val = self._terms(self.thetas())
        total = float(np.sum(val))
        return total if np.isfinite(total) else -np.inf

    def set_beta(self, k: int, beta: np.ndarray) -> None:
        self.beta[k] = beta
        self.eta[k] = self.Xk[k] @ beta

    # -- numeric derivatives w.r.t. one linear predictor ----------------------

    def _terms_with_eta(self, k: int, eta_k: np.ndarray) -> np.ndarray:
        thetas = self.thetas()
        thetas[k] = _inv_link(self.links[k], eta_k)
        return self._terms(thetas)

    def eta_scores(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """Per-observation (dl/deta, -d2l/deta2) by central differences."""
        eta = self.eta[k]
        h1 = _H_GRAD * np.maximum(1.0, np.abs(eta))
        h2 = _H_HESS * np.maximum(1.0, np.abs(eta))
        lp = self._terms_with_eta(k, eta + h1)
        lm = self._terms_with_eta(k, eta - h1)
        u = (lp - lm) / (2.0 * h1)
        l0 = self._terms(self.thetas())
        lp2 = self._terms_with_eta(k, eta + h2)
        lm2 = self._terms_with_eta(k, eta - h2)
        w = -(lp2 - 2.0 * l0 + lm2) / (h2 * h2)
        bad = ~np.isfinite(u)
        if np.any(bad):
            u = np.where(bad, 0.0, u)
        guard = ~np.isfinite(w) | (w <= 0.0)
        if np.any(guard):
            w = np.where(guard, u * u + 1e-8, w)
        return u, np.clip(w, 1e-10, 1e10)

    # -- one damped Newton update on equation k -------------------------------

    def update_equation(self, k: int, current_ll: float) -> float:
        u, w = self.eta_scores(k)
        X = self.Xk[k]
        A = X.T @ (w[:, None] * X)
        g = X.T @ u
        try:
            delta = np.linalg.solve(A, g)
        except np.linalg.LinAlgError:
            delta, *_ = np.linalg.lstsq(A, g, rcond=None)
        if not np.all(np.isfinite(delta)):
            return current_ll
        old = self.beta[k]
        lam = 1.0
        while lam >= max(self.config.step_tol, 3e-8):
            self.set_beta(k, old + lam * delta)
            candidate = self.loglik()
            if candidate >= current_ll and np.isfinite(candidate):
                return candidate
            lam *= 0.5
        self.set_beta(k, old)
        return current_ll

    def diverged(self) -> bool:
        for k in self.ks:
            if self.links[k] == "log" and np.max(np.abs(self.eta[k])) > _ETA_DIVERGENCE:
                return True
        return False


def _information_blocks(ws: _Workspace) -> tuple[np.ndarray, np.ndarray, dict[int, slice]]:
    """Observed information and score over all coefficients jointly.

    Blocks come from per-observation second differences of the
    log-likelihood in the linear predictors; cross-equation terms matter
    for skew families where location and skewness compete.
    """
    ks = ws.ks
    sizes = {k: ws.Xk[k].shape[1] for k in ks}
    offsets = {}
    pos = 0
    for k in ks:
        offsets[k] = pos
        pos += sizes[k]
    slices = {k: slice(offsets[k], offsets[k] + sizes[k]) for k in ks}
    H = np.zeros((pos, pos))
    grad = np.zeros(pos)
    eta0 = {k: ws.eta[k].copy() for k in ks}
    h = {k: _H_HESS * np.maximum(1.0, np.abs(eta0[k])) for k in ks}

    def terms_at(shifts: dict[int, float]) -> np.ndarray:
        thetas = {}
        for k in ks:
            eta = eta0[k] + shifts.get(k, 0.0) * h[k]
            thetas[k] = _inv_link(ws.links[k], eta)
        return ws._terms(thetas)

    l0 = terms_at({})
    singles = {k: (terms_at({k: 1.0}), terms_at({k: -1.0})) for k in ks}
    for i, k in enumerate(ks):
        lp, lm = singles[k]
        u = (lp - lm) / (2.0 * h[k])
        u = np.where(np.isfinite(u), u, 0.0)
        grad[slices[k]] = ws.Xk[k].T @ u
        d2 = (lp - 2.0 * l0 + lm) / (h[k] * h[k])
        d2 = np.where(np.isfinite(d2), d2, 0.0)
        X = ws.Xk[k]
        H[slices[k], slices[k]] = X.T @ (d2[:, None] * X)
        for k2 in ks[i + 1 :]:
            cross = (
                terms_at({k: 1.0, k2: 1.0})
                - terms_at({k: 1.0, k2: -1.0})
                - terms_at({k: -1.0, k2: 1.0})
                + terms_at({k: -1.0, k2: -1.0})
            ) / (4.0 * h[k] * h[k2])
            cross = np.where(np.isfinite(cross), cross, 0.0)
            blk = X.T @ (cross[:, None] * ws.Xk[k2])
            H[slices[k], slices[k2]] = blk
            H[slices[k2], slices[k]] = blk.T
    return H, grad, slices


def _joint_step(ws: _Workspace, current_ll: float) -> float:
    """One damped full-Newton step over every coefficient at once.

    Breaks the slow zigzag the cyclic scheme shows on strongly coupled
    shape parameters; rejected outright if it cannot improve.
    """
    H, grad, slices = _information_blocks(ws)
    info = -H
    n = info.shape[0]
    ridge = max(np.trace(info) / n, 1.0)
    delta = None
    for jitter in (0.0, 1e-8, 1e-4):
        try:
            cand = np.linalg.solve(info + jitter * ridge * np.eye(n), grad)
        except np.linalg.LinAlgError:
            continue
        if np.all(np.isfinite(cand)):
            delta = cand
            break
    if delta is None:
        return current_ll
    old = {k: ws.beta[k].copy() for k in ws.ks}
    lam = 1.0
    while lam >= ws.config.step_tol:
        for k in ws.ks:
            ws.set_beta(k, old[k] + lam * delta[slices[k]])
        candidate = ws.loglik()
        if candidate >= current_ll and np.isfinite(candidate):
            return candidate
        lam *= 0.5
    for k in ws.ks:
        ws.set_beta(k, old[k])
    return current_ll


def _start_candidates(family: Family, y: np.ndarray):
    mu0 = float(np.mean(y))
    sd = float(np.std(y))
    sd = max(sd, 1e-6)
    tau0 = _TAU_START.get(family, 1.0)
    for sigma_mult in (1.0, 3.0, 10.0):
        yield mu0, sd * sigma_mult, 0.0, tau0
    # last resort: a heavier-tailed restart
    yield mu0, sd * 3.0, 0.0, max(tau0 * 0.5, 0.3)


def fit(
    family: Family,
    y,
    X: DesignMatrix,
    active: dict[int, list[str]] | None = None,
    config: FitConfig | None = None,
    start: dict[int, np.ndarray] | None = None,
) -> FittedModel:
    """Fit the family's parameter equations by maximum likelihood.

    ``active`` maps parameter index (1..4) to covariate names; missing
    keys mean intercept-only.  ``start`` warm-starts the coefficient
    vectors (used by the elimination loop and by rolling refits).
    """
    y = np.asarray(y, dtype=float)
    config = config or FitConfig()
    active = active or {}
    if float(np.var(y)) < _VAR_FLOOR:
        raise NonConvergence("response variance below 1e-12 (degenerate spread)")
    ws = _Workspace(family, y, X, active, config)
    total_coef = sum(ws.Xk[k].shape[1] for k in ws.ks)
    if y.shape[0] <= total_coef + 10:
        raise NonConvergence(
            f"too few rows ({y.shape[0]}) for {total_coef} coefficients"
        )

    if start is not None:
        for k in ws.ks:
            ws.set_beta(k, ws.internal_beta(k, start[k]))
        if not np.isfinite(ws.loglik()):
            start = None
    if start is None:
        has_covariates = any(ws.active[k] for k in ws.ks)
        if has_covariates:
            base = intercept_only_fit(family, y, config=config)
            for k in ws.ks:
                beta = np.zeros(ws.Xk[k].shape[1])
                beta[0] = base.coef[k][0]
                ws.set_beta(k, beta)
        if not has_covariates or not np.isfinite(ws.loglik()):
            for mu0, sigma0, nu0, tau0 in _start_candidates(family, y):
                values = {1: mu0, 2: sigma0, 3: nu0, 4: tau0}
                for k in ws.ks:
                    beta = np.zeros(ws.Xk[k].shape[1])
                    beta[0] = _link(ws.links[k], values[k])
                    ws.set_beta(k, beta)
                if np.isfinite(ws.loglik()):
                    break
            else:
                raise NonConvergence(f"no finite starting likelihood for {family.value}")

    ll = ws.loglik()
    path = [ll]
    converged = False
    stalled = 0
    for cycle in range(config.max_cycles):
        for k in ws.ks:
            ll = ws.update_equation(k, ll)
        if cycle >= 2 and len(ws.ks) > 1:
            gain = path[-1] - path[-2] if len(path) > 1 else np.inf
            if gain < 1e-2 * (abs(path[-1]) + 1.0):
                ll = _joint_step(ws, ll)
        path.append(ll)
        if ws.diverged():
            raise NonConvergence(
                f"{family.value}: scale/kurtosis predictor drifting beyond "
                "representable range (unbounded likelihood ridge)"
            )
        gain = abs(path[-1] - path[-2])
        if gain <= config.rel_tol * (abs(path[-2]) + 1e-8):
            converged = True
            break
        # progress stuck between the tolerance and a milli-loglik per cycle
        # is a crawl along a flat ridge: joint Newton would have cleared any
        # healthy basin, so abandon instead of burning the cycle cap
        crawl = max(50 * config.rel_tol * (abs(path[-2]) + 1e-8), 1e-3)
        stalled = stalled + 1 if gain <= crawl else 0
        if stalled >= _PLATEAU_CYCLES:
            raise NonConvergence(
                f"{family.value}: likelihood crawling without convergence "
                f"(gain {gain:.2e} per cycle)"
            )

    se = {k: s / ws.scale[k] for k, s in _standard_errors(ws).items()}
    coef = {k: ws.external_beta(k) for k in ws.ks}
    n_coef = sum(len(b) for b in coef.values())
    return FittedModel(
        family=family,
        active={k: list(ws.active[k]) for k in ws.ks},
        coef=coef,
        se=se,
        links=dict(ws.links),
        loglik=ll,
        aic=-2.0 * ll + 2.0 * n_coef,
        converged=converged,
        n_obs=int(y.shape[0]),
        loglik_path=path,
    )


def intercept_only_fit(family: Family, y, config: FitConfig | None = None) -> FittedModel:
    """Fit with empty active sets for every parameter equation."""
    y = np.asarray(y, dtype=float)
    if y.shape[0] < 30:
        raise NonConvergence(f"need at least 30 observations, got {y.shape[0]}")
    X = DesignMatrix.intercept_only(y.shape[0])
    return fit(family, y, X, active={}, config=config)


def _standard_errors(ws: _Workspace) -> dict[int, np.ndarray]:
    """Square roots of the inverse observed information diagonal."""
    H, _, slices = _information_blocks(ws)
    info = -H
    pos = info.shape[0]
    cov = None
    for jitter in (0.0, 1e-10, 1e-6):
        try:
            cov = np.linalg.inv(info + jitter * np.eye(pos) * max(np.trace(info) / pos, 1.0))
            if np.all(np.diag(cov) > 0):
                break
            cov = None
        except np.linalg.LinAlgError:
            cov = None
    if cov is None:
        cov = np.linalg.pinv(info)
    diag = np.diag(cov).copy()
    diag[diag <= 0] = np.nan
    se_all = np.sqrt(diag)
    return {k: se_all[slices[k]].copy() for k in ws.ks}


def predict_params(model: FittedModel, row) -> ParamVector:
    """Map one covariate row through the fitted equations to (mu..tau).

    ``row`` is a mapping from column identifier to value; only active
    covariates are required.
    """
    values = {}
    for k in model.active:
        eta = model.coef[k][0]
        for j, name in enumerate(model.active[k], start=1):
            try:
                x = row[name]
            except (KeyError, IndexError):
                raise MissingCovariate(f"prediction row lacks column {name!r}") from None
            eta += model.coef[k][j] * float(x)
        values[k] = eta if model.links[k] == "identity" else float(np.exp(eta))
    if model.family is Family.NORMAL:
        return ParamVector(values[1], values[2])
    return ParamVector(values[1], values[2], values[3], values[4])


def predict_params_matrix(model: FittedModel, X: DesignMatrix) -> dict[int, np.ndarray]:
    """Vectorized parameter paths over all rows of a design matrix."""
    out = {}
    for k in model.active:
        m = X.submatrix(model.active[k])
        eta = m @ model.coef[k]
        out[k] = eta if model.links[k] == "identity" else np.exp(eta)
    return out


def loglik_from_params(model: FittedModel, y, params: dict[int, np.ndarray]) -> float:
    """Sample log-likelihood of y under per-row parameters."""
    nu = params.get(3, 0.0)
    tau = params.get(4, 1.0)
    return float(np.sum(logpdf_arrays(model.family, y, params[1], params[2], nu, tau)))


def n_model_params(family: Family) -> int:
    return n_params(family)
