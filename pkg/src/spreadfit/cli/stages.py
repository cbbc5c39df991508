"""Pipeline stages: ingest, select, forecast, backtest, report.

Every stage is resumable (input content hash recorded in the run
manifest) and deterministic for any parallelism degree: work is
partitioned by spread index and reduced in index order.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import pandas as pd

from .. import data as dat
from ..dists import Family, expected_value
from ..errors import (
    EmptyHorizon,
    MissingArchive,
    NoCandidate,
    NonConvergence,
    SingularDesign,
    SpreadfitError,
)
from ..evaluation import (
    TIER_FAILED,
    dm_test,
    extract_quantiles,
    pinball_measure,
    pinball_score,
    rmse,
    rolling_window_run,
    select_best,
)
from ..gamlss import FitConfig, intercept_only_fit, predict_params_matrix, specify
from ..trade import sweep
from .config import PipelineConfig, RunManifest, hash_inputs

# ---------------------------------------------------------------------------
# worker pool plumbing: the spread panel is shipped once per worker
# ---------------------------------------------------------------------------

_PANEL: dat.SpreadPanel | None = None


def _init_worker(panel: dat.HourlyPanel) -> None:
    global _PANEL
    _PANEL = dat.SpreadPanel(panel)


def _parallel_map(func, tasks: list, jobs: int, panel: dat.HourlyPanel) -> list:
    if jobs <= 1:
        _init_worker(panel)
        return [func(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * jobs))
    with ProcessPoolExecutor(
        max_workers=jobs, initializer=_init_worker, initargs=(panel,)
    ) as pool:
        return list(pool.map(func, tasks, chunksize=chunk))


def _spread_data(s_index: int):
    sid = dat.SpreadId.from_index(s_index)
    return sid, _PANEL.response(sid), _PANEL.design(sid)


# ---------------------------------------------------------------------------
# ingest
# ---------------------------------------------------------------------------


def stage_ingest(cfg: PipelineConfig, rm: RunManifest) -> dict[str, Path]:
    files = dat.load_manifest(cfg.manifest)
    ingest_hash = hash_inputs([cfg.manifest, *files.values()], {"stage": "ingest"})
    out = {
        "panel": cfg.output_dir / "panel.csv",
        "repair_log": cfg.output_dir / "repair_log.csv",
    }
    if rm.stage_is_current("ingest", ingest_hash, list(out.values())):
        return out
    start = time.time()
    panel = dat.ingest(cfg.manifest)
    paths = dat.write_panel_archive(panel, cfg.output_dir)
    rm.record(
        "ingest",
        ingest_hash,
        list(paths.values()),
        time.time() - start,
        extra={"n_days": panel.n_days, "repairs": len(panel.repair_log)},
    )
    return paths


def _load_panel(cfg: PipelineConfig) -> dat.HourlyPanel:
    path = cfg.output_dir / "panel.csv"
    if not path.exists():
        raise MissingArchive(f"run the ingest stage first ({path} missing)")
    return dat.read_panel_archive(cfg.output_dir)


# ---------------------------------------------------------------------------
# select
# ---------------------------------------------------------------------------


def _select_task(args) -> dict:
    s_index, family_names, alpha, train_rows, val_rows = args
    sid, y, X = _spread_data(s_index)
    config = FitConfig(alpha=alpha)
    tr = slice(*train_rows)
    va = slice(*val_rows)
    y_train = y[tr]
    y_val = y[va]

    simple = {}
    for name in family_names:
        family = Family(name)
        try:
            m = intercept_only_fit(family, y_train, config=config)
            simple[name] = {"aic": m.aic, "status": "fitted" if m.converged else "capped"}
        except (NonConvergence, SingularDesign) as exc:
            simple[name] = {"aic": np.nan, "status": f"failed: {type(exc).__name__}"}

    factor = {}
    for name in family_names:
        family = Family(name)
        try:
            model = specify(family, y_train, _subdesign(X, tr), config=config)
        except (NonConvergence, SingularDesign, SpreadfitError):
            factor[name] = {"pinball": np.nan, "rmse": np.nan, "n_omitted": -1,
                            "status": "failed"}
            continue
        params = predict_params_matrix(model, _subdesign(X, va))
        scores = np.full(len(y_val), np.nan)
        evs = np.full(len(y_val), np.nan)
        for t in range(len(y_val)):
            p = _params_at(family, params, t)
            if p is None:
                continue
            evs[t] = expected_value(family, p)
            grid = extract_quantiles(family, p)
            if grid.tier != TIER_FAILED:
                scores[t] = pinball_score(grid, float(y_val[t]))
        try:
            report = pinball_measure(scores)
            factor[name] = {
                "pinball": report.measure,
                "rmse": rmse(evs, y_val),
                "n_omitted": report.n_omitted,
                "status": "fitted",
            }
        except EmptyHorizon:
            factor[name] = {"pinball": np.nan, "rmse": np.nan, "n_omitted": len(y_val),
                            "status": "all_steps_omitted"}
    return {"spread": s_index, "label": sid.label, "simple": simple, "factor": factor}


def _subdesign(X, rows: slice):
    from ..gamlss import DesignMatrix

    return DesignMatrix(X.values[rows], X.columns)


def _params_at(family, params: dict[int, np.ndarray], t: int):
    from ..dists import ParamVector

    try:
        if family is Family.NORMAL:
            return ParamVector(float(params[1][t]), float(params[2][t]))
        return ParamVector(
            float(params[1][t]), float(params[2][t]), float(params[3][t]), float(params[4][t])
        )
    except SpreadfitError:
        return None


def stage_select(cfg: PipelineConfig, rm: RunManifest) -> dict[str, Path]:
    panel_path = cfg.output_dir / "panel.csv"
    sel_hash = hash_inputs(
        [panel_path],
        {
            "stage": "select",
            "families": [f.value for f in cfg.families],
            "alpha": cfg.alpha,
            "split": [cfg.split_train, cfg.split_validation],
            "upstream": rm.stage_hash("ingest"),
        },
    )
    out = {
        "simple": cfg.output_dir / "selection_simple.csv",
        "factor": cfg.output_dir / "selection_factor.csv",
        "best": cfg.output_dir / "selection_best.csv",
    }
    if rm.stage_is_current("select", sel_hash, list(out.values())):
        return out
    start = time.time()
    panel = _load_panel(cfg)
    sp = dat.split(panel.n_days, cfg.split_train, cfg.split_validation)
    train_rows = (sp.rows("train").start, sp.rows("train").stop)
    val_rows = (sp.rows("validation").start, sp.rows("validation").stop)
    names = [f.value for f in cfg.families]
    tasks = [(s, names, cfg.alpha, train_rows, val_rows) for s in range(1, dat.N_SPREADS + 1)]
    results = _parallel_map(_select_task, tasks, cfg.jobs, panel)

    simple_rows = []
    factor_rows = []
    best_rows = []
    status = {}
    # stage (a) winners define the candidate set carried into stage (b)
    winners = set()
    for res in results:
        aics = {n: v["aic"] for n, v in res["simple"].items() if np.isfinite(v["aic"])}
        if aics:
            winners.add(min(aics, key=lambda n: (aics[n], names.index(n))))
    for res in results:
        s = res["spread"]
        aics = {n: v["aic"] for n, v in res["simple"].items()}
        finite = {n: a for n, a in aics.items() if np.isfinite(a)}
        simple_best = min(finite, key=lambda n: (finite[n], names.index(n))) if finite else ""
        for n in names:
            simple_rows.append(
                {
                    "spread": s,
                    "label": res["label"],
                    "family": n,
                    "aic": aics[n],
                    "status": res["simple"][n]["status"],
                    "best": n == simple_best,
                }
            )
        measures = {}
        for n in names:
            if n not in winners:
                continue
            row = res["factor"][n]
            factor_rows.append({"spread": s, "label": res["label"], "family": n, **row})
            if np.isfinite(row["pinball"]):
                measures[Family(n)] = row["pinball"]
        try:
            chosen = select_best(measures)
            best_rows.append(
                {
                    "spread": s,
                    "label": res["label"],
                    "family": chosen.value,
                    "pinball": measures[chosen],
                }
            )
            status[s] = "selected"
        except NoCandidate:
            best_rows.append({"spread": s, "label": res["label"], "family": "", "pinball": np.nan})
            status[s] = "no_candidate"

    pd.DataFrame(simple_rows).to_csv(out["simple"], index=False)
    pd.DataFrame(factor_rows).to_csv(out["factor"], index=False)
    pd.DataFrame(best_rows).to_csv(out["best"], index=False)
    rm.record(
        "select",
        sel_hash,
        list(out.values()),
        time.time() - start,
        spread_status=status,
        extra={"candidates": sorted(winners)},
    )
    return out


# ---------------------------------------------------------------------------
# forecast
# ---------------------------------------------------------------------------


def _forecast_task(args) -> dict:
    s_index, family_name, window, horizon, alpha, max_missing, start_row = args
    sid, y, X = _spread_data(s_index)
    family = Family(family_name)
    stop = start_row + window + horizon
    y_run = y[start_row:stop]
    sub = _subdesign(X, slice(start_row, stop))
    config = FitConfig(alpha=alpha)
    try:
        result = rolling_window_run(
            y_run, sub, family, window=window, horizon=horizon,
            config=config, max_missing=max_missing,
        )
    except SpreadfitError as exc:
        return {"spread": s_index, "label": sid.label, "family": family_name,
                "rows": [], "status": f"failed: {type(exc).__name__}"}
    rows = []
    for f in result.forecasts:
        p = f.params
        rows.append(
            {
                "spread": s_index,
                "label": sid.label,
                "family": family_name,
                "step": f.step,
                "row": start_row + window + f.step,
                "mu": p.mu if p else np.nan,
                "sigma": p.sigma if p else np.nan,
                "nu": p.nu if p else np.nan,
                "tau": p.tau if p else np.nan,
                "expected": f.expected,
                "tier": f.tier,
                "missing": int(f.missing),
            }
        )
    return {
        "spread": s_index,
        "label": sid.label,
        "family": family_name,
        "rows": rows,
        "status": "unavailable" if result.unavailable else "fitted",
    }


def stage_forecast(cfg: PipelineConfig, rm: RunManifest) -> dict[str, Path]:
    best_path = cfg.output_dir / "selection_best.csv"
    if not best_path.exists():
        raise MissingArchive(f"run the select stage first ({best_path} missing)")
    fc_hash = hash_inputs(
        [cfg.output_dir / "panel.csv", best_path],
        {
            "stage": "forecast",
            "window": cfg.window,
            "horizon": cfg.horizon,
            "alpha": cfg.alpha,
            "max_missing": cfg.max_missing,
            "split": [cfg.split_train, cfg.split_validation],
            "upstream": rm.stage_hash("select"),
        },
    )
    out = {
        "best": cfg.output_dir / "forecasts_best.csv",
        "normal": cfg.output_dir / "forecasts_normal.csv",
    }
    if rm.stage_is_current("forecast", fc_hash, list(out.values())):
        return out
    start = time.time()
    panel = _load_panel(cfg)
    selection = pd.read_csv(best_path)
    n_rows = panel.n_days - 1
    sp = dat.split(panel.n_days, cfg.split_train, cfg.split_validation)
    window = cfg.window or (sp.rows("validation").stop - 0)
    horizon = cfg.horizon or (sp.rows("test").stop - sp.rows("test").start)
    if window + horizon > n_rows:
        raise SpreadfitError(
            f"window {window} + horizon {horizon} exceed the {n_rows} usable rows"
        )
    start_row = n_rows - (window + horizon)

    tasks = []
    skipped = {}
    for _, row in selection.sort_values("spread").iterrows():
        s = int(row["spread"])
        fam = row["family"] if isinstance(row["family"], str) and row["family"] else None
        if fam is None:
            skipped[s] = "skipped_no_selection"
            continue
        tasks.append((s, fam, window, horizon, cfg.alpha, cfg.max_missing, start_row))
    normal_tasks = [
        (s, Family.NORMAL.value, window, horizon, cfg.alpha, cfg.max_missing, start_row)
        for s in range(1, dat.N_SPREADS + 1)
    ]
    results = _parallel_map(_forecast_task, tasks + normal_tasks, cfg.jobs, panel)

    best_rows, normal_rows = [], []
    status = dict(skipped)
    for res in results:
        bucket = normal_rows if res["family"] == Family.NORMAL.value else best_rows
        bucket.extend(res["rows"])
        if res["family"] == Family.NORMAL.value:
            status[res["spread"]] = status.get(res["spread"], "fitted")
        else:
            status[res["spread"]] = res["status"]
    pd.DataFrame(best_rows).to_csv(out["best"], index=False)
    pd.DataFrame(normal_rows).to_csv(out["normal"], index=False)
    rm.record(
        "forecast",
        fc_hash,
        list(out.values()),
        time.time() - start,
        spread_status=status,
        extra={"window": window, "horizon": horizon, "start_row": start_row},
    )
    return out


# ---------------------------------------------------------------------------
# backtest
# ---------------------------------------------------------------------------


def _collect_market(archive: pd.DataFrame, spanel: dat.SpreadPanel):
    """Per-day expected values, grids and realizations from an archive."""
    steps = sorted(archive["step"].unique())
    expected_by_day: list[dict[int, float]] = []
    grids_by_day: list[dict[int, object]] = []
    realized: list[dict[int, float]] = []
    for step in steps:
        block = archive[archive["step"] == step]
        e, g, r = {}, {}, {}
        for _, row in block.iterrows():
            s = int(row["spread"])
            usable_row = int(row["row"])
            r[s] = float(spanel.response(dat.SpreadId.from_index(s))[usable_row])
            if row["missing"]:
                continue
            family = Family(row["family"])
            p = _params_at(
                family,
                {1: [row["mu"]], 2: [row["sigma"]], 3: [row["nu"]], 4: [row["tau"]]},
                0,
            )
            if p is None or not np.isfinite(row["expected"]):
                continue
            e[s] = float(row["expected"])
            g[s] = extract_quantiles(family, p)
        expected_by_day.append(e)
        grids_by_day.append(g)
        realized.append(r)
    return expected_by_day, grids_by_day, realized


def stage_backtest(cfg: PipelineConfig, rm: RunManifest) -> dict[str, Path]:
    fc = {
        "best": cfg.output_dir / "forecasts_best.csv",
        "normal": cfg.output_dir / "forecasts_normal.csv",
    }
    for p in fc.values():
        if not p.exists():
            raise MissingArchive(f"run the forecast stage first ({p} missing)")
    bt_hash = hash_inputs(
        list(fc.values()) + [cfg.output_dir / "panel.csv"],
        {
            "stage": "backtest",
            "costs": cfg.costs,
            "levels": cfg.levels,
            "upstream": rm.stage_hash("forecast"),
        },
    )
    out = {
        "best": cfg.output_dir / "sweep_best.csv",
        "normal": cfg.output_dir / "sweep_normal.csv",
    }
    if rm.stage_is_current("backtest", bt_hash, list(out.values())):
        return out
    start = time.time()
    panel = _load_panel(cfg)
    spanel = dat.SpreadPanel(panel)
    for kind in ("best", "normal"):
        archive = pd.read_csv(fc[kind])
        if archive.empty:
            raise MissingArchive(f"forecast archive {fc[kind]} is empty")
        e, g, r = _collect_market(archive, spanel)
        table = sweep(e, g, r, costs=cfg.costs, levels=cfg.levels)
        table.to_csv(out[kind], index=False)
    rm.record("backtest", bt_hash, list(out.values()), time.time() - start)
    return out


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def _matrix_frame(values: np.ndarray) -> pd.DataFrame:
    return pd.DataFrame(
        values, index=[f"{h:02d}" for h in range(24)], columns=[f"{h:02d}" for h in range(24)]
    )


def _score_archive(archive: pd.DataFrame, spanel: dat.SpreadPanel) -> pd.DataFrame:
    rows = []
    for (s,), block in archive.groupby(["spread"]):
        sid = dat.SpreadId.from_index(int(s))
        y = spanel.response(sid)
        for _, row in block.iterrows():
            realized = float(y[int(row["row"])])
            score = np.nan
            if not row["missing"]:
                family = Family(row["family"])
                p = _params_at(
                    family,
                    {1: [row["mu"]], 2: [row["sigma"]], 3: [row["nu"]], 4: [row["tau"]]},
                    0,
                )
                if p is not None:
                    grid = extract_quantiles(family, p)
                    if grid.tier != TIER_FAILED:
                        score = pinball_score(grid, realized)
            rows.append(
                {
                    "spread": int(s),
                    "label": sid.label,
                    "step": int(row["step"]),
                    "family": row["family"],
                    "score": score,
                    "expected": row["expected"],
                    "realized": realized,
                }
            )
    return pd.DataFrame(rows)


def stage_report(cfg: PipelineConfig, rm: RunManifest) -> dict[str, Path]:
    needed = {
        "forecasts_best": cfg.output_dir / "forecasts_best.csv",
        "forecasts_normal": cfg.output_dir / "forecasts_normal.csv",
        "sweep_best": cfg.output_dir / "sweep_best.csv",
        "sweep_normal": cfg.output_dir / "sweep_normal.csv",
    }
    for p in needed.values():
        if not p.exists():
            raise MissingArchive(f"report needs {p}; run earlier stages first")
    rep_hash = hash_inputs(
        list(needed.values()),
        {"stage": "report", "upstream": rm.stage_hash("backtest")},
    )
    report_dir = cfg.output_dir / "report"
    out = {
        "scores": report_dir / "pl_scores.csv",
        "pl_diff": report_dir / "pl_diff_matrix.csv",
        "dm": report_dir / "dm_pvalue_matrix.csv",
        "rmse_best": report_dir / "rmse_best_matrix.csv",
        "rmse_normal": report_dir / "rmse_normal_matrix.csv",
        "moments": report_dir / "moments_best.csv",
        "descriptive_skew": report_dir / "spread_skewness.csv",
        "descriptive_kurt": report_dir / "spread_excess_kurtosis.csv",
        "price_cov": report_dir / "price_covariance.csv",
        "sweep_best": report_dir / "sweep_best.csv",
        "sweep_normal": report_dir / "sweep_normal.csv",
    }
    if rm.stage_is_current("report", rep_hash, list(out.values())):
        return out
    start = time.time()
    report_dir.mkdir(parents=True, exist_ok=True)
    panel = _load_panel(cfg)
    spanel = dat.SpreadPanel(panel)
    best = pd.read_csv(needed["forecasts_best"])
    normal = pd.read_csv(needed["forecasts_normal"])
    scored_best = _score_archive(best, spanel)
    scored_normal = _score_archive(normal, spanel)
    merged = scored_best.merge(
        scored_normal,
        on=["spread", "label", "step"],
        how="outer",
        suffixes=("_best", "_normal"),
    ).sort_values(["spread", "step"])
    merged.to_csv(out["scores"], index=False)

    pl_diff = np.full((24, 24), np.nan)
    dm_mat = np.full((24, 24), np.nan)
    rmse_b = np.full((24, 24), np.nan)
    rmse_n = np.full((24, 24), np.nan)
    for s, block in merged.groupby("spread"):
        sid = dat.SpreadId.from_index(int(s))
        sb = block["score_best"].to_numpy(dtype=float)
        sn = block["score_normal"].to_numpy(dtype=float)
        if np.isfinite(sb).any() and np.isfinite(sn).any():
            pl_diff[sid.h1, sid.h2] = np.nanmean(sb) - np.nanmean(sn)
        try:
            dm_mat[sid.h1, sid.h2] = dm_test(sb, sn).pvalue
        except SpreadfitError:
            pass
        # a spread with any missing step is left out of the RMSE map
        fb = block["expected_best"].to_numpy(dtype=float)
        fn = block["expected_normal"].to_numpy(dtype=float)
        rb = block["realized_best"].to_numpy(dtype=float)
        rn = block["realized_normal"].to_numpy(dtype=float)
        realized = np.where(np.isfinite(rb), rb, rn)
        if np.all(np.isfinite(fb)):
            rmse_b[sid.h1, sid.h2] = rmse(fb, realized)
        if np.all(np.isfinite(fn)):
            rmse_n[sid.h1, sid.h2] = rmse(fn, realized)
    _matrix_frame(pl_diff).to_csv(out["pl_diff"])
    _matrix_frame(dm_mat).to_csv(out["dm"])
    _matrix_frame(rmse_b).to_csv(out["rmse_best"])
    _matrix_frame(rmse_n).to_csv(out["rmse_normal"])

    best[["spread", "label", "step", "mu", "sigma", "nu", "tau", "expected"]].to_csv(
        out["moments"], index=False
    )
    stats = dat.descriptive_stats(spanel)
    _matrix_frame(stats.skewness).to_csv(out["descriptive_skew"])
    _matrix_frame(stats.excess_kurtosis).to_csv(out["descriptive_kurt"])
    _matrix_frame(stats.price_covariance).to_csv(out["price_cov"])
    for kind in ("sweep_best", "sweep_normal"):
        out[kind].write_bytes(needed[kind].read_bytes())
    rm.record("report", rep_hash, list(out.values()), time.time() - start)
    return out
