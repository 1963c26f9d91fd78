"""End-to-end analysis: sample, fit, discover, project, diagnose, write artifacts."""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Tuple

import numpy as np

from . import asm, csvio, svg
from .config import AnalysisConfig, OptimizeConfig
from .design import DesignSpace, SampleSet, lhs_sample, normalize, space_from_bounds
from .diagnosis import DiagnosisReport, diagnose
from .ego import EgoConfig, EgoResult, ego_run
from .errors import ConfigError, DataError
from .functions import get_function
from .kriging import KrigingModel, kriging_fit
from .pce import PceModel, pce_fit

logger = logging.getLogger(__name__)


def dump_json(obj, path) -> Path:
    """Sorted keys and repr-formatted floats, so output is byte-stable."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n", encoding="utf-8")
    return path


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def load_samples(config: AnalysisConfig) -> Tuple[DesignSpace, SampleSet]:
    """Raw-coordinate samples with responses, from a builtin or a CSV file."""
    prob = config.problem
    if prob.builtin is not None:
        fn = get_function(prob.builtin, prob.dimension)
        if config.sample_count < fn.m + 1:
            raise ConfigError(f"sample_count must be at least m + 1 = {fn.m + 1}")
        design = lhs_sample(fn.space, config.sample_count, config.seed)
        y = fn.evaluate_many(design.X, config.objective_index)
        return fn.space, design.with_responses(y)
    space = space_from_bounds(prob.bounds)
    samples = csvio.ingest_csv(prob.csv, space)
    if samples.k < space.m + 1:
        raise DataError(f"need at least m + 1 = {space.m + 1} samples, file has {samples.k}")
    if config.sample_count is not None and config.sample_count != samples.k:
        logger.warning("sample_count %d ignored; file has %d rows", config.sample_count, samples.k)
    return space, samples


def fit_surrogate(config: AnalysisConfig, samples: SampleSet):
    spec = config.surrogate
    if spec.type == "kriging":
        return kriging_fit(samples, seed=config.seed, n_starts=spec.n_starts)
    return pce_fit(samples, p_range=range(spec.p_range[0], spec.p_range[1] + 1), q=spec.q, seed=config.seed)


def surrogate_summary(model) -> dict:
    if isinstance(model, KrigingModel):
        return {"type": "kriging", "theta": model.theta, "mu_hat": model.mu_hat,
                "sigma2_hat": model.sigma2_hat, "nugget": model.nugget,
                "log_likelihood": model.log_likelihood}
    if isinstance(model, PceModel):
        return {"type": "pce", "p_selected": model.p_selected, "n_terms": int(len(model.coeffs)),
                "loo_error": model.loo_error}
    return {"type": type(model).__name__}


def analyze(config: AnalysisConfig) -> Tuple[DiagnosisReport, dict]:
    """Run the full analysis and write every artifact into ``config.output_dir``."""
    space, raw = load_samples(config)
    samples = SampleSet(normalize(space, raw.X), raw.y)
    model = fit_surrogate(config, samples)
    mode = "training-points" if config.mode == "training-points" else ("monte-carlo", config.mc_points, config.seed)
    n = min(config.n_active, space.m)
    sub = asm.discover(samples, model, n, mode)
    reduced = asm.project(sub.W1, samples.X)
    activity = asm.activity_scores(sub.eigenvalues, sub.W, space.m)
    report = diagnose(reduced, samples.y, sub.eigenvalues, activity, config.thresholds)

    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = ["reduced.csv", "eigen_decay.csv"]
    csvio.write_table(out / "reduced.csv", csvio.reduced_header(n), np.column_stack([reduced, samples.y]))
    csvio.write_table(out / "eigen_decay.csv", ["index", "eigenvalue", "explained"],
                      [(i + 1, lam, ex) for i, (lam, ex) in enumerate(zip(sub.eigenvalues, sub.explained))])
    files += svg.render_plots(reduced, samples.y, sub.eigenvalues, sub.W1, out)
    files = sorted(files + ["report.json"])

    payload = {
        "config": config.echo(),
        "problem": {"m": space.m, "k": samples.k, "lower": space.lower, "upper": space.upper},
        "surrogate": surrogate_summary(model),
        "eigenvalues": sub.eigenvalues,
        "explained": sub.explained,
        "explained_1": report.explained_1,
        "explained_2": report.explained_2,
        "eigenvectors": sub.W1.T,
        "r2_linear_1d": report.r2_linear_1d,
        "r2_quadratic_1d": report.r2_quadratic_1d,
        "activity_scores": activity,
        "flags": report.flags,
        "recommendation": report.recommendation,
        "artifacts": files,
    }
    dump_json(payload, out / "report.json")
    return report, payload


def optimize(config: OptimizeConfig) -> EgoResult:
    fn = get_function(config.problem.builtin, config.problem.dimension)
    fn._check_index(config.objective_index)
    ego_cfg = EgoConfig(init_k=config.init_k, budget=config.budget, seed=config.seed,
                        ei_restarts=config.ei_restarts)
    result = ego_run(lambda x: fn.evaluate(x, config.objective_index), fn.space, ego_cfg)
    out = Path(config.output_dir)
    history = SampleSet(result.X, result.y)
    csvio.emit_design_csv(history, out / "history.csv")
    dump_json({
        "problem": config.problem.builtin,
        "objective_index": config.objective_index,
        "seed": config.seed,
        "evaluations": len(result.history),
        "best_x": result.best_x,
        "best_y": result.best_y,
        "error": result.error or None,
    }, out / "best.json")
    return result
