"""JSON configuration for the ``analyze`` and ``optimize`` commands.

Unknown keys are rejected at every level so that typos fail loudly.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Tuple

from .diagnosis import Thresholds
from .errors import ConfigError

SURROGATES = ("kriging", "pce")


def _check_keys(obj, allowed, where: str) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _int(obj, key, default=None, minimum=None) -> Optional[int]:
    v = obj.get(key, default)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{key} must be an integer")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{key} must be at least {minimum}")
    return v


def _num(obj, key, default):
    v = obj.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key} must be a number")
    return float(v)


@dataclass(frozen=True)
class ProblemSpec:
    builtin: Optional[str] = None
    dimension: Optional[int] = None
    csv: Optional[str] = None
    bounds: Optional[Tuple[Tuple[float, float], ...]] = None

    @classmethod
    def from_dict(cls, d, base: Path) -> "ProblemSpec":
        _check_keys(d, ("builtin", "dimension", "csv", "bounds"), "problem")
        if ("builtin" in d) == ("csv" in d):
            raise ConfigError("problem needs exactly one of 'builtin' or 'csv'")
        if "builtin" in d:
            if "bounds" in d:
                raise ConfigError("builtin problems carry their own bounds")
            return cls(builtin=str(d["builtin"]), dimension=_int(d, "dimension", minimum=1))
        if "bounds" not in d:
            raise ConfigError("csv problems need 'bounds'")
        try:
            bounds = tuple((float(lo), float(hi)) for lo, hi in d["bounds"])
        except (TypeError, ValueError):
            raise ConfigError("bounds must be a list of [lower, upper] pairs") from None
        path = Path(d["csv"])
        if not path.is_absolute():
            path = base / path
        return cls(csv=str(path), bounds=bounds)


@dataclass(frozen=True)
class SurrogateSpec:
    type: str = "kriging"
    p_range: Tuple[int, int] = (1, 5)
    q: float = 0.75
    n_starts: int = 10

    @classmethod
    def from_dict(cls, d) -> "SurrogateSpec":
        if isinstance(d, str):
            d = {"type": d}
        _check_keys(d, ("type", "p_range", "q", "n_starts"), "surrogate")
        kind = d.get("type", "kriging")
        if kind not in SURROGATES:
            raise ConfigError(f"surrogate type must be one of {SURROGATES}")
        pr = d.get("p_range", [1, 5])
        if (not isinstance(pr, list) or len(pr) != 2 or not all(isinstance(v, int) for v in pr)
                or not 1 <= pr[0] <= pr[1]):
            raise ConfigError("p_range must be [p_min, p_max] with 1 <= p_min <= p_max")
        q = _num(d, "q", 0.75)
        if not 0 < q <= 1:
            raise ConfigError("q must lie in (0, 1]")
        return cls(kind, (pr[0], pr[1]), q, _int(d, "n_starts", 10, minimum=1))


@dataclass(frozen=True)
class AnalysisConfig:
    problem: ProblemSpec
    surrogate: SurrogateSpec = field(default_factory=SurrogateSpec)
    objective_index: int = 0
    sample_count: Optional[int] = None
    seed: int = 0
    n_active: int = 1
    mode: str = "training-points"
    mc_points: int = 1000
    output_dir: str = "asm_output"
    thresholds: Thresholds = field(default_factory=Thresholds)

    KEYS = ("problem", "objective_index", "surrogate", "sample_count", "seed", "n_active",
            "mode", "output_dir", "thresholds")

    @classmethod
    def from_dict(cls, d, base: Path = Path(".")) -> "AnalysisConfig":
        _check_keys(d, cls.KEYS, "config")
        if "problem" not in d:
            raise ConfigError("config needs a 'problem'")
        problem = ProblemSpec.from_dict(d["problem"], base)
        n_active = _int(d, "n_active", 1)
        if n_active not in (1, 2):
            raise ConfigError("n_active must be 1 or 2")
        mode, mc = _parse_mode(d.get("mode", "training-points"))
        th = d.get("thresholds", {})
        _check_keys(th, Thresholds.__dataclass_fields__, "thresholds")
        thresholds = Thresholds(**{k: _num(th, k, v) for k, v in asdict(Thresholds()).items()})
        sample_count = _int(d, "sample_count", minimum=2)
        if problem.builtin is not None and sample_count is None:
            raise ConfigError("builtin problems need 'sample_count'")
        out = Path(d.get("output_dir", "asm_output"))
        if not out.is_absolute():
            out = base / out
        return cls(
            problem=problem,
            surrogate=SurrogateSpec.from_dict(d.get("surrogate", {})),
            objective_index=_int(d, "objective_index", 0, minimum=0),
            sample_count=sample_count,
            seed=_int(d, "seed", 0),
            n_active=n_active,
            mode=mode,
            mc_points=mc,
            output_dir=str(out),
            thresholds=thresholds,
        )

    def echo(self) -> dict:
        """Config as it was understood, for the report."""
        d = {
            "problem": {k: v for k, v in asdict(self.problem).items() if v is not None},
            "objective_index": self.objective_index,
            "surrogate": asdict(self.surrogate),
            "sample_count": self.sample_count,
            "seed": self.seed,
            "n_active": self.n_active,
            "mode": self.mode if self.mode == "training-points" else {"monte-carlo": self.mc_points},
            "thresholds": asdict(self.thresholds),
        }
        if "bounds" in d["problem"]:
            d["problem"]["bounds"] = [list(b) for b in self.problem.bounds]
        if "csv" in d["problem"]:
            d["problem"]["csv"] = Path(self.problem.csv).name
        d["surrogate"]["p_range"] = list(self.surrogate.p_range)
        return d


def _parse_mode(v) -> Tuple[str, int]:
    if v == "training-points":
        return "training-points", 1000
    if v == "monte-carlo":
        return "monte-carlo", 1000
    if isinstance(v, dict):
        _check_keys(v, ("monte-carlo",), "mode")
        return "monte-carlo", _int(v, "monte-carlo", minimum=1)
    raise ConfigError("mode must be 'training-points', 'monte-carlo' or {\"monte-carlo\": M}")


@dataclass(frozen=True)
class OptimizeConfig:
    problem: ProblemSpec
    objective_index: int = 0
    init_k: int = 45
    budget: int = 75
    seed: int = 0
    ei_restarts: int = 100
    output_dir: str = "ego_output"

    KEYS = ("problem", "objective_index", "init_k", "budget", "seed", "ei_restarts", "output_dir")

    @classmethod
    def from_dict(cls, d, base: Path = Path(".")) -> "OptimizeConfig":
        _check_keys(d, cls.KEYS, "config")
        if "problem" not in d:
            raise ConfigError("config needs a 'problem'")
        problem = ProblemSpec.from_dict(d["problem"], base)
        if problem.builtin is None:
            raise ConfigError("optimize needs a builtin problem (the objective must be callable)")
        out = Path(d.get("output_dir", "ego_output"))
        if not out.is_absolute():
            out = base / out
        return cls(problem, _int(d, "objective_index", 0, minimum=0), _int(d, "init_k", 45, minimum=2),
                   _int(d, "budget", 75, minimum=2), _int(d, "seed", 0), _int(d, "ei_restarts", 100, minimum=1),
                   str(out))


def load_json(path) -> dict:
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"no such config file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None


def load_analysis_config(path) -> AnalysisConfig:
    return AnalysisConfig.from_dict(load_json(path), Path(path).resolve().parent)


def load_optimize_config(path) -> OptimizeConfig:
    return OptimizeConfig.from_dict(load_json(path), Path(path).resolve().parent)
