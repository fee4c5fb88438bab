"""Flat ``key=value`` configuration files and their mapping onto ``EngagementConfig``.

Lines are ``key = value``; ``#`` starts a comment; blank lines are ignored.
Vector keys take comma-separated numbers. Command-line overrides are applied
on top of the file and are validated the same way.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping

from .engine import EngagementConfig
from .errors import ConfigError, InvalidInputError


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("on", "true", "yes", "1"):
        return True
    if low in ("off", "false", "no", "0"):
        return False
    raise ValueError(f"expected on/off, got {text!r}")


def _vector_or_none(none_token: str) -> Callable[[str], tuple[float, ...] | None]:
    def parse(text: str):
        if text.strip().lower() == none_token:
            return None
        parts = [p for p in text.replace(" ", "").split(",") if p]
        if not parts:
            raise ValueError("empty vector")
        return tuple(float(p) for p in parts)

    return parse


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        value = text.strip().lower()
        if value not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return value

    return parse


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise ValueError("must be >= 0")
    return value


# key -> (EngagementConfig field or None for run-level keys, parser, help)
KEYS: dict[str, tuple[str | None, Callable[[str], object], str]] = {
    "d": ("d", int, "action dimension"),
    "K": ("K", _nonneg_int, "number of slow-timescale interactions"),
    "lambda": ("lam", float, "jammer coupling weight (known to the radar)"),
    "delta": ("delta", float, "radar weight on the jammer-mitigation term"),
    "eps_sinr": ("eps_sinr", float, "SINR denominator regularizer"),
    "theta_true": ("theta_true", _vector_or_none("random"), "true jammer theta, or 'random'"),
    "theta_hat0": ("theta_hat0", _vector_or_none("midpoint"), "radar's initial guess, or 'midpoint'"),
    "theta_lo": ("theta_lo", float, "lower edge of the theta box"),
    "theta_hi": ("theta_hi", float, "upper edge of the theta box"),
    "mode": ("mode", _choice("adaptive", "symmetric"), "adaptive (learn theta) or symmetric (theta known)"),
    "estimator": ("estimator", _choice("max-margin", "slack"), "IRL point estimator"),
    "exploration": ("exploration", _bool, "decaying probe perturbation on/off"),
    "exploration_scale": ("exploration_scale", float, "perturbation length at k=1 (decays as 1/sqrt(k))"),
    "n_random": ("n_random", _nonneg_int, "random starts for the probe optimizer"),
    "step_init": ("step_init", float, "initial pattern-search step"),
    "step_min": ("step_min", float, "final pattern-search step"),
    "max_evals": ("max_evals", int, "objective evaluations per probe solve"),
    "tol_feas": ("tol_feas", float, "Afriat feasibility tolerance"),
    "tracker": ("tracker", _bool, "run the fast-timescale Kalman tracker on/off"),
    "n_fast": ("n_fast", int, "fast-timescale steps per slow step"),
    "T": ("T", float, "sampling period [s]"),
    "q": ("q", float, "process noise intensity (Q = q I)"),
    "sigma0_sq": ("sigma0_sq", float, "base measurement variance"),
    "c_r": ("c_r", float, "radar gain in the measurement variance"),
    "c_j": ("c_j", float, "jammer gain in the measurement variance"),
    "noise_eps": ("noise_eps", float, "measurement variance regularizer"),
    "seed": ("seed", _nonneg_int, "master seed"),
    "seeds": (None, int, "number of seed replications"),
}


@dataclass(frozen=True)
class RunSettings:
    config: EngagementConfig
    seeds: int = 1


def defaults_help() -> str:
    base = EngagementConfig()
    lines = []
    for key, (fld, _, text) in KEYS.items():
        default = 1 if fld is None else getattr(base, fld)
        if key == "theta_true" and default is None:
            default = "random"
        if key == "theta_hat0" and default is None:
            default = "midpoint"
        if isinstance(default, bool):
            default = "on" if default else "off"
        lines.append(f"  {key:<18} {text} (default: {default})")
    return "\n".join(lines)


def read_config_file(path: str | Path) -> dict[str, tuple[str, int]]:
    """Raw ``key -> (value, line number)`` pairs; unknown or repeated keys are errors."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected key=value, got {body!r}", line=lineno)
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in KEYS:
            raise ConfigError("unknown key", key=key, line=lineno)
        if key in raw:
            raise ConfigError(f"duplicate key (first on line {raw[key][1]})", key=key, line=lineno)
        raw[key] = (value, lineno)
    return raw


def parse_config(
    path: str | Path | None = None, overrides: Mapping[str, str] | None = None
) -> RunSettings:
    """Resolve file values and overrides (overrides win) into validated settings."""
    raw = read_config_file(path) if path is not None else {}
    for key, value in (overrides or {}).items():
        if key not in KEYS:
            raise ConfigError("unknown key", key=key)
        raw[key] = (str(value), None)

    fields: dict[str, object] = {}
    seeds = 1
    for key, (value, lineno) in raw.items():
        fld, parse, _ = KEYS[key]
        try:
            parsed = parse(value)
        except ValueError as exc:
            raise ConfigError(f"malformed value {value!r}: {exc}", key=key, line=lineno) from exc
        if fld is None:
            seeds = parsed
        else:
            fields[fld] = parsed
    if seeds < 1:
        raise ConfigError("must be >= 1", key="seeds", line=raw.get("seeds", (None, None))[1])

    lo = fields.get("theta_lo", EngagementConfig.theta_lo)
    hi = fields.get("theta_hi", EngagementConfig.theta_hi)
    for key in ("theta_true", "theta_hat0"):
        vec = fields.get(KEYS[key][0])
        if vec is not None and any(v < lo or v > hi for v in vec):
            raise ConfigError(f"{vec} outside theta box [{lo}, {hi}]", key=key, line=raw[key][1])
    try:
        cfg = EngagementConfig(**fields)
    except InvalidInputError as exc:
        raise ConfigError(str(exc)) from exc
    return RunSettings(cfg, seeds)


def format_value(value) -> str:
    if isinstance(value, bool):
        return "on" if value else "off"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, tuple):
        return ",".join(format_value(float(v)) for v in value)
    return str(value)


def config_to_text(settings: RunSettings) -> str:
    """Fully resolved config in the file format; parsing it back gives equal settings."""
    cfg = settings.config
    lines = ["# resolved configuration"]
    for key, (fld, _, _) in KEYS.items():
        if fld is None:
            value = settings.seeds
        else:
            value = getattr(cfg, fld)
            if value is None:
                value = "random" if key == "theta_true" else "midpoint"
        lines.append(f"{key}={format_value(value)}")
    return "\n".join(lines) + "\n"
