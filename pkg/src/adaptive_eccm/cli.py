"""Command-line front end: ``adaptive-eccm run`` and ``adaptive-eccm sweep``.

Exit codes: 0 success, 1 runtime error, 2 configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .config import KEYS, RunSettings, config_to_text, defaults_help, parse_config, read_config_file
from .engine import EngagementTrace, run_engagement, summarize, trend_checks
from .errors import ConfigError, EccmError
from .report import line_chart_svg, summary_payload, trace_to_csv, write_json

log = logging.getLogger("adaptive_eccm")

SWEEP_SEEDS = 20
# config keys that already have a dedicated flag
_DEDICATED = {"K", "seed", "mode", "seeds", "tracker", "exploration"}


@dataclass(frozen=True)
class RunManifest:
    config: dict
    version: str
    master_seed: int
    seeds: list[int]
    started: str
    finished: str
    outputs: list[str]

    def as_dict(self) -> dict:
        return {
            "config": self.config,
            "version": self.version,
            "master_seed": self.master_seed,
            "seeds": self.seeds,
            "started": self.started,
            "finished": self.finished,
            "outputs": self.outputs,
        }


def derived_seeds(master: int, count: int) -> list[int]:
    """Replication seeds ``master, master+1, ...``; a single seed reproduces ``run``."""
    if count < 1:
        raise ConfigError("seed count must be >= 1", key="seeds")
    return [master + i for i in range(count)]


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _run_seeds(settings: RunSettings, seeds: Sequence[int], jobs: int) -> list[EngagementTrace]:
    configs = [settings.config.with_seed(s) for s in seeds]
    if jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run_engagement, configs))
    traces = []
    for cfg in configs:
        log.info("seed %d: running %d steps", cfg.seed, cfg.K)
        traces.append(run_engagement(cfg))
    return traces


def _with_initial(values: np.ndarray, initial: float) -> np.ndarray:
    return np.concatenate([[initial], values])


def run_command(settings: RunSettings, out_dir: str | Path, jobs: int = 1) -> RunManifest:
    """Run every replication and write CSVs, summary, charts and the manifest."""
    started = _now()
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise EccmError(f"cannot create output directory {out}: {exc}") from exc

    cfg = settings.config
    seeds = derived_seeds(cfg.seed, settings.seeds)
    traces = _run_seeds(settings, seeds, jobs)

    outputs: list[str] = []

    def emit(name: str, text: str) -> None:
        (out / name).write_text(text, encoding="utf-8")
        outputs.append(name)

    if len(traces) == 1:
        emit("run.csv", trace_to_csv(traces[0], cfg.d))
    else:
        for t in traces:
            emit(f"run_seed{t.seed}.csv", trace_to_csv(t, cfg.d))

    stats = summarize(traces)
    checks = trend_checks(traces)
    write_json(out / "summary.json", summary_payload(stats, checks, traces))
    outputs.append("summary.json")

    multi = len(traces) > 1
    e0 = np.array([t.est_error0 for t in traces])
    q = (lambda arr: arr) if multi else (lambda arr: None)
    emit(
        "est_error.svg",
        line_chart_svg(
            "Estimation error ||theta - theta_hat_k||",
            "estimation error",
            _with_initial(stats.median["est_error"], float(np.median(e0))),
            q(_with_initial(stats.q25["est_error"], float(np.percentile(e0, 25)))),
            q(_with_initial(stats.q75["est_error"], float(np.percentile(e0, 75)))),
            x0=0,
        ),
    )
    emit(
        "jammer_utility.svg",
        line_chart_svg(
            "Jammer utility U_J(alpha_k, beta_k)",
            "jammer utility",
            stats.median["jammer_utility"],
            q(stats.q25["jammer_utility"]),
            q(stats.q75["jammer_utility"]),
        ),
    )
    emit("config.txt", config_to_text(settings))

    manifest = RunManifest(
        config=_jsonable(cfg.as_dict()) | {"seeds": settings.seeds},
        version=__version__,
        master_seed=cfg.seed,
        seeds=seeds,
        started=started,
        finished=_now(),
        outputs=outputs + ["manifest.json"],
    )
    write_json(out / "manifest.json", manifest.as_dict())
    return manifest


def sweep_command(settings: RunSettings, seed_count: int, out_dir: str | Path, jobs: int = 1) -> RunManifest:
    if seed_count < 1:
        raise ConfigError("seed count must be >= 1", key="seeds")
    return run_command(replace(settings, seeds=seed_count), out_dir, jobs)


def _jsonable(d: dict) -> dict:
    return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


def _add_common(p: argparse.ArgumentParser, default_seeds: int | None) -> None:
    p.add_argument("--config", metavar="PATH", help="flat key=value config file")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--steps", type=int, metavar="K", help="number of slow-timescale interactions")
    p.add_argument("--mode", choices=["adaptive", "symmetric"])
    p.add_argument("--out", default="out", metavar="DIR", help="output directory (default: out)")
    p.add_argument(
        "--seeds",
        type=int,
        metavar="N",
        help="number of replications" + (f" (default: {default_seeds})" if default_seeds else ""),
    )
    p.add_argument("--no-tracker", action="store_true", help="skip the fast-timescale tracker")
    p.add_argument("--exploration", choices=["on", "off"])
    p.add_argument("--jobs", type=int, default=1, help="worker processes for replications")
    p.add_argument("-v", "--verbose", action="store_true")
    group = p.add_argument_group("config overrides", "any config key; wins over the --config file")
    for key, (_, _, text) in KEYS.items():
        if key not in _DEDICATED:
            group.add_argument(f"--{key.replace('_', '-')}", dest=f"key_{key}", metavar="VALUE", help=text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adaptive-eccm",
        description="Adaptive radar ECCM: principal-agent probing with revealed-preference IRL.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="config keys:\n" + defaults_help(),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, seeds, text in (
        ("run", None, "run one engagement (or --seeds N replications)"),
        ("sweep", SWEEP_SEEDS, "run a seed sweep and write aggregated trend charts"),
    ):
        p = sub.add_parser(
            name,
            help=text,
            description=text,
            formatter_class=argparse.RawDescriptionHelpFormatter,
            epilog="config keys:\n" + defaults_help(),
        )
        _add_common(p, seeds)
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, str]:
    ov: dict[str, str] = {}
    for key in KEYS:
        value = getattr(args, f"key_{key}", None)
        if value is not None:
            ov[key] = value
    if args.seed is not None:
        ov["seed"] = str(args.seed)
    if args.steps is not None:
        ov["K"] = str(args.steps)
    if args.mode is not None:
        ov["mode"] = args.mode
    if args.seeds is not None:
        ov["seeds"] = str(args.seeds)
    if args.no_tracker:
        ov["tracker"] = "off"
    if args.exploration is not None:
        ov["exploration"] = args.exploration
    return ov


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        settings = parse_config(args.config, _overrides(args))
        if args.jobs < 1:
            raise ConfigError("must be >= 1", key="jobs")
        if args.command == "sweep":
            count = settings.seeds
            if args.seeds is None and not (args.config and "seeds" in read_config_file(args.config)):
                count = SWEEP_SEEDS
            manifest = sweep_command(settings, count, args.out, args.jobs)
        else:
            manifest = run_command(settings, args.out, args.jobs)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (EccmError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(manifest.outputs)} files to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
