"""``synth`` command line: ``synth run`` and ``synth eval``.

Exit codes: 0 success, 1 runtime error, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import export
from .array_model import CutEvaluator, ExcitationMatrix, compute_sll, locate_main_lobe
from .config import ConfigError, RunConfig, apply_overrides, load_config
from .errors import ContractViolation, DegenerateExcitationError, NoSidelobeRegionError
from .synthesis import SynthesisResult, synthesize

log = logging.getLogger("cuckoo_array")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2

# keys that cannot change any computed value and so stay out of result.json
_NON_SEMANTIC = ("out_dir", "workers", "seeds")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _size(text):
    try:
        m, n = text.lower().split("x")
        return int(m), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like MxN, got {text!r}")


def _seed_list(text):
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"seeds must be comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="synth", description="Cuckoo-search synthesis of low-sidelobe planar arrays.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="optimize excitation amplitudes")
    run.add_argument("--config", help="flat TOML configuration file")
    run.add_argument("--seed", type=int)
    run.add_argument("--seeds", type=_seed_list, help="comma-separated seeds; one subdirectory each")
    run.add_argument("--out", dest="out_dir")
    run.add_argument("--pa", type=float)
    run.add_argument("--iters", dest="max_iterations", type=int)
    run.add_argument("--pop", dest="population", type=int)
    run.add_argument("--phi", dest="phi_deg", type=float)
    run.add_argument("--size", type=_size, help="array size MxN")
    run.add_argument("--workers", type=int, help="threads for objective evaluation")
    run.add_argument("--jobs", type=int, default=1, help="seeds run in parallel processes")

    ev = sub.add_parser("eval", help="evaluate a given excitation")
    ev.add_argument("--config", help="flat TOML configuration file")
    ev.add_argument("--excitation", required=True, help="headerless MxN amplitude CSV")
    ev.add_argument("--out", dest="out_dir")
    ev.add_argument("--phi", dest="phi_deg", type=float)
    ev.add_argument("--size", type=_size)
    return parser


def _effective_config(args) -> RunConfig:
    config = load_config(args.config)
    overrides = {}
    for key in ("seed", "seeds", "out_dir", "pa", "max_iterations", "population", "phi_deg", "workers"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = float(value) if key in ("pa", "phi_deg") else value
    if getattr(args, "size", None) is not None:
        overrides["m"], overrides["n"] = args.size
    apply_overrides(config, overrides)
    for s in config.seed_list():
        config.to_spec(s)
    return config


def _config_echo(config: RunConfig, seed: int) -> dict:
    echo = {k: v for k, v in config.to_dict().items() if k not in _NON_SEMANTIC}
    echo["seed"] = seed
    return echo


def _synthesize_seed(config: RunConfig, seed: int) -> SynthesisResult:
    return synthesize(config.to_spec(seed), workers=max(1, config.workers))


def write_artifacts(out: Path, result: SynthesisResult, config: RunConfig):
    out.mkdir(parents=True, exist_ok=True)
    payload = result.to_dict()
    payload["config"] = _config_echo(config, result.spec.csa.seed)
    export.write_json(out / "result.json", payload)
    export.write_pattern(out / "pattern.csv", result.cut)
    export.write_convergence(out / "convergence.csv", result.run)
    export.write_excitation(out / "excitation.csv", result.best_excitation)


def cmd_run(args) -> int:
    config = _effective_config(args)
    seeds = config.seed_list()
    out = Path(config.out_dir)
    if args.jobs > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_synthesize_seed, [config] * len(seeds), seeds))
    else:
        results = [_synthesize_seed(config, s) for s in seeds]

    rows = []
    for seed, result in zip(seeds, results):
        target = out / f"seed-{seed}" if config.seeds else out
        write_artifacts(target, result, config)
        lobe = result.main_lobe
        rows.append((seed, result.sll_db, lobe.theta_low_deg, lobe.theta_high_deg,
                     result.run.best_objective))
        print(json.dumps({"seed": seed, "sll_db": result.sll_db,
                          "main_lobe_deg": [lobe.theta_low_deg, lobe.theta_high_deg]}))
    if config.seeds:
        export.write_summary(out / "summary.csv", rows)
        print(json.dumps({"median_sll_db": statistics.median(r[1] for r in rows),
                          "seeds": len(rows)}))
    return EXIT_OK


def cmd_eval(args) -> int:
    config = _effective_config(args)
    spec = config.to_spec()
    try:
        amplitudes = export.read_excitation(args.excitation)
    except OSError as exc:
        raise ConfigError(f"cannot read excitation {args.excitation}: {exc.strerror}") from exc
    except ContractViolation as exc:
        raise ConfigError(str(exc)) from exc
    m, n = spec.geometry.shape
    if amplitudes.shape != (m, n):
        raise ConfigError(
            f"excitation dimensions mismatch: expected {m}x{n}, found "
            f"{amplitudes.shape[0]}x{amplitudes.shape[1]}"
        )
    try:
        excitation = ExcitationMatrix(amplitudes)
        cut = CutEvaluator(spec.geometry, spec.cut_phi_deg, spec.theta_grid, spec.convention).cut(excitation)
        lobe = locate_main_lobe(cut)
        out = Path(config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        export.write_pattern(out / "pattern.csv", cut)
        sll = compute_sll(cut, lobe)
    except (NoSidelobeRegionError, DegenerateExcitationError) as exc:
        kind = "no_sidelobe_region" if isinstance(exc, NoSidelobeRegionError) else "degenerate_excitation"
        print(json.dumps({"error": kind, "message": str(exc)}))
        return EXIT_RUNTIME
    except ContractViolation as exc:
        raise ConfigError(str(exc)) from exc
    print(json.dumps({"sll_db": sll, "main_lobe_deg": [lobe.theta_low_deg, lobe.theta_high_deg]}))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = cmd_run if args.command == "run" else cmd_eval
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"synth: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        log.debug("run failed", exc_info=True)
        print(f"synth: {args.command} failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
