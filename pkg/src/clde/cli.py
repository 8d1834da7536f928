"""Command-line harness: single runs, seeded suites and diagnostics.

Subcommands::

    clde run --problem f4 --seed 3 --out runs/f4
    clde suite suite.json
    clde bifurcation --mu-min 2.5 --mu-max 4.0 --mu-step 0.005
    clde decode-dump --run-dir runs/f4 --generation 10

Exit codes are 0 on success, 1 for usage errors (bad flags, unknown problem,
malformed configuration) and 2 for runtime failures.
"""

import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import chaos
from .benchmarks import get_problem, list_problems
from .config import ConfigError, RunConfig, coerce_mapping, load_config_file
from .engine import run, score_result
from .exceptions import ContractViolation, UnknownProblem

log = logging.getLogger("clde")

OUTPUT_ENV = "CLDE_OUTPUT_DIR"
EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2

_FIELDS = [f.name for f in fields(RunConfig)]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(value):
    """Round-trip text for CSV cells."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------- configs

def resolve_config(flag_values, config_file=None):
    """Merge defaults, config-file entries and flags (highest precedence).

    Returns the config plus a ``{field: "default" | "file" | "flag"}`` map.
    """
    sources = {name: "default" for name in _FIELDS}
    merged = {}
    if config_file:
        try:
            file_values = load_config_file(config_file)
        except OSError as exc:
            raise UsageError(f"cannot read config file {config_file}: {exc}") from exc
        merged.update(file_values)
        sources.update({k: "file" for k in file_values})
    flags = coerce_mapping({k: v for k, v in flag_values.items() if v is not None})
    merged.update(flags)
    sources.update({k: "flag" for k in flags})
    return RunConfig(**merged), sources


def _add_config_flags(parser):
    group = parser.add_argument_group("run configuration (overrides the config file)")
    for name in _FIELDS:
        if name == "record_canvas":
            continue  # exposed as a plain switch
        group.add_argument(f"--{name.replace('_', '-')}", dest=f"cfg_{name}", metavar="VALUE")
    group.add_argument("--tau-bounds-gain", dest="cfg_tau_bounds_gain", metavar="MIN,MAX,GAIN")


def _flag_values(args):
    return {k[4:]: v for k, v in vars(args).items() if k.startswith("cfg_")}


def _output_dir(explicit, fallback):
    if explicit:
        return Path(explicit)
    env = os.environ.get(OUTPUT_ENV)
    return Path(env) / fallback if env else Path("runs") / fallback


# ---------------------------------------------------------------- run

def write_run(result, out_dir, problem, sources=None, wall_time=None):
    """Write the CSV artifacts and ``summary.json`` for one run."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dim, n_obj = problem.dim, problem.n_obj
    xcols = [f"x{j}" for j in range(dim)]
    fcols = [f"f{j}" for j in range(n_obj)]

    cols = ["generation", "evaluations", "K", "tau",
            "best_f" if result.mode == "so" else "front_size",
            "median_pairwise_distance", "unfunded"]
    write_csv(out / "trace.csv", cols, [
        (t.generation, t.evaluations, t.K, t.tau,
         t.best_f if result.mode == "so" else t.front_size,
         t.median_pairwise_distance, t.unfunded)
        for t in result.trace])
    write_csv(out / "population.csv", xcols + fcols,
              [list(x) + list(f) for x, f in zip(result.population_x, result.population_f)])
    rows = []
    for a, (ax, af) in enumerate(result.archives):
        rows.extend([a, r] + list(x) + list(f) for r, (x, f) in enumerate(zip(ax, af)))
    write_csv(out / "archive.csv", ["archive", "entry"] + xcols + fcols, rows)
    if result.canvas_log:
        canvas_rows = []
        for snap in result.canvas_log:
            reps = set(snap.representatives)
            for i, x in enumerate(snap.x):
                canvas_rows.append([snap.generation, i] + list(x)
                                   + [snap.heights[i], snap.labels[i], i in reps])
        write_csv(out / "canvas.csv",
                  ["generation", "node"] + xcols + ["height", "basin_id", "is_representative"],
                  canvas_rows)

    summary = {
        "problem": result.problem_id,
        "mode": result.mode,
        "seed": result.seed,
        "evaluations": result.evaluations,
        "init_evaluations": result.init_evaluations,
        "config": result.config.as_dict(),
        "config_sources": sources or {},
    }
    summary.update(score_result(result, problem))
    if wall_time is not None:
        summary["wall_time_s"] = wall_time
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def cmd_run(args):
    flags = _flag_values(args)
    if args.record_canvas:
        flags["record_canvas"] = "true"
    config, sources = resolve_config(flags, args.config)
    problem = get_problem(config.problem)
    out = _output_dir(args.out, f"{problem.id}_seed{config.seed}")
    t0 = time.perf_counter()
    result = run(config, problem)
    summary = write_run(result, out, problem, sources, time.perf_counter() - t0)
    score = {k: summary[k] for k in ("pr", "igd", "igdx") if k in summary}
    print(f"{problem.id} seed={config.seed} evaluations={result.evaluations} "
          + " ".join(f"{k}={v:.6g}" for k, v in score.items()) + f" -> {out}")
    return EXIT_OK


# ---------------------------------------------------------------- suite

def _suite_cell(cell):
    """Run one (problem, seed) cell; never raises."""
    try:
        overrides = dict(cell["overrides"])
        overrides.update(problem=cell["problem"], seed=cell["seed"])
        if cell.get("mode"):
            overrides["mode"] = cell["mode"]
        config = RunConfig(**coerce_mapping(overrides))
        problem = get_problem(config.problem)
        t0 = time.perf_counter()
        result = run(config, problem)
        summary = write_run(result, cell["out"], problem, wall_time=time.perf_counter() - t0)
        return {"ok": True, **cell, **{k: summary.get(k) for k in ("pr", "igd", "igdx")}}
    except Exception as exc:  # recorded per cell, suite continues
        return {"ok": False, **cell, "error": f"{type(exc).__name__}: {exc}"}


def load_suite(path):
    """Parse a suite file.

    A suite is a JSON object::

        {"problems": ["f1", {"problem": "two_basin", "mode": "mo",
                             "overrides": {"max_generations": 100}}],
         "runs": 30, "base_seed": 0, "output_dir": "suite_out",
         "overrides": {"population_size": 100}, "workers": 4}

    Run ``r`` of every problem uses seed ``base_seed + r``.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read suite file {path}: {exc}") from exc
    if not isinstance(data, dict) or not data.get("problems"):
        raise UsageError("suite file needs a non-empty 'problems' list")
    entries = []
    for item in data["problems"]:
        if isinstance(item, str):
            item = {"problem": item}
        if not isinstance(item, dict) or "problem" not in item:
            raise UsageError(f"bad suite entry: {item!r}")
        entries.append(item)
    runs = int(data.get("runs", 30))
    if runs < 1:
        raise UsageError("'runs' must be >= 1")
    return {
        "entries": entries,
        "runs": runs,
        "base_seed": int(data.get("base_seed", 0)),
        "output_dir": data.get("output_dir"),
        "overrides": dict(data.get("overrides", {})),
        "workers": data.get("workers"),
    }


def _mean_std(values):
    vals = [v for v in values if v is not None]
    if not vals:
        return "", ""
    return float(np.mean(vals)), float(np.std(vals))


def cmd_suite(args):
    suite = load_suite(args.suite)
    out = _output_dir(args.out or suite["output_dir"], Path(args.suite).stem)
    cells = []
    for entry in suite["entries"]:
        overrides = {**suite["overrides"], **entry.get("overrides", {})}
        label = entry["problem"] + (f"_{entry['mode']}" if entry.get("mode") else "")
        for r in range(suite["runs"]):
            seed = suite["base_seed"] + r
            cells.append({"label": label, "problem": entry["problem"], "mode": entry.get("mode"),
                          "seed": seed, "overrides": overrides,
                          "out": str(out / label / f"seed{seed}")})
    workers = args.workers or suite["workers"] or min(4, os.cpu_count() or 1)
    workers = max(1, min(int(workers), len(cells)))
    if workers == 1:
        results = [_suite_cell(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_suite_cell, cells))

    out.mkdir(parents=True, exist_ok=True)
    rows, failures = [], []
    for entry in suite["entries"]:
        label = entry["problem"] + (f"_{entry['mode']}" if entry.get("mode") else "")
        mine = [r for r in results if r["label"] == label]
        ok = [r for r in mine if r["ok"]]
        failures.extend((r["label"], r["seed"], r["error"]) for r in mine if not r["ok"])
        stats = []
        for key in ("pr", "igd", "igdx"):
            stats.extend(_mean_std([r.get(key) for r in ok]))
        rows.append([label, len(mine), len(ok)] + stats)
    write_csv(out / "aggregate.csv",
              ["problem", "runs", "completed", "pr_mean", "pr_std", "igd_mean", "igd_std",
               "igdx_mean", "igdx_std"], rows)
    if failures:
        write_csv(out / "failures.csv", ["problem", "seed", "error"], failures)
    for row in rows:
        print(",".join(_fmt(v) for v in row))
    if failures:
        print(f"{len(failures)} of {len(cells)} cells failed; see {out / 'failures.csv'}",
              file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


# ---------------------------------------------------------------- diagnostics

def cmd_bifurcation(args):
    if not (0.0 < args.mu_min <= args.mu_max <= 4.0):
        raise UsageError("need 0 < mu-min <= mu-max <= 4")
    if args.mu_step <= 0:
        raise UsageError("mu-step must be positive")
    count = int(round((args.mu_max - args.mu_min) / args.mu_step)) + 1
    grid = np.round(args.mu_min + args.mu_step * np.arange(count), 12)
    grid = grid[grid <= args.mu_max + 1e-12]
    table = chaos.bifurcation_scan(grid, args.transient, args.samples, args.seed)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        write_csv(args.out, ["mu", "z"], table)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["mu", "z"])
        w.writerows([[_fmt(m), _fmt(z)] for m, z in table])
    return EXIT_OK


def cmd_decode_dump(args):
    path = Path(args.run_dir) / "canvas.csv"
    if not path.exists():
        raise UsageError(f"{path} not found; rerun with --record-canvas")
    rows = _read_csv(path)
    generations = {int(r["generation"]) for r in rows}
    if args.generation not in generations:
        raise UsageError(f"generation {args.generation} out of range "
                         f"{min(generations)}..{max(generations)}")
    keep = [r for r in rows if int(r["generation"]) == args.generation]
    header = [c for c in keep[0].keys() if c != "generation"]
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows([[r[c] for c in header] for r in keep])
    finally:
        if args.out:
            out.close()
    return EXIT_OK


# ---------------------------------------------------------------- entry point

def build_parser():
    parser = _Parser(prog="clde", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log unfunded basins etc.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run one (config, seed) pair")
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--out", help=f"output directory (default: ${OUTPUT_ENV}/<problem>_seed<s> or runs/...)")
    p.add_argument("--record-canvas", action="store_true",
                   help="also write canvas.csv for decode-dump")
    _add_config_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("suite", help="run a JSON suite of problems x seeds")
    p.add_argument("suite")
    p.add_argument("--out", help="output directory (overrides the suite file)")
    p.add_argument("--workers", type=int, help="parallel cells (default: min(4, cpus))")
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("bifurcation", help="logistic-map bifurcation samples as CSV")
    p.add_argument("--mu-min", type=float, default=2.5)
    p.add_argument("--mu-max", type=float, default=4.0)
    p.add_argument("--mu-step", type=float, default=0.005)
    p.add_argument("--transient", type=int, default=1000)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_bifurcation)

    p = sub.add_parser("decode-dump", help="per-node basin labels of one recorded generation")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--generation", type=int, required=True)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_decode_dump)

    sub.add_parser("problems", help="list registered problem ids").set_defaults(
        func=lambda args: print("\n".join(list_problems())) or EXIT_OK)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError, UnknownProblem) as exc:
        print(f"clde: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ContractViolation as exc:
        print(f"clde: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        print(f"clde: runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
