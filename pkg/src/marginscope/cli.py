"""Command-line entry point for every experiment suite.

One global seed feeds named substreams, all outputs are CSV plus a
manifest.json-style provenance record, and a repeated run with identical
configuration produces byte-identical files.  Exit codes: 0 success,
2 usage, 3 bad input data, 4 resource cap exceeded, 5 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .csvio import read_csv, write_csv, write_manifest
from .errors import InfeasibleError, InvalidInputError, MarginScopeError, ResourceCapError
from .rng import RandomStream

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_RESOURCE = 4
EXIT_INTERNAL = 5

THREADS_ENV = "MARGIN_SCOPE_THREADS"


def worker_count() -> int:
    """Worker cap from the environment; 0 or unset means automatic.

    Execution is currently sequential everywhere (deterministic by
    construction); the cap is validated and recorded for provenance.
    """
    raw = os.environ.get(THREADS_ENV, "0")
    try:
        value = int(raw)
    except ValueError:
        raise InvalidInputError(f"{THREADS_ENV} must be an integer, got {raw!r}", module="cli")
    if value < 0:
        raise InvalidInputError(f"{THREADS_ENV} must be >= 0", module="cli")
    auto = os.cpu_count() or 1
    return auto if value == 0 else min(value, auto)


def _resolve_out(out: str, default_name: str) -> tuple[Path, Path]:
    """Return (output file, manifest path) for a file-or-directory --out."""
    path = Path(out)
    if path.suffix in (".csv", ".json", ".svg"):
        stem = path.with_suffix("")
        return path, Path(f"{stem}.manifest.json")
    return path / default_name, path / "manifest.json"


def _load_config(path: str | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InvalidInputError(f"config file {path} not found", module="cli")
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"malformed config {path}: {exc}", module="cli")
    if not isinstance(doc, dict):
        raise InvalidInputError("config must be a JSON object of flag values", module="cli")
    return {str(k).replace("-", "_"): v for k, v in doc.items()}


def _merge_flags(ns: argparse.Namespace, defaults: dict[str, Any]) -> dict[str, Any]:
    provided = {k: v for k, v in vars(ns).items() if k not in ("command", "subcommand", "config")}
    config = _load_config(getattr(ns, "config", None))
    merged = dict(defaults)
    for key, value in config.items():
        if key not in defaults:
            raise InvalidInputError(f"unknown config key {key!r}", module="cli")
        merged[key] = value
    merged.update(provided)
    missing = [k for k, v in merged.items() if v is _REQUIRED]
    if missing:
        raise InvalidInputError(f"missing required flags: {', '.join(sorted(missing))}", module="cli")
    return merged


_REQUIRED = object()


def _int_list(text: str) -> list[int]:
    """Parse "2,4,6" or "1:10" (inclusive range) into integers."""
    out: list[int] = []
    for chunk in str(text).split(","):
        chunk = chunk.strip()
        if ":" in chunk:
            lo, hi = chunk.split(":", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif chunk:
            out.append(int(chunk))
    if not out:
        raise InvalidInputError(f"empty integer list {text!r}", module="cli")
    return out


def _manifest_record(command: str, flags: dict[str, Any], outputs: list[str], **extra: Any) -> dict:
    record = {
        "command": command,
        "flags": {k: flags[k] for k in sorted(flags)},
        "seed": flags.get("seed"),
        "artifact_version": __version__,
        "outputs": sorted(outputs),
        "threads": worker_count(),
    }
    record.update(extra)
    return record


# ---------------------------------------------------------------- commands


def _cmd_haar_moments(ns: argparse.Namespace) -> int:
    from .moments import Spectrum, haar_centered_moment, haar_raw_moment

    defaults = {
        "observable": "oz", "n": _REQUIRED, "rank": 1, "t_max": 6, "a": 0.5,
        "out": _REQUIRED,
    }
    flags = _merge_flags(ns, defaults)
    n, t_max, a = int(flags["n"]), int(flags["t_max"]), float(flags["a"])
    kind = flags["observable"]
    if kind == "oz":
        spectrum = Spectrum.ones_fraction(n)
    elif kind == "zs":
        spectrum = Spectrum.signed_projector_pair(n)
    elif kind == "projector":
        spectrum = Spectrum.projector(int(flags["rank"]), 1 << n)
    else:
        raise InvalidInputError(f"unknown observable {kind!r}", module="cli")
    rows = []
    for t in range(1, t_max + 1):
        rows.append((t, "raw", haar_raw_moment(spectrum, t, a), 0.0, 0))
    for t in range(1, t_max + 1):
        rows.append((t, "centered", haar_centered_moment(spectrum, t, a), 0.0, 0))
    out, manifest = _resolve_out(flags["out"], "haar_moments.csv")
    write_csv(out, ["t", "kind", "value", "std_error", "n_samples"], rows)
    write_manifest(manifest, _manifest_record("haar-moments", flags, [out.name]))
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_toy(ns: argparse.Namespace) -> int:
    from .toymodel import FIG3_HEADER, shadow_design_experiment

    defaults = {
        "n": 9, "samples": 20000, "t_max": 6, "perms": "0,1,5,15",
        "perm_samples": None, "epsilon": 0.07, "seed": _REQUIRED,
        "bootstrap": 200, "out": _REQUIRED,
    }
    flags = _merge_flags(ns, defaults)
    perm_counts = _int_list(flags["perms"])
    perm_samples = None if flags["perm_samples"] is None else int(flags["perm_samples"])
    result = shadow_design_experiment(
        n=int(flags["n"]),
        t_max=int(flags["t_max"]),
        perm_counts=perm_counts,
        perm_samples=perm_samples,
        samples=int(flags["samples"]),
        epsilon=float(flags["epsilon"]),
        stream=RandomStream(int(flags["seed"])),
        bootstrap=int(flags["bootstrap"]),
    )
    out, manifest = _resolve_out(flags["out"], "fig3.csv")
    write_csv(out, FIG3_HEADER, result.csv_rows())
    write_manifest(
        manifest,
        _manifest_record(
            "toy", flags, [out.name],
            permutation_interpretation="composition of k uniformly random basis transpositions",
            perm_samples=result.perm_samples,
            transpositions={
                str(k): [[list(p) for p in obs] for obs in log]
                for k, log in sorted(result.transposition_log.items())
            },
        ),
    )
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_dlp(ns: argparse.Namespace) -> int:
    from .dlp import DLP_REPORT_HEADER, DEFAULT_PRIME_CAP, DlpInstance, dlp_report, find_generator
    from .margin import MarginSpec

    defaults = {
        "p": _REQUIRED, "g": "auto", "k_exp": _REQUIRED, "s": 1,
        "copies": 2000, "delta": 0.05, "trials": 20, "seed": _REQUIRED,
        "prime_cap": DEFAULT_PRIME_CAP, "out": _REQUIRED,
    }
    flags = _merge_flags(ns, defaults)
    p = int(flags["p"])
    g = find_generator(p) if str(flags["g"]) == "auto" else int(flags["g"])
    instance = DlpInstance(p=p, g=g, s=int(flags["s"]), k_exp=int(flags["k_exp"]))
    spec = MarginSpec(M=int(flags["copies"]), delta=float(flags["delta"]))
    report = dlp_report(
        instance, spec, RandomStream(int(flags["seed"])),
        trials_per_point=int(flags["trials"]), prime_cap=int(flags["prime_cap"]),
    )
    out, manifest = _resolve_out(flags["out"], "report.csv")
    write_csv(out, DLP_REPORT_HEADER, [report.csv_row()])
    write_manifest(
        manifest,
        _manifest_record(
            "dlp", flags, [out.name],
            hyperplane_convention="disjoint exponent halves [0,(p-3)/2] and [(p-1)/2,p-2]",
            sign_convention="correct classification gives margin below 1/2",
            haar_variance_reference=report.haar_variance_value,
        ),
    )
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_dataset(ns: argparse.Namespace) -> int:
    from .varmodels import generate_dataset

    if getattr(ns, "subcommand", None) != "gen":
        raise InvalidInputError("dataset supports only: gen", module="cli")
    defaults = {"seed": _REQUIRED, "grid": 24, "test": 500, "out": _REQUIRED}
    flags = _merge_flags(ns, defaults)
    dataset = generate_dataset(int(flags["seed"]), int(flags["grid"]), int(flags["test"]))
    out, manifest = _resolve_out(flags["out"], "data.csv")
    test_out = out.with_name(out.stem + "_test.csv")
    write_csv(out, ["x1", "x2", "y"],
              [(x[0], x[1], int(y)) for x, y in zip(dataset.train_x, dataset.train_y)])
    write_csv(test_out, ["x1", "x2", "y"],
              [(x[0], x[1], int(y)) for x, y in zip(dataset.test_x, dataset.test_y)])
    write_manifest(
        manifest,
        _manifest_record(
            "dataset", flags, [out.name, test_out.name],
            unitary_attempt=dataset.unitary_attempt,
        ),
    )
    print(f"wrote {out} and {test_out}")
    return EXIT_OK


def _read_dataset(path: str):
    from .varmodels import LabeledDataset

    train_path = Path(path)
    test_path = train_path.with_name(train_path.stem + "_test.csv")
    if not train_path.exists():
        raise InvalidInputError(f"dataset file {train_path} not found", module="cli")

    def _load(p: Path):
        header, rows = read_csv(p)
        if header != ["x1", "x2", "y"]:
            raise InvalidInputError(f"{p} does not look like a dataset CSV", module="cli")
        xs = np.array([[float(r[0]), float(r[1])] for r in rows])
        ys = np.array([int(r[2]) for r in rows])
        return xs, ys

    train_x, train_y = _load(train_path)
    if test_path.exists():
        test_x, test_y = _load(test_path)
    else:
        test_x, test_y = train_x, train_y
    return LabeledDataset(
        train_x=train_x, train_y=train_y, test_x=test_x, test_y=test_y,
        seed=-1, grid_side=int(round(len(train_x) ** 0.5)), test_count=len(test_x),
        unitary_attempt=-1,
    )


def _cmd_train(ns: argparse.Namespace) -> int:
    from .varmodels import TrainConfig, accuracy, init_model, loss, save_model, train

    defaults = {
        "model": _REQUIRED, "n": _REQUIRED, "layers": _REQUIRED, "data": _REQUIRED,
        "iters": 300, "step": 0.05, "entangler": "ring", "seed": _REQUIRED,
        "out": _REQUIRED,
    }
    flags = _merge_flags(ns, defaults)
    dataset = _read_dataset(flags["data"])
    stream = RandomStream(int(flags["seed"])).child("train-init")
    model = init_model(flags["model"], int(flags["n"]), int(flags["layers"]), stream,
                       entangler=flags["entangler"])
    config = TrainConfig(max_iters=int(flags["iters"]), step=float(flags["step"]),
                         seed=int(flags["seed"]))
    result = train(model, dataset.train_x, dataset.train_y, config)
    out, manifest = _resolve_out(flags["out"], "model.json")
    save_model(result.model, out)
    write_manifest(
        manifest,
        _manifest_record(
            "train", flags, [out.name],
            initial_loss=result.initial_loss,
            final_loss=result.final_loss,
            train_accuracy=accuracy(result.model, dataset.train_x, dataset.train_y),
            iterations=len(result.trace) - 1,
        ),
    )
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_sweep(ns: argparse.Namespace) -> int:
    from .varmodels import SWEEP_HEADER, TrainConfig, moment_sweep

    defaults = {
        "model": "feature-brick,feature-nonbrick,reupload",
        "n_list": "2", "layer_list": "1:10", "repeats": 5,
        "regimes": "train,test,random", "data": _REQUIRED,
        "iters": 300, "step": 0.05, "entangler": "ring", "bootstrap": 200,
        "seed": _REQUIRED, "out": _REQUIRED,
    }
    flags = _merge_flags(ns, defaults)
    dataset = _read_dataset(flags["data"])
    kinds = [k.strip() for k in str(flags["model"]).split(",") if k.strip()]
    regimes = [r.strip() for r in str(flags["regimes"]).split(",") if r.strip()]
    cells = moment_sweep(
        kinds=kinds,
        n_list=_int_list(flags["n_list"]),
        layer_list=_int_list(flags["layer_list"]),
        repeats=int(flags["repeats"]),
        dataset=dataset,
        stream=RandomStream(int(flags["seed"])),
        regimes=regimes,
        train_config=TrainConfig(max_iters=int(flags["iters"]), step=float(flags["step"]),
                                 seed=int(flags["seed"])),
        entangler=flags["entangler"],
        bootstrap=int(flags["bootstrap"]),
    )
    out, manifest = _resolve_out(flags["out"], "fig45.csv")
    write_csv(out, SWEEP_HEADER, [c.csv_row() for c in cells])
    write_manifest(
        manifest,
        _manifest_record("sweep", flags, [out.name], optimizer="adam parameter-shift"),
    )
    print(f"wrote {out}")
    return EXIT_OK


def _read_margin_samples(path: str) -> np.ndarray:
    p = Path(path)
    if not p.exists():
        raise InvalidInputError(f"samples file {path} not found", module="cli")
    lines = [ln.strip() for ln in p.read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines:
        raise InvalidInputError("samples file is empty", module="cli")
    header = lines[0].split(",")
    try:
        float(header[0])
        has_header = False
    except ValueError:
        has_header = True
    if has_header:
        if "z" not in header:
            raise InvalidInputError("samples CSV needs a z column", module="cli")
        idx = header.index("z")
        values = [float(ln.split(",")[idx]) for ln in lines[1:]]
    else:
        values = [float(ln.split(",")[-1]) for ln in lines]
    if not values:
        raise InvalidInputError("no margin values found", module="cli")
    return np.array(values)


def _cmd_margin_report(ns: argparse.Namespace) -> int:
    from .margin import (
        MarginSpec,
        bernstein_bound,
        bernstein_condition,
        chebyshev_failure_bound,
        failure_report_row,
        make_margin_sample,
        resolvable_threshold,
        subgaussian_bound,
        subgaussian_condition,
        proportion_stderr,
    )

    defaults = {
        "samples": _REQUIRED, "b": 0.5, "M": 1000, "delta": 0.05,
        "t_max": 8, "shot_trials": 0, "seed": 0, "out": _REQUIRED,
    }
    flags = _merge_flags(ns, defaults)
    zs = _read_margin_samples(flags["samples"])
    spec = MarginSpec(M=int(flags["M"]), delta=float(flags["delta"]), b=float(flags["b"]))
    mu1 = float(zs.mean())
    sigma2 = float(zs.var())
    t_max = int(flags["t_max"])
    centered = [float(np.mean((zs - mu1) ** t)) for t in range(2, t_max + 1)]
    l_bern = bernstein_condition(centered, sigma2, t_max)
    l_sub = subgaussian_condition(centered, t_max)
    reports = [chebyshev_failure_bound(mu1, sigma2, spec)]
    if np.isfinite(l_bern):
        reports.append(bernstein_bound(mu1, sigma2, l_bern, spec))
    if l_sub > 0 and np.isfinite(l_sub):
        reports.append(subgaussian_bound(mu1, l_sub, spec))
    out, manifest = _resolve_out(flags["out"], "report.csv")
    write_csv(
        out,
        ["bound_kind", "mu1", "sigma2", "L", "b", "M", "delta", "k_gap", "bound", "vacuous"],
        [failure_report_row(r) for r in reports],
    )
    threshold = resolvable_threshold(spec)
    rate_exact = float(np.mean(zs >= threshold))
    empirical_rows = [
        ("exact", rate_exact, proportion_stderr(rate_exact, len(zs)), len(zs), 0),
    ]
    shot_trials = int(flags["shot_trials"])
    if shot_trials > 0:
        from .margin import empirical_failure

        samples = [make_margin_sample(i, 0, float(z), spec.b) for i, z in enumerate(zs)]
        emp = empirical_failure(samples, spec, shot_trials, RandomStream(int(flags["seed"])).child("margin-report"))
        empirical_rows.append(("shots", emp.rate_shots, emp.stderr_shots, emp.n_samples, shot_trials))
    empirical_out = out.with_name(out.stem + "_empirical.csv")
    write_csv(empirical_out, ["kind", "rate", "std_error", "n_samples", "trials"], empirical_rows)
    write_manifest(
        manifest,
        _manifest_record("margin-report", flags, [out.name, empirical_out.name],
                         resolvable_threshold=threshold),
    )
    print(f"empirical failure rate (exact indicator): {rate_exact:.6g} "
          f"(threshold {threshold:.6g}); wrote {out}")
    return EXIT_OK


def _cmd_plot(ns: argparse.Namespace) -> int:
    from .plotting import plot_csv

    defaults = {"csv": _REQUIRED, "kind": _REQUIRED, "metric": "mu1", "out": _REQUIRED}
    flags = _merge_flags(ns, defaults)
    if not Path(flags["csv"]).exists():
        raise InvalidInputError(f"csv file {flags['csv']} not found", module="cli")
    out, manifest = _resolve_out(flags["out"], "plot.svg")
    plot_csv(flags["csv"], flags["kind"], out, metric=flags["metric"])
    write_manifest(manifest, _manifest_record("plot", flags, [out.name]))
    print(f"wrote {out}")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _add_common(parser: argparse.ArgumentParser, *names: str) -> None:
    spec = {
        "config": (str, "JSON file of default flag values (explicit flags win)"),
        "out": (str, "output file (.csv/.json/.svg) or directory"),
        "seed": (int, "global random seed"),
    }
    for name in names:
        typ, help_text = spec[name]
        parser.add_argument(f"--{name}", type=typ, default=argparse.SUPPRESS, help=help_text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="marginscope",
        description="Randomness diagnostics and failure bounds for quantum classifiers",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("haar-moments", help="exact Haar reference moments for an observable")
    p.add_argument("--observable", choices=("oz", "zs", "projector"), default=argparse.SUPPRESS)
    p.add_argument("--n", type=int, default=argparse.SUPPRESS)
    p.add_argument("--rank", type=int, default=argparse.SUPPRESS)
    p.add_argument("--t-max", dest="t_max", type=int, default=argparse.SUPPRESS)
    p.add_argument("--a", type=float, default=argparse.SUPPRESS)
    _add_common(p, "config", "out")

    p = sub.add_parser("toy", help="permuted-observable anti-randomness experiment")
    p.add_argument("--n", type=int, default=argparse.SUPPRESS)
    p.add_argument("--samples", type=int, default=argparse.SUPPRESS)
    p.add_argument("--t-max", dest="t_max", type=int, default=argparse.SUPPRESS)
    p.add_argument("--perms", type=str, default=argparse.SUPPRESS)
    p.add_argument("--perm-samples", dest="perm_samples", type=int, default=argparse.SUPPRESS)
    p.add_argument("--epsilon", type=float, default=argparse.SUPPRESS)
    p.add_argument("--bootstrap", type=int, default=argparse.SUPPRESS)
    _add_common(p, "config", "out", "seed")

    p = sub.add_parser("dlp", help="exhaustive discrete-log margin report")
    p.add_argument("--p", type=int, default=argparse.SUPPRESS)
    p.add_argument("--g", type=str, default=argparse.SUPPRESS)
    p.add_argument("--k-exp", dest="k_exp", type=int, default=argparse.SUPPRESS)
    p.add_argument("--s", type=int, default=argparse.SUPPRESS)
    p.add_argument("--copies", type=int, default=argparse.SUPPRESS)
    p.add_argument("--delta", type=float, default=argparse.SUPPRESS)
    p.add_argument("--trials", type=int, default=argparse.SUPPRESS)
    p.add_argument("--prime-cap", dest="prime_cap", type=int, default=argparse.SUPPRESS)
    _add_common(p, "config", "out", "seed")

    p = sub.add_parser("dataset", help="synthetic dataset generation")
    dsub = p.add_subparsers(dest="subcommand")
    pg = dsub.add_parser("gen", help="generate the labeled train/test splits")
    pg.add_argument("--grid", type=int, default=argparse.SUPPRESS)
    pg.add_argument("--test", type=int, default=argparse.SUPPRESS)
    _add_common(pg, "config", "out", "seed")

    p = sub.add_parser("train", help="train one variational classifier")
    p.add_argument("--model", choices=("feature-brick", "feature-nonbrick", "reupload"),
                   default=argparse.SUPPRESS)
    p.add_argument("--n", type=int, default=argparse.SUPPRESS)
    p.add_argument("--layers", type=int, default=argparse.SUPPRESS)
    p.add_argument("--data", type=str, default=argparse.SUPPRESS)
    p.add_argument("--iters", type=int, default=argparse.SUPPRESS)
    p.add_argument("--step", type=float, default=argparse.SUPPRESS)
    p.add_argument("--entangler", choices=("ring", "chain", "none"), default=argparse.SUPPRESS)
    _add_common(p, "config", "out", "seed")

    p = sub.add_parser("sweep", help="margin-moment sweep over models, sizes and depths")
    p.add_argument("--model", type=str, default=argparse.SUPPRESS)
    p.add_argument("--n-list", dest="n_list", type=str, default=argparse.SUPPRESS)
    p.add_argument("--layer-list", dest="layer_list", type=str, default=argparse.SUPPRESS)
    p.add_argument("--repeats", type=int, default=argparse.SUPPRESS)
    p.add_argument("--regimes", type=str, default=argparse.SUPPRESS)
    p.add_argument("--data", type=str, default=argparse.SUPPRESS)
    p.add_argument("--iters", type=int, default=argparse.SUPPRESS)
    p.add_argument("--step", type=float, default=argparse.SUPPRESS)
    p.add_argument("--entangler", choices=("ring", "chain", "none"), default=argparse.SUPPRESS)
    p.add_argument("--bootstrap", type=int, default=argparse.SUPPRESS)
    _add_common(p, "config", "out", "seed")

    p = sub.add_parser("margin-report", help="failure bounds and empirical rates for margins")
    p.add_argument("--samples", type=str, default=argparse.SUPPRESS)
    p.add_argument("--b", type=float, default=argparse.SUPPRESS)
    p.add_argument("--M", type=int, default=argparse.SUPPRESS)
    p.add_argument("--delta", type=float, default=argparse.SUPPRESS)
    p.add_argument("--t-max", dest="t_max", type=int, default=argparse.SUPPRESS)
    p.add_argument("--shot-trials", dest="shot_trials", type=int, default=argparse.SUPPRESS)
    _add_common(p, "config", "out", "seed")

    p = sub.add_parser("plot", help="render an experiment CSV as an SVG line plot")
    p.add_argument("--csv", type=str, default=argparse.SUPPRESS)
    p.add_argument("--kind", choices=("fig3", "sweep", "moments"), default=argparse.SUPPRESS)
    p.add_argument("--metric", choices=("mu1", "var"), default=argparse.SUPPRESS)
    _add_common(p, "config", "out")

    return parser


_COMMANDS = {
    "haar-moments": _cmd_haar_moments,
    "toy": _cmd_toy,
    "dlp": _cmd_dlp,
    "dataset": _cmd_dataset,
    "train": _cmd_train,
    "sweep": _cmd_sweep,
    "margin-report": _cmd_margin_report,
    "plot": _cmd_plot,
}


def run(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(list(argv))
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if ns.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    handler = _COMMANDS[ns.command]
    try:
        return handler(ns)
    except ResourceCapError as exc:
        print(f"{exc.module}: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InvalidInputError, InfeasibleError) as exc:
        print(f"{exc.module}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MarginScopeError as exc:
        print(f"{exc.module}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except FileNotFoundError as exc:
        print(f"cli: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - single-line diagnostic contract
        print(f"internal ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
