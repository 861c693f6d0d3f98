"""Command-line interface.

Subcommands: classify, distance, volume, spectrum, compare, bochner,
catalog, report.  Models are selected by catalog name or with @path to a
JSON file.  Exit codes: 0 success (including checks that fail as expected),
2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import checks as checks_mod
from .classify import (alexandrov_classify, catalog, catalog_verdicts,
                       classify as classify_model)
from .montecarlo import sample_points, total_volume_mc
from .report import CheckReport, NumericalError, ResolutionError
from .spaces import StratifiedModel, model_from_dict
from .spectral import build_graph, spectrum

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(ValueError):
    pass


def resolve_model(ref: str) -> StratifiedModel:
    if ref.startswith("@"):
        path = ref[1:]
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return model_from_dict(json.load(fh))
        except FileNotFoundError as exc:
            raise ConfigError(f"model file not found: {path}") from exc
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise ConfigError(f"invalid model file {path}: {exc}") from exc
    for entry in catalog():
        if entry.name == ref:
            return entry.model
    raise ConfigError(f"unknown model {ref!r}; use a catalog name or @file")


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(payload, fmt: str, out: str = None):
    if fmt == "json":
        text = json.dumps(payload, indent=2, sort_keys=True,
                          default=_json_default) + "\n"
    elif fmt == "csv":
        text = _to_csv(payload)
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    if out:
        _atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, bool):
        return obj
    raise TypeError(f"not serializable: {type(obj)}")


def _to_csv(payload) -> str:
    rows = payload["rows"] if isinstance(payload, dict) and "rows" in payload \
        else payload
    if not isinstance(rows, list) or not rows:
        raise ConfigError("csv output needs a nonempty row list")
    cols = sorted({k for row in rows for k in row})
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(_csv_cell(row.get(c, "")) for c in cols))
    return "\n".join(lines) + "\n"


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True).replace(",", ";")
    return str(v)


def _report_row(report: CheckReport, model: StratifiedModel,
                seed) -> dict:
    return {
        "check": report.name,
        "model": model.model_hash(),
        "seed": report.seed if report.seed is not None else seed,
        "tolerance": report.tolerance,
        "margin": report.margin,
        "passed": report.passed,
        "n_samples": report.n_samples,
    }


# ---------------------------------------------------------------------------
# Subcommand handlers


def cmd_classify(args) -> int:
    model = resolve_model(args.model)
    verdict = classify_model(model, args.K, args.N,
                             estimate_missing=args.estimate)
    payload = {"model": model.to_dict(), "hash": model.model_hash(),
               "verdict": verdict.to_dict()}
    if args.sectional is not None:
        payload["cbb"] = alexandrov_classify(model, args.sectional).to_dict()
    _emit(payload, args.format, args.out)
    return EXIT_OK


def cmd_distance(args) -> int:
    model = resolve_model(args.model)
    p = _parse_point(model, args.p)
    q = _parse_point(model, args.q)
    payload = {"model": model.model_hash(),
               "distance": float(model.distance(p, q))}
    _emit(payload, args.format, args.out)
    return EXIT_OK


def _parse_point(model: StratifiedModel, text: str):
    try:
        return model.check_point(np.asarray(json.loads(text), dtype=float))
    except json.JSONDecodeError:
        pass
    try:
        return model.named_point(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_volume(args) -> int:
    model = resolve_model(args.model)
    est, se = total_volume_mc(model, args.samples, args.seed)
    payload = {"model": model.model_hash(),
               "analytic": float(model.volume()),
               "mc_estimate": est, "mc_stderr": se,
               "samples": args.samples, "seed": args.seed}
    _emit(payload, args.format, args.out)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    model = resolve_model(args.model)
    cloud = sample_points(model, args.samples, args.seed)
    graph = build_graph(cloud, args.eps)
    data = spectrum(graph, k=args.count)
    payload = {"model": model.model_hash(), "eps": args.eps,
               "seed": args.seed, "samples": args.samples,
               "eigenvalues": [float(v) for v in data.eigenvalues],
               "fidelity_max": data.fidelity_max}
    _emit(payload, args.format, args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    model = resolve_model(args.model)
    config = {"seed": args.seed, "samples": args.samples, "eps": args.eps,
              "checks": [args.check]}
    reports = checks_mod.run_checks(model, config)
    rows = [_report_row(r, model, args.seed) for r in reports]
    _emit({"rows": rows}, args.format, args.out)
    return EXIT_OK


def cmd_bochner(args) -> int:
    model = resolve_model(args.model)
    cloud = sample_points(model, args.samples, args.seed)
    graph = build_graph(cloud, args.eps)
    data = spectrum(graph, k=max(args.index + 1, 2))
    K = args.K if args.K is not None else model.ricci_lower_bound()
    if K is None:
        raise ConfigError("model has no analytic Ricci bound; pass --K")
    N = args.N if args.N is not None else model.dim
    u = data.eigenfunctions[:, args.index]
    report = checks_mod.bochner_check(data, u, None, K=K, N=N,
                                      label=f"eig{args.index}")
    _emit({"rows": [_report_row(report, model, args.seed)],
           "diagnostics": report.diagnostics}, args.format, args.out)
    return EXIT_OK


def cmd_catalog(args) -> int:
    rows = []
    for entry, v_rcd, v_cbb in catalog_verdicts():
        rows.append({
            "name": entry.name,
            "model": entry.model.model_hash(),
            "family": entry.model.family,
            "K": entry.K, "N": entry.N,
            "expected_rcd": entry.expect_rcd,
            "computed_rcd": v_rcd.holds,
            "expected_cbb": entry.expect_cbb,
            "computed_cbb": v_cbb.holds,
            "notes": entry.notes,
        })
    _emit({"rows": rows}, args.format, args.out)
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {args.config}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid config JSON: {exc}") from exc
    if "seed" not in config:
        raise ConfigError("config must supply a seed")
    seed = int(config["seed"])
    base = {"seed": seed,
            "samples": int(config.get("samples", 4000)),
            "eps": float(config.get("eps", 0.12))}
    rows = []
    model_refs = config.get("models")
    if model_refs is None:
        raise ConfigError("config must list models")
    for ref in model_refs:
        if isinstance(ref, dict):
            model = model_from_dict(ref)
            name = model.model_hash()
        else:
            model = resolve_model(str(ref))
            name = str(ref)
        local = dict(base)
        if isinstance(config.get("checks"), list):
            local["checks"] = config["checks"]
        reports = checks_mod.run_checks(model, local)
        for r in reports:
            row = _report_row(r, model, seed)
            row["name"] = name
            rows.append(row)
    payload = {"schema": 1, "rows": rows,
               "config": {"seed": seed, "samples": base["samples"],
                          "eps": base["eps"]}}
    _emit(payload, args.format, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stratlab",
        description="Numerical verification toolkit for model singular spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, eps=False, samples=False, seed=False):
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="output file (atomic write)")
        if seed:
            p.add_argument("--seed", type=int, required=True)
        if samples:
            p.add_argument("--samples", type=int, default=20000)
        if eps:
            p.add_argument("--eps", type=float, default=0.1)

    p = sub.add_parser("classify", help="curvature classification")
    p.add_argument("--model", required=True)
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--N", type=float, required=True)
    p.add_argument("--sectional", type=float, default=None)
    p.add_argument("--estimate", action="store_true",
                   help="attach a numeric regular-set estimate if unknown")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("distance", help="exact model distance")
    p.add_argument("--model", required=True)
    p.add_argument("--p", required=True, help="JSON coordinates or a name")
    p.add_argument("--q", required=True)
    common(p)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("volume", help="analytic and Monte Carlo volume")
    p.add_argument("--model", required=True)
    common(p, samples=True, seed=True)
    p.set_defaults(func=cmd_volume)

    p = sub.add_parser("spectrum", help="graph Laplacian eigenvalues")
    p.add_argument("--model", required=True)
    p.add_argument("--count", type=int, default=8)
    common(p, eps=True, samples=True, seed=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("compare", help="run one comparison check")
    p.add_argument("--model", required=True)
    p.add_argument("--check", required=True)
    common(p, eps=True, samples=True, seed=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bochner", help="weak Bochner margin for an eigenfunction")
    p.add_argument("--model", required=True)
    p.add_argument("--index", type=int, default=1)
    p.add_argument("--K", type=float, default=None)
    p.add_argument("--N", type=float, default=None)
    common(p, eps=True, samples=True, seed=True)
    p.set_defaults(func=cmd_bochner)

    p = sub.add_parser("catalog", help="catalog with expected verdicts")
    common(p)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("report", help="full check report from a config file")
    p.add_argument("--config", required=True)
    common(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, ResolutionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
