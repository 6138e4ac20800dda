"""Command-line front end.

Every command prints a JSON document to stdout and writes its files under
``<out>/<scenario>/<command>/``.  Exit status: 0 success, 2 degenerate or
inadmissible instance, 1 any other error.
"""
from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import attractor, fixedpoints as fpm
from .classify import classify, heteroclinic_theta
from .errors import Degenerate, Inadmissible, NonHyperbolic, SeasonLVError
from .flow import DEFAULT_CONFIG, IntegratorConfig
from .model import BUNDLED, DEFAULT_BOX, Scenario, bundled_scenario, load_scenario, sample_params
from .oracle import LGMap, lg_signature

EXIT_OK, EXIT_ERROR, EXIT_DEGENERATE = 0, 1, 2


class CliError(Exception):
    pass


def resolve_scenario(spec: str) -> Scenario:
    """A scenario file path, or the name of a bundled scenario."""
    path = Path(spec)
    if path.exists():
        return load_scenario(path)
    if spec in BUNDLED:
        return bundled_scenario(spec)
    raise CliError(f"no scenario file {spec!r} (bundled: {', '.join(BUNDLED)})")


def integrator(args, scen: Scenario | None = None) -> IntegratorConfig:
    rel = args.rel_tol or (scen and scen.rel_tol) or DEFAULT_CONFIG.rel_tol
    abs_ = args.abs_tol or (scen and scen.abs_tol) or DEFAULT_CONFIG.abs_tol
    return IntegratorConfig(rel_tol=float(rel), abs_tol=float(abs_))


def parse_x0(text: str) -> tuple:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise CliError(f"--x0 expects three comma-separated numbers, got {text!r}") from exc
    if len(vals) != 3:
        raise CliError(f"--x0 expects three numbers, got {len(vals)}")
    return vals


def out_dir(args, name: str, command: str) -> Path:
    d = Path(args.out) / name / command
    if d.exists() and any(d.iterdir()) and not args.force:
        raise CliError(f"{d} exists and is not empty (use --force to overwrite)")
    d.mkdir(parents=True, exist_ok=True)
    return d


def emit(doc: dict, directory: Path, filename: str = "report.json"):
    attractor.dump_json(doc, directory / filename)
    print(attractor.dump_json(doc))


# -- commands -----------------------------------------------------------------

def cmd_classify(args) -> int:
    scen = resolve_scenario(args.scenario)
    d = out_dir(args, scen.name, "classify")
    doc = {"scenario": scen.name}
    status = EXIT_OK
    try:
        c = classify(scen.params)
        doc.update(c.to_dict())
        if c.class_id.id == 27:
            doc["theta"] = heteroclinic_theta(scen.params).to_dict()
    except Degenerate as exc:
        doc.update(class_id=None, degenerate_flags=exc.reasons)
        status = EXIT_DEGENERATE
    except Inadmissible as exc:
        doc.update(class_id=None, inadmissible=str(exc))
        status = EXIT_DEGENERATE
    if args.oracle:
        try:
            lg = lg_signature(LGMap.from_params(scen.params))
            doc["oracle"] = lg.to_dict()
            if doc.get("class_id") is not None:
                doc["oracle_agrees"] = lg.code == c.signature.code
        except Degenerate as exc:
            doc["oracle"] = {"degenerate_flags": exc.reasons}
    emit(doc, d)
    return status


def _index_doc(params, inv, config, rng):
    try:
        return fpm.verify_index_formula(params, config, inv=inv, rng=rng).to_dict(), EXIT_OK
    except Degenerate as exc:
        return {"degenerate": exc.reasons}, EXIT_DEGENERATE


def cmd_fixed_points(args) -> int:
    scen = resolve_scenario(args.scenario)
    d = out_dir(args, scen.name, "fixed-points")
    config = integrator(args, scen)
    rng = np.random.default_rng(args.seed)
    try:
        inv = fpm.inventory(scen.params, config, args.resolution, rng)
    except Inadmissible as exc:
        emit({"scenario": scen.name, "inadmissible": str(exc)}, d)
        return EXIT_DEGENERATE
    index, status = _index_doc(scen.params, inv, config, rng)
    doc = {"scenario": scen.name, **inv.to_dict(), "index_formula": index}
    attractor.dump_json([fp.to_dict() for fp in inv.all()], d / "fixed_points.json")
    emit(doc, d)
    return status


def cmd_verify_index(args) -> int:
    scen = resolve_scenario(args.scenario)
    d = out_dir(args, scen.name, "verify-index")
    config = integrator(args, scen)
    rng = np.random.default_rng(args.seed)
    try:
        rep = fpm.verify_index_formula(scen.params, config, args.resolution, rng=rng)
    except (Degenerate, Inadmissible) as exc:
        emit({"scenario": scen.name, "degenerate": str(exc)}, d)
        return EXIT_DEGENERATE
    emit({"scenario": scen.name, **rep.to_dict()}, d)
    return EXIT_OK if rep.holds else EXIT_ERROR


def cmd_orbit(args) -> int:
    scen = resolve_scenario(args.scenario)
    x0 = parse_x0(args.x0) if args.x0 else scen.x0
    if x0 is None:
        raise CliError("no initial value: pass --x0 or add x0 to the scenario")
    d = out_dir(args, scen.name, "orbit")
    config = integrator(args, scen)
    known = []
    if np.all(scen.params.r > 0):
        known = fpm.inventory(scen.params, config, rng=np.random.default_rng(args.seed)).all()
    trace, rep = attractor.analyze_orbit(scen.params, x0, args.n, args.transient, config, known)
    trace.to_csv(d / "orbit.csv")
    emit({"scenario": scen.name, "x0": list(x0), "n": args.n, "transient": args.transient,
          **rep.to_dict()}, d)
    return EXIT_OK


def cmd_simplex(args) -> int:
    scen = resolve_scenario(args.scenario)
    d = out_dir(args, scen.name, "simplex")
    config = integrator(args, scen)
    try:
        cloud = attractor.simplex_mesh(scen.params, args.resolution, args.iterations, config)
    except Inadmissible as exc:
        emit({"scenario": scen.name, "inadmissible": str(exc)}, d)
        return EXIT_DEGENERATE
    cloud.to_csv(d / "simplex.csv")
    emit({"scenario": scen.name, "resolution": args.resolution, "iterations": args.iterations,
          "points": len(cloud.points), "ordered_pairs": len(attractor.ordered_pairs(cloud.points))}, d)
    return EXIT_OK


def sweep_one(job):
    """Classify one sampled instance and check the index formula (worker task)."""
    n, seed, box, config = job
    rng = np.random.default_rng(seed)
    p = sample_params(rng, box)
    row = {"sample": n, "class_id": None, "degenerate": False, "lhs": None, "holds": None,
           "positive": None}
    try:
        row["class_id"] = classify(p).class_id.id
        inv = fpm.inventory(p, config, rng=rng)
        rep = fpm.verify_index_formula(p, config, inv=inv, rng=rng)
        row.update(lhs=rep.lhs, holds=rep.holds, positive=len(rep.positive))
    except (Degenerate, NonHyperbolic):
        row["degenerate"] = True
    return row, p.to_dict()


def cmd_sweep(args) -> int:
    box = dict(DEFAULT_BOX)
    name = "default-box"
    if args.box:
        with open(args.box) as fh:
            box.update({k: tuple(v) for k, v in json.load(fh).items()})
        name = Path(args.box).stem
    d = out_dir(args, name, "sweep")
    config = integrator(args)
    seeds = np.random.SeedSequence(args.seed).spawn(args.n)
    jobs = [(n, s, box, config) for n, s in enumerate(seeds)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(sweep_one, jobs))
    else:
        results = [sweep_one(j) for j in jobs]
    rows = [r for r, _ in results]
    attractor.dump_json([{"sample": r["sample"], "params": q} for r, q in results],
                        d / "samples.json")
    attractor.write_rows(d / "sweep.csv", ["sample", "class_id", "degenerate", "lhs", "holds", "positive"],
                         ([r["sample"], r["class_id"] or 0, int(r["degenerate"]), r["lhs"] or 0,
                           int(bool(r["holds"])), r["positive"] or 0] for r in rows))
    checked = [r for r in rows if not r["degenerate"]]
    passed = sum(1 for r in checked if r["holds"])
    freq = Counter(r["class_id"] for r in checked)
    emit({
        "samples": len(rows), "degenerate": len(rows) - len(checked),
        "class_frequency": {str(k): freq[k] for k in sorted(freq)},
        "index_formula": {"checked": len(checked), "passed": passed,
                          "pass_rate": passed / len(checked) if checked else None},
        "seed": args.seed,
    }, d, "summary.json")
    return EXIT_OK if passed == len(checked) else EXIT_ERROR


COMMANDS = {
    "classify": cmd_classify,
    "fixed-points": cmd_fixed_points,
    "orbit": cmd_orbit,
    "simplex": cmd_simplex,
    "verify-index": cmd_verify_index,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="seasonlv",
                                 description="Seasonal-succession Lotka-Volterra toolkit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario JSON file or bundled name (class26, ...)")
    common.add_argument("--rel-tol", type=float, default=None)
    common.add_argument("--abs-tol", type=float, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default="out", help="output root (default: out)")
    common.add_argument("--force", action="store_true", help="overwrite existing output")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common])
    p.add_argument("--oracle", action="store_true", help="also print the Leslie-Gower signature")
    for name in ("fixed-points", "verify-index"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--resolution", type=int, default=15, help="seed mesh resolution")
    p = sub.add_parser("orbit", parents=[common])
    p.add_argument("--x0", help="initial value a,b,c")
    p.add_argument("--n", type=int, default=attractor.DEFAULT_WINDOW)
    p.add_argument("--transient", type=int, default=attractor.DEFAULT_TRANSIENT)
    p = sub.add_parser("simplex", parents=[common])
    p.add_argument("--resolution", type=int, default=20)
    p.add_argument("--iterations", type=int, default=200)
    p = sub.add_parser("sweep", parents=[common])
    p.add_argument("--n", type=int, default=100, help="number of samples")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--box", help="JSON file overriding sampling ranges")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command != "sweep" and not args.scenario:
        print("error: --scenario is required", file=sys.stderr)
        return EXIT_ERROR
    try:
        return COMMANDS[args.command](args)
    except (CliError, SeasonLVError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
