"""Batch front end.

``substatic run <config>`` executes one scenario (or a list under
``"scenarios"``); ``substatic suite <catalogue>`` runs the acceptance matrix
over every model of a catalogue.  Reports go to ``<out>/<scenario>.summary.json``
and ``<out>/<scenario>.<table>.csv``.  Exit status: 0 all checks passed, 1 some
check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np

from . import catalogue as cat
from .elliptic import conformal_hessian_residual, hopf_check, solve_torsion_radial, write_torsion_csv
from .errors import DomainError, GraphError, MeanConvexityError, ModelError
from .flow import equality_flow_diagnostics, monotonicity_report, q_prime_residual, run_flow, write_trace_csv
from .functionals import (
    hk_deficit,
    hk_scale,
    horizon_constant_closed,
    horizon_constant_integral,
)
from .hypersurface import geometry_at, perturbed_graph, sphere_graph
from .warped import (
    WarpedProductModel,
    eta_extract,
    fit_desitter_schwarzschild,
    montiel_potential_residual,
    substatic_check,
    substatic_radial_gap,
    substatic_tangential_eigenvalue,
)

log = logging.getLogger("substatic")

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
TASKS = ("substatic_check", "hk_deficit", "flow", "torsion", "classification")

_GRAPH = {
    "type": "object",
    "properties": {
        "s_hat": {"type": "number", "exclusiveMinimum": 0},
        "perturbation": {
            "type": "object",
            "patternProperties": {"^[0-9]+$": {"type": "number"}},
            "additionalProperties": False,
        },
    },
    "required": ["s_hat"],
    "additionalProperties": False,
}

SCENARIO_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
        "model": {"anyOf": [{"type": "string"}, {"type": "object"}]},
        "catalogue": {"type": "string"},
        "task": {"enum": list(TASKS)},
        "s_hat": {"type": "number", "exclusiveMinimum": 0},
        "initial_graph": _GRAPH,
        "nodes": {"type": "integer", "minimum": 9, "maximum": 1025},
        "t_end": {"type": "number", "exclusiveMinimum": 0},
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "horizon_stop": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "grid_size": {"type": "integer", "minimum": 4, "maximum": 256},
        "grid": {"type": "integer", "minimum": 10, "maximum": 100000},
    },
    "required": ["model", "task"],
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "anyOf": [
        SCENARIO_SCHEMA,
        {
            "type": "object",
            "properties": {"scenarios": {"type": "array", "items": SCENARIO_SCHEMA, "minItems": 1},
                           "catalogue": {"type": "string"}},
            "required": ["scenarios"],
            "additionalProperties": False,
        },
    ]
}


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12e}"
    return str(v)


def write_table(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else repr(v)
    return obj


def write_summary(path: Path, summary: dict) -> None:
    path.write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")


def _validate(doc, schema, where: str) -> None:
    errs = sorted(jsonschema.Draft202012Validator(schema).iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errs:
        e = jsonschema.exceptions.best_match(errs)
        loc = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise InputError(f"{where}: {loc}: {e.message}")


def resolve_model(spec, base: Path | None, catalogue_path: str | None) -> WarpedProductModel:
    models = cat.builtin_models()
    if catalogue_path:
        path = Path(catalogue_path)
        if base is not None and not path.is_absolute():
            path = base / path
        try:
            models.update(cat.load_catalogue(path))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"catalogue {path}: {exc}") from exc
    if isinstance(spec, dict):
        return cat.model_from_record(spec)
    if spec not in models:
        raise InputError(f"model: unknown model {spec!r} (known: {', '.join(sorted(models))})")
    return models[spec]


def _graph_from(model, cfg: dict):
    g = cfg.get("initial_graph")
    nodes = cfg.get("nodes", 65)
    if g is None:
        if "s_hat" not in cfg:
            raise InputError("initial_graph: required (or give s_hat)")
        return sphere_graph(model, cfg["s_hat"], nodes), cfg["s_hat"]
    pert = {int(k): float(v) for k, v in g.get("perturbation", {}).items()}
    if pert:
        return perturbed_graph(model, g["s_hat"], pert, nodes), g["s_hat"]
    return sphere_graph(model, g["s_hat"], nodes), g["s_hat"]


# ---------------------------------------------------------------------------
# tasks; each returns (passed, summary, {table: (header, rows)})
# ---------------------------------------------------------------------------


def task_substatic(model, cfg, tol_scale, seed):
    rep = substatic_check(model, grid=cfg.get("grid"), tol_scale=tol_scale)
    lo = model.s_lo if model.has_horizon else 0.05 * model.s_max
    s = np.linspace(lo, model.s_max, cfg.get("grid", 400) + 1)[1:]
    eta = eta_extract(model)
    e0, e1, e2 = eta.derivatives(s ** (-model.n))
    rows = zip(s, substatic_radial_gap(model, s), substatic_tangential_eigenvalue(model, s), e0, e1, e2)
    table = (("s", "radial_gap", "tangential_eigenvalue", "eta", "eta_prime", "eta_second"), rows)
    summary = rep.as_dict() | {"model": model.describe()}
    return rep.substatic, summary, {"profile": table}


def task_hk(model, cfg, tol_scale, seed):
    graph, s_hat = _graph_from(model, cfg)
    rep = hk_deficit(model, graph)
    scale = hk_scale(model, s_hat)
    sphere = graph.is_constant()
    tol = 1e-9 * tol_scale * scale
    passed = abs(rep.deficit) < tol if sphere else rep.deficit > -tol
    geo = geometry_at(model, graph.coefficients, graph.theta)
    table = (("theta", "u", "H", "umbilicity", "f"), zip(graph.theta, graph.u, geo.H, geo.traceless_defect, geo.f))
    summary = rep.to_json() | {"scale": scale, "sphere": sphere, "tolerance": tol}
    return passed, summary, {"graph": table}


def task_flow(model, cfg, tol_scale, seed):
    graph, _ = _graph_from(model, cfg)
    trace = run_flow(model, graph, cfg.get("t_end", 1.0), cfg.get("dt", 1e-3), horizon_stop=cfg.get("horizon_stop", 1e-3))
    mono = monotonicity_report(trace, tol=1e-10 * tol_scale)
    eq = equality_flow_diagnostics(trace)
    res = q_prime_residual(trace) if len(trace) >= 3 else float("nan")
    passed = not mono["violation"] and (not np.isfinite(res) or res < (1e-6 if graph.is_constant() else 1e-4) * tol_scale)
    summary = {"model": model.name, "states": len(trace), "q_prime_residual": res} | mono | eq
    return passed, summary, {"trace": trace}


def task_torsion(model, cfg, tol_scale, seed):
    s_hat = cfg.get("s_hat")
    if s_hat is None:
        raise InputError("s_hat: required for task torsion")
    sol = solve_torsion_radial(model, s_hat, cfg.get("grid_size", 32))
    conf = conformal_hessian_residual(model, sol)
    interior_positive = bool(np.all(sol.u[1:-1] > 0))
    hopf = hopf_check(sol)
    passed = sol.residual < 1e-8 * tol_scale and conf < 1e-6 * tol_scale and hopf and interior_positive
    summary = {
        "model": model.name,
        "s_hat": s_hat,
        "c_n": sol.c_n,
        "residual": sol.residual,
        "conformal_hessian_residual": conf,
        "hopf": hopf,
        "interior_positive": interior_positive,
        "du_ds_horizon": float(sol.du_ds[0]),
        "horizon_slope": sol.horizon_slope,
    }
    return passed, summary, {"torsion": sol}


def task_classification(model, cfg, tol_scale, seed):
    eta = eta_extract(model)
    lam, m, resid = fit_desitter_schwarzschild(eta)
    t = eta.grid(cfg.get("grid", 401))
    e0, e1, e2 = eta.derivatives(t)
    rep = substatic_check(model, tol_scale=tol_scale)
    convex = bool(np.min(e2) >= -rep.tol)
    summary = {
        "model": model.name,
        "lambda": lam,
        "m": m,
        "fit_residual": resid,
        "eta_convex": convex,
        "substatic": rep.substatic,
        "agree": convex == rep.substatic,
    }
    if cat.is_closed_form(model):
        summary["lambda_error"] = abs(lam - model.potential.lam)
        summary["m_error"] = abs(m - model.potential.m)
    passed = summary["agree"]
    return passed, summary, {"eta": (("t", "eta", "eta_prime", "eta_second"), zip(t, e0, e1, e2))}


TASK_FUNCS = {
    "substatic_check": task_substatic,
    "hk_deficit": task_hk,
    "flow": task_flow,
    "torsion": task_torsion,
    "classification": task_classification,
}


def _emit_tables(model, name: str, out: Path, tables: dict) -> list[str]:
    files = []
    for key, val in tables.items():
        path = out / f"{name}.{key}.csv"
        if key == "trace":
            write_trace_csv(val, path)
        elif key == "torsion":
            write_torsion_csv(model, val, path)
        else:
            write_table(path, *val)
        files.append(path.name)
    return files


def execute_scenario(cfg: dict, out: Path, base: Path | None = None, seed: int = 42, tol_scale: float = 1.0,
                 catalogue_path: str | None = None) -> int:
    """Run one validated scenario and write its reports; returns the exit code."""
    name = cfg.get("name") or f"{cfg['model'] if isinstance(cfg['model'], str) else cfg['model'].get('name', 'model')}_{cfg['task']}"
    try:
        model = resolve_model(cfg["model"], base, cfg.get("catalogue", catalogue_path))
        passed, summary, tables = TASK_FUNCS[cfg["task"]](model, cfg, tol_scale, seed)
    except (InputError, ModelError, DomainError) as exc:
        log.error("%s: input error: %s", name, exc)
        write_summary(out / f"{name}.summary.json", {"scenario": name, "status": "input_error", "error": str(exc)})
        return EXIT_INPUT
    except (GraphError, MeanConvexityError, np.linalg.LinAlgError) as exc:
        log.error("%s: numerical failure: %s", name, exc)
        write_summary(out / f"{name}.summary.json", {"scenario": name, "status": "fail", "error": str(exc)})
        return EXIT_FAIL
    files = _emit_tables(model, name, out, tables)
    summary = {"scenario": name, "task": cfg["task"], "passed": bool(passed), "seed": seed,
               "tol_scale": tol_scale, "tables": files, "result": summary}
    write_summary(out / f"{name}.summary.json", summary)
    log.info("%s: %s", name, "pass" if passed else "FAIL")
    return EXIT_PASS if passed else EXIT_FAIL


def _run_one(args):
    cfg, out, base, seed, tol_scale, catalogue_path = args
    return execute_scenario(cfg, Path(out), base, seed, tol_scale, catalogue_path)


def _map(func, jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [func(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(func, jobs))


def run_scenario(config_path, out="out", workers: int = 1, seed: int = 42, tol_scale: float = 1.0) -> int:
    """Run the scenario(s) of a config file; returns the exit code."""
    out = Path(out)
    path = Path(config_path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        log.error("cannot read config %s: %s", path, exc)
        return EXIT_INPUT
    try:
        if isinstance(doc, dict) and "scenarios" in doc:
            _validate(doc, CONFIG_SCHEMA["anyOf"][1], str(path))
        else:
            _validate(doc, SCENARIO_SCHEMA, str(path))
    except InputError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    scenarios = doc["scenarios"] if "scenarios" in doc else [doc]
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(sc, str(out), path.parent, seed, tol_scale, doc.get("catalogue") if "scenarios" in doc else None)
            for sc in scenarios]
    codes = _map(_run_one, jobs, workers)
    return max(codes)


# ---------------------------------------------------------------------------
# suite
# ---------------------------------------------------------------------------


def _row(model, check, passed, value, note=""):
    return {"model": model, "check": check, "status": "pass" if passed else "fail", "value": value, "note": note}


def suite_for_model(args) -> list[dict]:
    """Acceptance rows for one model; later rows are skipped for non-substatic models."""
    model, seed, tol_scale = args
    name = model.name
    rows = []
    try:
        rep = substatic_check(model, tol_scale=tol_scale)
    except (ModelError, DomainError) as exc:
        return [_row(name, "substatic", False, float("nan"), f"error: {exc}")]
    rows.append(_row(name, "substatic", rep.substatic, rep.tangential_gap_min, f"H4={rep.H4}"))
    if not rep.substatic:
        for check in ("c_n", "sphere_equality", "perturbed_deficit", "torsion", "sphere_flow", "classification"):
            rows.append({"model": name, "check": check, "status": "skipped", "value": float("nan"),
                         "note": "model is not substatic"})
        return rows
    lo, hi = model.s_lo, model.s_max
    s_hats = [lo + (hi - lo) * r for r in (0.35, 0.6, 0.85)]
    # horizon constant
    if model.has_horizon:
        a, b = horizon_constant_closed(model), horizon_constant_integral(model)
        rows.append(_row(name, "c_n", abs(a - b) < 1e-10 * tol_scale * max(1.0, abs(a)), abs(a - b)))
    else:
        rows.append({"model": name, "check": "c_n", "status": "skipped", "value": 0.0, "note": "no horizon"})
    # sphere equality
    worst = max(abs(hk_deficit(model, sphere_graph(model, s)).deficit) / hk_scale(model, s) for s in s_hats)
    rows.append(_row(name, "sphere_equality", worst < 1e-9 * tol_scale, worst))
    # perturbed deficits
    if model.c_cross == 1.0:
        rng = np.random.default_rng(seed)
        s_mid = s_hats[1]
        worst, tried = np.inf, 0
        while tried < 10:
            k = int(rng.integers(1, 5))
            amp = float(rng.uniform(0.02, 0.2)) * min(1.0, (s_mid - lo) / 2)
            try:
                d = hk_deficit(model, perturbed_graph(model, s_mid, {k: amp})).deficit
            except (MeanConvexityError, DomainError, GraphError):
                continue
            worst = min(worst, d / hk_scale(model, s_mid))
            tried += 1
        rows.append(_row(name, "perturbed_deficit", worst > 0, worst, f"seed={seed}"))
    else:
        rows.append({"model": name, "check": "perturbed_deficit", "status": "skipped", "value": float("nan"),
                     "note": "non-round cross-section"})
    # torsion
    s_t = s_hats[1]
    sol = solve_torsion_radial(model, s_t)
    conf = conformal_hessian_residual(model, sol)
    ok = sol.residual < 1e-8 * tol_scale and conf < 1e-6 * tol_scale and hopf_check(sol)
    rows.append(_row(name, "torsion", ok, max(sol.residual, conf)))
    # short sphere flow
    try:
        # time step from the radial speed sigma F(s)/s at the start
        s_f = s_hats[2]
        rate = model.potential_scale * float(model.f2(s_f)[0]) / s_f
        dt = 1e-3 / max(1.0, rate)
        tr = run_flow(model, sphere_graph(model, s_f, 17), 300 * dt, dt)
        res = q_prime_residual(tr)
        eq = equality_flow_diagnostics(tr)
        ok = res < 1e-6 * tol_scale and eq["umbilicity_max"] < 1e-9 and eq["substatic_nu_max"] < 1e-9
        rows.append(_row(name, "sphere_flow", ok, res))
    except (GraphError, MeanConvexityError, DomainError) as exc:
        rows.append(_row(name, "sphere_flow", False, float("nan"), str(exc)))
    # classification and pointwise identities
    lam, m, resid = fit_desitter_schwarzschild(eta_extract(model))
    mont = montiel_potential_residual(model)
    if cat.is_closed_form(model):
        err = max(abs(lam - model.potential.lam), abs(m - model.potential.m))
        rows.append(_row(name, "classification", err < 1e-10 and mont < 1e-8, err))
    else:
        rows.append(_row(name, "classification", mont < 1e-8, resid, "affine-fit residual (tabulated)"))
    return rows


def run_suite(catalogue_path, out="out", workers: int = 1, seed: int = 42, tol_scale: float = 1.0) -> int:
    """Acceptance matrix over every model of a catalogue; partial failures do not abort."""
    out = Path(out)
    try:
        models = cat.load_catalogue(catalogue_path)
    except (OSError, json.JSONDecodeError, ModelError, KeyError, TypeError) as exc:
        log.error("cannot load catalogue %s: %s", catalogue_path, exc)
        return EXIT_INPUT
    if not models:
        log.error("catalogue %s is empty", catalogue_path)
        return EXIT_INPUT
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(m, seed, tol_scale) for m in models.values()]
    rows = [r for chunk in _map(suite_for_model, jobs, workers) for r in chunk]
    header = ("model", "check", "status", "value", "note")
    write_table(out / "suite.results.csv", header, ([r[h] for h in header] for r in rows))
    failed = [r for r in rows if r["status"] == "fail"]
    write_summary(out / "suite.summary.json", {
        "catalogue": str(catalogue_path),
        "seed": seed,
        "tol_scale": tol_scale,
        "models": list(models),
        "passed": sum(r["status"] == "pass" for r in rows),
        "failed": len(failed),
        "skipped": sum(r["status"] == "skipped" for r in rows),
        "failures": [f"{r['model']}:{r['check']}" for r in failed],
        "tables": ["suite.results.csv"],
    })
    for r in rows:
        print(f"{r['model']:>12s}  {r['check']:<18s} {r['status']}")
    return EXIT_FAIL if failed else EXIT_PASS


# ---------------------------------------------------------------------------


def _common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    def d(v):
        return argparse.SUPPRESS if suppress else v

    parser.add_argument("--out", default=d("out"), help="output directory (default: out)")
    parser.add_argument("--workers", type=int, default=d(1), help="parallel scenario/model workers")
    parser.add_argument("--seed", type=int, default=d(42), help="seed for randomized sweeps (default 42)")
    parser.add_argument("--tol-scale", type=float, default=d(1.0), help="multiply every tolerance")
    parser.add_argument("-v", "--verbose", action="store_true", default=d(False))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="substatic", description="Substatic warped-product checks.")
    _common(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario config")
    r.add_argument("config")
    _common(r, suppress=True)
    s = sub.add_parser("suite", help="run the acceptance matrix over a model catalogue")
    s.add_argument("catalogue")
    _common(s, suppress=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.workers < 1 or args.tol_scale <= 0:
        log.error("--workers must be >= 1 and --tol-scale > 0")
        return EXIT_INPUT
    out = Path(args.out)
    if args.command == "run":
        return run_scenario(args.config, out, args.workers, args.seed, args.tol_scale)
    return run_suite(args.catalogue, out, args.workers, args.seed, args.tol_scale)


if __name__ == "__main__":
    sys.exit(main())
