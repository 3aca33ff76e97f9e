"""Command-line driver: ``fracgap <subcommand> --config cfg.json``.

Output is plot-ready data only: CSV with a ``#`` header echoing the
resolved config, or JSON carrying the same columns and rows. Repeated runs
of the same config give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .asymptotics_bounds import (
    eigs_box1d_asymptotic,
    eigs_box2d_asymptotic,
    eigs_harmonic1d_asymptotic,
    evaluate_bounds,
    gap_box1d_asymptotic,
    gap_harmonic1d_asymptotic,
    gap_harmonic2d_asymptotic,
    gap_harmonic2d_closed_form,
)
from .classical_fso import KQuadrature, solve_classical_gap
from .config import RunConfig, config_hash, expand_sweep, grid_values, load_config
from .eigenbasis import AnalyticBox, FiniteDifferenceMask
from .errors import ConfigError, ConvergenceError, DomainError, FracGapError, QuadratureError, SolverError
from .geometry import Box, Diameters, Ellipse2D, check_alpha
from .local_fso import LocalOptions, solve_local_gap
from .periodic_fso import PlaneWaveSpec, phase_diagram_sweep, solve_periodic
from .potentials import Quadratic, QuadraticPlusTrig, TrigTerm, Zero
from .wholespace_fso import HarmonicSpec, HermiteSpec, KGridSpec, solve_well, solve_wholespace_gap

__all__ = ["main", "run", "render"]

EXIT_OK, EXIT_SOLVER, EXIT_CONFIG = 0, 2, 3
SUBCOMMANDS = ("solve", "sweep", "asymptotic", "bounds", "well-study", "phase-diagram")
ALLOWED = {
    "solve": ("local", "classical", "wholespace", "periodic", "well"),
    "sweep": ("local", "classical", "wholespace", "periodic", "well"),
    "asymptotic": ("asymptotic",),
    "bounds": ("bounds",),
    "well-study": ("well",),
    "phase-diagram": ("periodic",),
}
THREADS_ENV = "FRACGAP_THREADS"


# ---------------------------------------------------------------- builders

def _domain(d):
    if d["type"] == "box":
        return Box(tuple(d["lengths"]))
    return Ellipse2D(d["a"], d["b"])


def _terms(items):
    return tuple(TrigTerm(t["amplitude"], t["kind"], tuple(t["frequency"])) for t in items)


def _potential(p):
    if p["type"] == "zero":
        return Zero()
    q = Quadratic(tuple(p["coefficients"]), p.get("center"))
    if p["type"] == "quadratic":
        return q
    return QuadraticPlusTrig(q, _terms(p["terms"]))


def _basis(b):
    if b is None:
        return None
    if b["type"] == "analytic":
        return AnalyticBox(tuple(b["modes_per_dim"]))
    return FiniteDifferenceMask(b["h"], b["mode_count"])


def _kq(d):
    k = d.get("kquad")
    return KQuadrature(**k) if k else None


def _harmonic(h):
    if "gammas" in h:
        return HarmonicSpec(tuple(h["gammas"]))
    return HarmonicSpec.from_eta(h["gamma"], h.get("eta", 1.0), h.get("n", 2))


def _check_dim(obj, domain):
    n = getattr(obj, "n", None)
    if n is not None and n != domain.n:
        raise DomainError(f"potential dimension {n} does not match the domain dimension {domain.n}")


def prepare(sub: str, data: dict):
    """Build solver inputs for one point; raises on any invalid value."""
    p = data["problem"]
    a = check_alpha(data["alpha"])
    if p in ("local", "classical"):
        dom = _domain(data["domain"])
        pot = _potential(data["potential"])
        _check_dim(pot, dom)
        if p == "classical" and not isinstance(dom, Box):
            raise DomainError("the classical solver supports boxes only")
        modes = tuple(data["modes"]) if "modes" in data else None
        return {"domain": dom, "potential": pot, "basis": _basis(data.get("basis")), "modes": modes,
                "kq": _kq(data), "alpha": a}
    if p == "wholespace":
        harm = _harmonic(data["harmonic"])
        trig = _terms(data["trig"])
        for t in trig:
            if len(t.frequency) != harm.n:
                raise DomainError("trig frequency dimension does not match the harmonic part")
        kg = KGridSpec(**data["kgrid"]) if "kgrid" in data else None
        return {"harm": harm, "trig": trig, "kgrid": kg, "hermite": HermiteSpec(order=data.get("order")),
                "method": data["method"], "alpha": a}
    if p == "periodic":
        dom = _domain(data["domain"])
        if not isinstance(dom, Box):
            raise DomainError("the periodic solver needs a box")
        per = data["periodic"]
        coeffs = {tuple(c["frequency"]): complex(c["re"], c.get("im", 0.0)) for c in per.get("potential_fourier", [])}
        spec = PlaneWaveSpec(tuple(per["modes"])) if "modes" in per else None
        ratios = None
        if sub == "phase-diagram":
            r = per.get("ratios")
            if r is None:
                raise ConfigError("phase-diagram needs periodic.ratios")
            ratios = grid_values(r) if isinstance(r, dict) else [float(x) for x in r]
            if any(not x >= 1 for x in ratios):
                raise DomainError("ratios must be at least 1")
        return {"box": dom, "coeffs": coeffs, "spec": spec, "ratios": ratios, "alpha": a}
    if p == "well":
        w = data["well"]
        inner = Box(tuple(w["inner"]))
        if inner.n not in (1, 2):
            raise DomainError("well study supports n = 1, 2")
        values = w.get("V0_values") if sub == "well-study" else None
        return {"inner": inner, "V0": [float(v) for v in (values or [w["V0"]])], "factor": float(w["enclosure_factor"]),
                "modes": tuple(w["modes"]) if "modes" in w else None, "kq": _kq(data), "alpha": a}
    if p == "asymptotic":
        s = data["asymptotic"]
        need = {"box1d": (), "box2d": ("L",), "harmonic1d": ("gamma",), "harmonic2d": ("eta",)}[s["formula"]]
        for key in need:
            if key not in s:
                raise ConfigError(f"asymptotic formula {s['formula']!r} needs {key!r}")
        if s["formula"] == "box2d" and not 0 < s["L"] <= 1:
            raise DomainError("L must lie in (0, 1]")
        return {"spec": s, "alpha": a}
    s = data["bounds"]
    if s["kind"] == "wholespace":
        if "gamma1" not in s or "gamma2" not in s:
            raise ConfigError("whole-space bounds need gamma1 and gamma2")
    else:
        for key in ("n", "D", "d"):
            if key not in s:
                raise ConfigError(f"{s['kind']} bounds need {key!r}")
    return {"spec": s, "alpha": a}


# ---------------------------------------------------------------- runners

def _report_row(rep, disc):
    row = {"E1": rep.E1, "E2": rep.E2, "delta": rep.delta, "degenerate": rep.degenerate}
    for b in rep.lower_bounds:
        row[f"bound_{b.name}"] = b.value
        row[f"margin_{b.name}"] = b.margin
    row["finding"] = rep.finding
    row["discretization"] = disc
    row["notes"] = "; ".join(rep.notes)
    return row


def _run_local(x):
    opts = LocalOptions(refine=x.get("refine", True))
    sp, rep = solve_local_gap(x["domain"], x["basis"], x["alpha"], x["potential"], opts)
    disc = repr(sp.basis)
    if sp.discretization.get("gap_change") is not None:
        disc += f" gap_change={sp.discretization['gap_change']:.3e}"
    return [_report_row(rep, disc)]


def _run_classical(x):
    sp, rep = solve_classical_gap(x["domain"], x["alpha"], x["potential"], x["modes"], x["kq"], x["extrapolate"])
    disc = f"sine modes={list(sp.discretization['modes'])}" + (" richardson" if x["extrapolate"] else "")
    return [_report_row(rep, disc)]


def _run_wholespace(x):
    sp, rep = solve_wholespace_gap(x["harm"], x["alpha"], x["trig"], x["kgrid"], x["method"], x["hermite"])
    d = sp.discretization
    if "order" in d:
        disc = f"hermite order={d['order']}"
    else:
        disc = f"fd radius={d['kgrid'].radius:.17g} spacing={d['kgrid'].spacing:.17g}"
    row = _report_row(rep, disc)
    row["outer_mass"] = d["outer_mass"]
    return [row]


def _run_periodic(x):
    sp, rep = solve_periodic(x["box"], x["alpha"], x["coeffs"], x["spec"])
    row = _report_row(rep, f"plane waves size={sp.discretization['size']}")
    row["gap_convention"] = rep.config_echo["gap_convention"]
    return [row]


def _run_phase(x):
    spec = x["spec"] or PlaneWaveSpec((6, 6))
    rows = []
    for r in phase_diagram_sweep(x["alpha"], x["ratios"], spec):
        r = dict(r)
        r["mode"] = list(r["mode"]) if r["mode"] is not None else None
        rows.append(r)
    return rows


_REFERENCES: dict = {}


def well_references(inner: Box, alpha: float):
    """lambda_1 of the classical and of the local operator on ``inner``."""
    key = (inner, alpha)
    if key not in _REFERENCES:
        modes = (200,) if inner.n == 1 else (24, 24)
        _, rc = solve_classical_gap(inner, alpha, modes=modes, extrapolate=True)
        _, rl = solve_local_gap(inner, alpha=alpha)
        _REFERENCES[key] = (rc.E1, rl.E1)
    return _REFERENCES[key]


def _run_well(x, study=False):
    rows = []
    for V0 in x["V0"]:
        sp, rep = solve_well(x["inner"], V0, x["alpha"], x["factor"], x["modes"], x["kq"])
        row = {"V0": V0}
        row.update(_report_row(rep, f"sine modes={list(sp.discretization['modes'])} enclosure={x['factor']:g}"))
        row["wall_mass"] = sp.discretization["wall_mass"]
        if study:
            lc, ll = well_references(x["inner"], x["alpha"])
            row.update({"lambda1_classical": lc, "lambda1_local": ll,
                        "dist_classical": abs(rep.E1 - lc), "dist_local": abs(rep.E1 - ll)})
        rows.append(row)
    return rows


def _run_asymptotic(x):
    s, a = x["spec"], x["alpha"]
    f = s["formula"]
    row = {"formula": f}
    if f == "box1d":
        E1, E2 = eigs_box1d_asymptotic(a)
        row.update({"E1": E1, "E2": E2, "delta": gap_box1d_asymptotic(a)})
    elif f == "box2d":
        E1, E2 = eigs_box2d_asymptotic(a, s["L"])
        row.update({"E1": E1, "E2": E2, "delta": E2 - E1})
    elif f == "harmonic1d":
        E1, E2 = eigs_harmonic1d_asymptotic(a, s["gamma"])
        row.update({"E1": E1, "E2": E2, "delta": gap_harmonic1d_asymptotic(a, s["gamma"])})
    else:
        form = s.get("form", "derived")
        if form == "closed":
            d = gap_harmonic2d_closed_form(a, s["eta"])
        else:
            d = gap_harmonic2d_asymptotic(a, s["eta"], form)
        row.update({"form": form, "delta": d})
    return [row]


def _run_bounds(x):
    s, a = x["spec"], x["alpha"]
    if s["kind"] == "wholespace":
        recs = evaluate_bounds("wholespace", 2, a, gammas=(s["gamma1"], s["gamma2"]))
    else:
        recs = evaluate_bounds(s["kind"], s["n"], a, diam=Diameters(s["D"], s["d"]))
    row = {"kind": s["kind"]}
    row.update({f"bound_{r.name}": r.value for r in recs})
    return [row]


def _runner(sub, problem):
    if sub == "phase-diagram":
        return _run_phase
    if problem == "well":
        return lambda x: _run_well(x, study=sub == "well-study")
    return {"local": _run_local, "classical": _run_classical, "wholespace": _run_wholespace,
            "periodic": _run_periodic, "asymptotic": _run_asymptotic, "bounds": _run_bounds}[problem]


# ---------------------------------------------------------------- driver

def _threads(arg):
    env = os.environ.get(THREADS_ENV)
    value = env if env not in (None, "") else arg
    try:
        n = int(value) if value is not None else 1
    except ValueError:
        raise ConfigError(f"thread count {value!r} is not an integer") from None
    if n < 1:
        raise ConfigError("thread count must be at least 1")
    return n


def run(sub: str, cfg: RunConfig, threads: int = 1) -> dict:
    """Run a subcommand; returns {columns, rows, finding, ...}."""
    if sub not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand {sub!r}")
    if cfg.problem not in ALLOWED[sub]:
        raise ConfigError(f"subcommand {sub!r} does not accept problem {cfg.problem!r}")
    if sub == "sweep" and not cfg.sweep:
        raise ConfigError("sweep needs a 'sweep' block")
    points = expand_sweep(cfg) if sub != "solve" else expand_sweep(RunConfig({k: v for k, v in cfg.data.items() if k != "sweep"}))
    params = [a["parameter"] for a in cfg.sweep] if sub != "solve" else []
    inputs = []
    for values, data in points:
        x = prepare(sub, data)
        if data["problem"] in ("local", "classical"):
            x["refine"] = data.get("refine", True)
            x["extrapolate"] = data.get("extrapolate", False)
        inputs.append((values, x))
    fn = _runner(sub, cfg.problem)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if threads > 1 and len(inputs) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(lambda item: fn(item[1]), inputs))
        else:
            results = [fn(item[1]) for item in inputs]
    h = cfg.hash()
    rows = []
    for (values, _), out in zip(inputs, results):
        for r in out:
            row = {"index": len(rows)}
            row.update(dict(zip(params, values)))
            row.update(r)
            row["config_hash"] = h
            rows.append(row)
    columns = []
    for r in rows:
        for k in r:
            if k not in columns:
                columns.append(k)
    # keep bookkeeping columns last
    tail = [c for c in ("finding", "discretization", "notes", "config_hash") if c in columns]
    columns = [c for c in columns if c not in tail] + tail
    return {"subcommand": sub, "config": cfg.data, "config_hash": h, "columns": columns, "rows": rows,
            "finding": any(bool(r.get("finding")) for r in rows)}


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, (list, tuple, dict)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    return str(v)


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, tuple):
        return list(v)
    return v


def render(result: dict, fmt: str) -> str:
    if fmt == "json":
        doc = {
            "fracgap_version": __version__,
            "subcommand": result["subcommand"],
            "config": result["config"],
            "config_hash": result["config_hash"],
            "finding": result["finding"],
            "columns": result["columns"],
            "rows": [{c: _json_value(r.get(c)) for c in result["columns"]} for r in result["rows"]],
        }
        return json.dumps(doc, sort_keys=False, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(f"# fracgap {__version__}\n")
    buf.write(f"# subcommand: {result['subcommand']}\n")
    buf.write("# config: " + json.dumps(result["config"], sort_keys=True, separators=(",", ":")) + "\n")
    buf.write(f"# config_hash: {result['config_hash']}\n")
    buf.write(f"# finding: {'true' if result['finding'] else 'false'}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(result["columns"])
    for r in result["rows"]:
        w.writerow([_cell(r.get(c)) for c in result["columns"]])
    return buf.getvalue()


def _parser():
    p = argparse.ArgumentParser(prog="fracgap", description="Spectral gaps of fractional Schroedinger operators.")
    p.add_argument("--version", action="version", version=f"fracgap {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, metavar="PATH")
        s.add_argument("--out", metavar="PATH")
        s.add_argument("--format", choices=("csv", "json"))
        s.add_argument("--threads", type=int, metavar="N")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        threads = _threads(args.threads)
        out_cfg = cfg.data.get("output", {})
        fmt = args.format or out_cfg.get("format", "csv")
        path = args.out or out_cfg.get("path")
        text = render(run(args.command, cfg, threads), fmt)
    except (SolverError, ConvergenceError, QuadratureError) as exc:
        print(f"fracgap: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ConfigError, DomainError) as exc:
        print(f"fracgap: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FracGapError as exc:
        print(f"fracgap: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if path:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"fracgap: cannot write {path}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
