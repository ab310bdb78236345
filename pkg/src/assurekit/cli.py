"""Command-line interface: solving, design sweeps, and exhibit replication.

All artifacts are deterministic: identical configurations produce
byte-identical CSV/SVG output at any parallelism degree. Exit codes:
0 success, 2 configuration error, 3 solver or audit failure.
"""

from __future__ import annotations

import argparse
import json
import math
import multiprocessing as mp
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import compare as cmp_mod
from . import design, equilibrium, finite_n, io, overton, presets
from .core import ModelParams, SafetySpec
from .exceptions import (AssureKitError, ConfigError, ConvergenceError,
                         NoEquilibriumError)

DEFAULT_OUT = "out"
OUT_ENV_VAR = "ASSUREKIT_OUT"

CONFIG_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "assurekit run configuration",
    "type": "object",
    "properties": {
        "preset": {"type": "string"},
        "model_params": {
            "type": "object",
            "properties": {
                "N": {"type": "integer", "minimum": 2},
                "pi": {"type": "number"}, "lam": {"type": "number"},
                "alpha_L": {"type": "number"}, "alpha_H": {"type": "number"},
                "s": {"type": "number"}, "w_bar": {"type": "number"},
                "k": {"type": "number"}, "rho": {"type": "number"},
                "safety": {
                    "type": "object",
                    "properties": {
                        "kind": {"enum": ["exponential", "linear", "step"]},
                        "xi": {"type": "number"}, "slope": {"type": "number"},
                        "level_lo": {"type": "number"}, "level_hi": {"type": "number"},
                        "breakpoint": {"type": "number"},
                    },
                    "required": ["kind"],
                },
            },
        },
        "T": {"type": "integer"},
        "T_range": {"type": "array", "items": {"type": "integer"},
                    "minItems": 2, "maxItems": 2},
        "objective": {"enum": ["conditional", "ex_ante", "durable"]},
        "seed_model": {"type": "object", "properties": {
            "kind": {"enum": ["deterministic", "poisson", "binomial"]},
            "k": {"type": "integer"}, "mu": {"type": "number"},
            "n_pool": {"type": "integer"}, "p_recruit": {"type": "number"}}},
        "opposition": {"type": "object", "properties": {
            "omega": {"type": "number"}, "c_bar": {"type": "number"}}},
        "floor": {"type": "integer"},
        "figure": {"type": "string"},
        "out_dir": {"type": "string"},
        "emit": {"type": "array", "items": {"enum": ["csv", "svg"]}},
        "parallelism": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "compare": {"type": "object"},
    },
}


# ---------------------------------------------------------------------------
# parallel map with deterministic ordering
# ---------------------------------------------------------------------------

def _pmap(worker, items, degree: int):
    items = list(items)
    if degree <= 1 or len(items) <= 1:
        return [worker(it) for it in items]
    with mp.Pool(processes=degree) as pool:
        return pool.map(worker, items)


def _design_worker(args):
    params, T, floor_M, objective, seed = args
    if objective == "ex_ante":
        return design.ex_ante_point(T, seed, params)
    return design.conditional_point(T, params, floor_M=floor_M)


def _both_selection_worker(args):
    params, T = args
    hi = design.conditional_point(T, params, selection="high")
    lo = design.conditional_point(T, params, selection="low")
    return (T, hi, lo)


def _multiplicity_worker(args):
    params, T = args
    fps = equilibrium.enumerate_fixed_points(T, params)
    hi = equilibrium.solve_q_high(T, params)
    lo = equilibrium.solve_q_low(T, params)
    return (T, hi.q, lo.q, len(fps))


def _shares_worker(args):
    params, T = args
    res = equilibrium.solve_q_high(T, params)
    sl, sh = equilibrium.type_shares(res.q, T, params)
    p, d = design._tail_and_delta(params.N, T, res.q)
    return (T, res.q, p, sl, sh)


def _overton_worker(args):
    params, priors, T = args
    grid = overton._DEFAULT_GRID
    L = overton._likelihood_vector(T, params, grid, None)
    rows = []
    for prior in priors:
        w = grid.measure(prior)
        p = float(w @ L)
        prior_mean = float(w @ grid.nodes)
        up = float(w @ (grid.nodes * L)) / p - prior_mean
        down = float(w @ (grid.nodes * (1.0 - L))) / (1.0 - p) - prior_mean
        rows.append(overton.OvertonPoint(T=T, marginal_success=p, shift_success=up,
                                         shift_failure=down, value=p * up))
    return (T, rows)


def _finite_worker(args):
    params, T, floors = args
    solver = finite_n.FiniteNSolver(params)
    prof = solver.solve_profile(T)
    out = []
    for f in floors:
        if not prof.converged:
            out.append(finite_n.FiniteNPoint(T=T, objective=0.0, success_prob=0.0,
                                             delta_theta=0.0, residual=prof.residual,
                                             iterations=prof.iterations, ok=False))
        else:
            v, p, d = solver.objective_from_profile(prof, f)
            out.append(finite_n.FiniteNPoint(T=T, objective=v, success_prob=p,
                                             delta_theta=d, residual=prof.residual,
                                             iterations=prof.iterations))
    return (T, out)


# ---------------------------------------------------------------------------
# configuration plumbing
# ---------------------------------------------------------------------------

def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _out_dir(args, cfg) -> Path:
    out = args.out or cfg.get("out_dir") or os.environ.get(OUT_ENV_VAR) or DEFAULT_OUT
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _emit(args, cfg):
    raw = args.emit or ",".join(cfg.get("emit", [])) or "csv"
    kinds = [k.strip() for k in raw.split(",") if k.strip()]
    for k in kinds:
        if k not in ("csv", "svg"):
            raise ConfigError(f"unknown emit kind {k!r}")
    return kinds


def _params_from_config(cfg) -> ModelParams:
    spec = dict(cfg["model_params"])
    raw_safety = spec.pop("safety", {"kind": "exponential", "xi": 3.0})
    kind = raw_safety.get("kind")
    if kind == "exponential":
        safety = SafetySpec.exponential(raw_safety.get("xi", 3.0))
    elif kind == "linear":
        safety = SafetySpec.linear(raw_safety.get("slope", 0.9))
    elif kind == "step":
        safety = SafetySpec.step(raw_safety.get("level_lo", 1.0),
                                 raw_safety.get("level_hi", 0.05),
                                 raw_safety.get("breakpoint", 0.5))
    else:
        raise ConfigError(f"unknown safety kind {kind!r}")
    try:
        return ModelParams(safety=safety, **spec)
    except (TypeError, AssureKitError) as exc:
        raise ConfigError(f"bad model_params: {exc}") from exc


def _resolve_model(args, cfg) -> tuple[ModelParams, presets.Preset | None]:
    name = getattr(args, "preset", None) or cfg.get("preset")
    if name:
        preset = presets.get_preset(name)
        if preset.model is None:
            raise ConfigError(f"preset {name!r} has no baseline-model parameters")
        return preset.model, preset
    if "model_params" in cfg:
        return _params_from_config(cfg), None
    raise ConfigError("need --preset or model_params in --config")


def _resolve_t_range(args, cfg, N: int):
    raw = getattr(args, "t_range", None)
    if raw:
        try:
            lo, hi = (int(v) for v in raw.split(":"))
        except ValueError:
            raise ConfigError(f"bad --T-range {raw!r}; expected lo:hi") from None
    elif "T_range" in cfg:
        lo, hi = cfg["T_range"]
    else:
        lo, hi = presets.SWEEP_T_MIN, N - 1
    if not (1 <= lo <= hi < N):
        raise ConfigError(f"T range [{lo},{hi}] invalid for N={N}")
    return range(int(lo), int(hi) + 1)


def _seed_model(args, cfg) -> design.SeedModel:
    raw = getattr(args, "seed_model", None)
    if raw:
        parts = raw.split(":")
        kind = parts[0]
        try:
            if kind == "deterministic":
                return design.SeedModel.deterministic(int(parts[1]))
            if kind == "poisson":
                return design.SeedModel.poisson(float(parts[1]))
            if kind == "binomial":
                return design.SeedModel.binomial(int(parts[1]), float(parts[2]))
        except (IndexError, ValueError) as exc:
            raise ConfigError(f"bad --seed-model {raw!r}: {exc}") from exc
        raise ConfigError(f"unknown seed model kind {kind!r}")
    spec = cfg.get("seed_model")
    if spec:
        kind = spec.get("kind")
        if kind == "deterministic":
            return design.SeedModel.deterministic(spec["k"])
        if kind == "poisson":
            return design.SeedModel.poisson(spec["mu"])
        if kind == "binomial":
            return design.SeedModel.binomial(spec["n_pool"], spec["p_recruit"])
        raise ConfigError(f"unknown seed model kind {kind!r}")
    return design.SeedModel.poisson(15.0)


def _report(payload) -> None:
    print(json.dumps(payload, sort_keys=True))


def _maybe_svg(out_dir, emit, stem, x, series, labels, title, ylabel):
    if "svg" not in emit:
        return []
    path = out_dir / f"{stem}.svg"
    io.write_svg(path, x, series, labels=labels, title=title,
                 xlabel="threshold T", ylabel=ylabel)
    return [path]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_solve(args):
    cfg = _load_config(args.config)
    params, _ = _resolve_model(args, cfg)
    T = args.T if args.T is not None else cfg.get("T")
    if T is None:
        raise ConfigError("solve needs --T")
    T = int(T)
    if not 1 <= T < params.N:
        raise ConfigError(f"T={T} outside [1, N-1]")
    out_dir = _out_dir(args, cfg)
    res = equilibrium.solve_q_high(T, params)
    if not res.converged:
        raise ConvergenceError(f"no convergence at T={T}", last_value=res.q,
                               residual=res.residual, iterations=res.iterations)
    p, d = design._tail_and_delta(params.N, T, res.q)
    share_L, share_H = equilibrium.type_shares(res.q, T, params)
    report = {"T": T, "tau": T / params.N, "q_high": res.q, "success_prob": p,
              "delta": d, "psi_conditional": p * d, "share_L": share_L,
              "share_H": share_H, "iterations": res.iterations,
              "residual": res.residual}
    if "csv" in _emit(args, cfg):
        io.write_csv(out_dir / f"solve_T{T}.csv",
                     ("T", "tau", "q_high", "success_prob", "delta",
                      "objective", "flags"),
                     [[T, T / params.N, res.q, p, d, p * d, "ok"]])
    _report(report)
    return 0


def _run_curve(args, cfg, objective: str):
    params, preset = _resolve_model(args, cfg)
    T_range = _resolve_t_range(args, cfg, params.N)
    degree = args.parallel or cfg.get("parallelism", 1)
    out_dir = _out_dir(args, cfg)
    emit = _emit(args, cfg)

    floor_M = 0
    seed = None
    if objective == "durable":
        opp = None
        if getattr(args, "omega", None) is not None:
            opp = design.OppositionSpec(omega=args.omega, c_bar=args.c_bar or 1.0)
        elif cfg.get("opposition"):
            opp = design.OppositionSpec(**cfg["opposition"])
        elif preset is not None and preset.opposition is not None:
            opp = preset.opposition
        if opp is None:
            raise ConfigError("durable objective needs --omega/--c-bar or a preset floor")
        floor_M = design.durability_floor(opp, params.N)
    elif objective == "ex_ante":
        seed = _seed_model(args, cfg)

    jobs = [(params, T, floor_M, objective, seed) for T in T_range]
    points = _pmap(_design_worker, jobs, degree)
    curve = design.optimize_threshold(objective if objective != "durable" else "conditional",
                                      params, T_range, points=points)
    stem = f"{objective}_{preset.name if preset else 'custom'}"
    artifacts = []
    if "csv" in emit:
        path = out_dir / f"{stem}.csv"
        io.write_csv(path, design.DesignCurve.CSV_HEADER, curve.csv_rows())
        artifacts.append(path)
    artifacts += _maybe_svg(out_dir, emit, stem, [p.T for p in curve.points],
                            [[p.objective for p in curve.points]],
                            [objective], stem, "objective")
    _report({"objective": objective, "argmax_T": curve.argmax_T,
             "max_value": curve.value_at(curve.argmax_T) if curve.argmax_T else None,
             "warn": curve.warn, "artifacts": [str(a) for a in artifacts]})
    return 3 if curve.warn else 0


def cmd_design(args):
    cfg = _load_config(args.config)
    objective = args.objective or cfg.get("objective", "conditional")
    if objective not in ("conditional", "ex_ante", "durable"):
        raise ConfigError(f"unknown objective {objective!r}")
    return _run_curve(args, cfg, objective)


def cmd_ex_ante(args):
    return _run_curve(args, _load_config(args.config), "ex_ante")


def cmd_durable(args):
    return _run_curve(args, _load_config(args.config), "durable")


def cmd_overton(args):
    cfg = _load_config(args.config)
    params, preset = _resolve_model(args, cfg)
    prior = preset.prior if preset is not None and preset.prior is not None \
        else presets.overton_prior()
    T_range = _resolve_t_range(args, cfg, params.N)
    degree = args.parallel or cfg.get("parallelism", 1)
    out_dir = _out_dir(args, cfg)
    emit = _emit(args, cfg)
    results = _pmap(_overton_worker, [(params, (prior,), T) for T in T_range], degree)
    points = [rows[0] for _, rows in results]
    curve = overton.overton_curve(prior, params, T_range, points=points)
    artifacts = []
    if "csv" in emit:
        path = out_dir / "overton.csv"
        io.write_csv(path, overton.OvertonCurve.CSV_HEADER, curve.csv_rows())
        artifacts.append(path)
    artifacts += _maybe_svg(out_dir, emit, "overton", [p.T for p in curve.points],
                            [[p.value for p in curve.points]], ["psi_O"],
                            "discourse objective", "psi_O")
    _report({"argmax_T": curve.argmax_T, "max_value": curve.value_at(curve.argmax_T),
             "prior": {"a": prior.a, "b": prior.b},
             "artifacts": [str(a) for a in artifacts]})
    return 0


def cmd_compare(args):
    cfg = _load_config(args.config)
    src = cfg.get("compare", {})
    get = lambda name, default=None: (getattr(args, name, None)
                                      if getattr(args, name, None) is not None
                                      else src.get(name, default))
    try:
        p = cmp_mod.CompareParams(
            e=float(get("e")), alpha=float(get("alpha")), pi=float(get("pi")),
            mu=float(get("mu")), k=float(get("k", 0.0)),
            safety=SafetySpec.exponential(float(get("xi", 3.0))),
            N=int(get("N", 100)))
    except (TypeError, AssureKitError) as exc:
        raise ConfigError(f"bad comparison parameters: {exc}") from exc
    region = cmp_mod.classify_region(p)
    report = {"region": region, "pioneer_cost": p.pioneer_cost,
              "full_coalition_cost": p.full_coalition_cost}
    if region == cmp_mod.COORDINATION_GAP:
        rt = cmp_mod.risk_dominance_thresholds(p)
        report.update({"p_assurance": rt.p_assurance, "p_survey": rt.p_survey,
                       "k_max": rt.k_max})
    if p.safety.kind == "exponential" and p.alpha > p.e:
        report["cascade_min_base"] = cmp_mod.cascade_min_base(p.safety.xi, p.alpha, p.e)
    iv = cmp_mod.assurance_interval(p)
    report["assurance_interval"] = ([iv.T_lo, iv.T_hi] if iv.feasible else None)
    out_dir = _out_dir(args, cfg)
    if "csv" in _emit(args, cfg):
        io.write_csv(out_dir / "compare.csv", cmp_mod.REGION_CSV_HEADER,
                     [cmp_mod.region_row(p)])
    _report(report)
    return 0


def _resolve_finite(args, cfg) -> finite_n.FiniteNParams:
    name = getattr(args, "preset", None) or cfg.get("preset")
    if name:
        preset = presets.get_preset(name)
        if preset.finite_n is None:
            raise ConfigError(f"preset {name!r} has no finite-N parameters")
        return preset.finite_n
    raise ConfigError("finite-n commands need --preset")


def cmd_finite_n(args):
    cfg = _load_config(args.config)
    params = _resolve_finite(args, cfg)
    T_range = _resolve_t_range(args, cfg, params.N)
    degree = args.parallel or cfg.get("parallelism", 1)
    out_dir = _out_dir(args, cfg)
    emit = _emit(args, cfg)
    floor = args.floor if args.floor is not None else cfg.get("floor", 0)
    floors = (0, floor) if floor else (0,)
    results = _pmap(_finite_worker, [(params, T, floors) for T in T_range], degree)
    artifacts = []
    report = {}
    for idx, f in enumerate(floors):
        pts = [row[1][idx] for row in results]
        curve = finite_n.FiniteNCurve(points=tuple(pts), argmax_T=finite_n._argmax(pts))
        suffix = "" if f == 0 else f"_floor{f}"
        if "csv" in emit:
            path = out_dir / f"finite_n{suffix}.csv"
            io.write_csv(path, finite_n.FiniteNCurve.CSV_HEADER, curve.csv_rows())
            artifacts.append(path)
        report["argmax_T" if f == 0 else f"argmax_T_floor{f}"] = curve.argmax_T
    _report({**report, "artifacts": [str(a) for a in artifacts]})
    return 0


def cmd_scalar_cutoff(args):
    cfg = _load_config(args.config)
    params = _resolve_finite(args, cfg)
    T = args.T if args.T is not None else cfg.get("T")
    if T is None:
        raise ConfigError("scalar-cutoff needs --T")
    rf = finite_n.ReducedFormParams(N=params.N, pi=params.theta_prior.mean,
                                    s=params.s, eta=params.eta,
                                    type_dist=params.type_dist, X_clip=params.X_clip)
    x_star = finite_n.scalar_cutoff(rf, int(T))
    share = 1.0 - params.type_dist.cdf(x_star)
    ds = finite_n.comparative_statics(rf, int(T), "s", x_star=x_star)
    de = finite_n.comparative_statics(rf, int(T), "eta", x_star=x_star)
    _report({"T": int(T), "x_star": x_star, "signing_share": share,
             "participation": rf.pi * share, "dx_ds": ds.derivative,
             "dx_deta": de.derivative})
    return 0


def cmd_self_audit(args):
    problems = presets.self_audit()
    _report({"clean": not problems, "problems": problems})
    return 0 if not problems else 3


# ---------------------------------------------------------------------------
# replicate
# ---------------------------------------------------------------------------

def _write_panel(out_dir, emit, stem, header, rows, svg_spec=None):
    paths = []
    path = out_dir / f"{stem}.csv"
    io.write_csv(path, header, rows)
    paths.append(path)
    if svg_spec is not None and "svg" in emit:
        x, series, labels, ylabel = svg_spec
        spath = out_dir / f"{stem}.svg"
        io.write_svg(spath, x, series, labels=labels, title=stem,
                     xlabel="threshold T", ylabel=ylabel)
        paths.append(spath)
    return paths


def _fig_design_objective(out_dir, emit, degree):
    preset = presets.get_preset("baseline")
    Ts = list(preset.t_range())
    pts = _pmap(_design_worker, [(preset.model, T, 0, "conditional", None) for T in Ts],
                degree)
    curve = design.optimize_threshold("conditional", preset.model, Ts, points=pts)
    return _write_panel(out_dir, emit, "fig_design_objective",
                        design.DesignCurve.CSV_HEADER, curve.csv_rows(),
                        ([p.T for p in pts], [[p.objective for p in pts]],
                         ["psi_conditional"], "objective"))


def _fig_participation_success(out_dir, emit, degree):
    preset = presets.get_preset("baseline")
    Ts = list(preset.t_range())
    rows = _pmap(_shares_worker, [(preset.model, T) for T in Ts], degree)
    paths = []
    paths += _write_panel(out_dir, emit, "fig_participation_success_participation",
                          ("T", "tau", "q_high"),
                          [[T, T / preset.model.N, q] for T, q, _, _, _ in rows],
                          ([r[0] for r in rows], [[r[1] for r in rows]],
                           ["q_high"], "participation"))
    paths += _write_panel(out_dir, emit, "fig_participation_success_success",
                          ("T", "success_prob"),
                          [[T, p] for T, _, p, _, _ in rows],
                          ([r[0] for r in rows], [[r[2] for r in rows]],
                           ["P(M>=T)"], "success probability"))
    paths += _write_panel(out_dir, emit, "fig_participation_success_type_shares",
                          ("T", "share_low_vulnerability", "share_high_vulnerability"),
                          [[T, sl, sh] for T, _, _, sl, sh in rows],
                          ([r[0] for r in rows],
                           [[r[3] for r in rows], [r[4] for r in rows]],
                           ["low", "high"], "signing share"))
    return paths


def _fig_both_selections(out_dir, emit, degree):
    preset = presets.get_preset("baseline")
    Ts = list(preset.t_range())
    rows = _pmap(_both_selection_worker, [(preset.model, T) for T in Ts], degree)
    return _write_panel(out_dir, emit, "fig_both_selections",
                        ("T", "psi_high", "psi_low"),
                        [[T, hi.objective, lo.objective] for T, hi, lo in rows],
                        ([r[0] for r in rows],
                         [[r[1].objective for r in rows], [r[2].objective for r in rows]],
                         ["high selection", "low selection"], "objective"))


def _fig_multiplicity(out_dir, emit, degree):
    preset = presets.get_preset("baseline")
    Ts = list(preset.t_range())
    rows = _pmap(_multiplicity_worker, [(preset.model, T) for T in Ts], degree)
    paths = _write_panel(out_dir, emit, "fig_multiplicity_selections",
                         ("T", "q_high", "q_low"),
                         [[T, qh, ql] for T, qh, ql, _ in rows],
                         ([r[0] for r in rows],
                          [[r[1] for r in rows], [r[2] for r in rows]],
                          ["from q0=pi", "from q0=0"], "fixed point"))
    paths += _write_panel(out_dir, emit, "fig_multiplicity_count",
                          ("T", "n_fixed_points"),
                          [[T, n] for T, _, _, n in rows],
                          ([r[0] for r in rows], [[float(r[3]) for r in rows]],
                           ["count"], "fixed points"))
    return paths


def _variant_curves(preset, degree):
    Ts = list(preset.t_range())
    out = {}
    for label, params in preset.variants:
        pts = _pmap(_design_worker, [(params, T, 0, "conditional", None) for T in Ts],
                    degree)
        out[label] = pts
    return Ts, out


def _fig_variants(out_dir, emit, degree, preset_name, stem):
    preset = presets.get_preset(preset_name)
    Ts, curves = _variant_curves(preset, degree)
    labels = [label for label, _ in preset.variants]
    paths = _write_panel(out_dir, emit, f"{stem}_participation",
                         ("T", *[f"q_high[{v}]" for v in labels]),
                         [[T, *[curves[v][i].q_high for v in labels]]
                          for i, T in enumerate(Ts)],
                         (Ts, [[p.q_high for p in curves[v]] for v in labels],
                          labels, "participation"))
    paths += _write_panel(out_dir, emit, f"{stem}_objective",
                          ("T", *[f"psi[{v}]" for v in labels]),
                          [[T, *[curves[v][i].objective for v in labels]]
                           for i, T in enumerate(Ts)],
                          (Ts, [[p.objective for p in curves[v]] for v in labels],
                           labels, "objective"))
    return paths


def _fig_safety_comparison(out_dir, emit, degree):
    return _fig_variants(out_dir, emit, degree, "safety_sweep", "fig_safety_comparison")


def _fig_alt_safety(out_dir, emit, degree):
    return _fig_variants(out_dir, emit, degree, "alt_safety", "fig_alt_safety")


def _fig_whistleblowing(out_dir, emit, degree):
    keys = ("05", "15", "30")
    presets_w = [presets.get_preset(f"whistleblowing_{k}") for k in keys]
    Ts = list(presets_w[0].t_range())
    curves = {}
    for key, pre in zip(keys, presets_w):
        curves[key] = _pmap(_design_worker,
                            [(pre.model, T, 0, "conditional", None) for T in Ts], degree)
    labels = [f"pi={pre.model.pi:g}" for pre in presets_w]
    paths = _write_panel(out_dir, emit, "fig_whistleblowing_participation",
                         ("T", *[f"q_high[{v}]" for v in labels]),
                         [[T, *[curves[k][i].q_high for k in keys]]
                          for i, T in enumerate(Ts)],
                         (Ts, [[p.q_high for p in curves[k]] for k in keys],
                          labels, "participation"))
    paths += _write_panel(out_dir, emit, "fig_whistleblowing_objective",
                          ("T", *[f"psi[{v}]" for v in labels]),
                          [[T, *[curves[k][i].objective for k in keys]]
                           for i, T in enumerate(Ts)],
                          (Ts, [[p.objective for p in curves[k]] for k in keys],
                           labels, "objective"))
    shares = _pmap(_shares_worker, [(presets_w[1].model, T) for T in Ts], degree)
    paths += _write_panel(out_dir, emit, "fig_whistleblowing_type_shares",
                          ("T", "share_low_vulnerability", "share_high_vulnerability"),
                          [[T, sl, sh] for T, _, _, sl, sh in shares],
                          (Ts, [[r[3] for r in shares], [r[4] for r in shares]],
                           ["low", "high"], "signing share"))
    return paths


def _fig_overton(out_dir, emit, degree):
    preset = presets.get_preset("overton_beta_13_7")
    Ts = list(preset.t_range())
    results = _pmap(_overton_worker, [(preset.model, (preset.prior,), T) for T in Ts],
                    degree)
    points = [rows[0] for _, rows in results]
    curve = overton.overton_curve(preset.prior, preset.model, Ts, points=points)
    return _write_panel(out_dir, emit, "fig_overton",
                        overton.OvertonCurve.CSV_HEADER, curve.csv_rows(),
                        (Ts, [[p.shift_success for p in points],
                              [p.value for p in points]],
                         ["delta_pi", "psi_O"], "posterior shift / objective"))


def _fig_overton_prior_sensitivity(out_dir, emit, degree):
    preset = presets.get_preset("overton_beta_13_7")
    base = preset.prior
    priors = (base.scaled(0.5), base, base.scaled(10.0))
    labels = [f"Beta({p.a:g},{p.b:g})" for p in priors]
    Ts = list(preset.t_range())
    results = _pmap(_overton_worker, [(preset.model, priors, T) for T in Ts], degree)
    paths = _write_panel(out_dir, emit, "fig_overton_prior_sensitivity_shift",
                         ("T", *[f"delta_pi[{v}]" for v in labels]),
                         [[T, *[row.shift_success for row in rows]]
                          for T, rows in results],
                         (Ts, [[rows[i].shift_success for _, rows in results]
                               for i in range(3)], labels, "posterior shift"))
    paths += _write_panel(out_dir, emit, "fig_overton_prior_sensitivity_objective",
                          ("T", *[f"psi_O[{v}]" for v in labels]),
                          [[T, *[row.value for row in rows]] for T, rows in results],
                          (Ts, [[rows[i].value for _, rows in results]
                                for i in range(3)], labels, "psi_O"))
    return paths


def _fig_finite_n_threshold(out_dir, emit, degree):
    preset = presets.get_preset("finite_n_benchmark")
    Ts = list(preset.t_range())
    results = _pmap(_finite_worker, [(preset.finite_n, T, (0,)) for T in Ts], degree)
    base_pts = [rows[0] for _, rows in results]
    reduced = finite_n.reduced_form_curve(preset.finite_n, Ts)
    return _write_panel(out_dir, emit, "fig_finite_n_threshold",
                        ("T", "psi_finite_n", "psi_reduced_form"),
                        [[T, base_pts[i].objective, reduced.points[i].objective]
                         for i, T in enumerate(Ts)],
                        (Ts, [[p.objective for p in base_pts],
                              [p.objective for p in reduced.points]],
                         ["signal-indexed", "reduced form"], "objective"))


def _fig_finite_n_durable(out_dir, emit, degree):
    preset = presets.get_preset("finite_n_benchmark")
    Ts = list(preset.t_range())
    results = _pmap(_finite_worker, [(preset.finite_n, T, (0, 60)) for T in Ts], degree)
    base = [rows[0] for _, rows in results]
    dur = [rows[1] for _, rows in results]
    return _write_panel(out_dir, emit, "fig_finite_n_durable",
                        ("T", "psi_finite_n", "psi_durable"),
                        [[T, base[i].objective, dur[i].objective]
                         for i, T in enumerate(Ts)],
                        (Ts, [[p.objective for p in base], [p.objective for p in dur]],
                         ["publication", "durable (floor 60)"], "objective"))


FIGURES = {
    "fig_design_objective": _fig_design_objective,
    "fig_participation_success": _fig_participation_success,
    "fig_both_selections": _fig_both_selections,
    "fig_multiplicity": _fig_multiplicity,
    "fig_safety_comparison": _fig_safety_comparison,
    "fig_alt_safety": _fig_alt_safety,
    "fig_whistleblowing": _fig_whistleblowing,
    "fig_overton": _fig_overton,
    "fig_overton_prior_sensitivity": _fig_overton_prior_sensitivity,
    "fig_finite_n_threshold": _fig_finite_n_threshold,
    "fig_finite_n_durable": _fig_finite_n_durable,
}


def cmd_replicate(args):
    cfg = _load_config(args.config)
    fig = args.figure or cfg.get("figure")
    if fig not in FIGURES:
        known = ", ".join(sorted(FIGURES))
        raise ConfigError(f"unknown figure {fig!r}; known: {known}")
    out_dir = _out_dir(args, cfg)
    emit = _emit(args, cfg)
    degree = args.parallel or cfg.get("parallelism", 1)
    paths = FIGURES[fig](out_dir, emit, degree)
    _report({"figure": fig, "artifacts": [str(p) for p in paths]})
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--preset", help="named calibration preset")
    p.add_argument("--out", help=f"output directory (env {OUT_ENV_VAR} overrides default)")
    p.add_argument("--emit", help="comma list of csv,svg (default csv)")
    p.add_argument("--parallel", type=int, default=None, help="worker processes")
    p.add_argument("--seed", type=int, default=0, help="seed for stochastic oracles")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="assurekit",
                                 description="threshold design for social assurance contracts")
    ap.add_argument("--print-config-schema", action="store_true",
                    help="dump the JSON config schema and exit")
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("solve", help="participatory equilibrium at one threshold")
    _add_common(p)
    p.add_argument("--T", type=int)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("design", help="objective sweep over thresholds")
    _add_common(p)
    p.add_argument("--objective", choices=("conditional", "ex_ante", "durable"))
    p.add_argument("--T-range", dest="t_range", help="lo:hi inclusive")
    p.add_argument("--seed-model", dest="seed_model", help="e.g. poisson:15")
    p.add_argument("--omega", type=float)
    p.add_argument("--c-bar", dest="c_bar", type=float)
    p.set_defaults(fn=cmd_design)

    p = sub.add_parser("ex-ante", help="seed-weighted objective sweep")
    _add_common(p)
    p.add_argument("--T-range", dest="t_range")
    p.add_argument("--seed-model", dest="seed_model", help="e.g. poisson:15")
    p.set_defaults(fn=cmd_ex_ante)

    p = sub.add_parser("durable", help="durability-floor objective sweep")
    _add_common(p)
    p.add_argument("--T-range", dest="t_range")
    p.add_argument("--omega", type=float)
    p.add_argument("--c-bar", dest="c_bar", type=float)
    p.set_defaults(fn=cmd_durable)

    p = sub.add_parser("overton", help="outside-observer discourse objective")
    _add_common(p)
    p.add_argument("--T-range", dest="t_range")
    p.set_defaults(fn=cmd_overton)

    p = sub.add_parser("compare", help="three-mechanism region classification")
    _add_common(p)
    for flag in ("e", "alpha", "pi", "mu", "k", "xi"):
        p.add_argument(f"--{flag}", type=float)
    p.add_argument("--N", type=int)
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("finite-n", help="small-group benchmark sweep")
    _add_common(p)
    p.add_argument("--T-range", dest="t_range")
    p.add_argument("--floor", type=int)
    p.set_defaults(fn=cmd_finite_n)

    p = sub.add_parser("scalar-cutoff", help="reduced-form cutoff at one threshold")
    _add_common(p)
    p.add_argument("--T", type=int)
    p.set_defaults(fn=cmd_scalar_cutoff)

    p = sub.add_parser("replicate", help="rebuild one named exhibit")
    _add_common(p)
    p.add_argument("--figure")
    p.set_defaults(fn=cmd_replicate)

    p = sub.add_parser("self-audit", help="check presets against the calibration registry")
    _add_common(p)
    p.set_defaults(fn=cmd_self_audit)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.print_config_schema:
        print(json.dumps(CONFIG_SCHEMA, indent=2, sort_keys=True))
        return 0
    if not getattr(args, "command", None):
        ap.print_help()
        return 2
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return 2
    except (ConvergenceError, NoEquilibriumError) as exc:
        print(json.dumps({"error": "solver", "message": str(exc)}), file=sys.stderr)
        return 3
    except AssureKitError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
