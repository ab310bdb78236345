"""Named calibrations and the registry used by the self-audit.

The registry duplicates every preset value as a plain literal on purpose:
`self_audit()` cross-checks the constructed preset objects against it, so
accidental drift in either place fails loudly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from .core import ModelParams, SafetySpec
from .design import OppositionSpec, SeedModel
from .exceptions import ConfigError
from .finite_n import FiniteNParams
from .overton import BetaPrior

# Degenerate T=1 (a single signature publishes immediately, so there is no
# mutual assurance) is excluded from replication sweeps.
SWEEP_T_MIN = 2

CALIBRATION_REGISTRY = {
    "baseline": dict(N=100, pi=0.65, lam=0.4, alpha_L=0.5, alpha_H=2.0,
                     xi=3.0, s=0.8, w_bar=0.35, k=0.065, rho=1.0),
    "whistleblowing": dict(N=100, lam=0.6, alpha_L=0.5, alpha_H=3.0,
                           xi=3.0, s=0.8, w_bar=0.30, k=0.08,
                           pis=(0.05, 0.15, 0.30)),
    "overton_prior": dict(a=13.0, b=7.0),
    "finite_n_benchmark": dict(N=100, a=13.0, b=7.0, v_bar=0.5, s=0.8,
                               eta=0.1, sigma_m=0.1),
    "durable_60": dict(omega=60.0, c_bar=1.0, floor=60),
    "safety_sweep": dict(xis=(0.0, 1.5, 3.0, 5.0)),
    "alt_safety": dict(xi=3.0, linear_slope=1.0 - math.exp(-3.0),
                       step_lo=1.0, step_hi=math.exp(-3.0), step_break=0.5),
    "param_sweep": dict(xis=(1.5, 2.0, 3.0, 4.0, 5.0),
                        alpha_Hs=(1.5, 2.0, 2.5, 3.0),
                        lams=(0.2, 0.3, 0.4, 0.5)),
}


def baseline_params(**overrides) -> ModelParams:
    base = dict(N=100, pi=0.65, lam=0.4, alpha_L=0.5, alpha_H=2.0,
                safety=SafetySpec.exponential(3.0), s=0.8, w_bar=0.35,
                k=0.065, rho=1.0)
    base.update(overrides)
    return ModelParams(**base)


def whistleblowing_params(pi: float) -> ModelParams:
    return ModelParams(N=100, pi=pi, lam=0.6, alpha_L=0.5, alpha_H=3.0,
                       safety=SafetySpec.exponential(3.0), s=0.8,
                       w_bar=0.30, k=0.08)


def overton_prior() -> BetaPrior:
    return BetaPrior(13.0, 7.0)


def finite_n_params() -> FiniteNParams:
    return FiniteNParams(N=100, theta_prior=BetaPrior(13.0, 7.0), v_bar=0.5,
                         s=0.8, eta=0.1, sigma_m=0.1)


def durable_opposition() -> OppositionSpec:
    return OppositionSpec(omega=60.0, c_bar=1.0)


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    model: Optional[ModelParams] = None
    variants: tuple = ()          # (label, ModelParams) pairs for sweep presets
    prior: Optional[BetaPrior] = None
    finite_n: Optional[FiniteNParams] = None
    opposition: Optional[OppositionSpec] = None
    seed: Optional[SeedModel] = None

    def t_range(self) -> range:
        N = self.model.N if self.model is not None else self.finite_n.N
        return range(SWEEP_T_MIN, N)


def _safety_sweep_variants() -> tuple:
    out = []
    for xi in CALIBRATION_REGISTRY["safety_sweep"]["xis"]:
        out.append((f"xi={xi:g}", baseline_params(safety=SafetySpec.exponential(xi))))
    return tuple(out)


def _alt_safety_variants() -> tuple:
    reg = CALIBRATION_REGISTRY["alt_safety"]
    return (
        ("exponential", baseline_params(safety=SafetySpec.exponential(reg["xi"]))),
        ("linear", baseline_params(safety=SafetySpec.linear(reg["linear_slope"]))),
        ("step", baseline_params(safety=SafetySpec.step(reg["step_lo"], reg["step_hi"],
                                                        reg["step_break"]))),
    )


def param_sweep_variants() -> tuple:
    reg = CALIBRATION_REGISTRY["param_sweep"]
    out = []
    for xi in reg["xis"]:
        for aH in reg["alpha_Hs"]:
            for lam in reg["lams"]:
                label = f"xi={xi:g}_aH={aH:g}_lam={lam:g}"
                out.append((label, baseline_params(
                    safety=SafetySpec.exponential(xi), alpha_H=aH, lam=lam)))
    return tuple(out)


def _build_presets() -> dict[str, Preset]:
    presets = {
        "baseline": Preset("baseline", "illustrative medium-sized calibration",
                           model=baseline_params(), prior=overton_prior()),
        "whistleblowing_05": Preset("whistleblowing_05",
                                    "corporate-reporting calibration, low prevalence",
                                    model=whistleblowing_params(0.05)),
        "whistleblowing_15": Preset("whistleblowing_15",
                                    "corporate-reporting calibration, mid prevalence",
                                    model=whistleblowing_params(0.15)),
        "whistleblowing_30": Preset("whistleblowing_30",
                                    "corporate-reporting calibration, high prevalence",
                                    model=whistleblowing_params(0.30)),
        "overton_beta_13_7": Preset("overton_beta_13_7",
                                    "outside-observer prior matched to baseline prevalence",
                                    model=baseline_params(), prior=overton_prior()),
        "finite_n_benchmark": Preset("finite_n_benchmark",
                                     "small-group benchmark with exact pivotality",
                                     finite_n=finite_n_params()),
        "durable_60": Preset("durable_60", "baseline under a durability floor of 60",
                             model=baseline_params(), opposition=durable_opposition()),
        "safety_sweep": Preset("safety_sweep", "safety-steepness sensitivity",
                               model=baseline_params(), variants=_safety_sweep_variants()),
        "alt_safety": Preset("alt_safety", "matched alternative safety shapes",
                             model=baseline_params(), variants=_alt_safety_variants()),
        "param_sweep": Preset("param_sweep", "80-run robustness envelope",
                              model=baseline_params(), variants=param_sweep_variants()),
    }
    return presets


PRESETS = _build_presets()


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise ConfigError(f"unknown preset {name!r}; known presets: {known}") from None


def self_audit() -> list[str]:
    """Compare constructed presets against the literal registry; [] means clean."""
    problems: list[str] = []

    def check(cond: bool, msg: str):
        if not cond:
            problems.append(msg)

    reg = CALIBRATION_REGISTRY["baseline"]
    m = get_preset("baseline").model
    for name in ("N", "pi", "lam", "alpha_L", "alpha_H", "s", "w_bar", "k", "rho"):
        check(getattr(m, name) == reg[name], f"baseline.{name} != {reg[name]}")
    check(m.safety.kind == "exponential" and m.safety.xi == reg["xi"],
          "baseline safety is not exponential(3)")

    reg = CALIBRATION_REGISTRY["whistleblowing"]
    for pi, key in zip(reg["pis"], ("05", "15", "30")):
        m = get_preset(f"whistleblowing_{key}").model
        check(m.pi == pi, f"whistleblowing_{key}.pi != {pi}")
        for name in ("N", "lam", "alpha_L", "alpha_H", "s", "w_bar", "k"):
            check(getattr(m, name) == reg[name], f"whistleblowing_{key}.{name} != {reg[name]}")
        check(m.safety.xi == reg["xi"], f"whistleblowing_{key} safety xi != {reg['xi']}")

    reg = CALIBRATION_REGISTRY["overton_prior"]
    pr = get_preset("overton_beta_13_7").prior
    check(pr.a == reg["a"] and pr.b == reg["b"], "overton prior is not Beta(13,7)")

    reg = CALIBRATION_REGISTRY["finite_n_benchmark"]
    f = get_preset("finite_n_benchmark").finite_n
    check(f.N == reg["N"], "finite_n.N mismatch")
    check(f.theta_prior.a == reg["a"] and f.theta_prior.b == reg["b"],
          "finite_n prior mismatch")
    for name in ("v_bar", "s", "eta", "sigma_m"):
        check(getattr(f, name) == reg[name], f"finite_n.{name} != {reg[name]}")

    reg = CALIBRATION_REGISTRY["durable_60"]
    opp = get_preset("durable_60").opposition
    check(opp.omega == reg["omega"] and opp.c_bar == reg["c_bar"], "durable_60 spec mismatch")
    check(math.ceil(opp.omega / opp.c_bar) == reg["floor"], "durable_60 floor != 60")

    reg = CALIBRATION_REGISTRY["safety_sweep"]
    xis = tuple(v.safety.xi for _, v in get_preset("safety_sweep").variants)
    check(xis == reg["xis"], f"safety_sweep xis {xis} != {reg['xis']}")

    reg = CALIBRATION_REGISTRY["alt_safety"]
    kinds = tuple(v.safety.kind for _, v in get_preset("alt_safety").variants)
    check(kinds == ("exponential", "linear", "step"), "alt_safety kinds mismatch")
    lin = get_preset("alt_safety").variants[1][1].safety
    check(lin.slope == reg["linear_slope"], "alt_safety linear slope mismatch")
    stp = get_preset("alt_safety").variants[2][1].safety
    check((stp.level_lo, stp.level_hi, stp.breakpoint)
          == (reg["step_lo"], reg["step_hi"], reg["step_break"]), "alt_safety step mismatch")

    reg = CALIBRATION_REGISTRY["param_sweep"]
    variants = get_preset("param_sweep").variants
    check(len(variants) == len(reg["xis"]) * len(reg["alpha_Hs"]) * len(reg["lams"]),
          "param_sweep is not the full 80-run grid")
    seen = {(v.safety.xi, v.alpha_H, v.lam) for _, v in variants}
    want = {(x, a, l) for x in reg["xis"] for a in reg["alpha_Hs"] for l in reg["lams"]}
    check(seen == want, "param_sweep grid points mismatch")

    return problems
