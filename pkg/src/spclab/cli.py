"""Command-line interface.

Subcommands sweep the main quantities over a scenario taken either from a
named preset (--scenario) or from a JSON config (--config).  Every command
writes a CSV table (12 significant digits, deterministic bytes for a fixed
config and seed) and a JSON summary next to it.

Exit codes: 0 success, 2 configuration error, 3 scan exhaustion.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import harness, modulus, posterior, spectra, truncation
from .harness import Scenario, get_preset, presets, run_pipeline, run_simulation_study
from .indexfn import SmoothnessSpec
from .spectra import SequenceProblem, source_element
from .truncation import BoundConstants, ScanExhaustedError

FORMAT_VERSION = "1"

_SPECTRUM_BUILDERS = {
    "power": (spectra.power_spectrum, ("p",)),
    "exponential": (spectra.exponential_spectrum, ("gamma", "p")),
    "logarithmic": (spectra.logarithmic_spectrum, ("p",)),
    "alpha_regular": (spectra.alpha_regular_spectrum, ("alpha",)),
    "analytic": (spectra.analytic_spectrum, ("alpha", "xi_prior", "p")),
    "explicit": (None, ("values",)),
}


class ConfigError(ValueError):
    pass


def _build_spectrum(cfg: dict, where: str) -> spectra.SpectrumModel:
    if not isinstance(cfg, dict) or "family" not in cfg:
        raise ConfigError(f"{where}: expected an object with a 'family' key")
    family = cfg["family"]
    if family not in _SPECTRUM_BUILDERS:
        raise ConfigError(f"{where}.family: unknown spectrum family {family!r}")
    builder, keys = _SPECTRUM_BUILDERS[family]
    params = cfg.get("params", {})
    extra = set(params) - set(keys) - {"scale", "xi"}
    if extra:
        raise ConfigError(f"{where}.params: unknown keys {sorted(extra)}")
    try:
        if family == "explicit":
            return spectra.explicit_spectrum(params["values"], scale=params.get("scale", 1.0))
        kwargs = {}
        for key in keys:
            if key == "xi_prior" and key not in params and "xi" in params:
                kwargs[key] = params["xi"]
                continue
            if key not in params:
                raise ConfigError(f"{where}.params: missing key {key!r}")
            kwargs[key] = params[key]
        return builder(**kwargs, scale=params.get("scale", 1.0))
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def scenario_from_config(cfg: dict) -> Scenario:
    try:
        forward = _build_spectrum(cfg["forward"], "forward")
        prior = _build_spectrum(cfg["prior"], "prior")
        sm = cfg.get("smoothness", {})
        beta = sm.get("beta")
        mu = sm.get("mu")
        if beta is None and mu is None:
            raise ConfigError("smoothness: need 'beta' or 'mu'")
        if beta is None:
            m = spectra._power_type_exponent(forward)
            if m is None:
                raise ConfigError("smoothness.beta: required for non-power forward")
            beta = mu * m
        if mu is None:
            m = spectra._power_type_exponent(forward)
            mu = beta / m if m is not None else beta
        smoothness = SmoothnessSpec(mu=mu, beta=beta, radius=sm.get("R", 1.0))
        constants = BoundConstants(**cfg.get("constants", {}))
        return Scenario(
            name=cfg.get("name", "config"),
            forward=forward,
            prior=prior,
            smoothness=smoothness,
            n_grid=tuple(cfg["n_grid"]),
            mode=cfg.get("mode", harness.COMMUTING),
            n_dim=cfg.get("N", 2000),
            seed=cfg.get("seed", 0),
            eps=cfg.get("eps", 0.0),
            constants=constants,
        )
    except ConfigError:
        raise
    except KeyError as exc:
        raise ConfigError(f"missing config key {exc.args[0]!r}") from exc
    except Exception as exc:
        raise ConfigError(str(exc)) from exc


def _load_scenario(args) -> Scenario:
    if args.scenario:
        try:
            sc = get_preset(args.scenario)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
    elif args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except Exception as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        sc = scenario_from_config(cfg)
    else:
        raise ConfigError("need --scenario NAME or --config FILE")
    if args.seed is not None:
        sc = dataclasses.replace(sc, seed=args.seed)
    return sc


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _write_summary(path: Path, command: str, payload: dict) -> None:
    data = {"format_version": FORMAT_VERSION, "command": command}
    data.update(payload)
    path.with_suffix(".json").write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _fits_payload(report) -> dict:
    return {
        name: {"slope": f.slope, "intercept": f.intercept, "r_squared": f.r_squared}
        for name, f in report.fits.items()
    }


def _cmd_rates(args, out: Path) -> None:
    sc = _load_scenario(args)
    if sc.prior.family == "analytic":
        report = harness.run_analytic_prior_scenario(sc)
    else:
        report = run_pipeline(sc)
    header = ["n", "k_n", "dominant", "delta_sq", "eps"]
    rows = [[r.n, r.level, r.dominant, r.delta_sq, r.eps_n] for r in report.rows]
    _write_csv(out, header, rows)
    payload = {"scenario": report.scenario, "fits": _fits_payload(report)}
    for key in ("level_ratio_to_prediction", "all_bias_dominated"):
        if key in report.extras:
            payload[key] = report.extras[key]
    _write_summary(out, "rates", payload)


def _cmd_truncate(args, out: Path) -> None:
    sc = _load_scenario(args)
    _, psi, lam_g, _ = harness.scenario_functions(sc)
    header = ["n", "k_n", "dominant", "kernel", "spc_bound", "delta_n", "degenerate"]
    rows = []
    for n in sc.n_grid:
        dec = truncation.select_level(psi, lam_g, n, jmax=sc.jmax, constants=sc.constants)
        rows.append([n, dec.level, dec.dominant, dec.kernel, dec.spc_bound, dec.delta, int(dec.degenerate)])
    _write_csv(out, header, rows)
    _write_summary(out, "truncate", {"scenario": sc.name})


def _cmd_spc(args, out: Path) -> None:
    sc = _load_scenario(args)
    phi, psi, lam_g, _ = harness.scenario_functions(sc)
    f0 = source_element(sc.forward, phi, sc.n_dim, sc.smoothness.radius, seed=sc.seed)
    header = ["n", "k", "bias_sq", "variance", "spread", "total", "mc_estimate", "mc_stderr"]
    rows = []
    for n in sc.n_grid:
        dec = truncation.select_level(psi, lam_g, n, jmax=sc.jmax, constants=sc.constants)
        problem = SequenceProblem(sc.n_dim, sc.forward, sc.prior, f0, n)
        exact = posterior.spc_exact(problem, dec.level)
        mc = posterior.spc_monte_carlo(problem, dec.level, args.reps, sc.seed)
        rows.append([n, dec.level, exact.bias_sq, exact.variance, exact.spread, exact.total, mc.estimate, mc.stderr])
    _write_csv(out, header, rows)
    _write_summary(out, "spc", {"scenario": sc.name, "reps": args.reps})


def _cmd_modulus(args, out: Path) -> None:
    sc = _load_scenario(args)
    phi, _, _, _ = harness.scenario_functions(sc)
    f0 = source_element(sc.forward, phi, sc.n_dim, sc.smoothness.radius, seed=sc.seed)
    deltas = np.geomspace(args.delta_max, args.delta_min, args.delta_points)
    header = ["delta", "k_delta", "exact", "bound_two_term", "bound_optimized"]
    rows = []
    theta = phi.theta()
    for delta in deltas:
        k_delta = truncation.select_level_modulus(theta, sc.forward, float(delta), jmax=sc.jmax)
        opt = modulus.modulus_bound_optimized(phi, sc.forward, float(delta), sc.constants, jmax=sc.jmax)
        k_use = max(k_delta, 1)
        exact = modulus.modulus_exact_diagonal(sc.forward, f0, min(k_use, sc.n_dim), float(delta))
        two_term = modulus.modulus_bound(phi, sc.forward, min(k_use, sc.n_dim), float(delta), sc.constants)
        rows.append([float(delta), k_delta, exact.value, two_term, opt.bound])
    _write_csv(out, header, rows)
    _write_summary(out, "modulus", {"scenario": sc.name})


def _cmd_minimax(args, out: Path) -> None:
    sc = _load_scenario(args)
    _, psi, lam_g, _ = harness.scenario_functions(sc)
    header = ["n", "k_star", "risk", "at_boundary"]
    rows = []
    for n in sc.n_grid:
        res = truncation.series_minimax_risk(psi, lam_g, n, jmax=sc.jmax)
        rows.append([n, res.k_star, res.risk, int(res.at_boundary)])
    _write_csv(out, header, rows)
    _write_summary(out, "minimax", {"scenario": sc.name})


def _cmd_simulate(args, out: Path) -> None:
    sc = _load_scenario(args)
    rows_out = run_simulation_study(sc, args.radius, args.reps, args.reps_inner or args.reps, sc.seed)
    header = ["n", "k_n", "eps_n", "radius", "probability"]
    rows = [[r.n, r.level, r.eps_n, r.radius, r.probability] for r in rows_out]
    _write_csv(out, header, rows)
    _write_summary(out, "simulate", {"scenario": sc.name, "m_radius": args.radius})


def _cmd_scenario(args, out) -> None:
    if args.action != "list":
        raise ConfigError(f"unknown scenario action {args.action!r}")
    for name, sc in sorted(presets().items()):
        fwd = f"{sc.forward.family}{sc.forward.params}"
        pri = f"{sc.prior.family}{sc.prior.params}"
        print(f"{name}: forward={fwd} prior={pri} beta={sc.smoothness.beta} mode={sc.mode}")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spclab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, needs_out=True):
        p.add_argument("--scenario", help="preset name (see 'scenario list')")
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, default=None)
        if needs_out:
            p.add_argument("--out", required=True, help="CSV output path")

    p = sub.add_parser("rates", help="truncation levels and contraction rates over the grid")
    common(p)
    p = sub.add_parser("truncate", help="truncation-level sweep")
    common(p)
    p = sub.add_parser("spc", help="exact and Monte Carlo squared posterior contraction")
    common(p)
    p.add_argument("--reps", type=int, default=2000)
    p = sub.add_parser("modulus", help="modulus values and bounds over a budget grid")
    common(p)
    p.add_argument("--delta-max", type=float, default=1e-1)
    p.add_argument("--delta-min", type=float, default=1e-4)
    p.add_argument("--delta-points", type=int, default=7)
    p = sub.add_parser("minimax", help="best truncated-series risk over the grid")
    common(p)
    p = sub.add_parser("simulate", help="posterior mass outside contraction balls")
    common(p)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--reps-inner", type=int, default=None)
    p.add_argument("--radius", type=float, default=5.0)
    p = sub.add_parser("scenario", help="preset utilities")
    p.add_argument("action", choices=["list"])
    return ap


_COMMANDS = {
    "rates": _cmd_rates,
    "truncate": _cmd_truncate,
    "spc": _cmd_spc,
    "modulus": _cmd_modulus,
    "minimax": _cmd_minimax,
    "simulate": _cmd_simulate,
    "scenario": _cmd_scenario,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    out = Path(args.out) if getattr(args, "out", None) else None
    try:
        if out is not None and getattr(args, "config", None):
            if Path(args.config).resolve() == out.with_suffix(".json").resolve():
                raise ConfigError(
                    "the JSON summary would overwrite the config file; pick another --out"
                )
        _COMMANDS[args.command](args, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ScanExhaustedError as exc:
        print(f"scan exhausted: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
