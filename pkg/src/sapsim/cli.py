"""Command-line front end.

Subcommands: propagate, sweep, farfield, optimize, darkstate, calibrate.
Each reads an optional config (INI or JSON) plus repeatable
``--override section.key=value`` flags and writes CSV/JSON results into
``--out``. Outputs are deterministic: same config, byte-identical files.
Exit codes: 0 success, 2 config error, 3 numerical failure, 4 calibration
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .analysis import adiabaticity_margin, dark_state, eigensystem, split_report
from .coupling import calibrate_decay, calibrate_strength, calibrated_model
from .design import (ObjectiveConfig, ObjectiveWeights, ParameterBounds,
                     grid_search, refine_local)
from .errors import CalibrationError, ConfigError, IntegrationError, SapsimError
from .farfield import classify_fringe, facet_emitters, farfield_pattern
from .propagator import hamiltonian_at, nominal_input, propagate
from .spectral import sweep_wavelength


def _fmt(x) -> str:
    # floats use the shortest round-tripping form so CSV columns reparse to
    # the exact values summarized in the JSON outputs
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _write_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8",
                    newline="\n")


def _report_dict(report) -> dict:
    return {
        "fractions": [float(v) for v in report.fractions],
        "pair_fractions": [float(v) for v in report.pair_fractions],
        "crosstalk_db": float(report.crosstalk_db),
        "phase_rel_rad": float(report.phase_rel_rad),
    }


def cmd_propagate(cfg, out: Path) -> None:
    layout = cfgmod.layout_from(cfg)
    opts = cfgmod.propagation_options(cfg)
    model = cfgmod.model_from(cfg, layout, opts)
    lam = cfg.propagation.wavelength
    traj = propagate(layout, model, lam, nominal_input(layout, lam), opts)

    n = layout.n_guides
    header = ["z_um"] + [f"I_{i}" for i in range(1, n + 1)] \
        + [f"phase_{i}" for i in range(1, n + 1)]
    rows = []
    for s in traj.samples:
        rows.append([s.z_um] + list(s.powers()) + list(np.angle(s.amplitudes)))
    _write_csv(out / "propagate.csv", header, rows)

    report = split_report(traj.final, layout.kind)
    _write_json(out / "propagate_summary.json", {
        "wavelength_nm": lam,
        "kind": layout.kind.value,
        "final": _report_dict(report),
        "integrator": {
            "n_steps": traj.stats.n_steps,
            "n_rhs_evals": traj.stats.n_rhs_evals,
            "max_norm_drift": traj.stats.max_norm_drift,
        },
    })


def cmd_sweep(cfg, out: Path) -> None:
    layout = cfgmod.layout_from(cfg)
    opts = cfgmod.propagation_options(cfg)
    model = cfgmod.model_from(cfg, layout, opts)
    sw = cfg.sweep
    curve = sweep_wavelength(layout, model, sw.lambda_min, sw.lambda_max,
                             sw.n_points, opts=opts)

    n = layout.n_guides
    header = ["lambda_nm"] + [f"frac_{i}" for i in range(1, n + 1)] \
        + ["crosstalk_db", "phase_rel_rad"]
    rows = [
        [lam] + list(r.fractions) + [r.crosstalk_db, r.phase_rel_rad]
        for lam, r in zip(curve.wavelengths_nm, curve.reports)
    ]
    _write_csv(out / "sweep.csv", header, rows)

    s = curve.summary
    _write_json(out / "sweep_summary.json", {
        "kind": layout.kind.value,
        "n_points": int(sw.n_points),
        "mean_fractions": [float(v) for v in s.mean_fractions],
        "std_fractions": [float(v) for v in s.std_fractions],
        "mean_pair_fractions": [float(v) for v in s.mean_pair_fractions],
        "worst_crosstalk_db": float(s.worst_crosstalk_db),
        "max_phase_dev_rad": float(s.max_phase_dev_rad),
    })


def cmd_farfield(cfg, out: Path) -> None:
    layout = cfgmod.layout_from(cfg)
    opts = cfgmod.propagation_options(cfg)
    model = cfgmod.model_from(cfg, layout, opts)
    ff = cfg.farfield
    traj = propagate(layout, model, ff.wavelength,
                     nominal_input(layout, ff.wavelength), opts)
    amps, pos = facet_emitters(traj.final, layout, ff.include_central_above)
    pattern = farfield_pattern(amps, pos, ff.wavelength, ff.waist,
                               ff.theta_max, ff.n_points)

    _write_csv(out / "farfield.csv", ["theta_rad", "intensity"],
               list(zip(pattern.angles_rad, pattern.intensity)))
    _write_json(out / "farfield_summary.json", {
        "wavelength_nm": ff.wavelength,
        "kind": layout.kind.value,
        "n_emitters": int(len(pos)),
        "emitter_positions_um": [float(v) for v in pos],
        "central_contrast": float(pattern.central_contrast),
        "fringe_spacing_rad": float(pattern.fringe_spacing_rad),
        "classification": classify_fringe(pattern).value,
    })


def cmd_darkstate(cfg, out: Path) -> None:
    layout = cfgmod.layout_from(cfg)
    opts = cfgmod.propagation_options(cfg)
    model = cfgmod.model_from(cfg, layout, opts)
    lam = cfg.propagation.wavelength
    profile = adiabaticity_margin(layout, model, lam, cfg.propagation.samples)

    n = layout.n_guides
    header = ["z_um"] + [f"ev_{i}" for i in range(1, n + 1)] \
        + [f"dark_{i}" for i in range(1, n + 1)] + ["adiabaticity"]
    rows = []
    for z, a_val in zip(profile.z_um, profile.values):
        H = hamiltonian_at(layout, model, z, lam)
        es = eigensystem(H)
        rows.append([z] + list(es.eigenvalues) + list(dark_state(H)) + [a_val])
    _write_csv(out / "darkstate.csv", header, rows)


def cmd_optimize(cfg, out: Path) -> None:
    d = cfg.design
    objective = ObjectiveConfig(
        weights=ObjectiveWeights(d.w_crosstalk, d.w_imbalance, d.w_length,
                                 d.w_adiabaticity),
        lam_min=cfg.sweep.lambda_min, lam_max=cfg.sweep.lambda_max,
        n_points=d.band_points,
        crosstalk_requirement_db=d.requirement_db,
        width_um=cfg.geometry.width,
        kappa_ref=(cfg.coupling.kappa_ref
                   if cfg.coupling.kappa_ref != cfgmod.AUTO
                   else cfgmod.DEFAULT_KAPPA_REF),
        lambda0=cfg.coupling.lambda0, rho=cfg.coupling.rho,
        detuning=cfg.coupling.detuning,
        options=cfgmod.propagation_options(cfg),
    )
    bounds = ParameterBounds(
        alpha_deg=(d.alpha_min, d.alpha_max),
        separation_um=(d.separation_min, d.separation_max),
        half_length_um=(d.half_length_min, d.half_length_max),
        target_ratio=(d.ratio_min, d.ratio_max),
    )
    steps = (d.steps_alpha, d.steps_separation, d.steps_half_length,
             d.steps_ratio)
    ranked = grid_search(bounds, steps, objective, budget=d.budget)
    best = ranked[0]
    if d.refine_iters > 0 and best.valid:
        best = refine_local(best, objective, d.refine_iters)

    header = ["rank", "alpha_deg", "separation_um", "half_length_um",
              "target_ratio", "worst_crosstalk_db", "band_imbalance",
              "device_length_um", "max_adiabaticity", "score", "valid"]
    rows = []
    for rank, cand in enumerate(ranked, start=1):
        o = cand.objectives
        rows.append([
            rank, cand.params.alpha_deg, cand.params.separation_um,
            cand.params.half_length_um, cand.params.target_ratio,
            o.worst_crosstalk_db if cand.valid else math.nan,
            o.band_imbalance if cand.valid else math.nan,
            o.device_length_um if cand.valid else math.nan,
            o.max_adiabaticity if cand.valid else math.nan,
            cand.score, int(cand.valid),
        ])
    _write_csv(out / "optimize.csv", header, rows)

    _write_json(out / "optimize_best.json", {
        "params": {
            "alpha_deg": best.params.alpha_deg,
            "separation_um": best.params.separation_um,
            "half_length_um": best.params.half_length_um,
            "target_ratio": best.params.target_ratio,
        },
        "objectives": None if not best.valid else {
            "worst_crosstalk_db": best.objectives.worst_crosstalk_db,
            "band_imbalance": best.objectives.band_imbalance,
            "device_length_um": best.objectives.device_length_um,
            "max_adiabaticity": best.objectives.max_adiabaticity,
        },
        "score": best.score,
        "refined": bool(d.refine_iters > 0),
    })


def cmd_calibrate(cfg, out: Path) -> None:
    layout = cfgmod.layout_from(cfg)
    opts = cfgmod.propagation_options(cfg)
    c = cfg.coupling
    delta0 = calibrate_decay(layout, c.target_ratio, c.lambda0)
    base = calibrated_model(layout, c.target_ratio, 1.0, c.lambda0, c.rho,
                            c.detuning)
    kappa_ref = calibrate_strength(layout, base, c.lambda0,
                                   c.crosstalk_target_db, kappa_min=c.kappa_min,
                                   kappa_max=c.kappa_max,
                                   resolution=c.resolution, opts=opts)
    model = calibrated_model(layout, c.target_ratio, kappa_ref, c.lambda0,
                             c.rho, c.detuning)
    traj = propagate(layout, model, c.lambda0,
                     nominal_input(layout, c.lambda0), opts)
    report = split_report(traj.final, layout.kind)
    _write_json(out / "calibrate.json", {
        "delta_decay_um": float(delta0),
        "d_ref_um": float(model.d_ref),
        "kappa_ref": float(kappa_ref),
        "crosstalk_target_db": float(c.crosstalk_target_db),
        "achieved_crosstalk_db": float(report.crosstalk_db),
        "search": {
            "kappa_min": float(c.kappa_min),
            "kappa_max": float(c.kappa_max),
            "resolution": float(c.resolution),
        },
    })


_COMMANDS = {
    "propagate": cmd_propagate,
    "sweep": cmd_sweep,
    "farfield": cmd_farfield,
    "optimize": cmd_optimize,
    "darkstate": cmd_darkstate,
    "calibrate": cmd_calibrate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sapsim",
        description="Coupled-mode simulator and design toolkit for "
                    "adiabatic-passage integrated beam splitters.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="INI or JSON config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--override", action="append", default=[],
                       metavar="SECTION.KEY=VALUE",
                       help="override one config value (repeatable)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = cfgmod.load_config(args.config, args.override)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except CalibrationError as exc:
        print(f"calibration failure: {exc}", file=sys.stderr)
        return 4
    except SapsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
