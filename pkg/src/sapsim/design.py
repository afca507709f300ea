"""Geometry/coupling trade-off search for the 5-guide splitter.

A candidate is scored by a weighted sum of normalized objectives (lower is
better): band-worst crosstalk relative to the requirement, band splitting
imbalance, device length, and the peak adiabaticity metric. The scalarized
score matches the single-working-point style of the trade-off study; the
ranked table doubles as a Pareto inspection dump.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .analysis import adiabaticity_margin
from .coupling import calibrated_model
from .errors import GeometryError
from .geometry import GeometrySpec, Kind, build_layout
from .propagator import PropagationOptions
from .spectral import sweep_wavelength

_RANK_SCALE = {"crosstalk_db_per_10": 10.0, "length_cm": 1e4}


@dataclass(frozen=True)
class CandidateParams:
    alpha_deg: float
    separation_um: float
    half_length_um: float
    target_ratio: float

    def as_tuple(self):
        return (self.alpha_deg, self.separation_um, self.half_length_um,
                self.target_ratio)


@dataclass(frozen=True)
class Objectives:
    worst_crosstalk_db: float
    band_imbalance: float
    device_length_um: float
    max_adiabaticity: float


@dataclass(frozen=True)
class ObjectiveWeights:
    crosstalk: float = 1.0
    imbalance: float = 1.0
    length: float = 0.25
    adiabaticity: float = 0.5

    def __post_init__(self):
        vals = (self.crosstalk, self.imbalance, self.length, self.adiabaticity)
        if any(v < 0 for v in vals):
            raise ValueError("weights must be non-negative")
        if not any(v > 0 for v in vals):
            raise ValueError("at least one weight must be positive")


@dataclass(frozen=True)
class ObjectiveConfig:
    """Scoring configuration.

    Normalizations: crosstalk enters as (worst - requirement)/10 dB,
    imbalance as the band-max |raw output fraction - 0.5|, length in cm,
    adiabaticity as the bare metric. kappa_ref is held fixed across
    candidates (the decay length is recalibrated per candidate from
    target_ratio); nested closed-loop strength calibration is deliberately
    avoided.
    """

    weights: ObjectiveWeights = field(default_factory=ObjectiveWeights)
    lam_min: float = 1500.0
    lam_max: float = 1630.0
    n_points: int = 9
    crosstalk_requirement_db: float = -15.0
    width_um: float = 6.0
    kappa_ref: float = 0.7175
    lambda0: float = 1550.0
    rho: float = 1.0
    detuning: float = 0.0
    margin_samples: int = 201
    options: PropagationOptions = field(default_factory=PropagationOptions)


@dataclass(frozen=True)
class DesignCandidate:
    params: CandidateParams
    objectives: Objectives   # None when the geometry is invalid
    score: float
    valid: bool
    note: str = ""


def _score(objectives: Objectives, config: ObjectiveConfig) -> float:
    w = config.weights
    return (
        w.crosstalk * (objectives.worst_crosstalk_db
                       - config.crosstalk_requirement_db)
        / _RANK_SCALE["crosstalk_db_per_10"]
        + w.imbalance * objectives.band_imbalance
        + w.length * objectives.device_length_um / _RANK_SCALE["length_cm"]
        + w.adiabaticity * objectives.max_adiabaticity
    )


def evaluate_candidate(params: CandidateParams,
                       config: ObjectiveConfig) -> DesignCandidate:
    """Build, calibrate, sweep the band and score one parameter point."""
    try:
        spec = GeometrySpec(Kind.FOLDED5, params.half_length_um,
                            params.separation_um, params.alpha_deg,
                            config.width_um)
        layout = build_layout(spec)
        model = calibrated_model(layout, params.target_ratio, config.kappa_ref,
                                 config.lambda0, config.rho, config.detuning)
    except (GeometryError, ValueError) as exc:
        return DesignCandidate(params, None, math.inf, False, str(exc))

    curve = sweep_wavelength(layout, model, config.lam_min, config.lam_max,
                             config.n_points, opts=config.options)
    imbalance = max(abs(r.fractions[0] - 0.5) for r in curve.reports)
    margin = adiabaticity_margin(layout, model, config.lambda0,
                                 config.margin_samples).max_value
    objectives = Objectives(
        worst_crosstalk_db=curve.summary.worst_crosstalk_db,
        band_imbalance=imbalance,
        device_length_um=layout.z_end_um,
        max_adiabaticity=margin,
    )
    return DesignCandidate(params, objectives, _score(objectives, config), True)


@dataclass(frozen=True)
class ParameterBounds:
    alpha_deg: tuple = (0.015, 0.045)
    separation_um: tuple = (11.0, 33.0)
    half_length_um: tuple = (3750.0, 11250.0)
    target_ratio: tuple = (0.15, 0.15)


def _axis(bounds: tuple, steps: int) -> np.ndarray:
    if steps < 1:
        raise ValueError("steps must be at least 1")
    lo, hi = bounds
    if steps == 1:
        return np.array([0.5 * (lo + hi)])
    return np.linspace(lo, hi, steps)


def _rank_key(cand: DesignCandidate):
    length = cand.objectives.device_length_um if cand.valid else math.inf
    return (cand.score, length) + cand.params.as_tuple()


def grid_search(bounds: ParameterBounds, steps, config: ObjectiveConfig,
                budget: int = 2000) -> list:
    """Exhaustive evaluation over the Cartesian grid, ranked by score with
    ties broken by shorter device, then lexicographic parameters.

    ``steps`` is a 4-tuple of per-axis counts (alpha, separation,
    half_length, target_ratio).
    """
    axes = [
        _axis(bounds.alpha_deg, steps[0]),
        _axis(bounds.separation_um, steps[1]),
        _axis(bounds.half_length_um, steps[2]),
        _axis(bounds.target_ratio, steps[3]),
    ]
    total = int(np.prod([len(ax) for ax in axes]))
    if total > budget:
        raise ValueError(f"grid of {total} points exceeds budget {budget}")

    candidates = []
    for a in axes[0]:
        for s in axes[1]:
            for L in axes[2]:
                for r in axes[3]:
                    candidates.append(evaluate_candidate(
                        CandidateParams(float(a), float(s), float(L), float(r)),
                        config))
    candidates.sort(key=_rank_key)
    return candidates


def refine_local(start: DesignCandidate, config: ObjectiveConfig,
                 max_iters: int = 60) -> DesignCandidate:
    """Derivative-free simplex polish around a candidate.

    Works in start-relative coordinates so the termination width 1e-3 is a
    relative simplex diameter; never returns a candidate worse than the
    start.
    """
    if max_iters <= 0:
        return start
    p0 = np.array(start.params.as_tuple())
    scale = np.where(np.abs(p0) > 0, np.abs(p0), 1.0)

    def objective(x):
        params = CandidateParams(*(x * scale))
        if params.alpha_deg < 0 or params.separation_um <= 0 \
                or params.half_length_um <= 0 \
                or not 0 < params.target_ratio < 1:
            return math.inf
        return evaluate_candidate(params, config).score

    result = minimize(objective, p0 / scale, method="Nelder-Mead",
                      options={"maxiter": max_iters, "xatol": 1e-3,
                               "fatol": 1e-12, "disp": False})
    best = evaluate_candidate(CandidateParams(*(result.x * scale)), config)
    return best if best.score <= start.score else start
