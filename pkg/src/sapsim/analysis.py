"""Physics extraction: dark states, eigensystems, adiabaticity, splits, loss.

The zero-eigenvalue supermode (dark state) of the nearest-neighbor matrix
has no amplitude on the inclined guides for any detuning:

    3 guides:  (k23, 0, -k12) / sqrt(k12^2 + k23^2)
    5 guides:  (-k23, 0, k12, 0, -k23) / sqrt(k12^2 + 2 k23^2)

Both are exact null vectors of the full matrix including the detuning
diagonal, because those diagonal entries only multiply the zero components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coupling import CouplingModel
from .geometry import ArrayLayout, Kind
from .propagator import Hamiltonian, StateVector, hamiltonian_at

CROSSTALK_FLOOR_DB = -120.0
DEGENERACY_GAP = 1e-12

_CENTRAL_INDEX = {Kind.SAP3: 1, Kind.FSAP3: 1, Kind.FOLDED5: 2}
_OUTPUT_INDICES = {Kind.SAP3: (0, 2), Kind.FSAP3: (0, 2), Kind.FOLDED5: (0, 4)}


def _as_matrix(H) -> np.ndarray:
    return np.asarray(H.matrix if isinstance(H, Hamiltonian) else H, dtype=float)


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Ascending eigenvalues and orthonormal eigenvectors (as columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    z_um: float = 0.0


def eigensystem(H, z_um: float = None) -> EigenSystem:
    """Exact symmetric eigendecomposition; eigenvalues ascend."""
    M = _as_matrix(H)
    w, V = np.linalg.eigh(M)
    z = z_um if z_um is not None else (H.z_um if isinstance(H, Hamiltonian) else 0.0)
    return EigenSystem(w, V, z)


def dark_state(H) -> np.ndarray:
    """Normalized zero-eigenvalue supermode of a 3- or 5-guide matrix.

    Constructed from the null-space structure (exact zeros on the inclined
    guides), sign-fixed so the input-guide component (guide 1 for the
    3-guide device, guide 3 for the 5-guide one) is non-negative.
    Raises ValueError when both couplings vanish.
    """
    M = _as_matrix(H)
    n = M.shape[0]
    k12 = M[0, 1]
    k23 = M[1, 2]
    if k12 == 0.0 and k23 == 0.0:
        raise ValueError("dark state undefined: all couplings are zero")
    if n == 3:
        v = np.array([k23, 0.0, -k12])
        ref = 0
    elif n == 5:
        if not (math.isclose(M[2, 3], k23, rel_tol=1e-9, abs_tol=1e-300)
                and math.isclose(M[3, 4], k12, rel_tol=1e-9, abs_tol=1e-300)):
            raise ValueError("5-guide matrix lacks the mirror coupling pattern")
        v = np.array([-k23, 0.0, k12, 0.0, -k23])
        ref = 2
    else:
        raise ValueError(f"dark state defined for 3 or 5 guides, got {n}")
    v /= np.linalg.norm(v)
    if v[ref] < 0:
        v = -v
    return v


@dataclass(frozen=True, eq=False)
class AdiabaticityProfile:
    """Rotation-over-gap metric A(z); smaller is more adiabatic."""

    z_um: np.ndarray
    values: np.ndarray
    flagged: tuple           # sample indices where the gap fell below 1e-12

    @property
    def max_value(self) -> float:
        return float(np.max(self.values))


def adiabaticity_margin(layout: ArrayLayout, model: CouplingModel, lam: float,
                        n_samples: int = 512) -> AdiabaticityProfile:
    """A(z) = max over non-dark supermodes k of |<v_k|d psi_dark/dz>| / gap_k.

    The dark state is evaluated on the sample grid (its closed form is
    sign-continuous in z) and differentiated by centered finite differences;
    end points use one-sided differences. Samples whose gap to the dark
    eigenvalue falls below 1e-12 are flagged and carry A = inf.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    zs = np.linspace(0.0, layout.z_end_um, n_samples)
    dz_mm = (zs[1] - zs[0]) / 1000.0
    hams = [hamiltonian_at(layout, model, z, lam) for z in zs]
    darks = np.array([dark_state(h) for h in hams])
    dpsi = np.gradient(darks, dz_mm, axis=0)

    values = np.zeros(n_samples)
    flagged = []
    for i, h in enumerate(hams):
        w, V = np.linalg.eigh(h.matrix)
        overlaps = V.T @ darks[i]
        dark_idx = int(np.argmax(np.abs(overlaps)))
        amax = 0.0
        for k in range(h.n):
            if k == dark_idx:
                continue
            gap = abs(w[k] - w[dark_idx])
            if gap < DEGENERACY_GAP:
                flagged.append(i)
                amax = np.inf
                break
            amax = max(amax, abs(float(V[:, k] @ dpsi[i])) / gap)
        values[i] = amax
    return AdiabaticityProfile(zs, values, tuple(flagged))


@dataclass(frozen=True, eq=False)
class SplitReport:
    """Power bookkeeping of one output state.

    fractions sum to 1 over all guides; pair_fractions renormalize the two
    intended outputs to each other; crosstalk is the central-guide fraction
    in dB (floored at -120 dB); phase_rel is arg(a_out1 * conj(a_out2))
    wrapped to (-pi, pi].
    """

    fractions: np.ndarray
    crosstalk_db: float
    phase_rel_rad: float
    pair_fractions: np.ndarray


def split_report(state: StateVector, kind: Kind) -> SplitReport:
    powers = state.powers()
    total = float(powers.sum())
    if total == 0.0:
        raise ValueError("total power is zero")
    fractions = powers / total

    central = fractions[_CENTRAL_INDEX[kind]]
    if central > 0.0:
        crosstalk = max(10.0 * math.log10(central), CROSSTALK_FLOOR_DB)
    else:
        crosstalk = CROSSTALK_FLOOR_DB

    i, j = _OUTPUT_INDICES[kind]
    a_i, a_j = state.amplitudes[i], state.amplitudes[j]
    phase = float(np.angle(a_i * np.conj(a_j)))
    if phase <= -math.pi:
        phase = math.pi

    pair_total = fractions[i] + fractions[j]
    if pair_total > 0:
        pair = np.array([fractions[i] / pair_total, fractions[j] / pair_total])
    else:
        pair = np.array([np.nan, np.nan])
    return SplitReport(fractions, crosstalk, phase, pair)


def loss_corrected_transfer(raw_output_powers, length_cm: float,
                            loss_db_per_cm: float, coupling_eff: float,
                            facet_transmission: float) -> float:
    """Undo the measurement-chain attenuation and return the transferred
    fraction.

    ``raw_output_powers`` are the measured powers at the intended output
    ports for unit launched power; the correction divides their sum by
    10^(-loss*length/10) * coupling_eff * facet_transmission.
    """
    if loss_db_per_cm < 0:
        raise ValueError("loss must be non-negative")
    if not 0 < coupling_eff <= 1:
        raise ValueError("coupling_eff must lie in (0, 1]")
    if not 0 < facet_transmission <= 1:
        raise ValueError("facet_transmission must lie in (0, 1]")
    attenuation = (10.0 ** (-loss_db_per_cm * length_cm / 10.0)
                   * coupling_eff * facet_transmission)
    return float(np.sum(raw_output_powers) / attenuation)
