"""Hamiltonian assembly and propagation of -i da/dz = H(z) a.

H is real symmetric with nearest-neighbor couplings from the layout and
coupling model (1/mm), zero diagonal on straight guides and the detuning on
inclined ones. Evolution is therefore unitary; the integrators work in mm
internally while the public surface stays in um.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .coupling import CouplingModel
from .errors import IntegrationError
from .geometry import ArrayLayout

UM_PER_MM = 1000.0


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Coupled-mode matrix sampled at one position."""

    matrix: np.ndarray   # (n, n) real symmetric, 1/mm
    z_um: float

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex modal amplitudes at one position and wavelength."""

    amplitudes: np.ndarray   # (n,) complex
    z_um: float
    wavelength_nm: float

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def powers(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class IntegratorStats:
    n_steps: int
    n_rhs_evals: int
    max_norm_drift: float


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled evolution plus the context needed to rerun it."""

    samples: tuple            # StateVector at strictly increasing z
    stats: IntegratorStats
    layout: ArrayLayout
    model: CouplingModel
    wavelength_nm: float
    options: "PropagationOptions"

    @property
    def final(self) -> StateVector:
        return self.samples[-1]

    @property
    def z_um(self) -> np.ndarray:
        return np.array([s.z_um for s in self.samples])

    @property
    def amplitudes(self) -> np.ndarray:
        """(n_samples, n) complex matrix of the sampled amplitudes."""
        return np.array([s.amplitudes for s in self.samples])


@dataclass(frozen=True)
class PropagationOptions:
    rtol: float = 1e-10
    atol: float = 1e-12
    n_samples: int = 512
    method: str = "DOP853"

    def __post_init__(self):
        if self.n_samples < 2:
            raise ValueError("n_samples must be at least 2")


DEFAULT_OPTIONS = PropagationOptions()


def unit_state(n: int, label: int, lam: float, z_um: float = 0.0) -> StateVector:
    """Basis state with unit amplitude in the given 1-based guide."""
    a = np.zeros(n, dtype=complex)
    a[label - 1] = 1.0
    return StateVector(a, z_um, lam)


def nominal_input(layout: ArrayLayout, lam: float) -> StateVector:
    """The launch state: guide 1 for SAP3/FSAP3, central guide for FOLDED5."""
    return unit_state(layout.n_guides, layout.input_label, lam)


def hamiltonian_at(layout: ArrayLayout, model: CouplingModel, z: float,
                   lam: float) -> Hamiltonian:
    """Coupled-mode matrix at position z (um) and wavelength lam (nm)."""
    n = layout.n_guides
    H = np.zeros((n, n))
    for i in range(1, n):
        k = model.kappa(layout.separation(i, i + 1, z), lam)
        H[i - 1, i] = H[i, i - 1] = k
    for label in layout.inclined_labels:
        H[label - 1, label - 1] = model.detuning
    return Hamiltonian(H, z)


def _h_builder(layout: ArrayLayout, model: CouplingModel, lam: float):
    """Fast H(z_mm) closure used inside the integration loops."""
    n = layout.n_guides
    dx0 = np.array([layout.paths[i + 1].x0 - layout.paths[i].x0
                    for i in range(n - 1)])
    dslope = np.array([layout.paths[i + 1].slope - layout.paths[i].slope
                       for i in range(n - 1)])
    delta_lam = model.decay_length(lam)
    kref, dref = model.kappa_ref, model.d_ref
    idx = np.arange(n - 1)
    diag = np.zeros(n)
    for label in layout.inclined_labels:
        diag[label - 1] = model.detuning

    def build(z_mm: float) -> np.ndarray:
        seps = np.abs(dx0 + dslope * (z_mm * UM_PER_MM))
        ks = kref * np.exp(-(seps - dref) / delta_lam)
        H = np.diag(diag).astype(float)
        H[idx, idx + 1] = ks
        H[idx + 1, idx] = ks
        return H

    return build


def propagate(layout: ArrayLayout, model: CouplingModel, lam: float,
              state: StateVector, opts: PropagationOptions = None) -> Trajectory:
    """Integrate -i da/dz = H(z) a from z = 0 to the layout end.

    Uses an adaptive embedded Runge-Kutta pair (DOP853 by default) with
    dense output; the returned trajectory holds ``opts.n_samples`` equally
    spaced samples, the first at z = 0 and the last at z_end.
    """
    opts = opts or DEFAULT_OPTIONS
    build = _h_builder(layout, model, lam)
    z_end_mm = layout.z_end_um / UM_PER_MM
    a0 = np.asarray(state.amplitudes, dtype=complex)

    def rhs(z_mm, a):
        return 1j * (build(z_mm) @ a)

    sol = solve_ivp(rhs, (0.0, z_end_mm), a0, method=opts.method,
                    rtol=opts.rtol, atol=opts.atol, dense_output=True)
    if not sol.success:
        raise IntegrationError(
            f"propagation failed at lam = {lam} nm: {sol.message}"
        )

    zs_mm = np.linspace(0.0, z_end_mm, opts.n_samples)
    ys = sol.sol(zs_mm)
    ys[:, 0] = a0                 # dense output is exact at the knots anyway
    ys[:, -1] = sol.y[:, -1]
    norm0 = np.linalg.norm(a0)
    norms = np.linalg.norm(ys, axis=0)
    samples = tuple(
        StateVector(ys[:, i].copy(), zs_mm[i] * UM_PER_MM, lam)
        for i in range(opts.n_samples)
    )
    stats = IntegratorStats(
        n_steps=len(sol.t) - 1,
        n_rhs_evals=int(sol.nfev),
        max_norm_drift=float(np.max(np.abs(norms - norm0))),
    )
    return Trajectory(samples, stats, layout, model, lam, opts)


def propagate_oracle(layout: ArrayLayout, model: CouplingModel, lam: float,
                     state: StateVector, n_slices: int) -> StateVector:
    """Piecewise-constant reference propagator.

    Splits [0, z_end] into n_slices slices and applies exp(i H(z_mid) dz)
    per slice through the exact eigendecomposition of the small real
    symmetric matrix. Exactly norm-preserving; second-order accurate in the
    slice width. Independent of the adaptive integrator by construction.
    """
    if n_slices < 1:
        raise ValueError("n_slices must be at least 1")
    build = _h_builder(layout, model, lam)
    z_end_mm = layout.z_end_um / UM_PER_MM
    dz = z_end_mm / n_slices
    a = np.asarray(state.amplitudes, dtype=complex).copy()
    for i in range(n_slices):
        H = build((i + 0.5) * dz)
        w, V = np.linalg.eigh(H)
        a = (V * np.exp(1j * w * dz)) @ (V.conj().T @ a)
    return StateVector(a, layout.z_end_um, lam)


def backpropagate_check(trajectory: Trajectory) -> float:
    """Integrate the final state backward and return the Euclidean distance
    to the original input; small residuals certify the forward solution."""
    layout, model = trajectory.layout, trajectory.model
    opts = trajectory.options
    build = _h_builder(layout, model, trajectory.wavelength_nm)
    z_end_mm = layout.z_end_um / UM_PER_MM

    def rhs(z_mm, a):
        return 1j * (build(z_mm) @ a)

    sol = solve_ivp(rhs, (z_end_mm, 0.0), trajectory.final.amplitudes,
                    method=opts.method, rtol=opts.rtol, atol=opts.atol)
    if not sol.success:
        raise IntegrationError(f"backward propagation failed: {sol.message}")
    return float(np.linalg.norm(sol.y[:, -1] - trajectory.samples[0].amplitudes))
