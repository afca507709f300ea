"""Waveguide-array layouts for adiabatic-passage beam splitters.

Units: transverse positions, separations, widths and z are in micrometers.
All separations are center-to-center. Layouts are immutable after
construction and safe to share between threads.

Three kinds are supported:

* ``SAP3``:    two straight outer guides (1, 3) a distance ``s`` apart and an
  inclined middle guide (2) that starts near guide 3 and ends near guide 1,
  crossing the midpoint at z = L. Total length 2L.
* ``FSAP3``:   the same structure truncated at z = f*L (fractional device).
* ``FOLDED5``: two mirror-image SAP3 halves sharing the central guide 3;
  straight guides 1, 3, 5 at 0, s, 2s; inclined guides 2 and 4 start near
  the outer guides and end near the center. Total length 2L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import GeometryError

# Sanity bound on inclinations; adiabatic-passage angles are fractions of a degree.
MAX_SLOPE = math.tan(math.radians(5.0))


class Kind(str, Enum):
    SAP3 = "sap3"
    FSAP3 = "fsap3"
    FOLDED5 = "folded5"


@dataclass(frozen=True)
class WaveguidePath:
    """Straight centerline x(z) = x0 + slope * z.

    Attributes
    ----------
    x0:
        Transverse position at z = 0 (um).
    slope:
        Lateral rate dx/dz (dimensionless); 0 for straight guides,
        +-tan(alpha) for inclined ones.
    label:
        1-based guide index.
    """

    x0: float
    slope: float
    label: int

    def __post_init__(self):
        if abs(self.slope) > MAX_SLOPE:
            raise GeometryError(
                f"waveguide {self.label}: |slope| {abs(self.slope):.3g} exceeds "
                f"tan(5 deg) = {MAX_SLOPE:.3g}"
            )

    def position(self, z: float) -> float:
        return self.x0 + self.slope * z


@dataclass(frozen=True)
class GeometrySpec:
    """Build parameters of a layout, kept for rebuilds in parameter scans."""

    kind: Kind
    half_length_um: float
    outer_separation_um: float
    angle_deg: float
    width_um: float
    cut_fraction: float = 1.0

    def rescaled(self, length_factor: float) -> "GeometrySpec":
        """Stretch the device by ``length_factor`` at fixed profile shape.

        The half length is multiplied and the inclination reduced so the
        lateral travel (hence every facet separation) is unchanged; the
        coupling profile versus normalized position is identical.
        """
        if length_factor <= 0:
            raise GeometryError("length_factor must be positive")
        tan_a = math.tan(math.radians(self.angle_deg)) / length_factor
        return GeometrySpec(
            kind=self.kind,
            half_length_um=self.half_length_um * length_factor,
            outer_separation_um=self.outer_separation_um,
            angle_deg=math.degrees(math.atan(tan_a)),
            width_um=self.width_um,
            cut_fraction=self.cut_fraction,
        )


@dataclass(frozen=True, eq=False)
class ArrayLayout:
    """An ordered set of straight waveguide paths over z in [0, z_end]."""

    paths: tuple
    z_end_um: float
    width_um: float
    kind: Kind
    spec: GeometrySpec = None

    @property
    def n_guides(self) -> int:
        return len(self.paths)

    @property
    def inclined_labels(self) -> tuple:
        """Labels of guides with nonzero slope, by kind convention."""
        return (2,) if self.kind in (Kind.SAP3, Kind.FSAP3) else (2, 4)

    @property
    def central_label(self) -> int:
        """The guide whose residual power defines crosstalk."""
        return 2 if self.kind in (Kind.SAP3, Kind.FSAP3) else 3

    @property
    def output_labels(self) -> tuple:
        """The two guides carrying the intended split outputs."""
        return (1, 3) if self.kind in (Kind.SAP3, Kind.FSAP3) else (1, 5)

    @property
    def input_label(self) -> int:
        return 1 if self.kind in (Kind.SAP3, Kind.FSAP3) else 3

    def _path(self, label: int) -> WaveguidePath:
        if not 1 <= label <= self.n_guides:
            raise GeometryError(f"guide label {label} out of range 1..{self.n_guides}")
        return self.paths[label - 1]

    def position(self, label: int, z: float) -> float:
        self._check_z(z)
        return self._path(label).position(z)

    def separation(self, i: int, j: int, z: float) -> float:
        """Center-to-center distance |x_j(z) - x_i(z)|."""
        self._check_z(z)
        return abs(self._path(j).position(z) - self._path(i).position(z))

    def _check_z(self, z: float):
        if not 0.0 <= z <= self.z_end_um:
            raise GeometryError(f"z = {z} outside [0, {self.z_end_um}]")


def separation(layout: ArrayLayout, i: int, j: int, z: float) -> float:
    """Center-to-center distance between guides i and j at position z (um)."""
    return layout.separation(i, j, z)


def _validate(layout: ArrayLayout) -> ArrayLayout:
    # Paths are straight, so checking transverse order and minimum separation
    # at both ends of the device covers every interior z.
    for z in (0.0, layout.z_end_um):
        xs = [p.position(z) for p in layout.paths]
        for a, b, pa, pb in zip(xs, xs[1:], layout.paths, layout.paths[1:]):
            if b <= a:
                raise GeometryError(
                    f"guides {pa.label} and {pb.label} cross or touch at z = {z:g} um"
                )
            if b - a < layout.width_um:
                raise GeometryError(
                    f"guides {pa.label} and {pb.label} overlap at z = {z:g} um: "
                    f"separation {b - a:.3f} um < width {layout.width_um:g} um"
                )
    return layout


def _check_common(half_length: float, outer_separation: float, angle_deg: float,
                  width: float):
    if half_length <= 0:
        raise GeometryError("half_length must be positive")
    if outer_separation <= 0:
        raise GeometryError("outer_separation must be positive")
    if angle_deg < 0:
        raise GeometryError("angle must be non-negative")
    if width <= 0:
        raise GeometryError("width must be positive")


def build_sap3(half_length: float, outer_separation: float, angle_deg: float,
               width: float) -> ArrayLayout:
    """Three-guide adiabatic-passage coupler of total length 2L.

    Guides 1 and 3 run parallel at separation ``outer_separation``; guide 2
    is inclined with slope -tan(angle) and crosses the midpoint at z = L, so
    it starts nearer guide 3 (strong kappa_23 first, the counterintuitive
    ordering needed for 1 -> 3 transfer) and ends nearer guide 1.
    """
    _check_common(half_length, outer_separation, angle_deg, width)
    tan_a = math.tan(math.radians(angle_deg))
    s = outer_separation
    paths = (
        WaveguidePath(0.0, 0.0, 1),
        WaveguidePath(s / 2 + half_length * tan_a, -tan_a, 2),
        WaveguidePath(s, 0.0, 3),
    )
    spec = GeometrySpec(Kind.SAP3, half_length, outer_separation, angle_deg, width)
    return _validate(ArrayLayout(paths, 2 * half_length, width, Kind.SAP3, spec))


def build_fsap3(half_length: float, outer_separation: float, angle_deg: float,
                width: float, cut_fraction: float) -> ArrayLayout:
    """SAP3 truncated at z = cut_fraction * L (fractional coupler).

    cut_fraction = 1 cuts exactly at the midpoint, freezing the equal
    superposition; values != 1 model dicing imprecision. cut_fraction = 2
    reproduces the full SAP3 device.
    """
    if not 0 < cut_fraction <= 2:
        raise GeometryError("cut_fraction must lie in (0, 2]")
    full = build_sap3(half_length, outer_separation, angle_deg, width)
    spec = GeometrySpec(Kind.FSAP3, half_length, outer_separation, angle_deg,
                        width, cut_fraction)
    return _validate(ArrayLayout(full.paths, cut_fraction * half_length, width,
                                 Kind.FSAP3, spec))


def build_folded5(half_length: float, outer_separation: float, angle_deg: float,
                  width: float) -> ArrayLayout:
    """Five-guide splitter: two mirrored SAP3 halves sharing guide 3.

    Straight guides 1, 3, 5 sit at x = 0, s, 2s. The inclined guides 2 and 4
    start near the outer guides and end near the center, so the zero-eigenvalue
    supermode evolves from the central guide into the symmetric superposition
    of guides 1 and 5. Mirror symmetry about guide 3 holds at every z.
    """
    _check_common(half_length, outer_separation, angle_deg, width)
    tan_a = math.tan(math.radians(angle_deg))
    s = outer_separation
    paths = (
        WaveguidePath(0.0, 0.0, 1),
        WaveguidePath(s / 2 - half_length * tan_a, tan_a, 2),
        WaveguidePath(s, 0.0, 3),
        WaveguidePath(3 * s / 2 + half_length * tan_a, -tan_a, 4),
        WaveguidePath(2 * s, 0.0, 5),
    )
    spec = GeometrySpec(Kind.FOLDED5, half_length, outer_separation, angle_deg, width)
    return _validate(ArrayLayout(paths, 2 * half_length, width, Kind.FOLDED5, spec))


def build_layout(spec: GeometrySpec) -> ArrayLayout:
    """Construct the layout described by a GeometrySpec."""
    if spec.kind == Kind.SAP3:
        return build_sap3(spec.half_length_um, spec.outer_separation_um,
                          spec.angle_deg, spec.width_um)
    if spec.kind == Kind.FSAP3:
        return build_fsap3(spec.half_length_um, spec.outer_separation_um,
                           spec.angle_deg, spec.width_um, spec.cut_fraction)
    if spec.kind == Kind.FOLDED5:
        return build_folded5(spec.half_length_um, spec.outer_separation_um,
                             spec.angle_deg, spec.width_um)
    raise GeometryError(f"unknown layout kind {spec.kind!r}")
