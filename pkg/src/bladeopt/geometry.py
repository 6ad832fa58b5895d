"""Blade sections, Hicks-Henne deformation and blade reconstruction.

A blade is a stack of cylindrical cuts (sections). Each section is a closed
loop of 2D points in section-local coordinates ``(u, v)``: ``u`` is the
axial (chordwise) coordinate and ``v`` the tangential arc length at the cut
radius, both in meters.

Point-loop convention used throughout the package::

    index 0            upper-surface trailing-edge point   (chord param 1)
    ...                upper surface, running towards the leading edge
    leading_edge       leading-edge point                  (chord param 0)
    ...                lower surface, running back towards the trailing edge
    index n - 1        lower-surface trailing-edge point   (chord param 1)

The loop closes implicitly from the last point back to the first (the
trailing-edge base).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

__all__ = [
    "AirfoilSection",
    "BaselineConfig",
    "BladeGeometry",
    "DeformationParams",
    "GeometryError",
    "HicksHenneBasis",
    "SearchSpace",
    "SectionDeformation",
    "Violation",
    "basis_maxima",
    "build_blade",
    "check_feasibility",
    "decode",
    "deform_section",
    "encode",
    "geometry_diff",
    "geometry_distance",
    "hicks_henne",
    "search_dimension",
    "surface_normals",
    "synthetic_baseline",
]

_LOG_HALF = math.log(0.5)


class GeometryError(ValueError):
    """Raised for structurally invalid geometry or inconsistent parameters."""


def _frozen(array, dtype=float) -> np.ndarray:
    out = np.array(array, dtype=dtype)
    out.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# Hicks-Henne basis
# ---------------------------------------------------------------------------


def hicks_henne(x, x0: float):
    """Hicks-Henne bump ``sin(pi * x**(log 0.5 / log x0))**2``.

    Parameters
    ----------
    x : float or array_like
        Normalized chord position(s) in ``[0, 1]``.
    x0 : float
        Location of the unit maximum, in the open interval ``(0, 1)``.

    Returns
    -------
    float or ndarray
        Bump value(s) in ``[0, 1]``; zero at both chord ends.
    """
    if not 0.0 < x0 < 1.0:
        raise ValueError(f"x0 must lie in (0, 1), got {x0!r}")
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa)) or np.any(xa < 0.0) or np.any(xa > 1.0):
        raise ValueError("x must lie in [0, 1]")
    exponent = _LOG_HALF / math.log(x0)
    out = np.sin(np.pi * xa**exponent) ** 2
    # sin(pi) is not exactly zero in floating point
    out = np.where(xa == 1.0, 0.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def basis_maxima(n: int) -> list[float]:
    """Equally spaced maxima ``i / (n + 1)`` for ``i = 1..n``."""
    if int(n) != n or n < 1:
        raise ValueError(f"basis count must be a positive integer, got {n!r}")
    n = int(n)
    return [i / (n + 1) for i in range(1, n + 1)]


def search_dimension(n_hh: int) -> int:
    """Number of search variables for ``n_hh`` shape functions per section.

    Each of the three control sections carries ``n_hh`` amplitudes, one
    rotation and two shifts.
    """
    if int(n_hh) != n_hh or n_hh < 1:
        raise ValueError(f"n_hh must be a positive integer, got {n_hh!r}")
    return 3 * (int(n_hh) + 3)


@dataclass(frozen=True)
class HicksHenneBasis:
    count: int

    def __post_init__(self):
        basis_maxima(self.count)  # validates

    @property
    def maxima(self) -> list[float]:
        return basis_maxima(self.count)

    def matrix(self, chord_params) -> np.ndarray:
        """Basis values with shape ``(len(chord_params), count)``."""
        x = np.asarray(chord_params, dtype=float)
        return np.stack([hicks_henne(x, x0) for x0 in self.maxima], axis=-1)


# ---------------------------------------------------------------------------
# Sections and blades
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AirfoilSection:
    """One cylindrical cut of the blade.

    Arrays are stored read-only so sections can be shared freely between
    threads and candidate blades.
    """

    points: np.ndarray
    radius: float
    leading_edge: int
    chord_params: np.ndarray

    def __post_init__(self):
        pts = _frozen(self.points)
        cps = _frozen(self.chord_params)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise GeometryError(f"points must have shape (n, 2), got {pts.shape}")
        if cps.shape != (pts.shape[0],):
            raise GeometryError("chord_params must have one entry per point")
        if pts.shape[0] < 4:
            raise GeometryError("a section needs at least 4 points")
        if not np.all(np.isfinite(pts)):
            raise GeometryError("points must be finite")
        if np.any(cps < 0.0) or np.any(cps > 1.0):
            raise GeometryError("chord_params must lie in [0, 1]")
        le = int(self.leading_edge)
        if not 0 < le < pts.shape[0] - 1:
            raise GeometryError("leading_edge must be an interior index")
        if cps[le] != 0.0:
            raise GeometryError("chord_param at the leading edge must be 0")
        if cps[0] != 1.0 or cps[-1] != 1.0:
            raise GeometryError("chord_param at the trailing-edge points must be 1")
        if not self.radius > 0.0:
            raise GeometryError("radius must be positive")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "chord_params", cps)
        object.__setattr__(self, "leading_edge", le)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def leading_edge_point(self) -> np.ndarray:
        return self.points[self.leading_edge]

    @property
    def trailing_edge_point(self) -> np.ndarray:
        return 0.5 * (self.points[0] + self.points[-1])

    @property
    def chord(self) -> float:
        return float(np.linalg.norm(self.trailing_edge_point - self.leading_edge_point))

    def normals(self) -> np.ndarray:
        return surface_normals(self.points)


@dataclass(frozen=True, eq=False)
class BladeGeometry:
    sections: tuple[AirfoilSection, ...]
    control_indices: tuple[int, int, int]
    span_fractions: np.ndarray

    def __post_init__(self):
        sections = tuple(self.sections)
        spans = _frozen(self.span_fractions)
        ctrl = tuple(int(i) for i in self.control_indices)
        if len(sections) < 3:
            raise GeometryError("a blade needs at least 3 sections")
        counts = {s.n_points for s in sections}
        if len(counts) != 1:
            raise GeometryError(f"sections have inconsistent point counts: {sorted(counts)}")
        if spans.shape != (len(sections),):
            raise GeometryError("span_fractions must have one entry per section")
        if spans[0] != 0.0 or spans[-1] != 1.0 or np.any(np.diff(spans) <= 0):
            raise GeometryError("span_fractions must increase strictly from 0 to 1")
        if len(ctrl) != 3 or not (0 <= ctrl[0] < ctrl[1] < ctrl[2] < len(sections)):
            raise GeometryError(f"invalid control indices {ctrl}")
        object.__setattr__(self, "sections", sections)
        object.__setattr__(self, "span_fractions", spans)
        object.__setattr__(self, "control_indices", ctrl)

    @property
    def n_sections(self) -> int:
        return len(self.sections)

    @property
    def n_points(self) -> int:
        return self.sections[0].n_points

    @property
    def control_sections(self) -> tuple[AirfoilSection, ...]:
        return tuple(self.sections[i] for i in self.control_indices)

    def point_array(self) -> np.ndarray:
        """All section points, shape ``(n_sections, n_points, 2)``."""
        return np.stack([s.points for s in self.sections])

    def radii(self) -> np.ndarray:
        return np.array([s.radius for s in self.sections])

    def same_topology(self, other: "BladeGeometry") -> bool:
        return self.n_sections == other.n_sections and self.n_points == other.n_points

    def identical_to(self, other: "BladeGeometry") -> bool:
        """Bit-exact comparison of all geometric content."""
        if not self.same_topology(other):
            return False
        if self.control_indices != other.control_indices:
            return False
        if not np.array_equal(self.span_fractions, other.span_fractions):
            return False
        return all(
            a.radius == b.radius
            and a.leading_edge == b.leading_edge
            and np.array_equal(a.points, b.points)
            and np.array_equal(a.chord_params, b.chord_params)
            for a, b in zip(self.sections, other.sections)
        )


def _signed_area(points: np.ndarray) -> float:
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def surface_normals(points) -> np.ndarray:
    """Outward unit normals of a closed point loop.

    The tangent at each point averages the two adjacent unit segment
    directions; the outward side follows from the loop winding.
    """
    pts = np.asarray(points, dtype=float)
    seg_in = pts - np.roll(pts, 1, axis=0)
    seg_out = np.roll(pts, -1, axis=0) - pts

    def _unit(v):
        n = np.linalg.norm(v, axis=1, keepdims=True)
        return np.divide(v, n, out=np.zeros_like(v), where=n > 0)

    tangent = _unit(_unit(seg_in) + _unit(seg_out))
    if _signed_area(pts) >= 0.0:
        normal = np.column_stack([tangent[:, 1], -tangent[:, 0]])
    else:
        normal = np.column_stack([-tangent[:, 1], tangent[:, 0]])
    return normal


# ---------------------------------------------------------------------------
# Deformation parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SectionDeformation:
    amplitudes: tuple[float, ...]
    rotation: float = 0.0
    shift_axial: float = 0.0
    shift_tangential: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", tuple(float(a) for a in self.amplitudes))
        for name in ("rotation", "shift_axial", "shift_tangential"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def identity(cls, n: int) -> "SectionDeformation":
        return cls(amplitudes=(0.0,) * n)

    @property
    def is_identity(self) -> bool:
        return (
            not any(self.amplitudes)
            and self.rotation == 0.0
            and self.shift_axial == 0.0
            and self.shift_tangential == 0.0
        )

    def as_array(self) -> np.ndarray:
        return np.array(
            [*self.amplitudes, self.rotation, self.shift_axial, self.shift_tangential]
        )

    @classmethod
    def from_array(cls, values) -> "SectionDeformation":
        values = [float(v) for v in values]
        return cls(tuple(values[:-3]), values[-3], values[-2], values[-1])

    def lerp(self, other: "SectionDeformation", w: float) -> "SectionDeformation":
        """``self + w * (other - self)``; exact when both ends are equal."""
        a, b = self.as_array(), other.as_array()
        return SectionDeformation.from_array(a + w * (b - a))


@dataclass(frozen=True)
class DeformationParams:
    """Deformations of the hub, mid-span and shroud control sections."""

    per_section: tuple[SectionDeformation, SectionDeformation, SectionDeformation]
    basis: HicksHenneBasis

    def __post_init__(self):
        per = tuple(self.per_section)
        if len(per) != 3:
            raise GeometryError("exactly three control-section deformations are required")
        for d in per:
            if len(d.amplitudes) != self.basis.count:
                raise GeometryError(
                    f"expected {self.basis.count} amplitudes, got {len(d.amplitudes)}"
                )
        object.__setattr__(self, "per_section", per)

    @classmethod
    def identity(cls, n_hh: int) -> "DeformationParams":
        return cls((SectionDeformation.identity(n_hh),) * 3, HicksHenneBasis(n_hh))

    def flatten(self) -> np.ndarray:
        return np.concatenate([d.as_array() for d in self.per_section])

    @property
    def is_identity(self) -> bool:
        return all(d.is_identity for d in self.per_section)


def _triple(value) -> tuple[float, float, float]:
    if np.ndim(value) == 0:
        return (float(value),) * 3
    out = tuple(float(v) for v in value)
    if len(out) != 3:
        raise ValueError("per-section bounds need exactly three values")
    return out


@dataclass(frozen=True)
class SearchSpace:
    """Affine map between physical deformations and the unit search cube.

    Bounds are given per control section (hub, mid, shroud); a scalar is
    broadcast to all three. A normalized value of 0.5 maps to zero
    deformation, 0 and 1 to minus and plus the bound.
    """

    n_hh: int
    amplitude_bound: tuple[float, float, float]
    rotation_bound: tuple[float, float, float]
    shift_bound: tuple[float, float, float]

    def __post_init__(self):
        search_dimension(self.n_hh)
        for name in ("amplitude_bound", "rotation_bound", "shift_bound"):
            b = _triple(getattr(self, name))
            if not all(v > 0 for v in b):
                raise ValueError(f"{name} must be positive")
            object.__setattr__(self, name, b)

    @classmethod
    def for_blade(
        cls,
        blade: BladeGeometry,
        n_hh: int,
        amplitude_fraction: float = 0.02,
        rotation_bound_deg: float = 5.0,
        shift_fraction: float = 0.05,
    ) -> "SearchSpace":
        """Bounds scaled by the chord of each control section."""
        chords = [s.chord for s in blade.control_sections]
        return cls(
            n_hh=n_hh,
            amplitude_bound=tuple(amplitude_fraction * c for c in chords),
            rotation_bound=math.radians(rotation_bound_deg),
            shift_bound=tuple(shift_fraction * c for c in chords),
        )

    @property
    def dimension(self) -> int:
        return search_dimension(self.n_hh)

    def scale_vector(self) -> np.ndarray:
        """Physical half-range of every search component, in vector order."""
        blocks = []
        for k in range(3):
            blocks.append(
                [self.amplitude_bound[k]] * self.n_hh
                + [self.rotation_bound[k], self.shift_bound[k], self.shift_bound[k]]
            )
        return np.array(blocks, dtype=float).ravel()

    def identity_vector(self) -> np.ndarray:
        return np.full(self.dimension, 0.5)


def encode(params: DeformationParams, space: SearchSpace) -> np.ndarray:
    """Physical deformation -> vector in ``[0, 1]**N_search``.

    Layout: hub block, mid block, shroud block; within a block the
    amplitudes in basis order, then rotation, axial shift, tangential shift.
    """
    if params.basis.count != space.n_hh:
        raise GeometryError("basis count does not match the search space")
    vec = 0.5 + 0.5 * params.flatten() / space.scale_vector()
    if np.any(vec < 0.0) or np.any(vec > 1.0):
        raise GeometryError("deformation lies outside the search-space bounds")
    return vec


def decode(vector, space: SearchSpace) -> DeformationParams:
    """Vector in ``[0, 1]**N_search`` -> physical deformation."""
    v = np.asarray(vector, dtype=float)
    if v.shape != (space.dimension,):
        raise GeometryError(f"expected a vector of length {space.dimension}, got {v.shape}")
    if not np.all(np.isfinite(v)) or np.any(v < 0.0) or np.any(v > 1.0):
        raise GeometryError("search vector components must lie in [0, 1]")
    physical = (v - 0.5) * 2.0 * space.scale_vector()
    block = space.n_hh + 3
    per = tuple(
        SectionDeformation.from_array(physical[k * block : (k + 1) * block])
        for k in range(3)
    )
    return DeformationParams(per, HicksHenneBasis(space.n_hh))


# ---------------------------------------------------------------------------
# Deformation and reconstruction
# ---------------------------------------------------------------------------


def deform_section(
    section: AirfoilSection, d: SectionDeformation, basis: HicksHenneBasis
) -> AirfoilSection:
    """Apply HH normal displacement, rotation about the LE, then shifts.

    Zero components are skipped so that the identity deformation returns
    bit-identical coordinates.
    """
    if len(d.amplitudes) != basis.count:
        raise GeometryError(f"expected {basis.count} amplitudes, got {len(d.amplitudes)}")
    pts = section.points
    if any(d.amplitudes):
        magnitude = basis.matrix(section.chord_params) @ np.asarray(d.amplitudes)
        pts = pts + magnitude[:, None] * section.normals()
    if d.rotation != 0.0:
        c, s = math.cos(d.rotation), math.sin(d.rotation)
        le = pts[section.leading_edge].copy()
        rel = pts - le
        pts = le + np.column_stack([c * rel[:, 0] - s * rel[:, 1], s * rel[:, 0] + c * rel[:, 1]])
        # the pivot itself stays put exactly
        pts[section.leading_edge] = le
    if d.shift_axial != 0.0 or d.shift_tangential != 0.0:
        pts = pts + np.array([d.shift_axial, d.shift_tangential])
    if pts is section.points:
        return section
    return replace(section, points=pts)


def _section_deformation(blade: BladeGeometry, params: DeformationParams, j: int):
    spans = blade.span_fractions
    hub, mid, tip = blade.control_indices
    d_hub, d_mid, d_tip = params.per_section
    if j <= hub:
        return d_hub
    if j >= tip:
        return d_tip
    if j == mid:
        return d_mid
    a, b, da, db = (hub, mid, d_hub, d_mid) if j < mid else (mid, tip, d_mid, d_tip)
    w = (spans[j] - spans[a]) / (spans[b] - spans[a])
    return da.lerp(db, float(w))


def build_blade(baseline: BladeGeometry, params: DeformationParams) -> BladeGeometry:
    """Deform the control sections and interpolate the rest along the span.

    Sections between two control sections receive the linearly interpolated
    amplitudes, rotation and shifts (equivalently the interpolated normal
    displacement field); sections outside the control span take the nearest
    control section's deformation.
    """
    if params.is_identity:
        return baseline
    sections = tuple(
        deform_section(s, _section_deformation(baseline, params, j), params.basis)
        for j, s in enumerate(baseline.sections)
    )
    return replace(baseline, sections=sections)


# ---------------------------------------------------------------------------
# Feasibility
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    section: int
    kind: str  # "self-intersection" or "thickness"
    detail: str


def _orient(a, b, c):
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (
        c[..., 0] - a[..., 0]
    )


def _on_segment(a, b, p):
    return (
        (np.minimum(a[..., 0], b[..., 0]) <= p[..., 0])
        & (p[..., 0] <= np.maximum(a[..., 0], b[..., 0]))
        & (np.minimum(a[..., 1], b[..., 1]) <= p[..., 1])
        & (p[..., 1] <= np.maximum(a[..., 1], b[..., 1]))
    )


def crossing_segment_pairs(points) -> list[tuple[int, int]]:
    """Pairs ``(i, j)`` of non-adjacent loop segments that intersect.

    Segment ``i`` runs from point ``i`` to point ``(i + 1) % n``.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]
    p1, p2 = pts[i], pts[(i + 1) % n]
    q1, q2 = pts[j], pts[(j + 1) % n]
    o1, o2 = _orient(p1, p2, q1), _orient(p1, p2, q2)
    o3, o4 = _orient(q1, q2, p1), _orient(q1, q2, p2)
    hit = (o1 * o2 < 0) & (o3 * o4 < 0)
    hit |= (o1 == 0) & _on_segment(p1, p2, q1)
    hit |= (o2 == 0) & _on_segment(p1, p2, q2)
    hit |= (o3 == 0) & _on_segment(q1, q2, p1)
    hit |= (o4 == 0) & _on_segment(q1, q2, p2)
    return [(int(a), int(b)) for a, b in zip(i[hit], j[hit])]


def section_thickness(section: AirfoilSection, window=(0.02, 0.98)) -> np.ndarray:
    """Upper-to-lower surface distance at the upper-surface chord stations.

    Only stations with chord param inside ``window`` are reported; the
    thickness closes to zero at the leading edge by construction.
    """
    le = section.leading_edge
    up_pts = section.points[: le + 1][::-1]
    up_x = section.chord_params[: le + 1][::-1]
    lo_pts = section.points[le:]
    lo_x = section.chord_params[le:]
    sel = (up_x >= window[0]) & (up_x <= window[1])
    xs = up_x[sel]
    lo_u = np.interp(xs, lo_x, lo_pts[:, 0])
    lo_v = np.interp(xs, lo_x, lo_pts[:, 1])
    return np.hypot(up_pts[sel, 0] - lo_u, up_pts[sel, 1] - lo_v)


def check_feasibility(
    blade: BladeGeometry, min_thickness_fraction: float = 0.001
) -> list[Violation]:
    """Empty list if every section is a simple loop with adequate thickness."""
    violations = []
    for k, section in enumerate(blade.sections):
        pairs = crossing_segment_pairs(section.points)
        if pairs:
            violations.append(
                Violation(k, "self-intersection", f"{len(pairs)} crossing segment pair(s), first {pairs[0]}")
            )
        thickness = section_thickness(section)
        limit = min_thickness_fraction * section.chord
        if thickness.size and thickness.min() < limit:
            violations.append(
                Violation(k, "thickness", f"min thickness {thickness.min():.3e} m < {limit:.3e} m")
            )
    return violations


# ---------------------------------------------------------------------------
# Comparison
# ---------------------------------------------------------------------------


def _require_same_topology(a: BladeGeometry, b: BladeGeometry):
    if not a.same_topology(b):
        raise GeometryError(
            f"topology mismatch: {a.n_sections}x{a.n_points} vs {b.n_sections}x{b.n_points}"
        )


def geometry_diff(a: BladeGeometry, b: BladeGeometry) -> np.ndarray:
    """Signed displacement of ``b`` relative to ``a`` along ``a``'s outward normals.

    Returns an array of shape ``(n_sections, n_points)``; positive values
    mean ``b`` lies outside ``a``.
    """
    _require_same_topology(a, b)
    delta = b.point_array() - a.point_array()
    normals = np.stack([s.normals() for s in a.sections])
    return np.einsum("spk,spk->sp", delta, normals)


def geometry_distance(a: BladeGeometry, b: BladeGeometry) -> float:
    """RMS Euclidean point displacement, radial offsets included (meters)."""
    _require_same_topology(a, b)
    delta = b.point_array() - a.point_array()
    dr = (b.radii() - a.radii())[:, None]
    sq = np.sum(delta**2, axis=-1) + dr**2
    return float(np.sqrt(np.mean(sq)))


# ---------------------------------------------------------------------------
# Synthetic baseline
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BaselineConfig:
    """Parameters of the synthetic fan-blade baseline.

    Sections use 4-digit-style thickness and camber polynomials; thickness,
    camber, chord and stagger vary linearly from hub to tip.
    """

    n_sections: int = 11
    n_points: int = 61
    hub_radius: float = 0.20
    tip_radius: float = 0.60
    chord_hub: float = 0.12
    chord_tip: float = 0.16
    thickness_hub: float = 0.12
    thickness_tip: float = 0.08
    camber_hub: float = 0.06
    camber_tip: float = 0.02
    camber_position: float = 0.45
    trailing_edge_thickness: float = 0.03
    stagger_hub_deg: float = 30.0
    stagger_tip_deg: float = 60.0
    control_spans: tuple[float, float, float] = field(default=(0.1, 0.5, 0.9))


def _cosine_stations(n: int) -> np.ndarray:
    return 0.5 * (1.0 - np.cos(np.linspace(0.0, np.pi, n)))


def _naca_section(chord_x, thickness, camber, camber_pos, te_thickness=0.0):
    x = chord_x
    yt = 5.0 * thickness * (
        0.2969 * np.sqrt(x) - 0.1260 * x - 0.3516 * x**2 + 0.2843 * x**3 - 0.1015 * x**4
    ) + 0.5 * te_thickness * x
    if camber > 0.0:
        p = camber_pos
        fwd = x < p
        yc = np.where(fwd, camber / p**2 * (2 * p * x - x**2),
                      camber / (1 - p) ** 2 * ((1 - 2 * p) + 2 * p * x - x**2))
        dyc = np.where(fwd, 2 * camber / p**2 * (p - x), 2 * camber / (1 - p) ** 2 * (p - x))
    else:
        yc = np.zeros_like(x)
        dyc = np.zeros_like(x)
    theta = np.arctan(dyc)
    upper = np.column_stack([x - yt * np.sin(theta), yc + yt * np.cos(theta)])
    lower = np.column_stack([x + yt * np.sin(theta), yc - yt * np.cos(theta)])
    return upper, lower


def synthetic_baseline(config: BaselineConfig | None = None) -> BladeGeometry:
    """Deterministic, feasible baseline blade standing in for a real design."""
    cfg = config or BaselineConfig()
    if cfg.n_sections < 3:
        raise GeometryError("need at least 3 sections")
    if cfg.n_points < 20:
        raise GeometryError("need at least 20 points per section")
    if not cfg.tip_radius > cfg.hub_radius > 0.0:
        raise GeometryError("require 0 < hub_radius < tip_radius")
    if not (cfg.chord_hub > 0.0 and cfg.chord_tip > 0.0):
        raise GeometryError("chords must be positive")
    if cfg.trailing_edge_thickness < 0.0:
        raise GeometryError("trailing_edge_thickness must be non-negative")
    if not (0.0 < cfg.camber_position < 1.0):
        raise GeometryError("camber_position must lie in (0, 1)")

    n_up = cfg.n_points // 2 + 1
    n_lo = cfg.n_points - n_up
    x_up = _cosine_stations(n_up)[::-1]  # 1 -> 0
    x_lo = _cosine_stations(n_lo + 1)[1:]  # (0, 1]
    x_up[0], x_up[-1], x_lo[-1] = 1.0, 0.0, 1.0
    chord_params = np.concatenate([x_up, x_lo])

    spans = np.linspace(0.0, 1.0, cfg.n_sections)
    spans[-1] = 1.0
    sections = []
    for s in spans:
        lerp = lambda a, b: a + s * (b - a)  # noqa: E731
        chord = lerp(cfg.chord_hub, cfg.chord_tip)
        stagger = math.radians(lerp(cfg.stagger_hub_deg, cfg.stagger_tip_deg))
        shape = (lerp(cfg.thickness_hub, cfg.thickness_tip), lerp(cfg.camber_hub, cfg.camber_tip),
                 cfg.camber_position, cfg.trailing_edge_thickness)
        upper, _ = _naca_section(x_up, *shape)
        _, lower = _naca_section(x_lo, *shape)
        local = chord * np.vstack([upper, lower])
        c, sn = math.cos(stagger), math.sin(stagger)
        pts = np.column_stack([c * local[:, 0] - sn * local[:, 1], sn * local[:, 0] + c * local[:, 1]])
        sections.append(
            AirfoilSection(
                points=pts,
                radius=lerp(cfg.hub_radius, cfg.tip_radius),
                leading_edge=n_up - 1,
                chord_params=chord_params,
            )
        )
    control = tuple(int(np.argmin(np.abs(spans - c))) for c in cfg.control_spans)
    return BladeGeometry(tuple(sections), control, spans)


def control_indices_for(span_fractions: Sequence[float], targets=(0.1, 0.5, 0.9)):
    spans = np.asarray(span_fractions)
    return tuple(int(np.argmin(np.abs(spans - t))) for t in targets)
