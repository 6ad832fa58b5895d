"""Blade geometry file formats.

Sections text format (``.sec``), version 1::

    # bladeopt-sections 1
    control <hub_index> <mid_index> <shroud_index>
    section <radius> <span_fraction> <leading_edge_index> <n_points>
    <u> <v> <chord_param>
    ...                                  (n_points rows)
    section ...

Blank lines and further ``#`` lines are ignored. Rows may omit the chord
parameter; it is then recovered by projecting each point onto the line from
the leading-edge point to the trailing-edge midpoint. Floats are written
with ``repr`` so a write/read cycle is exact.

The lofted surface (``lofted_points``/``lofted_quads``) maps section point
``(u, v)`` at radius ``r`` to Cartesian ``(u, r cos(v/r), r sin(v/r))`` and
joins neighbouring sections with quads.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .geometry import AirfoilSection, BladeGeometry, GeometryError

HEADER = "# bladeopt-sections 1"


def write_blade(blade: BladeGeometry, path) -> Path:
    path = Path(path)
    lines = [HEADER, "control " + " ".join(str(i) for i in blade.control_indices)]
    for s, span in zip(blade.sections, blade.span_fractions):
        lines.append(f"section {s.radius!r} {float(span)!r} {s.leading_edge} {s.n_points}")
        for (u, v), x in zip(s.points.tolist(), s.chord_params.tolist()):
            lines.append(f"{u!r} {v!r} {x!r}")
    path.write_text("\n".join(lines) + "\n")
    return path


def _chord_params_from_points(points: np.ndarray, le: int) -> np.ndarray:
    te = 0.5 * (points[0] + points[-1])
    axis = te - points[le]
    x = (points - points[le]) @ axis / float(axis @ axis)
    x = np.clip(x, 0.0, 1.0)
    x[le], x[0], x[-1] = 0.0, 1.0, 1.0
    return x


def read_blade(path) -> BladeGeometry:
    text = Path(path).read_text().splitlines()
    if not text or text[0].strip() != HEADER:
        raise GeometryError(f"{path}: missing '{HEADER}' header")
    control = None
    sections, spans = [], []
    rows = [ln.split() for ln in text[1:] if ln.strip() and not ln.lstrip().startswith("#")]
    i = 0
    try:
        while i < len(rows):
            head = rows[i]
            if head[0] == "control":
                control = tuple(int(t) for t in head[1:4])
                i += 1
            elif head[0] == "section":
                radius, span = float(head[1]), float(head[2])
                le, n = int(head[3]), int(head[4])
                block = rows[i + 1 : i + 1 + n]
                if len(block) != n:
                    raise GeometryError(f"{path}: truncated section record")
                widths = {len(r) for r in block}
                if widths == {3}:
                    data = np.array(block, dtype=float)
                    pts, cps = data[:, :2], data[:, 2]
                elif widths == {2}:
                    pts = np.array(block, dtype=float)
                    cps = _chord_params_from_points(pts, le)
                else:
                    raise GeometryError(f"{path}: point rows need 2 or 3 columns")
                sections.append(AirfoilSection(pts, radius, le, cps))
                spans.append(span)
                i += 1 + n
            else:
                raise GeometryError(f"{path}: unexpected record {head[0]!r}")
    except (ValueError, IndexError) as exc:
        if isinstance(exc, GeometryError):
            raise
        raise GeometryError(f"{path}: malformed blade file ({exc})") from exc
    if control is None:
        raise GeometryError(f"{path}: missing control record")
    return BladeGeometry(tuple(sections), control, np.array(spans))


def lofted_points(blade: BladeGeometry) -> np.ndarray:
    """Cartesian points, shape ``(n_sections * n_points, 3)``, section-major."""
    out = []
    for s in blade.sections:
        theta = s.points[:, 1] / s.radius
        out.append(np.column_stack([s.points[:, 0], s.radius * np.cos(theta), s.radius * np.sin(theta)]))
    return np.vstack(out)


def lofted_quads(blade: BladeGeometry) -> np.ndarray:
    """Quad connectivity (0-based) between consecutive sections."""
    n, m = blade.n_points, blade.n_sections
    i = np.arange(n)
    j = (i + 1) % n
    quads = []
    for k in range(m - 1):
        a, b = k * n, (k + 1) * n
        quads.append(np.column_stack([a + i, a + j, b + j, b + i]))
    return np.vstack(quads)


def write_obj(blade: BladeGeometry, path) -> Path:
    path = Path(path)
    pts = lofted_points(blade)
    lines = ["# bladeopt lofted blade surface"]
    lines += [f"v {x:.9g} {y:.9g} {z:.9g}" for x, y, z in pts]
    lines += ["f " + " ".join(str(q + 1) for q in quad) for quad in lofted_quads(blade)]
    path.write_text("\n".join(lines) + "\n")
    return path
