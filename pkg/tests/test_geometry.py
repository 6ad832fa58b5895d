import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bladeopt import blade_io
from bladeopt.geometry import (
    AirfoilSection,
    BaselineConfig,
    BladeGeometry,
    DeformationParams,
    GeometryError,
    HicksHenneBasis,
    SearchSpace,
    SectionDeformation,
    basis_maxima,
    build_blade,
    check_feasibility,
    crossing_segment_pairs,
    decode,
    deform_section,
    encode,
    geometry_diff,
    geometry_distance,
    hicks_henne,
    search_dimension,
    surface_normals,
    synthetic_baseline,
)

# mpmath, 50 significant digits: sin(pi * 0.3**(log(0.5)/log(0.25)))**2
HH_03_025 = 0.9776904516259320855642552674851939451210658454511


@pytest.fixture(scope="module")
def baseline():
    return synthetic_baseline()


@pytest.fixture(scope="module")
def space(baseline):
    return SearchSpace.for_blade(baseline, 9)


def translated(blade, t):
    from dataclasses import replace

    t = np.asarray(t, dtype=float)
    return replace(blade, sections=tuple(replace(s, points=s.points + t) for s in blade.sections))


def segments_cross_bruteforce(points):
    """Scalar, exact-rational crossing test over all non-adjacent segment pairs."""
    from fractions import Fraction

    pts = [(Fraction(float(x)), Fraction(float(y))) for x, y in points]
    n = len(pts)

    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return (v > 0) - (v < 0)

    def on_seg(a, b, p):
        return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])

    hits = []
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            p1, p2, q1, q2 = pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]
            o1, o2, o3, o4 = orient(p1, p2, q1), orient(p1, p2, q2), orient(q1, q2, p1), orient(q1, q2, p2)
            if (o1 * o2 < 0 and o3 * o4 < 0) or (
                (o1 == 0 and on_seg(p1, p2, q1))
                or (o2 == 0 and on_seg(p1, p2, q2))
                or (o3 == 0 and on_seg(q1, q2, p1))
                or (o4 == 0 and on_seg(q1, q2, p2))
            ):
                hits.append((i, j))
    return hits


# --- Hicks-Henne bumps ---------------------------------------------------


@pytest.mark.parametrize(
    "x, x0, expected",
    [(0.5, 0.5, 1.0), (1.0, 0.3, 0.0), (0.0, 0.3, 0.0), (0.25, 0.5, 0.5)],
)
def test_hicks_henne_exact_values(x, x0, expected):
    assert hicks_henne(x, x0) == pytest.approx(expected, abs=1e-12)


def test_hicks_henne_against_high_precision_oracle():
    assert abs(hicks_henne(0.3, 0.25) - HH_03_025) < 1e-10


def test_hicks_henne_oracle_recomputed():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 50
    e = mpmath.log(mpmath.mpf("0.5")) / mpmath.log(mpmath.mpf("0.25"))
    ref = mpmath.sin(mpmath.pi * mpmath.mpf("0.3") ** e) ** 2
    assert abs(float(ref) - HH_03_025) < 1e-16


@given(x0=st.floats(0.01, 0.99))
def test_hicks_henne_unit_at_maximum(x0):
    assert hicks_henne(x0, x0) == pytest.approx(1.0, abs=1e-12)


@given(x0=st.floats(0.02, 0.98))
def test_hicks_henne_range_and_argmax(x0):
    grid = np.linspace(0.0, 1.0, 20001)
    b = hicks_henne(grid, x0)
    assert np.all(b >= 0.0) and np.all(b <= 1.0)
    assert b[0] == 0.0 and b[-1] == 0.0
    assert abs(grid[np.argmax(b)] - x0) <= grid[1]


@pytest.mark.parametrize("x, x0", [(-0.1, 0.5), (1.1, 0.5), (0.5, 0.0), (0.5, 1.0), (0.5, 1.5)])
def test_hicks_henne_domain_errors(x, x0):
    with pytest.raises(ValueError):
        hicks_henne(x, x0)


def test_basis_maxima():
    assert basis_maxima(1) == [0.5]
    assert basis_maxima(3) == [0.25, 0.5, 0.75]
    assert basis_maxima(9) == pytest.approx([0.1 * i for i in range(1, 10)], abs=1e-15)
    with pytest.raises(ValueError):
        basis_maxima(0)


@given(n=st.integers(1, 40))
def test_basis_maxima_spacing(n):
    m = np.array(basis_maxima(n))
    assert np.all(np.diff(m) > 0) and m[0] > 0 and m[-1] < 1
    assert np.allclose(np.diff(m), 1.0 / (n + 1), atol=1e-14)


@pytest.mark.parametrize(
    "n_hh, dim", [(3, 18), (4, 21), (5, 24), (7, 30), (9, 36), (10, 39), (12, 45)]
)
def test_search_dimension(n_hh, dim):
    assert search_dimension(n_hh) == dim


def test_search_dimension_rejects_zero():
    with pytest.raises(ValueError):
        search_dimension(0)


# --- sections and blades -------------------------------------------------


def test_baseline_invariants(baseline):
    assert baseline.n_sections == 11 and baseline.n_points == 61
    assert np.all(np.diff(baseline.radii()) > 0)
    assert baseline.span_fractions[0] == 0.0 and baseline.span_fractions[-1] == 1.0
    assert np.all(np.diff(baseline.span_fractions) > 0)
    for s in baseline.sections:
        assert s.chord_params[s.leading_edge] == 0.0
        assert s.chord_params[0] == 1.0 and s.chord_params[-1] == 1.0
    assert check_feasibility(baseline) == []


def test_baseline_is_deterministic():
    a, b = synthetic_baseline(), synthetic_baseline()
    assert a.identical_to(b)
    assert np.array_equal(a.point_array(), b.point_array())


@pytest.mark.parametrize(
    "kw", [dict(n_sections=2), dict(n_points=10), dict(tip_radius=0.1), dict(chord_hub=0.0)]
)
def test_baseline_rejects_degenerate_config(kw):
    with pytest.raises((GeometryError, ValueError)):
        synthetic_baseline(BaselineConfig(**kw))


def test_blade_rejects_mixed_point_counts(baseline):
    from dataclasses import replace

    short = synthetic_baseline(BaselineConfig(n_points=41)).sections[0]
    with pytest.raises(GeometryError):
        replace(baseline, sections=(short,) + baseline.sections[1:])


def test_outward_normals_point_away_from_centroid(baseline):
    s = baseline.sections[5]
    n = s.normals()
    assert np.allclose(np.linalg.norm(n, axis=1), 1.0)
    # a small outward offset increases the enclosed area regardless of winding
    def area(p):
        x, y = p[:, 0], p[:, 1]
        return abs(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    assert area(s.points + 1e-4 * n) > area(s.points)
    assert np.allclose(surface_normals(s.points[::-1]), n[::-1])


# --- deformation ---------------------------------------------------------


def test_identity_params_reproduce_baseline_bit_exactly(baseline, space):
    params = decode(space.identity_vector(), space)
    assert params.is_identity
    blade = build_blade(baseline, params)
    assert np.array_equal(blade.point_array(), baseline.point_array())
    assert np.array_equal(blade.radii(), baseline.radii())


def test_zero_deformation_of_each_section_is_identity(baseline):
    basis = HicksHenneBasis(5)
    for s in baseline.sections:
        out = deform_section(s, SectionDeformation.identity(5), basis)
        assert np.array_equal(out.points, s.points)


@given(theta=st.floats(-0.5, 0.5).filter(lambda t: t != 0.0), k=st.integers(0, 10))
@settings(max_examples=50)
def test_rotation_preserves_distances_to_leading_edge(baseline, theta, k):
    s = baseline.sections[k]
    out = deform_section(s, SectionDeformation((0.0,) * 3, rotation=theta), HicksHenneBasis(3))
    le = s.leading_edge_point
    assert np.array_equal(out.leading_edge_point, le)
    d0 = np.linalg.norm(s.points - le, axis=1)
    d1 = np.linalg.norm(out.points - le, axis=1)
    assert np.max(np.abs(d1 - d0)) < 1e-9


def _square_section():
    # closed loop with chord params containing 0.5 on both surfaces
    x = np.array([1.0, 0.75, 0.5, 0.25, 0.0, 0.25, 0.5, 0.75, 1.0])
    y = np.array([0.02, 0.05, 0.06, 0.05, 0.0, -0.04, -0.05, -0.04, -0.01])
    return AirfoilSection(np.column_stack([x, y]), 0.3, 4, x.copy())


def test_single_bump_displaces_maximum_point_by_amplitude():
    s = _square_section()
    a = 0.003
    out = deform_section(s, SectionDeformation((a,)), HicksHenneBasis(1))
    k = 2  # chord param 0.5 on the upper surface
    # hand-computed outward normal: average of adjacent unit segment normals
    p_prev, p, p_next = s.points[1], s.points[2], s.points[3]
    t1 = (p - p_prev) / np.linalg.norm(p - p_prev)
    t2 = (p_next - p) / np.linalg.norm(p_next - p)
    t = t1 + t2
    n = np.array([t[1], -t[0]]) / np.linalg.norm(t)
    if n[1] < 0:  # upper surface: outward is +y
        n = -n
    assert np.allclose(out.points[k] - p, a * n, atol=1e-15)
    assert np.linalg.norm(out.points[k] - p) == pytest.approx(a, rel=1e-12)


def test_mid_span_interpolation_gives_mean_displacement():
    cfg = BaselineConfig(n_sections=5, control_spans=(0.0, 0.25, 0.75))
    blade = synthetic_baseline(cfg)
    assert blade.control_indices == (0, 1, 3)
    a = 1e-3
    hub = SectionDeformation((a,))
    mid = SectionDeformation((3 * a,))
    tip = SectionDeformation((0.0,))
    out = build_blade(blade, DeformationParams((tip, hub, mid), HicksHenneBasis(1)))
    s = blade.sections[2]  # half-way between controls 1 and 3
    expected = 2 * a * hicks_henne(s.chord_params, 0.5)
    disp = out.sections[2].points - s.points
    normal_part = np.einsum("pk,pk->p", disp, s.normals())
    assert np.allclose(normal_part, expected, atol=1e-15)
    # brute-force at one point
    j = 10
    assert disp[j] == pytest.approx(2 * a * hicks_henne(s.chord_params[j], 0.5) * s.normals()[j], abs=1e-16)


def test_equal_hub_and_mid_deformation_spreads_between_them(baseline, space):
    d = SectionDeformation((1e-3,) * 9, rotation=0.01, shift_axial=1e-3)
    params = DeformationParams((d, d, SectionDeformation.identity(9)), HicksHenneBasis(9))
    out = build_blade(baseline, params)
    hub, mid, _ = baseline.control_indices
    for j in range(0, mid + 1):
        ref = deform_section(baseline.sections[j], d, params.basis)
        assert np.array_equal(out.sections[j].points, ref.points)


def test_constant_extrapolation_outside_control_span(baseline):
    d_hub = SectionDeformation((2e-3,) * 3)
    d_tip = SectionDeformation((-1e-3,) * 3, rotation=0.02)
    params = DeformationParams((d_hub, SectionDeformation.identity(3), d_tip), HicksHenneBasis(3))
    out = build_blade(baseline, params)
    first, last = baseline.control_indices[0], baseline.control_indices[-1]
    for j in range(0, first + 1):
        assert np.array_equal(out.sections[j].points, deform_section(baseline.sections[j], d_hub, params.basis).points)
    for j in range(last, baseline.n_sections):
        assert np.array_equal(out.sections[j].points, deform_section(baseline.sections[j], d_tip, params.basis).points)


# --- search-space encoding -----------------------------------------------


def test_encode_layout_and_endpoints(baseline, space):
    v = space.identity_vector()
    v[0] = 1.0
    p = decode(v, space)
    assert p.per_section[0].amplitudes[0] == pytest.approx(space.amplitude_bound[0], rel=1e-15)
    assert all(a == 0 for a in p.per_section[0].amplitudes[1:])
    v = space.identity_vector()
    v[9], v[10], v[11] = 0.0, 1.0, 0.75  # hub rotation, axial, tangential
    p = decode(v, space)
    assert p.per_section[0].rotation == pytest.approx(-math.radians(5.0))
    assert p.per_section[0].shift_axial == pytest.approx(space.shift_bound[0])
    assert p.per_section[0].shift_tangential == pytest.approx(0.5 * space.shift_bound[0])
    v = space.identity_vector()
    v[12] = 0.0  # first amplitude of the mid block
    assert decode(v, space).per_section[1].amplitudes[0] == pytest.approx(-space.amplitude_bound[1])


@given(st.lists(st.floats(0.0, 1.0), min_size=36, max_size=36))
def test_decode_encode_round_trip(values):
    space = SearchSpace(9, (0.0024, 0.0028, 0.0032), math.radians(5), (0.006, 0.007, 0.008))
    v = np.array(values)
    back = encode(decode(v, space), space)
    assert np.max(np.abs(back - v)) <= 1e-12


@given(st.lists(st.floats(-1.0, 1.0), min_size=18, max_size=18))
def test_encode_decode_round_trip_physical(fractions):
    space = SearchSpace(3, 0.002, 0.05, 0.004)
    physical = np.array(fractions) * space.scale_vector()
    per = tuple(SectionDeformation.from_array(physical[6 * k : 6 * (k + 1)]) for k in range(3))
    params = DeformationParams(per, HicksHenneBasis(3))
    back = decode(encode(params, space), space).flatten()
    assert np.allclose(back, physical, rtol=1e-12, atol=1e-12 * space.scale_vector().max())


def test_decode_errors(space):
    with pytest.raises(GeometryError):
        decode(np.full(35, 0.5), space)
    v = space.identity_vector()
    v[3] = 1.2
    with pytest.raises(GeometryError):
        decode(v, space)
    v[3] = np.nan
    with pytest.raises(GeometryError):
        decode(v, space)


def test_params_flatten_length(space):
    assert DeformationParams.identity(9).flatten().size == search_dimension(9) == space.dimension


# --- feasibility ---------------------------------------------------------


def test_large_negative_amplitude_self_intersects(baseline, space):
    k = baseline.control_indices[1]
    s = baseline.sections[k]
    thick = 0.12 * s.chord
    # a bump deeper than the section is thick pushes upper below lower
    d = SectionDeformation((0.0, 0.0, -1.5 * thick, 0.0, 0.0))
    out = deform_section(s, d, HicksHenneBasis(5))
    fast = crossing_segment_pairs(out.points)
    assert fast, "expected crossings"
    assert sorted(fast) == sorted(segments_cross_bruteforce(out.points))
    from dataclasses import replace

    blade = replace(baseline, sections=baseline.sections[:k] + (out,) + baseline.sections[k + 1 :])
    kinds = {(v.section, v.kind) for v in check_feasibility(blade)}
    assert (k, "self-intersection") in kinds


@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_crossing_detection_matches_bruteforce(seed):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0, 1, (int(rng.integers(4, 12)), 2))
    assert sorted(crossing_segment_pairs(pts)) == sorted(segments_cross_bruteforce(pts))


def test_baseline_sections_have_no_crossings(baseline):
    for s in baseline.sections:
        assert crossing_segment_pairs(s.points) == []
        assert segments_cross_bruteforce(s.points[::3]) == []


def test_thin_section_fails_thickness(baseline):
    blade = synthetic_baseline(BaselineConfig(thickness_hub=0.0005, thickness_tip=0.0005, trailing_edge_thickness=0.0))
    kinds = {v.kind for v in check_feasibility(blade)}
    assert "thickness" in kinds


# --- comparison ----------------------------------------------------------


def test_diff_and_distance_of_identical_blade(baseline):
    assert np.all(geometry_diff(baseline, baseline) == 0.0)
    assert geometry_distance(baseline, baseline) == 0.0


def test_translation_along_point_normal(baseline):
    k, j = 4, 17
    n = baseline.sections[k].normals()[j]
    t = 2.5e-4
    moved = translated(baseline, t * n)
    assert geometry_diff(baseline, moved)[k, j] == pytest.approx(t, rel=1e-12)


@given(tx=st.floats(-0.01, 0.01), ty=st.floats(-0.01, 0.01))
@settings(max_examples=30)
def test_translation_diff_antisymmetric_and_distance(baseline, tx, ty):
    moved = translated(baseline, (tx, ty))
    d_ab = geometry_diff(baseline, moved)
    d_ba = geometry_diff(moved, baseline)
    assert np.allclose(d_ab, -d_ba, atol=1e-15)
    assert geometry_distance(baseline, moved) == pytest.approx(math.hypot(tx, ty), rel=1e-9, abs=1e-15)


def test_distance_of_deformed_blades_matches_bruteforce(baseline, space):
    rng = np.random.default_rng(7)
    a = build_blade(baseline, decode(rng.uniform(0.3, 0.7, 36), space))
    b = build_blade(baseline, decode(rng.uniform(0.3, 0.7, 36), space))
    total, count = 0.0, 0
    for sa, sb in zip(a.sections, b.sections):
        for pa, pb in zip(sa.points, sb.points):
            total += (pa[0] - pb[0]) ** 2 + (pa[1] - pb[1]) ** 2 + (sa.radius - sb.radius) ** 2
            count += 1
    assert geometry_distance(a, b) == pytest.approx(math.sqrt(total / count), rel=1e-12)
    assert geometry_distance(a, b) == geometry_distance(b, a)


def test_topology_mismatch(baseline):
    other = synthetic_baseline(BaselineConfig(n_points=41))
    with pytest.raises(GeometryError):
        geometry_diff(baseline, other)
    with pytest.raises(GeometryError):
        geometry_distance(baseline, other)


# --- file formats --------------------------------------------------------


def test_sections_file_round_trip(baseline, space, tmp_path):
    blade = build_blade(baseline, decode(np.random.default_rng(3).uniform(0.2, 0.8, 36), space))
    path = blade_io.write_blade(blade, tmp_path / "b.sec")
    back = blade_io.read_blade(path)
    assert back.identical_to(blade)


def test_sections_file_without_chord_params(baseline, tmp_path):
    path = blade_io.write_blade(baseline, tmp_path / "b.sec")
    lines = []
    for line in path.read_text().splitlines():
        parts = line.split()
        if len(parts) == 3 and not line.startswith(("#", "control", "section")):
            line = " ".join(parts[:2])
        lines.append(line)
    (tmp_path / "two.sec").write_text("\n".join(lines) + "\n")
    back = blade_io.read_blade(tmp_path / "two.sec")
    assert np.array_equal(back.point_array(), baseline.point_array())
    for s in back.sections:
        assert s.chord_params[s.leading_edge] == 0.0 and s.chord_params[0] == 1.0


def test_obj_export_counts(baseline, tmp_path):
    path = blade_io.write_obj(baseline, tmp_path / "b.obj")
    lines = path.read_text().splitlines()
    assert sum(l.startswith("v ") for l in lines) == baseline.n_sections * baseline.n_points
    assert sum(l.startswith("f ") for l in lines) == (baseline.n_sections - 1) * baseline.n_points
    pts = blade_io.lofted_points(baseline).reshape(baseline.n_sections, baseline.n_points, 3)
    r = np.hypot(pts[..., 1], pts[..., 2])
    assert np.allclose(r, baseline.radii()[:, None])
