import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from staticverify.chart import Geometry, fd_jet, sample_points
from staticverify.identities import (
    CheckReport,
    CollarError,
    StaticGeometry,
    bochner_residual,
    bochner_terms,
    boundary_curvature_check,
    boundary_expansion_check,
    eigenform_gap,
    integral_identity_check,
    ric0_norm2_on_ray,
    run_identity_suite,
    shen_residual,
    slice_flow_check,
    static_residual,
)
from staticverify.triples import cylinder_triple, hemisphere_triple, parse_triple, sds_triple

TRIPLES = ["hemisphere", "cylinder", "sds:0.05", "sds:0.1", "sds:0.15"]

# bulk term 4 pi int 6 m^2 r^-4 dr and 2 pi sum k_i chi_i from mpmath (30 digits)
SDS_INTEGRALS = {
    0.05: (60.853091772854514, 71.466874790010343),
    0.1: (27.100727934555431, 35.516881461398184),
    0.15: (13.361002998341296, 18.985035665780561),
}


@pytest.mark.parametrize("spec", TRIPLES)
def test_identity_suite_passes_analytic(spec):
    reports = run_identity_suite(parse_triple(spec), n=100, seed=0)
    failed = [(r.check_name, r.max_residual) for r in reports if not r.passed]
    assert not failed
    names = {r.check_name for r in reports}
    assert {"static_equation", "bochner", "shen", "integral_formula"} <= names


def test_identity_suite_fd_path_on_sds():
    reports = run_identity_suite(sds_triple(0.1), n=50, seed=1, path="fd")
    failed = [(r.check_name, r.max_residual) for r in reports if not r.passed]
    assert not failed
    static = next(r for r in reports if r.check_name == "static_equation")
    assert static.max_residual < 1e-4


def test_cylinder_bochner_constituents():
    tr = cylinder_triple()
    geo = StaticGeometry(tr, sample_points(tr.chart, 30, seed=2))
    t = bochner_terms(geo)
    V = t["V"]
    assert np.abs(t["scalar_term"] - 36 * V).max() < 1e-8
    assert np.abs(t["det_term"] + 36 * V).max() < 1e-8
    assert np.abs(t["lhs"]).max() < 1e-8


def test_bochner_variant_with_ric0_norm_fails_on_sds():
    # replacing |grad Ric0|^2 by |Ric0|^2 in the first term breaks the identity
    tr = sds_triple(0.1)
    pts = sample_points(tr.chart, 20, seed=3)
    assert bochner_residual(tr, pts).max() < 1e-8
    assert bochner_residual(tr, pts, variant=True).max() > 1e-2


def test_integral_formula_closed_forms():
    h = integral_identity_check(hemisphere_triple())
    assert h["lhs"] == pytest.approx(4 * math.pi, rel=1e-10)
    assert h["rhs"] == pytest.approx(4 * math.pi, rel=1e-14)
    c = integral_identity_check(cylinder_triple())
    assert c["boundary_term"] == pytest.approx(8 * math.pi / 3, rel=1e-12)
    assert c["bulk_term"] == pytest.approx(16 * math.pi / 3, rel=1e-10)
    assert c["rhs"] == pytest.approx(8 * math.pi, rel=1e-14)


@pytest.mark.parametrize("m", sorted(SDS_INTEGRALS))
def test_integral_formula_sds(m):
    bulk, total = SDS_INTEGRALS[m]
    r = integral_identity_check(sds_triple(m))
    assert r["bulk_term"] == pytest.approx(bulk, rel=1e-10)
    assert r["rhs"] == pytest.approx(total, rel=1e-12)
    assert r["gap"] < 1e-8


def test_expansion_coefficients():
    c = boundary_expansion_check(cylinder_triple(), 0)
    assert c["s4_coefficient_V2"] == pytest.approx(-1.0, rel=0.02)
    h = boundary_expansion_check(hemisphere_triple(), 0)
    assert h["s4_coefficient_V2"] == pytest.approx(-1.0 / 3.0, rel=0.02)
    for m in (0.05, 0.1, 0.15):
        tr = sds_triple(m)
        for comp in tr.boundary:
            e = boundary_expansion_check(tr, comp)
            assert e["relative_error_s4"] < 0.02
            assert e["relative_error_s2"] < 0.02


def test_sds_ricci_normal_matches_closed_form():
    # Ric(N, N) = 2 - 2m/r^3 at a horizon (the radial eigenvalue of Ric is 2 - 2m/r^3 for f = 1 - r^2 - 2m/r)
    m = 0.1
    tr = sds_triple(m)
    e = boundary_expansion_check(tr, "r_h")
    rh = tr.params["r_h"]
    assert e["ric_nn"] == pytest.approx(2 - 2 * m / rh**3, rel=1e-10)


def test_boundary_curvature_bounds():
    for spec in TRIPLES:
        bc = boundary_curvature_check(parse_triple(spec))
        assert bc["holds"]
        assert bc["gauss_vs_intrinsic"] < 1e-8


def test_eigenform_gap_on_symmetric_triples():
    for spec in ("cylinder", "sds:0.1"):
        tr = parse_triple(spec)
        geo = StaticGeometry(tr, sample_points(tr.chart, 40, seed=4), 3)
        assert np.abs(eigenform_gap(geo)).max() < 1e-8


def test_traceless_ricci_norm_scan():
    cyl = cylinder_triple()
    xi = np.linspace(0.1, 1.7, 9)
    assert np.allclose(ric0_norm2_on_ray(cyl, xi), 36 / 6, atol=1e-8)
    hemi = hemisphere_triple()
    assert np.abs(ric0_norm2_on_ray(hemi, np.linspace(0.1, 1.5, 9))).max() < 1e-12
    sds = sds_triple(0.1)
    assert ric0_norm2_on_ray(sds, np.linspace(0.01, 1.5, 50)).max() > 36 / 6


def test_collar_guard():
    tr = hemisphere_triple()
    p = np.array([[math.pi / 2 - 1e-6, 1.0, 0.0]])
    with pytest.raises(CollarError):
        shen_residual(tr, p)


def test_slice_flow_preserves_area():
    for tr in (hemisphere_triple(), cylinder_triple()):
        fl = slice_flow_check(tr)
        assert fl["status"] == "ok"
        assert fl["area_drift"] < 1e-8
    # coordinate spheres of SdS have monotone area, so there is no minimal one to flow
    assert slice_flow_check(sds_triple(0.1))["status"] == "not-applicable"


def test_check_report_round_trip():
    r = CheckReport.from_residuals("x", "t", [1e-9, -2e-9], 1e-8, seed=3)
    assert r.passed and r.max_residual == 2e-9
    assert CheckReport.from_dict(r.to_dict()) == r
    bad = CheckReport.from_residuals("x", "t", [np.nan], 1.0)
    assert not bad.passed


def _fd_static_residual(tr, pts, h):
    scale = tr.chart.scale
    steps = {1: h, 2: h}
    g = fd_jet(lambda x: tr.chart.g(x), pts, 2, scale, richardson=False, steps=steps)
    geo = Geometry(g)
    Vj = fd_jet(lambda x: tr.potential(x), pts, 2, scale, richardson=False, steps=steps)
    E = geo.hess(Vj).value - geo.laplacian(Vj).value[..., None, None] * geo.g - Vj.value[..., None, None] * geo.ric.value
    return np.abs(E).max()


@pytest.mark.parametrize("spec", ["hemisphere", "sds:0.1"])
def test_fd_residual_converges_under_step_halving(spec):
    tr = parse_triple(spec)
    pts = sample_points(tr.chart, 10, seed=5, margin=0.5)
    res = [_fd_static_residual(tr, pts, h) for h in (0.08, 0.04, 0.02, 0.01)]
    orders = [math.log2(a / b) for a, b in zip(res, res[1:])]
    assert min(orders) >= 2.0


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 1.5), st.floats(0.2, 2.9), st.floats(-3.0, 3.0), st.sampled_from([0.05, 0.1, 0.15]))
def test_static_equation_at_arbitrary_points(xi, theta, phi, m):
    tr = sds_triple(m)
    full, sa, sb, dirichlet = static_residual(tr, np.array([[xi, theta, phi]]))
    assert full.max() < 1e-6 and dirichlet.max() < 1e-6
