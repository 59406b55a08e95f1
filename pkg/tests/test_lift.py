import math

import numpy as np
import pytest

from staticverify.lift import (
    constant_curvature_residual,
    cone_expansion,
    einstein_residual,
    gbc_residual,
    gbc_terms,
    laplacian_lift_gap,
    lift,
    lift_sample_points,
    lift_volume,
    weyl_block_check,
)
from staticverify.triples import cylinder_triple, hemisphere_triple, parse_triple, sds_triple

TRIPLES = ["hemisphere", "cylinder", "sds:0.05", "sds:0.1", "sds:0.15"]


@pytest.mark.parametrize("spec", TRIPLES)
def test_lift_is_einstein(spec):
    tr = parse_triple(spec)
    pts = lift_sample_points(tr, 100, seed=0)
    er = einstein_residual(lift(tr), pts)
    assert er["residual"].max() < 1e-5
    assert er["mixed"].max() < 1e-8


@pytest.mark.parametrize("spec", TRIPLES)
def test_weyl_blocks_match_traceless_ricci(spec):
    tr = parse_triple(spec)
    wb = weyl_block_check(lift(tr), lift_sample_points(tr, 50, seed=1))
    for key in ("spatial", "electric", "wplus_norm", "wminus_norm", "eigenvalues", "norm_convention"):
        assert wb[key].max() < 1e-8, key


def test_cylinder_lift_wplus_norm():
    tr = cylinder_triple()
    wb = weyl_block_check(lift(tr), lift_sample_points(tr, 10, seed=2))
    assert np.allclose(wb["wplus2"], 6.0, atol=1e-10)
    assert np.allclose(wb["ric0_2"], 6.0, atol=1e-10)


def test_hemisphere_lift_is_round():
    tr = hemisphere_triple()
    assert constant_curvature_residual(lift(tr), lift_sample_points(tr, 50, seed=3)).max() < 1e-10
    cyl = cylinder_triple()
    assert constant_curvature_residual(lift(cyl), lift_sample_points(cyl, 5, seed=3)).max() > 0.1


def test_hemisphere_lift_volume():
    v = lift_volume(hemisphere_triple())
    assert v["quadrature"] == pytest.approx(8 * math.pi**2 / 3, rel=1e-8)
    assert v["gap"] < 1e-8


@pytest.mark.parametrize("spec", ["cylinder", "sds:0.1"])
def test_lift_volume_boundary_formula(spec):
    assert lift_volume(parse_triple(spec))["gap"] < 1e-8


@pytest.mark.parametrize("spec", ["hemisphere", "cylinder", "sds:0.1"])
def test_cone_expansion_exponent(spec):
    tr = parse_triple(spec)
    lc = lift(tr)
    for comp in tr.boundary:
        assert cone_expansion(lc, comp)["exponent"] >= 1.9


def test_gauss_bonnet_chern_unit_factor_reproduces_integral_formula():
    # with u = 1 the four terms reduce to the three-dimensional integral formula term by term
    tr = sds_triple(0.1)
    g = gbc_residual(tr)
    from staticverify.identities import integral_identity_check

    ii = integral_identity_check(tr)
    ksum = sum(b.surface_gravity for b in tr.boundary)
    assert g["gap"] < 1e-8
    assert g["euler_term"] == pytest.approx(8 * math.pi**2 * ksum)
    # R = 12 on the lift: (1/48) int R^2 = 3 |N| = 2 pi sum k_i |d_i M|
    assert g["R2_term"] == pytest.approx(2 * math.pi * ii["boundary_term"], rel=1e-10)
    # |W+|^2 = |Ric0_g|^2 pointwise, so int |W+|^2 = 2 pi int |Ric0|^2 V
    assert g["W_plus_term"] == pytest.approx(2 * math.pi * ii["bulk_term"], rel=1e-10)
    assert g["ric0_term"] == pytest.approx(0.0, abs=1e-12)
    assert g["cross_check"] < 1e-8


def test_gauss_bonnet_chern_conformal_factor():
    tr = sds_triple(0.1)
    base = gbc_terms(tr)
    u = lambda r: 1 + r * r / 10
    g = gbc_residual(tr, u)
    assert g["gap"] < 1e-4
    assert abs(g["W_plus_term"] - base["W_plus_term"]) / base["W_plus_term"] < 1e-6
    assert g["ric0_term"] > 0


def test_laplacian_lift_identity():
    tr = sds_triple(0.1)
    pts = lift_sample_points(tr, 100, seed=4)
    psi = lambda x: x[0] ** 2 * x[1] + 0.3 * x[2]
    assert laplacian_lift_gap(tr, psi, pts).max() < 1e-8
