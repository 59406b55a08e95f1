import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from staticverify.triples import M_MAX, cylinder_triple, hemisphere_triple, sds_triple
from staticverify.variational import (
    CSV_COLUMNS,
    RadialFunction,
    default_mass_grid,
    minimize_quotient,
    modified_quotient,
    ricci_testfn_decay,
    refinement_study,
    scan_csv,
    sds_ratio,
    area_ratio_scan,
)

# sum k_i |d_i M| / sum k_i from 30-digit horizon roots (mpmath)
RATIO_ORACLE = {0.05: 1.8662734505443197, 0.1: 2.9777531138424627, 0.15: 3.7225992139530224}


def _radial(tr, fn, n=400, interpolation="cubic"):
    lo, hi = tr.radial.interval
    x = np.linspace(lo, hi, n)
    return RadialFunction(x, fn(x), interpolation)


def _area_radius(tr, xi):
    rh, rc = tr.params["r_h"], tr.params["r_c"]
    return rh + (rc - rh) * np.sin(xi) ** 2


def test_quotient_of_constants_closed_form():
    # hemisphere: q = 2, w = 4 pi cos s sin^2 s, int w = 4 pi / 3
    hemi = hemisphere_triple()
    val = modified_quotient(hemi, _radial(hemi, np.ones_like)).value
    assert val == pytest.approx(2 * math.sqrt(2 * math.pi) * math.sqrt(4 * math.pi / 3), rel=1e-10)
    # cylinder: |Ric0| = sqrt 6 makes q vanish
    cyl = cylinder_triple()
    assert abs(modified_quotient(cyl, _radial(cyl, np.ones_like)).value) < 1e-12


@pytest.mark.parametrize("m", [0.05, 0.1, 0.15])
def test_quotient_vanishes_on_inverse_area_radius(m):
    # phi = 1/r is |Ric0|^(1/3) up to scale, where the pointwise inequalities are equalities
    tr = sds_triple(m)
    phi = _radial(tr, lambda x: 1.0 / _area_radius(tr, x), n=800)
    assert abs(modified_quotient(tr, phi).value) < 1e-10


@settings(max_examples=12, deadline=None)
@given(st.integers(-30, 30), st.floats(1e-3, 1e3))
def test_quotient_scale_invariance(k, t):
    tr = sds_triple(0.1)
    phi = _radial(tr, lambda x: 2 + np.cos(3 * x), n=60)
    base = modified_quotient(tr, phi).value
    assert modified_quotient(tr, phi.scaled(2.0**k)).value == base
    assert modified_quotient(tr, phi.scaled(t)).value == pytest.approx(base, rel=1e-13)


def test_minimizer_cylinder():
    res = minimize_quotient(cylinder_triple(), 256)
    assert -1e-6 <= res["lambda"] <= 1e-6
    phi = res["phi"].values
    assert (phi.max() - phi.min()) / phi.max() < 1e-6


def test_minimizer_hemisphere_is_constant():
    res = minimize_quotient(hemisphere_triple(), 256)
    assert res["lambda"] == pytest.approx(2 * math.sqrt(2 * math.pi) * math.sqrt(4 * math.pi / 3), rel=1e-8)


def test_minimizer_sds():
    res = minimize_quotient(sds_triple(0.1), 256)
    assert res["lambda"] <= 1e-3
    assert res["el_residual"] < 1e-4
    assert np.all(res["phi"].values >= 0)


@pytest.mark.parametrize("start", [lambda x: 1 + 0 * x, lambda x: 2 + np.sin(5 * x), lambda x: x + 0.1])
def test_minimizer_does_not_increase_quotient(start):
    tr = sds_triple(0.15)
    res = minimize_quotient(tr, 128, phi0=start)
    assert res["lambda"] <= res["start_value"]
    assert np.all(res["phi"].values >= 0)


def test_refinement_is_cauchy():
    r = refinement_study(sds_triple(0.1), (128, 256, 512, 1024))
    d = r["differences"]
    assert d[0] > d[1] > d[2]


def test_grid_too_coarse():
    with pytest.raises(ValueError):
        minimize_quotient(cylinder_triple(), 64)


def test_testfn_decay_sds():
    for m in (0.05, 0.1, 0.15):
        r = ricci_testfn_decay(sds_triple(m))
        assert r["status"] == "ok"
        assert r["slope"] >= 0.28
        assert r["chain_holds"] and r["bound_holds"]


def test_testfn_decay_cylinder_numerator_vanishes():
    r = ricci_testfn_decay(cylinder_triple())
    assert max(abs(row["numerator"]) for row in r["rows"]) < 1e-10


def test_testfn_decay_not_applicable_on_hemisphere():
    assert ricci_testfn_decay(hemisphere_triple())["status"] == "not-applicable"


@pytest.mark.parametrize("m", sorted(RATIO_ORACLE))
def test_sds_ratio_oracle(m):
    assert sds_ratio(m)["ratio"] == pytest.approx(RATIO_ORACLE[m], rel=1e-12)


def test_area_ratio_scan_default_grid():
    sc = area_ratio_scan()
    assert len(sc["rows"]) == 256
    assert sc["increasing"] and sc["below_bound"] and sc["k_ordered"] and sc["areas_straddle"]
    assert sc["limit_low_error"] < 0.01 and sc["limit_high_error"] < 0.01
    ratios = np.array([r["ratio"] for r in sc["rows"]])
    assert ratios[0] < 0.02
    assert abs(ratios[-1] - 4 * math.pi / 3) < 1e-2


def test_default_grid_spans_family():
    g = default_mass_grid()
    assert g[0] == pytest.approx(1e-4 * M_MAX) and g[-1] == pytest.approx(M_MAX * (1 - 1e-4))
    assert np.all(np.diff(g) > 0)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-4, 1 - 1e-4), st.floats(1e-4, 1 - 1e-4))
def test_ratio_monotone(a, b):
    if a == b:
        return
    lo, hi = sorted((a, b))
    r1, r2 = sds_ratio(lo * M_MAX)["ratio"], sds_ratio(hi * M_MAX)["ratio"]
    if hi - lo > 1e-9:
        assert r1 < r2 < 4 * math.pi / 3


def test_scan_csv_round_trip():
    rows = area_ratio_scan(np.linspace(0.01, 0.19, 8))["rows"]
    text = scan_csv(rows)
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS) == "m,r_h,r_c,k1,k2,area1,area2,ratio"
    for line, row in zip(lines[1:], rows):
        values = [float(v) for v in line.split(",")]
        assert values == [row[c] for c in CSV_COLUMNS]
