"""The singular Einstein 4-manifold h = V^2 dtheta^2 + g attached to a static triple.

Lift charts use coordinates (theta, base coordinates); the circle coordinate
comes first, so the Gram-Schmidt orthonormal frame starts with V^{-1} d_theta.
Integrals over the lift reduce to 2 pi times base integrals against V dmu_g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import jets as J
from .chart import (
    Chart,
    Geometry,
    check_points,
    function_jet,
    kulkarni_nomizu,
    metric_jet,
    orthonormal_frame,
    sample_points,
    to_frame,
    weyl_blocks,
)
from .identities import COLLAR, CollarError, StaticGeometry, arc_length
from .jets import jeinsum
from .triples import StaticTriple, integrate_radial, radial_points


@dataclass(frozen=True)
class LiftChart:
    base: StaticTriple
    chart4: Chart
    cone_data: dict  # boundary label -> cone angle 2 pi k_i
    factor: Callable | None = None  # conformal factor u on the base, or None for u = 1

    def lift_points(self, base_points, theta: float = 0.0) -> np.ndarray:
        p = np.atleast_2d(np.asarray(base_points, dtype=float))
        return np.concatenate([np.full(p.shape[:-1] + (1,), theta), p], axis=-1)

    @property
    def smooth_faces(self) -> dict:
        """Whether k_i = 1 at each face (necessary for a smooth extension; not claimed sufficient)."""
        return {b.label: bool(abs(b.surface_gravity - 1.0) < 1e-12) for b in self.base.boundary}


def lift(triple: StaticTriple, u: Callable | None = None) -> LiftChart:
    """Chart of h = V^2 dtheta^2 + g, or of u^2 h for a theta-independent factor u."""
    base = triple.chart

    def metric(x):
        y = list(x[1:])
        V = triple.V(y)
        g = base.metric(y)
        rows = [[V * V, 0.0, 0.0, 0.0]] + [[0.0] + list(r) for r in g]
        if u is None:
            return rows
        w = u(y) ** 2
        return [[w * e for e in r] for r in rows]

    domain = ((-math.pi, math.pi),) + tuple(base.domain)
    box = ((-3.0, 3.0),) + tuple(map(tuple, base.box()))
    names = ("theta_circle",) + tuple(base.coordinate_names)
    chart4 = Chart(4, names, domain, metric, orientation=1, scale=base.scale, analytic=base.analytic,
                   sample_box=box, name=f"lift({triple.name})")
    cones = {b.label: 2 * math.pi * b.surface_gravity for b in triple.boundary}
    return LiftChart(triple, chart4, cones, u)


def radial_factor(triple: StaticTriple, fn: Callable) -> Callable:
    """Conformal factor u = fn(area radius) as a function of base coordinates."""
    a = triple.radial.a
    return lambda y: fn(a(y[0]))


def _geometry4(lc: LiftChart, base_points, degree: int = 2, path: str = "analytic") -> Geometry:
    pts = check_points(lc.chart4, lc.lift_points(base_points))
    return Geometry(metric_jet(lc.chart4, pts, degree, path))


def _require_collar(lc: LiftChart, base_points):
    V = lc.base.potential(base_points)
    if np.any(V < COLLAR * lc.base.chart.scale):
        raise CollarError("lift evaluated below the collar threshold")


def einstein_residual(lc: LiftChart, base_points, path: str = "analytic") -> dict:
    """||Ric_h - 3 eps h|| (h-norm) and the mixed components Ric_h(d_theta, base)."""
    _require_collar(lc, base_points)
    geo = _geometry4(lc, base_points, 2, path)
    h = geo.g
    ric = geo.ric.value
    E = ric - 3.0 * lc.base.epsilon * h
    res = np.sqrt(np.maximum(geo.norm2(E, 2), 0.0))
    # mixed components in unit-normalized form
    diag = np.sqrt(np.einsum("...ii->...i", h))
    mixed = np.abs(ric[..., 0, 1:]) / (diag[..., :1] * diag[..., 1:])
    return {"residual": res, "mixed": np.max(mixed, axis=-1)}


def constant_curvature_residual(lc: LiftChart, base_points, path: str = "analytic") -> np.ndarray:
    """max |Rm_h - (eps/2) h (KN) h| per point; zero exactly when the lift has constant curvature eps."""
    _require_collar(lc, base_points)
    geo = _geometry4(lc, base_points, 2, path)
    rm = geo.rm.value if hasattr(geo.rm, "value") else geo.rm
    diff = rm - 0.5 * lc.base.epsilon * kulkarni_nomizu(geo.g, geo.g)
    return np.abs(diff).reshape(diff.shape[0], -1).max(axis=-1)


def weyl_frame(lc: LiftChart, base_points, path: str = "analytic") -> tuple[np.ndarray, np.ndarray]:
    """Weyl components in the Gram-Schmidt frame (e0 = V^-1 d_theta) and the frame."""
    geo = _geometry4(lc, base_points, 2, path)
    E = orthonormal_frame(geo.g)
    return to_frame(geo.weyl(), E, 4), E


def weyl_block_check(lc: LiftChart, base_points, path: str = "analytic") -> dict:
    """Residuals of the Weyl block relations against the traceless Ricci of g."""
    _require_collar(lc, base_points)
    base_points = np.atleast_2d(np.asarray(base_points, dtype=float))
    Wf, E = weyl_frame(lc, base_points, path)
    bgeo = Geometry(metric_jet(lc.base.chart, base_points, 2, path))
    r0 = bgeo.ric0.value
    # frame of the base: the spatial part of the 4D Gram-Schmidt frame
    Eb = E[..., 1:, 1:]
    r0f = to_frame(r0, Eb, 2)
    n = r0f.shape[0]
    I3 = np.broadcast_to(np.eye(3), r0f.shape)
    space = Wf[..., 1:, 1:, 1:, 1:] - kulkarni_nomizu(r0f, I3)
    electric = Wf[..., 1:, 0, 1:, 0] + r0f
    wp, wm = weyl_blocks(Wf, lc.chart4.orientation)
    wp2 = np.einsum("...ij,...ij->...", wp, wp)
    wm2 = np.einsum("...ij,...ij->...", wm, wm)
    ric02 = np.einsum("...ij,...ij->...", r0f, r0f)
    eig_w = np.sort(np.linalg.eigvalsh(wp), axis=-1)
    eig_r = np.sort(np.linalg.eigvalsh(-r0f), axis=-1)
    W2 = np.einsum("...abcd,...abcd->...", Wf, Wf)
    return {
        "spatial": np.abs(space).reshape(n, -1).max(axis=-1),
        "electric": np.abs(electric).reshape(n, -1).max(axis=-1),
        "wplus_norm": np.abs(wp2 - ric02),
        "wminus_norm": np.abs(wm2 - ric02),
        "eigenvalues": np.abs(eig_w - eig_r).max(axis=-1),
        "norm_convention": np.abs(W2 - 4 * (wp2 + wm2)),
        "wplus2": wp2,
        "ric0_2": ric02,
        "wplus_eigenvalues": eig_w,
    }


def lift_volume(triple: StaticTriple, tol: float = 1e-10) -> dict:
    """|N| by quadrature of 2 pi V dmu_g and by the boundary formula (2 pi / 3) sum k_i |d_i M|."""
    quad, nodes = integrate_radial(triple, lambda x: 2 * math.pi * np.asarray(triple.radial.V(x), dtype=float), tol)
    boundary = 2 * math.pi / 3 * sum(b.surface_gravity * b.area for b in triple.boundary)
    return {"quadrature": quad, "boundary_formula": boundary, "gap": abs(quad - boundary) / abs(boundary), "nodes": nodes}


def cone_expansion(lc: LiftChart, component, s_values=None) -> dict:
    """Fit |h - cone model| ~ C s^p near a face along the equatorial ray.

    The cone model is ds^2 + k^2 s^2 dtheta^2 + a(face)^2 g_can; the deviation
    is measured in the orthonormal coframe of the model.
    """
    triple = lc.base
    comp = triple.component(component)
    rp = triple.radial
    lo, hi = rp.interval
    sign = 1.0 if abs(comp.value - lo) <= abs(comp.value - hi) else -1.0
    if s_values is None:
        s_values = np.geomspace(1e-3, 3e-2, 8)
    k = comp.surface_gravity
    a0 = float(J.value(rp.a(np.array(comp.value))))
    from scipy.optimize import brentq

    errs = []
    for s in s_values:
        xi = brentq(lambda x: arc_length(triple, comp, x)[0] - s, comp.value + sign * 1e-14,
                    comp.value + sign * 0.5 * (hi - lo), xtol=1e-15)
        V = float(J.value(rp.V(np.array(xi))))
        a = float(J.value(rp.a(np.array(xi))))
        e_circle = (V * V - k * k * s * s) / (k * k * s * s)
        e_sphere = (a * a - a0 * a0) / (a0 * a0)
        errs.append(math.sqrt(e_circle**2 + 2 * e_sphere**2))
    errs = np.array(errs)
    slope = float(np.polyfit(np.log(s_values), np.log(np.maximum(errs, 1e-300)), 1)[0])
    return {"component": comp.label, "s": list(map(float, s_values)), "deviation": errs.tolist(), "exponent": slope}


# ----------------------------------------------------------------------------
# Gauss-Bonnet-Chern for conformal lifts


def _direct_densities(lc: LiftChart, xi, path: str = "analytic") -> dict:
    """R~, |W~+|^2 and |Ric0~|^2 of u^2 h from the 4D curvature engine on the equatorial ray."""
    geo = _geometry4(lc, radial_points(lc.base, xi), 2, path)
    R = geo.scalar.value
    ric0 = geo.ric0.value
    n_ric0 = geo.norm2(ric0, 2)
    E = orthonormal_frame(geo.g)
    wp, _ = weyl_blocks(to_frame(geo.weyl(), E, 4), lc.chart4.orientation)
    return {"R": R, "W+": np.einsum("...ij,...ij->...", wp, wp), "ric0": n_ric0,
            "volume_factor": np.sqrt(np.linalg.det(geo.g))}


def _reduced_densities(triple: StaticTriple, u: Callable | None, xi, path: str = "analytic") -> dict:
    """The same densities from base jets and the conformal change laws, w = log u.

    With h Einstein (Ric_h = 3h, R_h = 12) and h~ = e^{2w} h in dimension four:
    R~ = e^{-2w}(12 - 6 Lap_h w - 6|dw|^2),
    Ric0~ = traceless part of -2(Hess_h w - dw dw), |.|_{h~}^2 = e^{-4w} |.|_h^2,
    |W~+|^2_{h~} = e^{-4w} |Ric0_g|^2.  For theta-independent w,
    Hess_h w = Hess_g w on the base block and V g(grad V, grad w) on d_theta.
    """
    pts = radial_points(triple, xi)
    geo = StaticGeometry(triple, pts, 2, path)
    if u is None:
        wj = J.constant(np.zeros(pts.shape[:-1]), geo.Vj.basis)
    else:
        wj = J.log(function_jet(u, pts, 2, path, triple.chart.scale, tshape=()))
    V = geo.V
    dw = wj.grad().value
    dV = geo.dV.value
    ginv = geo.ginv
    Hg = geo.hess(wj).value
    dw2 = np.einsum("...i,...ij,...j->...", dw, ginv, dw)
    dVdw = np.einsum("...i,...ij,...j->...", dV, ginv, dw)
    lap_h = np.einsum("...ij,...ij->...", ginv, Hg) + dVdw / V
    # B = Hess_h w - dw dw in the block form (theta-theta entry divided by h_thth = V^2)
    B_base = Hg - np.einsum("...i,...j->...ij", dw, dw)
    B_circ = dVdw / V  # B(e0, e0) in the unit normalization
    trB = B_circ + np.einsum("...ij,...ij->...", ginv, B_base)
    B0_base = B_base - 0.25 * trB[..., None, None] * geo.g
    B0_circ = B_circ - 0.25 * trB
    normB0 = B0_circ**2 + geo.norm2(B0_base, 2)
    ew = np.exp(wj.value)
    return {
        "R": (12.0 - 6.0 * lap_h - 6.0 * dw2) / ew**2,
        "W+": geo.norm2(geo.ric0.value, 2) / ew**4,
        "ric0": 4.0 * normB0 / ew**4,
        "u4": ew**4,
    }


def gbc_terms(triple: StaticTriple, u_radial: Callable | None = None, method: str = "reduced",
              tol: float = 1e-10, path: str = "analytic") -> dict:
    """Four terms of the Gauss-Bonnet-Chern identity for u^2 h, u = u_radial(area radius).

    Every integral over N is 2 pi times a base integral against V u^4 dmu_g.
    ``method`` selects the base reduction or the direct 4D curvature engine.
    """
    u = None if u_radial is None else radial_factor(triple, u_radial)
    lc = lift(triple, u)

    def dens(x):
        if method == "reduced":
            return _reduced_densities(triple, u, x, path)
        d = _direct_densities(lc, x, path)
        d["u4"] = 1.0 if u is None else np.asarray(J.value(u([x])), dtype=float) ** 4
        return d

    def integral(key, fn):
        def integrand(x):
            d = dens(x)
            return 2 * math.pi * fn(d[key]) * d["u4"] * np.asarray(triple.radial.V(x), dtype=float)
        return integrand_value(integrand)

    def integrand_value(fn):
        return integrate_radial(triple, fn, tol)

    R2, n1 = integral("R", lambda r: r * r / 48.0)
    W, n2 = integral("W+", lambda w: w)
    Ric, n3 = integral("ric0", lambda r: r / 4.0)
    ksum = sum(b.surface_gravity for b in triple.boundary)
    lhs = R2 + W
    rhs = 8 * math.pi**2 * ksum + Ric
    return {
        "R2_term": R2,
        "W_plus_term": W,
        "euler_term": 8 * math.pi**2 * ksum,
        "ric0_term": Ric,
        "lhs": lhs,
        "rhs": rhs,
        "gap": abs(lhs - rhs) / abs(rhs),
        "nodes": max(n1, n2, n3),
        "method": method,
    }


def gbc_residual(triple: StaticTriple, u_radial: Callable | None = None, tol: float = 1e-10, path: str = "analytic") -> dict:
    """Gauss-Bonnet-Chern identity by base reduction, cross-checked by the 4D engine."""
    red = gbc_terms(triple, u_radial, "reduced", tol, path)
    direct = gbc_terms(triple, u_radial, "direct", min(1e-8, 100 * tol), path)
    keys = ("R2_term", "W_plus_term", "ric0_term")
    cross = max(abs(red[k] - direct[k]) / max(1.0, abs(red[k])) for k in keys)
    red["direct"] = {k: direct[k] for k in keys + ("gap",)}
    red["cross_check"] = cross
    return red


def laplacian_lift_gap(triple: StaticTriple, psi: Callable, base_points, path: str = "analytic") -> np.ndarray:
    """|V Lap_h psi - div_g(V grad psi)| for a theta-independent function psi."""
    base_points = np.atleast_2d(np.asarray(base_points, dtype=float))
    lc = lift(triple)
    pts4 = lc.lift_points(base_points)
    g4 = Geometry(metric_jet(lc.chart4, pts4, 2, path))
    psi4 = function_jet(lambda x: psi(list(x[1:])) + 0.0 * x[0], pts4, 2, path, triple.chart.scale, tshape=())
    lhs = triple.potential(base_points) * g4.laplacian(psi4).value
    geo = StaticGeometry(triple, base_points, 2, path)
    pj = function_jet(psi, base_points, 2, path, triple.chart.scale, tshape=())
    Y = geo.raise_index(pj.grad()) * geo.Vj[..., None]
    rhs = geo.div(Y).value
    return np.abs(lhs - rhs)


def lift_sample_points(triple: StaticTriple, n: int = 100, seed: int = 0) -> np.ndarray:
    """Base sample points for lift checks (regular set, above the collar)."""
    return sample_points(triple.chart, n, seed)
