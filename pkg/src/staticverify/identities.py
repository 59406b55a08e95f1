"""Pointwise and integral checks of the static-triple identities.

Each ``*_residual`` function evaluates an identity on a batch of points and
returns absolute residuals; ``run_identity_suite`` wraps them into
:class:`CheckReport` records.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad, solve_ivp

from . import jets as J
from .chart import (
    DomainError,
    Geometry,
    check_points,
    fd_reach,
    function_jet,
    metric_jet,
    orthonormal_frame,
    sample_points,
    to_frame,
)
from .jets import jeinsum
from .triples import StaticTriple, integrate_radial, radial_points

COLLAR = 1e-3

TOLERANCES = {
    "analytic": {
        "static_equation": 1e-6,
        "static_split": 1e-6,
        "dirichlet_eigen": 1e-6,
        "bochner": 1e-5,
        "shen": 1e-6,
        "cotton_identity": 1e-6,
        "jacobi_slice": 1e-6,
        "expansion": 0.02,
        "integral_formula": 1e-8,
        "boundary_curvature": 1e-8,
        "slice_flow": 1e-8,
    },
    "fd": {
        "static_equation": 1e-4,
        "static_split": 1e-4,
        "dirichlet_eigen": 1e-4,
        "bochner": 1e-3,
        "shen": 1e-4,
        "cotton_identity": 1e-4,
        "jacobi_slice": 1e-4,
        "expansion": 0.02,
        "integral_formula": 1e-8,
        "boundary_curvature": 1e-8,
        "slice_flow": 1e-8,
    },
}


@dataclass
class CheckReport:
    check_name: str
    triple_name: str
    sample_count: int
    max_residual: float
    mean_residual: float
    tolerance: float
    passed: bool
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_residuals(cls, name, triple_name, residuals, tolerance, **metadata):
        r = np.abs(np.asarray(residuals, dtype=float)).ravel()
        mx = float(np.max(r)) if r.size else 0.0
        mean = float(np.mean(r)) if r.size else 0.0
        ok = bool(r.size and np.all(np.isfinite(r)) and mx <= tolerance)
        return cls(name, triple_name, int(r.size), mx, mean, float(tolerance), ok, dict(metadata))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CheckReport":
        d = dict(d)
        d["passed"] = d.pop("pass")
        return cls(**d)


class CollarError(ValueError):
    """A formula dividing by V was evaluated where V is below the collar threshold."""


# ----------------------------------------------------------------------------
# jets of a static triple


class StaticGeometry(Geometry):
    """Geometry of a static triple with the potential jet attached."""

    def __init__(self, triple: StaticTriple, points, degree: int = 4, path: str = "analytic"):
        chart = triple.chart
        reach = fd_reach(chart.scale, degree) if path == "fd" else 0.0
        pts = check_points(chart, points, reach)
        self.points = pts
        self.triple = triple
        self.path = path
        super().__init__(metric_jet(chart, pts, degree, path))
        self.Vj = function_jet(triple.V, pts, degree, path, chart.scale, tshape=())
        self.eps = triple.epsilon

    @property
    def V(self) -> np.ndarray:
        return self.Vj.value

    def require_collar(self, threshold: float = COLLAR):
        if np.any(self.V < threshold * self.triple.chart.scale):
            raise CollarError(f"V below collar threshold {threshold} at some sample point")

    @property
    def dV(self):
        return self.Vj.grad()

    @property
    def hessV(self):
        return self.hess(self.Vj)

    @property
    def lapV(self):
        return self.laplacian(self.Vj)


def _frob(geo: Geometry, T: np.ndarray, rank: int) -> np.ndarray:
    return np.sqrt(np.maximum(geo.norm2(T, rank), 0.0))


# ----------------------------------------------------------------------------
# residuals


def static_terms(geo: StaticGeometry) -> dict:
    """Residual tensors of the static equation and its split form."""
    H = geo.hessV.value
    L = geo.lapV.value
    V = geo.V
    g = geo.g
    ric = geo.ric.value
    R = geo.scalar.value
    n = geo.dim
    lam = R / (n - 1)
    full = H - L[..., None, None] * g - V[..., None, None] * ric
    split_a = H - V[..., None, None] * (ric - lam[..., None, None] * g)
    split_b = L + lam * V
    return {"full": full, "split_a": split_a, "split_b": split_b, "lambda": lam}


def static_residual(triple: StaticTriple, p, path: str = "analytic", geo: StaticGeometry | None = None):
    """Norm of Hess V - (Lap V) g - V Ric, plus the split residuals.

    Returns (full, split_a, split_b, dirichlet) where dirichlet is the residual
    of Lap V + 3 eps V = 0 (eps normalization, dimension 3).
    """
    geo = geo or StaticGeometry(triple, np.atleast_2d(p), 2, path)
    t = static_terms(geo)
    full = _frob(geo, t["full"], 2)
    sa = _frob(geo, t["split_a"], 2)
    sb = np.abs(t["split_b"])
    dirichlet = np.abs(geo.lapV.value + 3 * geo.eps * geo.V)
    return full, sa, sb, dirichlet


def det_mixed(geo: Geometry, T: np.ndarray) -> np.ndarray:
    """Determinant of the endomorphism g^{-1} T."""
    return np.linalg.det(np.einsum("...ij,...jk->...ik", geo.ginv, T))


def bochner_terms(geo: StaticGeometry) -> dict:
    """Both sides of the Bochner-type formula and its constituent terms."""
    ric0 = geo.ric0
    f = geo.norm2(ric0, 2)  # jet, order 2
    Y = geo.raise_index(f.grad()) * geo.Vj[..., None]
    lhs = 0.5 * geo.div(Y).value
    V = geo.V
    D = geo.cov(ric0).value
    C = geo.cotton.value
    r0 = ric0.value
    grad2 = geo.norm2(D, 3)
    c2 = geo.norm2(C, 3)
    n2 = geo.norm2(r0, 2)
    R = geo.scalar.value
    det = det_mixed(geo, r0)
    terms = {
        "lhs": lhs,
        "grad_term": grad2 * V,
        "cotton_term": 0.5 * c2 * V,
        "scalar_term": R * n2 * V,
        "det_term": 18 * det * V,
        "ric0_norm2_term": n2 * V,
        "V": V,
    }
    terms["rhs"] = terms["grad_term"] + terms["cotton_term"] + terms["scalar_term"] + terms["det_term"]
    # variant with |Ric0|^2 in place of |grad Ric0|^2 in the first term
    terms["rhs_variant"] = terms["ric0_norm2_term"] + terms["cotton_term"] + terms["scalar_term"] + terms["det_term"]
    return terms


def bochner_residual(triple: StaticTriple, p, path: str = "analytic", geo=None, variant: bool = False):
    geo = geo or StaticGeometry(triple, np.atleast_2d(p), 4, path)
    t = bochner_terms(geo)
    return np.abs(t["lhs"] - (t["rhs_variant"] if variant else t["rhs"]))


def shen_residual(triple: StaticTriple, p, path: str = "analytic", geo=None):
    """div((1/V) d(|grad V|^2 + eps V^2)) - 2 V |Ric0|^2."""
    geo = geo or StaticGeometry(triple, np.atleast_2d(p), 4, path)
    geo.require_collar()
    Vj = geo.Vj
    dV = geo.dV
    Q = jeinsum("...i,...i->...", geo.raise_index(dV), dV) + Vj * Vj * geo.eps
    Y = geo.raise_index(Q.grad()) / Vj[..., None]
    lhs = geo.div(Y).value
    rhs = 2 * geo.V * geo.norm2(geo.ric0.value, 2)
    return np.abs(lhs - rhs)


def cotton_identity_terms(geo: StaticGeometry) -> dict:
    g = geo.g
    V = geo.V
    dV = geo.dV.value
    dVup = np.einsum("...ij,...j->...i", geo.ginv, dV)
    r0 = geo.ric0.value
    # traceless Hessian and its covariant derivative
    Hj = geo.hessV
    L = geo.lapV
    H0 = Hj - geo.gj * (L * (1.0 / geo.dim))[..., None, None]
    DH0 = geo.cov(H0).value  # DH0[i, j, k] = H0_ij;k
    T = DH0 - np.swapaxes(DH0, -1, -2)
    rdv = np.einsum("...kp,...p->...k", r0, dVup)  # Ric0(grad V, .)
    U = np.einsum("...ij,...k->...ijk", r0, dV) - np.einsum("...ik,...j->...ijk", r0, dV)
    T_pred = -U - (np.einsum("...ij,...k->...ijk", g, rdv) - np.einsum("...ik,...j->...ijk", g, rdv))
    C = geo.cotton.value
    Vb = V[..., None, None, None]
    C_pred = (T - U) / Vb
    n2 = geo.norm2(r0, 2)
    gradV2 = np.einsum("...i,...i->...", dVup, dV)
    rdv2 = np.einsum("...i,...ij,...j->...", rdv, geo.ginv, rdv)
    c2 = geo.norm2(C, 3)
    r0up = np.einsum("...ia,...jb,...ab->...ij", geo.ginv, geo.ginv, r0)
    contraction = np.einsum("...ijk,...ij,...k->...", C, r0up, dVup)
    return {
        "T": T,
        "T_pred": T_pred,
        "C": C,
        "C_pred": C_pred,
        "V2C2": V * V * c2,
        "norm_formula": 8 * n2 * gradV2 - 12 * rdv2,
        "C2": c2,
        "C2_contraction": -4.0 / V * contraction,
        "ric0": r0,
        "dV": dV,
    }


def cotton_identity_residuals(triple: StaticTriple, p, path: str = "analytic", geo=None):
    """Residuals (r1, r2, r3, r4) of the four Cotton-tensor identities."""
    geo = geo or StaticGeometry(triple, np.atleast_2d(p), 4, path)
    geo.require_collar()
    t = cotton_identity_terms(geo)
    r1 = _frob(geo, t["T"] - t["T_pred"], 3)
    r2 = _frob(geo, t["C"] - t["C_pred"], 3)
    r3 = np.abs(t["V2C2"] - t["norm_formula"])
    r4 = np.abs(t["C2"] - t["C2_contraction"])
    return r1, r2, r3, r4


def eigenform_gap(geo: StaticGeometry) -> np.ndarray:
    """|C|^2 V^2 from the eigenvalue formula minus the direct norm."""
    from .algebra import cotton_norm_eigenform

    t = cotton_identity_terms(geo)
    E = orthonormal_frame(geo.g)
    r0f = to_frame(t["ric0"], E, 2)
    dVf = to_frame(t["dV"], E, 1)
    lam, Q = np.linalg.eigh(r0f)
    a = np.einsum("...ji,...j->...i", Q, dVf)
    eig = np.array([cotton_norm_eigenform(l[0], l[1], ai) for l, ai in zip(lam.reshape(-1, 3), a.reshape(-1, 3))])
    return np.abs(eig.reshape(lam.shape[:-1]) - t["V2C2"])


# ----------------------------------------------------------------------------
# boundary behaviour


def _face_direction(triple: StaticTriple, comp):
    lo, hi = triple.chart.domain[comp.coordinate]
    return 1.0 if abs(comp.value - lo) <= abs(comp.value - hi) else -1.0


def _profile_jets(triple, xi, degree):
    (x,) = J.variables(np.asarray(xi, dtype=float)[:, None], degree)
    rp = triple.radial
    return rp.A(x), rp.V(x)


def ricci_normal_at_face(triple: StaticTriple, component) -> float:
    """Ric(N, N) at a boundary face, N the unit radial normal."""
    comp = triple.component(component)
    sign = _face_direction(triple, comp)
    width = triple.chart.domain[0][1] - triple.chart.domain[0][0]
    if triple.radial.kind in ("geodesic", "smooth"):
        offsets = [0.0]
    else:
        offsets = [1e-3 * width, 2e-3 * width, 3e-3 * width]
    vals = []
    for h in offsets:
        p = radial_points(triple, np.array([comp.value + sign * h]))
        geo = Geometry(metric_jet(triple.chart, p, 2))
        vals.append(geo.ric.value[0, 0, 0] * geo.ginv[0, 0, 0])
    if len(vals) == 1:
        return float(vals[0])
    return float(np.polyfit(offsets, vals, 2)[-1])


def arc_length(triple: StaticTriple, component, xi) -> np.ndarray:
    """Distance from a face along the radial geodesic to coordinate xi."""
    comp = triple.component(component)
    rp = triple.radial

    # substitute x = face + sign w^2 so the 1/sqrt(f) face behaviour of lapse charts is removed
    def speed(w, sign):
        return 2.0 * w * math.sqrt(float(J.value(rp.A(comp.value + sign * w * w))))

    out = []
    for x in np.atleast_1d(xi):
        sign = 1.0 if x >= comp.value else -1.0
        w_end = math.sqrt(abs(x - comp.value))
        out.append(quad(speed, 0.0, w_end, args=(sign,), epsabs=1e-15, epsrel=1e-13, limit=200)[0])
    return np.array(out)


def boundary_expansion_check(triple: StaticTriple, component=0, s_max: float | None = None, n: int = 40) -> dict:
    """Fit the near-boundary expansions of V^2 and |grad V|^2 along the normal geodesic.

    V^2 / k^2 is fitted on (s^2, s^4, s^6) and |grad V|^2 / k^2 on (1, s^2, s^4);
    the fitted s^4 and s^2 coefficients are compared with the curvature
    prediction (Ric(N,N) - 3 eps)/3 and Ric(N,N) - 3 eps.  The default fit
    window is 0.1 times the area radius of the face (capped at 0.1), which
    tracks the curvature scale of small horizons.
    """
    if triple.radial is None:
        raise ValueError("expansion check needs a rotationally symmetric triple")
    comp = triple.component(component)
    if s_max is None:
        s_max = 0.1 * min(1.0, math.sqrt(comp.area / (4 * math.pi)))
    sign = _face_direction(triple, comp)
    lo, hi = triple.radial.interval
    # find the chart coordinate reaching distance s_max
    far = hi if sign > 0 else lo

    def dist(x):
        return arc_length(triple, comp, x)[0] - s_max

    if dist(comp.value + sign * 0.5 * abs(far - comp.value)) < 0:
        raise DomainError("geodesic leaves the chart before s_max")
    from scipy.optimize import brentq

    x_end = brentq(dist, comp.value + sign * 1e-12, comp.value + sign * 0.5 * abs(far - comp.value), xtol=1e-15)
    xi = comp.value + sign * np.linspace(1.0 / n, 1.0, n) * abs(x_end - comp.value)
    s = arc_length(triple, comp, xi)
    A, Vj = _profile_jets(triple, xi, 1)
    V = Vj.value
    dV = Vj.deriv(0).value
    grad2 = dV * dV / J.value(A)
    k2 = comp.surface_gravity**2
    basis_v = np.stack([s**2, s**4, s**6], axis=1)
    cv, *_ = np.linalg.lstsq(basis_v, V * V / k2, rcond=None)
    basis_g = np.stack([np.ones_like(s), s**2, s**4], axis=1)
    cg, *_ = np.linalg.lstsq(basis_g, grad2 / k2, rcond=None)
    ricnn = ricci_normal_at_face(triple, comp)
    n_dim = 3
    pred4 = (ricnn - triple.epsilon * n_dim) / 3.0
    pred2 = ricnn - triple.epsilon * n_dim
    return {
        "component": comp.label,
        "s_max": s_max,
        "ric_nn": ricnn,
        "s2_coefficient_V2": float(cv[0]),
        "s4_coefficient_V2": float(cv[1]),
        "predicted_s4": pred4,
        "s2_coefficient_grad2": float(cg[1]),
        "predicted_s2": pred2,
        "relative_error_s4": abs(cv[1] - pred4) / max(abs(pred4), 1e-300),
        "relative_error_s2": abs(cg[1] - pred2) / max(abs(pred2), 1e-300),
    }


def boundary_curvature_check(triple: StaticTriple) -> dict:
    """Gauss-equation curvature of the face where |grad V|^2 + eps V^2 is largest."""
    if triple.epsilon != 1:
        raise ValueError("boundary curvature check applies to positive-eps triples")
    comps = sorted(triple.boundary, key=lambda b: -b.surface_gravity)
    out = []
    for comp in comps:
        ricnn = ricci_normal_at_face(triple, comp)
        K = 3.0 * triple.epsilon - ricnn
        intrinsic = 1.0 / float(J.value(triple.radial.a(np.array(comp.value)))) ** 2
        out.append({"component": comp.label, "k": comp.surface_gravity, "K_gauss": K, "K_intrinsic": intrinsic})
    top = out[0]
    return {
        "components": out,
        "maximizing_component": top["component"],
        "K": top["K_gauss"],
        "bound": float(triple.epsilon),
        "holds": bool(top["K_gauss"] >= triple.epsilon - 1e-10),
        "gauss_vs_intrinsic": max(abs(c["K_gauss"] - c["K_intrinsic"]) for c in out),
    }


# ----------------------------------------------------------------------------
# integrals


def ric0_norm2_on_ray(triple: StaticTriple, xi) -> np.ndarray:
    geo = Geometry(metric_jet(triple.chart, radial_points(triple, xi), 2))
    return geo.norm2(geo.ric0.value, 2)


def potential_on_ray(triple: StaticTriple, xi) -> np.ndarray:
    return np.asarray(triple.radial.V(np.asarray(xi, dtype=float)), dtype=float)


def integral_identity_check(triple: StaticTriple, tol: float = 1e-10):
    """Sum k_i |d_i M| + int |Ric0|^2 V  against  2 pi sum k_i chi_i."""
    if triple.epsilon != 1:
        raise ValueError("integral identity needs eps = 1")
    integral, nodes = integrate_radial(triple, lambda x: ric0_norm2_on_ray(triple, x) * potential_on_ray(triple, x), tol)
    boundary = sum(b.surface_gravity * b.area for b in triple.boundary)
    lhs = boundary + integral
    rhs = 2 * math.pi * sum(b.surface_gravity * b.euler_characteristic for b in triple.boundary)
    return {"lhs": lhs, "rhs": rhs, "gap": abs(lhs - rhs) / abs(rhs), "boundary_term": boundary, "bulk_term": integral, "nodes": nodes}


# ----------------------------------------------------------------------------
# slices


@dataclass(frozen=True)
class CoordinateSlice:
    coordinate: int
    value: float


def _slice_metric(chart, sl: CoordinateSlice) -> Callable:
    keep = [i for i in range(chart.dim) if i != sl.coordinate]

    def metric(y):
        x = list(y)
        x.insert(sl.coordinate, sl.value + 0.0 * y[0])
        rows = chart.metric(x)
        return [[rows[i][j] for j in keep] for i in keep]

    return metric


def jacobi_terms(triple: StaticTriple, sl: CoordinateSlice, y, path: str = "analytic") -> dict:
    """Both sides of the Jacobi-operator identity on a coordinate slice.

    ``y`` are points in the slice coordinates.  The slice Laplacian is computed
    intrinsically from the induced metric; the normal is N = grad x^a / |grad x^a|
    and A(X, Y) = g(D_X N, Y), with mean curvature vector H = (tr A) N.
    """
    y = np.atleast_2d(np.asarray(y, dtype=float))
    a = sl.coordinate
    pts = np.insert(y, a, sl.value, axis=1)
    geo = StaticGeometry(triple, pts, 2, path)
    keep = [i for i in range(3) if i != a]
    # intrinsic Laplacian of V on the slice
    gam = function_jet(_slice_metric(triple.chart, sl), y, 2, path, triple.chart.scale, (2, 2))
    sgeo = Geometry(gam)

    def Vslice(yy):
        x = list(yy)
        x.insert(a, sl.value + 0.0 * yy[0])
        return triple.V(x)

    Vs = function_jet(Vslice, y, 2, path, triple.chart.scale, tshape=())
    lap_sigma = sgeo.laplacian(Vs).value
    ginv = geo.ginv
    gaa = ginv[..., a, a]
    N = ginv[..., a, :] / np.sqrt(gaa)[..., None]
    Gam = geo.gamma.value
    A = -Gam[:, a][:, keep][:, :, keep] / np.sqrt(gaa)[:, None, None]
    gi2 = sgeo.ginv
    A2 = np.einsum("...ik,...jl,...ij,...kl->...", gi2, gi2, A, A)
    H = np.einsum("...ij,...ij->...", gi2, A)
    ric = geo.ric.value
    ricNN = np.einsum("...i,...ij,...j->...", N, ric, N)
    dV = geo.dV.value
    V = geo.V
    lhs = lap_sigma + (ricNN + A2) * V
    rhs = -H * np.einsum("...i,...i->...", dV, N) + A2 * V
    return {"lhs": lhs, "rhs": rhs, "A2": A2, "H": H, "lap_sigma": lap_sigma}


def jacobi_slice_check(triple: StaticTriple, sl: CoordinateSlice, y, path: str = "analytic") -> np.ndarray:
    t = jacobi_terms(triple, sl, y, path)
    return np.abs(t["lhs"] - t["rhs"])


def default_slice(triple: StaticTriple):
    """A representative slice with sample points in its coordinates."""
    box = triple.chart.box()
    if triple.name == "hemisphere":
        sl = CoordinateSlice(1, math.pi / 2)  # totally geodesic disk through the pole
    else:
        sl = CoordinateSlice(0, float(np.mean(box[0])))
    keep = [i for i in range(3) if i != sl.coordinate]
    rng = np.random.default_rng(11)
    y = box[keep, 0] + rng.random((20, 2)) * (box[keep, 1] - box[keep, 0])
    return sl, y


def slice_flow_check(triple: StaticTriple, steps: int = 20, tau_max: float = 1.0) -> dict:
    """Flow a minimal slice with normal speed V and record its area.

    Coordinate spheres move by dxi/dtau = V / sqrt(A); for the hemisphere the
    totally geodesic disk flows through rotated great hemispheres with angle
    psi' = cos(psi).  Models without a minimal slice report not-applicable.
    """
    taus = np.linspace(0.0, tau_max, steps + 1)
    if triple.name == "hemisphere":
        sol = solve_ivp(lambda t, y: [math.cos(y[0])], (0, tau_max), [0.0], t_eval=taus, rtol=1e-12, atol=1e-14)
        x, w = np.polynomial.legendre.leggauss(64)
        areas = []
        for psi in sol.y[0]:
            # great 2-sphere cos(a) e1 + sin(a)(cos(b) e2 + sin(b) w), w = (0, 0, sin psi, cos psi);
            # the part with x4 = sin(a) sin(b) cos(psi) > 0 is b in (0, pi)
            al = 0.5 * math.pi * (x + 1)
            be = 0.5 * math.pi * (x + 1)
            mask = (np.sin(al)[:, None] * np.sin(be)[None, :] * math.cos(psi)) > 0
            dens = np.sin(al)[:, None] * np.ones_like(be)[None, :] * mask
            areas.append(float((0.5 * math.pi) ** 2 * np.einsum("i,j,ij->", w, w, dens)))
        areas = np.array(areas)
        rate = np.gradient(areas, taus)
        return {"status": "ok", "surface": "great hemisphere disk", "tau": taus.tolist(), "area": areas.tolist(),
                "max_area_rate": float(np.max(np.abs(rate))), "area_drift": float(np.max(np.abs(areas - areas[0])))}
    rp = triple.radial
    if rp is None:
        return {"status": "not-applicable", "reason": "no rotational symmetry"}
    lo, hi = rp.interval
    grid = np.linspace(lo, hi, 2001)[1:-1]
    (x,) = J.variables(grid[:, None], 1)
    da = J.value(rp.a(x).deriv(0)) if isinstance(rp.a(x), J.Jet) else np.zeros_like(grid)
    if np.all(np.abs(da) < 1e-12):
        xi0 = grid[np.argmax(potential_on_ray(triple, grid))]
    else:
        sgn = np.sign(da)
        idx = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
        if idx.size == 0:
            return {"status": "not-applicable", "reason": "no minimal coordinate sphere"}
        xi0 = grid[idx[0]]

    def rhs(t, y):
        return [float(J.value(rp.V(y[0]))) / math.sqrt(float(J.value(rp.A(y[0]))))]

    sol = solve_ivp(rhs, (0, tau_max), [xi0], t_eval=taus, rtol=1e-12, atol=1e-14)
    xs = sol.y[0]
    (xj,) = J.variables(xs[:, None], 1)
    aj = rp.a(xj)
    a = J.value(aj) * np.ones_like(xs)
    da = aj.deriv(0).value if isinstance(aj, J.Jet) else np.zeros_like(xs)
    areas = 4 * math.pi * a * a
    speed = np.array([rhs(0, [v])[0] for v in xs])
    rate = 8 * math.pi * a * da * speed
    return {"status": "ok", "surface": f"coordinate sphere xi={xi0:.6g}", "tau": taus.tolist(), "area": areas.tolist(),
            "max_area_rate": float(np.max(np.abs(rate))), "area_drift": float(np.max(np.abs(areas - areas[0])))}


# ----------------------------------------------------------------------------
# suite


def run_identity_suite(triple: StaticTriple, n: int = 100, seed: int = 0, path: str = "analytic", tolerances=None) -> list:
    """Evaluate every pointwise and integral identity on one triple."""
    tol = dict(TOLERANCES[path])
    tol.update(tolerances or {})
    margin = fd_reach(triple.chart.scale, 4) if path == "fd" else 0.0
    pts = sample_points(triple.chart, n, seed, margin=margin)
    meta = {"path": path, "seed": seed, "points": n}
    geo = StaticGeometry(triple, pts, 4, path)
    reports = []
    full, sa, sb, dirichlet = static_residual(triple, pts, path, geo)
    reports.append(CheckReport.from_residuals("static_equation", triple.name, full, tol["static_equation"], **meta))
    reports.append(CheckReport.from_residuals("static_split", triple.name, np.maximum(sa, sb), tol["static_split"], **meta))
    reports.append(CheckReport.from_residuals("dirichlet_eigen", triple.name, dirichlet, tol["dirichlet_eigen"], **meta))
    reports.append(CheckReport.from_residuals("bochner", triple.name, bochner_residual(triple, pts, path, geo), tol["bochner"], **meta))
    variant = bochner_residual(triple, pts, path, geo, variant=True)
    reports.append(CheckReport.from_residuals("shen", triple.name, shen_residual(triple, pts, path, geo), tol["shen"], **meta))
    for i, r in enumerate(cotton_identity_residuals(triple, pts, path, geo), 1):
        reports.append(CheckReport.from_residuals(f"cotton_identity_{i}", triple.name, r, tol["cotton_identity"], **meta))
    reports[3].metadata["variant_max_residual"] = float(np.max(variant))
    sl, y = default_slice(triple)
    reports.append(CheckReport.from_residuals("jacobi_slice", triple.name, jacobi_slice_check(triple, sl, y, path), tol["jacobi_slice"],
                                              slice_coordinate=sl.coordinate, slice_value=sl.value, **meta))
    if triple.radial is not None and triple.epsilon == 1 and triple.boundary:
        ii = integral_identity_check(triple)
        reports.append(CheckReport.from_residuals("integral_formula", triple.name, [ii["gap"]], tol["integral_formula"],
                                                  lhs=ii["lhs"], rhs=ii["rhs"], nodes=ii["nodes"]))
        for comp in triple.boundary:
            ex = boundary_expansion_check(triple, comp)
            reports.append(CheckReport.from_residuals(f"expansion[{comp.label}]", triple.name,
                                                      [ex["relative_error_s4"], ex["relative_error_s2"]], tol["expansion"],
                                                      fitted_s4=ex["s4_coefficient_V2"], predicted_s4=ex["predicted_s4"]))
        bc = boundary_curvature_check(triple)
        reports.append(CheckReport.from_residuals("boundary_curvature", triple.name,
                                                  [max(0.0, triple.epsilon - bc["K"]), bc["gauss_vs_intrinsic"]],
                                                  tol["boundary_curvature"], K=bc["K"], component=bc["maximizing_component"]))
        fl = slice_flow_check(triple)
        if fl["status"] == "ok":
            reports.append(CheckReport.from_residuals("slice_flow", triple.name, [fl["area_drift"]], tol["slice_flow"],
                                                      surface=fl["surface"]))
    return reports
