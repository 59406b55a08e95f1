"""Canonical static triples and their boundary data.

All models here are rotationally symmetric: in coordinates (xi, theta, phi)
the metric is ``A(xi) dxi^2 + a(xi)^2 g_can`` and the potential depends on xi
only.  The Schwarzschild-de Sitter family is written in the coordinate
``r = r_h + (r_c - r_h) sin^2(xi)``, in which the metric and the potential are
smooth up to both horizons; the plain area-radius chart is also available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from . import jets as J
from .chart import Chart, DomainError

M_MAX = 1.0 / (3.0 * math.sqrt(3.0))
MASS_MARGIN = 1e-9


class MassRangeError(ValueError):
    """Mass parameter outside the open interval (0, 1/(3*sqrt(3)))."""


@dataclass(frozen=True)
class BoundaryComponent:
    label: str
    area: float
    surface_gravity: float
    euler_characteristic: int
    coordinate: int = 0
    value: float = 0.0

    def __post_init__(self):
        if not self.surface_gravity > 0:
            raise ValueError(f"surface gravity of {self.label} must be positive")


@dataclass(frozen=True)
class RadialProfile:
    """Profile functions of the radial coordinate xi (jet-compatible)."""

    A: Callable  # metric coefficient of dxi^2
    a: Callable  # area radius of the xi = const spheres
    V: Callable
    interval: tuple  # chart interval of xi
    kind: str = "geodesic"  # geodesic | smooth | lapse


@dataclass(frozen=True)
class StaticTriple:
    name: str
    chart: Chart
    V: Callable
    epsilon: int
    boundary: tuple
    radial: RadialProfile | None = None
    V_derivs: Callable | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.epsilon not in (-1, 0, 1):
            raise ValueError("epsilon must be -1, 0 or 1")

    def potential(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return np.broadcast_to(np.asarray(self.V([p[..., i] for i in range(self.chart.dim)]), dtype=float), p.shape[:-1])

    def component(self, key) -> BoundaryComponent:
        if isinstance(key, BoundaryComponent):
            return key
        if isinstance(key, int):
            return self.boundary[key]
        for b in self.boundary:
            if b.label == key:
                return b
        raise KeyError(f"no boundary component {key!r} on {self.name}")


def warped_chart(name: str, A: Callable, a: Callable, interval, scale: float = 1.0, trim: float = 0.02) -> Chart:
    """Chart (xi, theta, phi) for ``A(xi) dxi^2 + a(xi)^2 (dtheta^2 + sin^2 theta dphi^2)``."""
    lo, hi = interval
    w = hi - lo

    def metric(x):
        aa = a(x[0]) ** 2
        return [
            [A(x[0]), 0.0, 0.0],
            [0.0, aa, 0.0],
            [0.0, 0.0, aa * J.sin(x[1]) ** 2],
        ]

    domain = ((lo, hi), (0.0, math.pi), (-math.pi, math.pi))
    # the polar band stays away from the coordinate axis, where 1/sin(theta) amplifies FD noise
    box = ((lo + trim * w, hi - trim * w), (math.pi / 4, 3 * math.pi / 4), (-3.0, 3.0))
    return Chart(3, ("xi", "theta", "phi"), domain, metric, scale=scale, sample_box=box, name=name)


def _radial_triple(name, A, a, V, interval, boundary, epsilon=1, kind="geodesic", scale=1.0, params=None, trim=0.02):
    chart = warped_chart(name, A, a, interval, scale, trim)
    radial = RadialProfile(A, a, V, tuple(interval), kind)
    return StaticTriple(name, chart, lambda x: V(x[0]), epsilon, tuple(boundary), radial, params=params or {})


def _face_gravity(A, V, xi) -> float:
    """|grad V| at xi from the profile jets (the chart must be regular there)."""
    (x,) = J.variables(np.array([[xi]]), 1)
    dV = V(x).derivative((1,))[0]
    return float(abs(dV) / math.sqrt(float(np.asarray(J.value(A(xi)) + 0.0 * xi))))


def hemisphere_triple() -> StaticTriple:
    """Upper unit hemisphere in geodesic polar coordinates about the pole, V = cos s."""
    half = math.pi / 2
    k = _face_gravity(lambda s: 1.0, J.cos, half)
    boundary = [BoundaryComponent("equator", 4 * math.pi, k, 2, 0, half)]
    return _radial_triple("hemisphere", lambda s: 1.0 + 0.0 * s, J.sin, J.cos, (0.0, half), boundary)


def cylinder_triple() -> StaticTriple:
    """dt^2 + (1/3) g_can on [0, pi/sqrt(3)] with V = sin(sqrt(3) t)/sqrt(3)."""
    s3 = math.sqrt(3.0)
    top = math.pi / s3

    def V(t):
        return J.sin(s3 * t) / s3

    def A(t):
        return 1.0 + 0.0 * t

    def a(t):
        return 1.0 / s3 + 0.0 * t

    boundary = [
        BoundaryComponent("t=0", 4 * math.pi / 3, _face_gravity(A, V, 0.0), 2, 0, 0.0),
        BoundaryComponent("t=pi/sqrt3", 4 * math.pi / 3, _face_gravity(A, V, top), 2, 0, top),
    ]
    return _radial_triple("cylinder", A, a, V, (0.0, top), boundary)


def check_mass(m: float) -> float:
    m = float(m)
    if not (math.isfinite(m) and MASS_MARGIN * M_MAX <= m <= M_MAX * (1 - MASS_MARGIN)):
        raise MassRangeError("mass out of range (0, 1/(3√3))")
    return m


def sds_lapse(m: float, r):
    return 1.0 - r * r - 2.0 * m / r


def sds_horizons(m: float) -> tuple[float, float]:
    """Positive zeros r_h < r_c of f(r) = 1 - r^2 - 2m/r."""
    m = check_mass(m)
    mid = 1.0 / math.sqrt(3.0)

    def f(r):
        return 1.0 - r * r - 2.0 * m / r

    try:
        rh = brentq(f, 1e-12, mid, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
        rc = brentq(f, mid, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    except ValueError as exc:  # pragma: no cover - signals an arithmetic bug
        raise RuntimeError(f"horizon bracket failure at m={m!r}") from exc
    return rh, rc


def sds_gravities(m: float) -> tuple[float, float]:
    """Surface gravities |f'(r_i)|/2 of the two horizons."""
    rh, rc = sds_horizons(m)

    def df(r):
        return -2.0 * r + 2.0 * m / (r * r)

    return abs(df(rh)) / 2.0, abs(df(rc)) / 2.0


def sds_triple(m: float, coordinates: str = "xi") -> StaticTriple:
    """Schwarzschild-de Sitter triple of mass m.

    ``coordinates="xi"`` uses r = r_h + (r_c - r_h) sin^2(xi), regular at both
    horizons; ``coordinates="r"`` uses the area radius, singular at the faces.
    """
    m = check_mass(m)
    rh, rc = sds_horizons(m)
    k1, k2 = sds_gravities(m)
    params = {"m": m, "r_h": rh, "r_c": rc}
    if coordinates == "xi":
        d = rc - rh
        s = rh + rc

        def r(xi):
            return rh + d * J.sin(xi) ** 2

        def A(xi):
            rr = r(xi)
            return 4.0 * rr / (rr + s)

        def V(xi):
            rr = r(xi)
            return d * J.sin(xi) * J.cos(xi) * J.sqrt((rr + s) / rr)

        boundary = [
            BoundaryComponent("r_h", 4 * math.pi * rh * rh, k1, 2, 0, 0.0),
            BoundaryComponent("r_c", 4 * math.pi * rc * rc, k2, 2, 0, math.pi / 2),
        ]
        return _radial_triple(f"sds:{m!r}", A, r, V, (0.0, math.pi / 2), boundary, kind="smooth", params=params)
    if coordinates == "r":

        def A(rr):
            return 1.0 / sds_lapse(m, rr)

        def V(rr):
            return J.sqrt(sds_lapse(m, rr))

        def a(rr):
            return rr

        boundary = [
            BoundaryComponent("r_h", 4 * math.pi * rh * rh, k1, 2, 0, rh),
            BoundaryComponent("r_c", 4 * math.pi * rc * rc, k2, 2, 0, rc),
        ]
        return _radial_triple(f"sds:{m!r}", A, a, V, (rh, rc), boundary, kind="lapse", scale=rc - rh, params=params)
    raise ValueError(f"unknown SdS coordinates {coordinates!r}")


def surface_gravity(triple: StaticTriple, component) -> float:
    return triple.component(component).surface_gravity


def boundary_area(triple: StaticTriple, component) -> float:
    return triple.component(component).area


def face_gradient_limit(triple: StaticTriple, component, distances=(1e-2, 5e-3, 2.5e-3)) -> float:
    """|grad V| extrapolated to a face from interior points (Richardson in the distance)."""
    comp = triple.component(component)
    lo, hi = triple.chart.domain[comp.coordinate]
    sign = 1.0 if abs(comp.value - lo) < abs(comp.value - hi) else -1.0
    width = hi - lo
    vals = []
    hs = [d * width for d in distances]
    for h in hs:
        p = np.array([comp.value + sign * h, math.pi / 2, 0.0])
        xs = J.variables(p[None, :], 1)
        Vj = J.stack([triple.V(xs)], axis=-1)[..., 0]
        grad = Vj.grad().value[0]
        gi = np.linalg.inv(triple.chart.g(p))
        vals.append(math.sqrt(grad @ gi @ grad))
    # fit |grad V| = k + c1 h + c2 h^2 through the three samples
    coef = np.polyfit(np.array(hs), np.array(vals), 2)
    return float(coef[-1])


# ----------------------------------------------------------------------------
# radial quadrature


def gauss_legendre(a: float, b: float, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def radial_points(triple: StaticTriple, xi) -> np.ndarray:
    """Points (xi, pi/2, 0) on the equatorial ray."""
    xi = np.asarray(xi, dtype=float)
    return np.stack([xi, np.full_like(xi, math.pi / 2), np.zeros_like(xi)], axis=-1)


def volume_density(triple: StaticTriple, xi) -> np.ndarray:
    """4 pi a^2 sqrt(A): the Riemannian measure integrated over the spheres."""
    rp = triple.radial
    A = np.asarray(rp.A(xi), dtype=float)
    a = np.asarray(rp.a(xi), dtype=float)
    return 4 * math.pi * a * a * np.sqrt(A)


def integrate_radial(triple: StaticTriple, integrand: Callable, tol: float = 1e-10, n0: int = 64, nmax: int = 8192,
                     interval=None):
    """Integrate a rotationally symmetric function over M.

    ``integrand(xi)`` returns the function values at radial nodes; the sphere
    factor and the radial measure are supplied here.  Gauss-Legendre node
    counts double until successive values agree to ``tol`` (relative to
    max(1, |value|)).  ``interval`` restricts the radial range.  Returns
    (value, nodes used).
    """
    if triple.radial is None:
        raise ValueError(f"{triple.name} is not rotationally symmetric")
    a, b = triple.radial.interval if interval is None else interval
    prev = None
    n = n0
    while n <= nmax:
        x, w = gauss_legendre(a, b, n)
        val = float(np.sum(w * np.asarray(integrand(x), dtype=float) * volume_density(triple, x)))
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val, n
        prev = val
        n *= 2
    raise RuntimeError(f"radial quadrature did not converge on {triple.name}")


# ----------------------------------------------------------------------------
# triple specs


_FILE_KEYS = {"f", "r_min", "r_max", "epsilon", "name"}


def warped_from_file(path) -> StaticTriple:
    """Read ``key = value`` lines describing ``dr^2/f + r^2 g_can`` with V = sqrt(f).

    Keys: ``f`` (expression in r), ``r_min``, ``r_max`` and optional
    ``epsilon`` and ``name``.  Interval ends where f vanishes become boundary
    components.
    """
    import sympy

    text = Path(path).read_text()
    cfg = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{n}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _FILE_KEYS:
            raise ValueError(f"{path}:{n}: unknown key {key!r}")
        cfg[key] = val
    for key in ("f", "r_min", "r_max"):
        if key not in cfg:
            raise ValueError(f"{path}: missing key {key!r}")
    r = sympy.Symbol("r", positive=True)
    expr = sympy.sympify(cfg["f"], locals={"r": r})
    if expr.free_symbols - {r}:
        raise ValueError(f"{path}: f may only depend on r")
    funcs = {name: getattr(J, name) for name in ("sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh")}
    f = sympy.lambdify(r, expr, modules=[funcs, "math"])
    df = sympy.lambdify(r, sympy.diff(expr, r), modules=[funcs, "math"])
    lo, hi = float(sympy.sympify(cfg["r_min"])), float(sympy.sympify(cfg["r_max"]))
    if not 0 < lo < hi:
        raise ValueError(f"{path}: need 0 < r_min < r_max")
    eps = int(cfg.get("epsilon", 1))
    name = cfg.get("name", f"warped:{Path(path).name}")
    mid = np.linspace(lo, hi, 33)[1:-1]
    if np.any(np.asarray([float(f(x)) for x in mid]) <= 0):
        raise ValueError(f"{path}: f must be positive inside (r_min, r_max)")
    boundary = []
    for label, end in (("r_min", lo), ("r_max", hi)):
        if abs(float(f(end))) < 1e-10:
            boundary.append(BoundaryComponent(label, 4 * math.pi * end * end, abs(float(df(end))) / 2, 2, 0, end))

    def A(rr):
        return 1.0 / f(rr)

    def V(rr):
        return J.sqrt(f(rr))

    def a(rr):
        return rr + 0.0

    return _radial_triple(name, A, a, V, (lo, hi), boundary, epsilon=eps, kind="lapse", scale=hi - lo)


def parse_triple(spec: str) -> StaticTriple:
    """Build a triple from a CLI name: hemisphere, cylinder, sds:<m>, warped:<file>."""
    spec = spec.strip()
    if spec == "hemisphere":
        return hemisphere_triple()
    if spec == "cylinder":
        return cylinder_triple()
    if spec.startswith("sds:"):
        try:
            m = float(spec[4:])
        except ValueError as exc:
            raise MassRangeError(f"bad mass in {spec!r}") from exc
        return sds_triple(m)
    if spec.startswith("warped:"):
        return warped_from_file(spec[7:])
    raise ValueError(f"unknown triple {spec!r}")


__all__ = [
    "BoundaryComponent",
    "DomainError",
    "M_MAX",
    "MassRangeError",
    "RadialProfile",
    "StaticTriple",
    "boundary_area",
    "cylinder_triple",
    "face_gradient_limit",
    "hemisphere_triple",
    "integrate_radial",
    "parse_triple",
    "radial_points",
    "sds_gravities",
    "sds_horizons",
    "sds_triple",
    "surface_gravity",
    "volume_density",
    "warped_from_file",
]
