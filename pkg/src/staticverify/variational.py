"""Modified Yamabe quotient on S^1-invariant radial functions.

For a rotationally symmetric triple every integral over the lift reduces to
the radial coordinate xi with the weight w = V * 4 pi a^2 sqrt(A), which
vanishes at the boundary faces.  The quotient is

    W(phi) = sqrt(2 pi) * int (phi'^2 / A + q phi^2) w dxi / (int phi^4 w dxi)^(1/2),
    q = (12 - 2 sqrt(6) |Ric0|) / 6,

and the module minimizes its piecewise-linear discretization.  The result is
the radial infimum, an upper bound for the S^1-invariant infimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded
from scipy.optimize import brentq

from .chart import Geometry, metric_jet
from .identities import ric0_norm2_on_ray
from .triples import (
    M_MAX,
    StaticTriple,
    check_mass,
    integrate_radial,
    radial_points,
    sds_gravities,
    sds_horizons,
)

SQRT_2PI = math.sqrt(2 * math.pi)
SQRT6 = math.sqrt(6.0)
CELL_NODES = 6


class ConvergenceError(RuntimeError):
    """Minimization stopped at the iteration cap; carries the final gradient norm."""

    def __init__(self, message, grad_norm):
        super().__init__(message)
        self.grad_norm = grad_norm


@dataclass(frozen=True)
class RadialFunction:
    grid: np.ndarray
    values: np.ndarray
    interpolation: str = "cubic"  # cubic | linear

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape or np.any(np.diff(g) <= 0):
            raise ValueError("grid must be strictly increasing and match the values")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    def __call__(self, x, nu: int = 0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.interpolation == "cubic":
            return CubicSpline(self.grid, self.values)(x, nu)
        i = np.clip(np.searchsorted(self.grid, x) - 1, 0, len(self.grid) - 2)
        h = self.grid[i + 1] - self.grid[i]
        slope = (self.values[i + 1] - self.values[i]) / h
        if nu == 1:
            return slope
        return self.values[i] + slope * (x - self.grid[i])

    def scaled(self, t: float) -> "RadialFunction":
        return RadialFunction(self.grid, t * self.values, self.interpolation)


@dataclass(frozen=True)
class QuotientValue:
    numerator: float
    denominator: float
    value: float
    grid_resolution: int

    def __post_init__(self):
        if not self.denominator > 0:
            raise ValueError("quotient denominator must be positive")


# ----------------------------------------------------------------------------
# radial data


def potential_q(ric0_norm2) -> np.ndarray:
    """(12 - 2 sqrt 6 |Ric0|) / 6."""
    return (12.0 - 2.0 * SQRT6 * np.sqrt(np.maximum(ric0_norm2, 0.0))) / 6.0


def radial_data(triple: StaticTriple, x) -> dict:
    """Weight w, 1/A and potential q at radial nodes x."""
    rp = triple.radial
    x = np.asarray(x, dtype=float)
    A = np.asarray(rp.A(x), dtype=float) * np.ones_like(x)
    a = np.asarray(rp.a(x), dtype=float) * np.ones_like(x)
    V = np.asarray(rp.V(x), dtype=float) * np.ones_like(x)
    w = V * 4 * math.pi * a * a * np.sqrt(A)
    return {"w": w, "invA": 1.0 / A, "q": potential_q(ric0_norm2_on_ray(triple, x))}


@dataclass(frozen=True)
class Discretization:
    """P1 finite elements on a uniform grid with per-cell Gauss-Legendre quadrature."""

    grid: np.ndarray
    h: np.ndarray
    t: np.ndarray  # reference quadrature nodes in [0, 1]
    wq: np.ndarray  # cell quadrature weights times cell length (cells x nodes)
    w: np.ndarray  # weight at quadrature points
    invA: np.ndarray
    q: np.ndarray

    @property
    def nodes(self) -> int:
        return len(self.grid)

    def interpolate(self, phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Values and derivatives of the P1 function at quadrature points."""
        left, right = phi[:-1, None], phi[1:, None]
        val = left * (1 - self.t) + right * self.t
        der = (right - left) / self.h[:, None]
        return val, der

    def banded(self, diag_density: np.ndarray, grad_density: np.ndarray) -> np.ndarray:
        """Tridiagonal matrix of int (grad_density u'v' + diag_density u v) in banded storage."""
        t = self.t
        b0, b1 = 1 - t, t
        mass00 = np.sum(self.wq * diag_density * b0 * b0, axis=1)
        mass01 = np.sum(self.wq * diag_density * b0 * b1, axis=1)
        mass11 = np.sum(self.wq * diag_density * b1 * b1, axis=1)
        stiff = np.sum(self.wq * grad_density, axis=1) / self.h**2
        n = self.nodes
        ab = np.zeros((3, n))
        ab[1, :-1] += mass00 + stiff
        ab[1, 1:] += mass11 + stiff
        ab[0, 1:] = mass01 - stiff
        ab[2, :-1] = mass01 - stiff
        return ab

    def apply(self, ab: np.ndarray, phi: np.ndarray) -> np.ndarray:
        out = ab[1] * phi
        out[:-1] += ab[0, 1:] * phi[1:]
        out[1:] += ab[2, :-1] * phi[:-1]
        return out

    def quartic(self, phi: np.ndarray) -> float:
        val, _ = self.interpolate(phi)
        return float(np.sum(self.wq * self.w * val**4))

    def cubic_load(self, phi: np.ndarray) -> np.ndarray:
        """Vector int w phi^3 N_i."""
        val, _ = self.interpolate(phi)
        c = self.wq * self.w * val**3
        out = np.zeros(self.nodes)
        out[:-1] += np.sum(c * (1 - self.t), axis=1)
        out[1:] += np.sum(c * self.t, axis=1)
        return out


def discretize(triple: StaticTriple, nodes: int = 256, cell_nodes: int = CELL_NODES) -> Discretization:
    if triple.radial is None:
        raise ValueError(f"{triple.name} is not rotationally symmetric")
    lo, hi = triple.radial.interval
    grid = np.linspace(lo, hi, nodes)
    h = np.diff(grid)
    x, wgl = np.polynomial.legendre.leggauss(cell_nodes)
    t = 0.5 * (x + 1)
    pts = grid[:-1, None] + h[:, None] * t[None, :]
    data = radial_data(triple, pts.ravel())
    shape = pts.shape
    return Discretization(grid, h, t, 0.5 * wgl[None, :] * h[:, None], data["w"].reshape(shape),
                          data["invA"].reshape(shape), data["q"].reshape(shape))


# ----------------------------------------------------------------------------
# quotient


def _quotient_parts(triple: StaticTriple, phi: RadialFunction, cell_nodes: int = CELL_NODES):
    grid = phi.grid
    h = np.diff(grid)
    x, wgl = np.polynomial.legendre.leggauss(cell_nodes)
    t = 0.5 * (x + 1)
    pts = grid[:-1, None] + h[:, None] * t[None, :]
    wq = 0.5 * wgl[None, :] * h[:, None]
    data = radial_data(triple, pts.ravel())
    shape = pts.shape
    w, invA, q = (data[k].reshape(shape) for k in ("w", "invA", "q"))
    val = phi(pts)
    der = phi(pts, 1)
    energy = float(np.sum(wq * w * (invA * der**2 + q * val**2)))
    quartic = float(np.sum(wq * w * val**4))
    return energy, quartic


def modified_quotient(triple: StaticTriple, phi: RadialFunction) -> QuotientValue:
    """W(phi) by weighted radial quadrature (cellwise Gauss-Legendre on phi's grid)."""
    energy, quartic = _quotient_parts(triple, phi)
    if not quartic > 0:
        raise ValueError("phi vanishes identically")
    num = SQRT_2PI * energy
    den = math.sqrt(quartic)
    return QuotientValue(num, den, num / den, len(phi.grid))


# ----------------------------------------------------------------------------
# minimization


def _state(disc: Discretization, S, phi):
    Sphi = disc.apply(S, phi)
    E = float(phi @ Sphi)
    N = disc.quartic(phi)
    F = SQRT_2PI * E / math.sqrt(N)
    r = Sphi - (E / N) * disc.cubic_load(phi)
    grad = 2 * SQRT_2PI / math.sqrt(N) * r
    return F, grad, r, E, N


def el_residual(disc: Discretization, phi: np.ndarray) -> float:
    """Weighted discrete norm of the Euler-Lagrange residual, scale invariant.

    r = S phi - (E/N) B(phi^3) measured in the dual norm of the Sobolev
    preconditioner P, divided by the P-norm of phi.
    """
    S = disc.banded(disc.w * disc.q, disc.w * disc.invA)
    P = disc.banded(disc.w, disc.w * disc.invA)
    _, _, r, _, _ = _state(disc, S, phi)
    Pr = solve_banded((1, 1), P, r)
    return float(math.sqrt(max(r @ Pr, 0.0)) / math.sqrt(phi @ disc.apply(P, phi)))


def minimize_quotient(triple: StaticTriple, nodes: int = 256, phi0=None, tol: float = 1e-8,
                      max_iter: int = 100000) -> dict:
    """Minimize the discrete quotient on the L^4(w) sphere over phi >= 0.

    Preconditioned gradient descent with Barzilai-Borwein steps; the
    preconditioner is the weighted H^1 matrix int (phi'^2/A + phi^2) w.  A
    non-monotone step is retried with a halved step.  Returns lambda_est, the
    minimizer as a linear RadialFunction, iterations, the final normalized
    gradient norm and the Euler-Lagrange residual.
    """
    if nodes < 128:
        raise ValueError("the quotient grid needs at least 128 nodes")
    disc = discretize(triple, nodes)
    S = disc.banded(disc.w * disc.q, disc.w * disc.invA)
    P = disc.banded(disc.w, disc.w * disc.invA)
    phi = np.ones(nodes) if phi0 is None else np.maximum(np.asarray(phi0(disc.grid), dtype=float), 0.0)
    phi = phi / disc.quartic(phi) ** 0.25
    F, g, _, _, _ = _state(disc, S, phi)
    F_start = F

    def gnorm(phi, g, F):
        d = solve_banded((1, 1), P, g)
        return math.sqrt(max(g @ d, 0.0)) * math.sqrt(phi @ disc.apply(P, phi)) / max(1.0, abs(F)), d

    gn, d = gnorm(phi, g, F)
    alpha = 1.0 / max(1.0, abs(F))
    history = [F]
    it = 0
    while gn > tol and it < max_iter:
        it += 1
        step = alpha
        # non-monotone acceptance against the last few values; the slack covers
        # the rounding noise of F, below which a monotone test stalls
        ref = max(history[-10:]) + 1e-11 * max(1.0, abs(F))
        for _ in range(60):
            trial = np.maximum(phi - step * d, 0.0)
            trial = trial / disc.quartic(trial) ** 0.25
            Ft, gt, _, _, _ = _state(disc, S, trial)
            if Ft <= ref:
                break
            step *= 0.5
        history.append(Ft)
        s = trial - phi
        y = gt - g
        sPs = s @ disc.apply(P, s)
        sy = s @ y
        alpha = sPs / sy if sy > 0 else 1.0 / max(1.0, abs(Ft))
        phi, F, g = trial, Ft, gt
        gn, d = gnorm(phi, g, F)
    converged = gn <= tol
    if not converged:
        raise ConvergenceError(f"quotient minimization stopped after {it} iterations (gradient {gn:.3e})", gn)
    return {
        "lambda": F,
        "phi": RadialFunction(disc.grid, phi, "linear"),
        "iterations": it,
        "grad_norm": gn,
        "el_residual": el_residual(disc, phi),
        "start_value": F_start,
        "nodes": nodes,
    }


def refinement_study(triple: StaticTriple, node_list=(128, 256, 512, 1024)) -> dict:
    """lambda_est on successively doubled grids and the successive differences."""
    lams = [minimize_quotient(triple, n)["lambda"] for n in node_list]
    diffs = [abs(b - a) for a, b in zip(lams, lams[1:])]
    return {"nodes": list(node_list), "lambda": lams, "differences": diffs}


# ----------------------------------------------------------------------------
# test functions of the nonpositivity argument


def _ric0_profile(triple: StaticTriple, x):
    """|Ric0|^2 and its xi-derivative on the equatorial ray."""
    geo = Geometry(metric_jet(triple.chart, radial_points(triple, x), 3))
    n2 = geo.norm2(geo.ric0, 2)
    return n2.value, n2.grad().value[..., 0]


def ricci_testfn_decay(triple: StaticTriple, eps_list=(1e-2, 1e-3, 1e-4, 1e-5, 1e-6), tol: float = 1e-10) -> dict:
    """Quantities of the nonpositivity argument for psi = (|Ric0|^2 + eps)^(1/6).

    numerator  N(eps) = int (6 |grad psi|^2 + (12 - 2 sqrt6 |Ric0|) psi^2) V dmu
    bound      B(eps) = 2 int (6 - sqrt6 |Ric0|) phi^(-4/3) (phi^2 - |Ric0|^2) V dmu
    decay      D(eps) = 2 int |6 - sqrt6 |Ric0|| phi^(-4/3) (phi^2 - |Ric0|^2) V dmu
    with phi = (|Ric0|^2 + eps)^(1/2).  The argument gives N <= B <= D and
    D <= C eps^(1/3); the log-log slope of D is reported.
    """
    rp = triple.radial
    probe = np.linspace(*rp.interval, 65)[1:-1]
    if np.max(ric0_norm2_on_ray(triple, probe)) < 1e-20:
        return {"status": "not-applicable", "reason": "traceless Ricci vanishes identically"}
    # split the radial range where 6 - sqrt6 |Ric0| changes sign (a kink of the decay integrand)
    lo, hi = rp.interval
    grid = np.linspace(lo, hi, 257)
    sgn = 6.0 - SQRT6 * np.sqrt(np.maximum(ric0_norm2_on_ray(triple, grid), 0.0))
    cuts = [lo]
    for i in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
        cuts.append(brentq(lambda x: 6.0 - SQRT6 * math.sqrt(max(float(ric0_norm2_on_ray(triple, np.array([x]))[0]), 0.0)),
                           grid[i], grid[i + 1], xtol=1e-14))
    cuts.append(hi)

    def integral(fn):
        return sum(integrate_radial(triple, fn, tol, interval=(a, b))[0] for a, b in zip(cuts, cuts[1:]))

    rows = []
    for eps in eps_list:
        def parts(x, eps=eps):
            n2, dn2 = _ric0_profile(triple, x)
            n2 = np.maximum(n2, 0.0)
            phi2 = n2 + eps
            psi = phi2 ** (1.0 / 6.0)
            dpsi = psi / (6.0 * phi2) * dn2
            A = np.asarray(rp.A(x), dtype=float) * np.ones_like(x)
            V = np.asarray(rp.V(x), dtype=float) * np.ones_like(x)
            nr = np.sqrt(n2)
            num = (6.0 * dpsi**2 / A + (12.0 - 2.0 * SQRT6 * nr) * psi**2) * V
            core = phi2 ** (-2.0 / 3.0) * eps * V
            return num, 2.0 * (6.0 - SQRT6 * nr) * core, 2.0 * np.abs(6.0 - SQRT6 * nr) * core

        N = integral(lambda x: parts(x)[0])
        B = integral(lambda x: parts(x)[1])
        D = integral(lambda x: parts(x)[2])
        rows.append({"eps": eps, "numerator": N, "bound": B, "decay": D})
    eps = np.array([r["eps"] for r in rows])
    D = np.array([r["decay"] for r in rows])
    slope = float(np.polyfit(np.log(eps), np.log(D), 1)[0])
    C = float(np.max(D / eps ** (1.0 / 3.0)))
    ordered = all(r["numerator"] <= r["bound"] * (1 + 1e-9) + 1e-12 and r["bound"] <= r["decay"] + 1e-12 for r in rows)
    bounded = all(r["numerator"] <= C * r["eps"] ** (1.0 / 3.0) + 1e-12 for r in rows)
    return {"status": "ok", "rows": rows, "slope": slope, "C": C, "chain_holds": ordered, "bound_holds": bounded}


# ----------------------------------------------------------------------------
# area ratio scan over the SdS family


def sds_ratio(m: float) -> dict:
    r_h, r_c = sds_horizons(m)
    k1, k2 = sds_gravities(m)
    a1, a2 = 4 * math.pi * r_h**2, 4 * math.pi * r_c**2
    return {"m": m, "r_h": r_h, "r_c": r_c, "k1": k1, "k2": k2, "area1": a1, "area2": a2,
            "ratio": (k1 * a1 + k2 * a2) / (k1 + k2)}


def mass_grid(m_min: float, m_max: float, steps: int, log: bool = False) -> np.ndarray:
    if log:
        return np.geomspace(m_min, m_max, steps)
    return np.linspace(m_min, m_max, steps)


def default_mass_grid(steps: int = 256) -> np.ndarray:
    """Log-spaced grid from 1e-4 M to M(1 - 1e-4), M = 1/(3 sqrt 3), refined at the top."""
    low = np.geomspace(1e-4, 0.5, steps // 2, endpoint=False)
    high = 1.0 - np.geomspace(0.5, 1e-4, steps - steps // 2)
    return M_MAX * np.concatenate([low, high])


def _extrapolate(x: np.ndarray, y: np.ndarray, deg: int = 2) -> float:
    return float(np.polyval(np.polyfit(x, y, deg), 0.0))


def area_ratio_scan(m_grid=None) -> dict:
    """Scan ratio(m) = sum k_i |d_i M| / sum k_i over the SdS family.

    Endpoint limits are extrapolated with quadratic fits: in m at the bottom
    and in t = sqrt(1 - m/M) at the top, where the horizons merge like t.
    """
    m_grid = default_mass_grid() if m_grid is None else np.asarray(m_grid, dtype=float)
    for m in m_grid:
        check_mass(float(m))
    rows = [sds_ratio(float(m)) for m in m_grid]
    ratio = np.array([r["ratio"] for r in rows])
    ms = np.array([r["m"] for r in rows])
    target = 4 * math.pi / 3
    lo = _extrapolate(ms[:6], ratio[:6])
    t = np.sqrt(1.0 - ms[-6:] / M_MAX)
    hi = _extrapolate(t, ratio[-6:])
    return {
        "rows": rows,
        "increasing": bool(np.all(np.diff(ratio) > 0)),
        "below_bound": bool(np.all(ratio < target)),
        "k_ordered": all(r["k1"] > r["k2"] for r in rows),
        "areas_straddle": all(r["area1"] < target < r["area2"] for r in rows),
        "limit_low": lo,
        "limit_high": hi,
        "limit_low_error": abs(lo) / target,
        "limit_high_error": abs(hi - target) / target,
        "bound": target,
    }


CSV_COLUMNS = ("m", "r_h", "r_c", "k1", "k2", "area1", "area2", "ratio")


def scan_csv(rows) -> str:
    """CSV with shortest round-trip float rendering."""
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        lines.append(",".join(repr(float(r[c])) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"
