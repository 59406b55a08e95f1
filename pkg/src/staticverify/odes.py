"""Warped-product profile ODE and the model singular ODE at a cone edge.

The profile equation 2x'' = c/x^2 - 2x (x the potential along the warping
parameter u, y = x') conserves H = y^2 + c/x + x^2.  Orbits starting at a
critical point (y = 0) oscillate about the centre x_c = (c/2)^{1/3}; the
closing formula evaluated at the next turning point never returns 4 pi,
which is the numerical form of the rigidity argument for warped products.

The model equation a'' + a'/s - lam a = F is solved through its integral
form a'(s) = (1/s) int_0^s t (lam a + F) dt by Picard iteration on a graded
mesh, followed by one Richardson step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid, solve_ivp

RTOL = 1e-13
ATOL = 1e-14
BLOWUP_FLOOR = 1e-9


class BlowupError(RuntimeError):
    """The trajectory ran into x = 0."""

    def __init__(self, u: float):
        super().__init__(f"x -> 0 blowup at u = {u:.12g}")
        self.u = u


class NoTurningPointError(RuntimeError):
    """No second critical point of x within the integration window."""


class ContractionError(RuntimeError):
    """Picard iteration on the integral form does not contract; bisect s_max."""


# ----------------------------------------------------------------------------
# profile ODE


@dataclass(frozen=True)
class ProfileState:
    u: float
    x: float
    y: float
    c: float

    @property
    def H(self) -> float:
        return hamiltonian(self.x, self.y, self.c)


def hamiltonian(x, y, c):
    return y * y + c / x + x * x


def centre(c: float) -> float:
    return (c / 2.0) ** (1.0 / 3.0)


def profile_rhs(c: float):
    def rhs(u, z):
        x, y = z
        return np.array([y, 0.5 * (c / (x * x) - 2.0 * x)])

    return rhs


@dataclass
class Trajectory:
    c: float
    x0: float
    y0: float
    u: np.ndarray
    x: np.ndarray
    y: np.ndarray
    u_star: float | None
    x_star: float | None
    stationary: bool = False
    h_drift: float = 0.0
    extra: dict = field(default_factory=dict)

    def states(self):
        return [ProfileState(float(u), float(x), float(y), self.c) for u, x, y in zip(self.u, self.x, self.y)]


def integrate_profile(c: float, x0: float, u_max: float = 50.0, y0: float = 0.0, samples: int = 401) -> Trajectory:
    """Integrate from (x0, y0) to the first return of y to zero.

    DOP853 at tight tolerances; the turning point u* is located by root
    finding on the dense output.  Only y0 = 0 corresponds to the geometric
    setting, other values are exposed for exploration.
    """
    if c <= 0 or x0 <= 0:
        raise ValueError("need c > 0 and x0 > 0")
    xc = centre(c)
    H0 = hamiltonian(x0, y0, c)
    if y0 == 0.0 and abs(x0 - xc) <= 1e-14 * xc:
        u = np.linspace(0.0, u_max, samples)
        return Trajectory(c, x0, y0, u, np.full_like(u, x0), np.zeros_like(u), None, None, stationary=True)

    rhs = profile_rhs(c)
    accel0 = 0.5 * (c / x0**2 - 2.0 * x0)
    # y leaves zero with the sign of y'(0) and returns through zero the other way
    lead = y0 if y0 != 0.0 else accel0

    def turn(u, z):
        return z[1]

    turn.terminal = True
    turn.direction = -1.0 if lead > 0 else 1.0

    def floor(u, z):
        return z[0] - BLOWUP_FLOOR

    floor.terminal = True
    floor.direction = -1.0

    sol = solve_ivp(rhs, (0.0, u_max), [x0, y0], method="DOP853", rtol=RTOL, atol=ATOL,
                    events=(turn, floor), dense_output=True)
    if sol.t_events[1].size:
        raise BlowupError(float(sol.t_events[1][0]))
    if not sol.t_events[0].size:
        raise NoTurningPointError(f"no turning point for c={c}, x0={x0} within u_max={u_max}")
    u_star = float(sol.t_events[0][0])
    x_star = float(sol.y_events[0][0][0])
    u = np.linspace(0.0, u_star, samples)
    z = sol.sol(u)
    drift = float(np.max(np.abs(hamiltonian(z[0], z[1], c) - H0)))
    drift = max(drift, abs(hamiltonian(x_star, 0.0, c) - H0))
    return Trajectory(c, x0, y0, u, z[0], z[1], u_star, x_star, h_drift=drift,
                      extra={"nfev": int(sol.nfev), "H0": H0})


def closing_gap(c: float, x0: float, u_max: float = 50.0) -> dict:
    """Evaluate the closing formula (2 pi / x''(0)) [x - c/(2x^2)] from 0 to u*.

    x''(0) comes from the ODE itself.  The gap to 4 pi and the defect
    2x(u*)^3 - c are both strictly positive away from the centre.
    """
    tr = integrate_profile(c, x0, u_max)
    if tr.stationary:
        raise NoTurningPointError("stationary orbit has no turning point")
    ddx0 = 0.5 * (c / x0**2 - 2.0 * x0)
    prim = lambda x: x - c / (2.0 * x * x)
    gb = 2.0 * math.pi / ddx0 * (prim(tr.x_star) - prim(x0))
    return {
        "c": c,
        "x0": x0,
        "u_star": tr.u_star,
        "x_star": tr.x_star,
        "gb_value": gb,
        "gap": abs(gb - 4.0 * math.pi),
        "defect": 2.0 * tr.x_star**3 - c,
        "h_drift": tr.h_drift,
        "h_drift_rel": tr.h_drift / abs(tr.extra["H0"]),
    }


def rk4_drift(c: float, x0: float, u_end: float, steps: int) -> float:
    """Max |H - H(0)| along a fixed-step classical RK4 run on [0, u_end]."""
    rhs = profile_rhs(c)
    h = u_end / steps
    z = np.array([x0, 0.0])
    H0 = hamiltonian(x0, 0.0, c)
    worst = 0.0
    for i in range(steps):
        u = i * h
        k1 = rhs(u, z)
        k2 = rhs(u + h / 2, z + h / 2 * k1)
        k3 = rhs(u + h / 2, z + h / 2 * k2)
        k4 = rhs(u + h, z + h * k3)
        z = z + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        worst = max(worst, abs(hamiltonian(z[0], z[1], c) - H0))
    return worst


def rk4_order(c: float, x0: float, steps=(50, 100, 200, 400)) -> dict:
    """Observed order of H drift under step halving, fitted in log-log."""
    tr = integrate_profile(c, x0)
    drifts = np.array([rk4_drift(c, x0, tr.u_star, n) for n in steps])
    h = tr.u_star / np.asarray(steps, dtype=float)
    slope = float(np.polyfit(np.log(h), np.log(drifts), 1)[0])
    return {"steps": list(steps), "drifts": drifts.tolist(), "slope": slope}


def time_reversal(c: float, x0: float) -> float:
    """|x(0) - x0| after integrating back from (x(u*), 0) over [u*, 0]."""
    tr = integrate_profile(c, x0)
    sol = solve_ivp(profile_rhs(c), (tr.u_star, 0.0), [tr.x_star, 0.0], method="DOP853", rtol=RTOL, atol=ATOL)
    return abs(float(sol.y[0, -1]) - x0)


def phase_portrait(c: float, x0_values, u_max: float = 50.0, samples: int = 201) -> list[dict]:
    """Rows (x0, u, x, y, H) for CSV export."""
    rows = []
    for x0 in x0_values:
        tr = integrate_profile(c, float(x0), u_max, samples=samples)
        for u, x, y in zip(tr.u, tr.x, tr.y):
            rows.append({"c": c, "x0": float(x0), "u": float(u), "x": float(x), "y": float(y),
                         "H": float(hamiltonian(x, y, c))})
    return rows


# ----------------------------------------------------------------------------
# model singular ODE


@dataclass
class SingularSolution:
    s: np.ndarray
    alpha: np.ndarray
    dalpha: np.ndarray
    lam: float
    alpha0: float
    iterations: int
    sup_change: float
    ddalpha0: float
    ddalpha0_expected: float
    dalpha_over_s: float

    def __call__(self, s):
        return np.interp(s, self.s, self.alpha)


def _graded_mesh(s_max: float, J: int) -> np.ndarray:
    return s_max * (np.arange(J + 1) / J) ** 2


def _picard(lam: float, Fs: np.ndarray, s: np.ndarray, alpha0: float, tol: float, max_iter: int):
    alpha = np.full_like(s, alpha0)
    change = math.inf
    prev = math.inf
    for it in range(1, max_iter + 1):
        G = cumulative_trapezoid(s * (lam * alpha + Fs), s, initial=0.0)
        d = np.zeros_like(s)
        d[1:] = G[1:] / s[1:]
        new = alpha0 + cumulative_trapezoid(d, s, initial=0.0)
        change = float(np.max(np.abs(new - alpha)))
        alpha = new
        if change < tol:
            return alpha, d, it, change
        if it > 3 and change > prev:
            raise ContractionError(f"Picard iteration not contracting on [0, {s[-1]}]; bisect the interval")
        prev = change
    raise ContractionError(f"Picard iteration did not reach {tol} in {max_iter} sweeps")


def singular_model_solve(lam: float, F: Callable, s_max: float, alpha0: float, J: int = 1024,
                         tol: float = 1e-13, max_iter: int = 500) -> SingularSolution:
    """Solve a'' + a'/s - lam a = F with a(0) = alpha0, a'(0) = 0 on [0, s_max].

    Trapezoid rule on the graded mesh s_j = s_max (j/J)^2 for J and 2J,
    combined by Richardson on the coarse nodes.
    """
    if s_max <= 0:
        raise ValueError("s_max must be positive")
    # Picard contracts with rate about |lam| s_max^2 / 4
    if abs(lam) * s_max**2 / 4.0 >= 0.9:
        raise ContractionError(f"lam s_max^2/4 = {abs(lam) * s_max**2 / 4:.3g} too large; bisect the interval")
    out = []
    for n in (J, 2 * J):
        s = _graded_mesh(s_max, n)
        Fs = np.broadcast_to(np.asarray(F(s), dtype=float), s.shape).copy()
        out.append((s,) + _picard(lam, Fs, s, alpha0, tol, max_iter))
    (s1, a1, d1, it1, ch1), (s2, a2, d2, it2, ch2) = out
    alpha = (4.0 * a2[::2] - a1) / 3.0
    dalpha = (4.0 * d2[::2] - d1) / 3.0
    F0 = float(np.asarray(F(np.array([0.0])), dtype=float).ravel()[0])
    # a'(s)/s -> a''(0); fit a quadratic on the first nodes and take its value at 0
    k = slice(1, 9)
    ratio = dalpha[k] / s1[k]
    dd0 = float(np.polyval(np.polyfit(s1[k], ratio, 2), 0.0))
    near = s1 <= 0.1 * s_max
    near[0] = False
    return SingularSolution(
        s=s1, alpha=alpha, dalpha=dalpha, lam=lam, alpha0=alpha0, iterations=max(it1, it2),
        sup_change=max(ch1, ch2), ddalpha0=dd0, ddalpha0_expected=0.5 * (lam * alpha0 + F0),
        dalpha_over_s=float(np.max(np.abs(dalpha[near] / s1[near]))) if near.any() else 0.0,
    )


def model_residual(sol: SingularSolution, F: Callable, delta: float = 0.05, stencil: int = 7,
                   stride: int = 4) -> float:
    """Max |a'' + a'/s - lam a - F| on (delta, s_max) from local polynomial fits of the solution.

    The fit uses every `stride`-th node so that rounding in the second difference stays small.
    """
    s, a = sol.s, sol.alpha
    worst = 0.0
    half = stencil // 2
    span = stride * (stencil - 1)
    for i in np.nonzero((s > delta) & (s < s[-1]))[0][::4]:
        lo = min(max(i - half * stride, 0), len(s) - 1 - span)
        idx = np.arange(lo, lo + span + 1, stride)
        h = s[idx[-1]] - s[idx[0]]
        x = (s[idx] - s[i]) / h
        p = np.polyfit(x, a[idx] - a[i], stencil - 1)
        d1 = np.polyval(np.polyder(p, 1), 0.0) / h
        d2 = np.polyval(np.polyder(p, 2), 0.0) / h**2
        Fi = float(np.asarray(F(np.array([s[i]])), dtype=float).ravel()[0])
        worst = max(worst, abs(d2 + d1 / s[i] - sol.lam * a[i] - Fi))
    return worst


def bessel_i0_series(z, terms: int = 60):
    """I_0(z) = sum_k (z^2/4)^k / (k!)^2."""
    z = np.asarray(z, dtype=float)
    q = z * z / 4.0
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(1, terms):
        term = term * q / (k * k)
        total = total + term
    return total
