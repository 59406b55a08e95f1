"""Chart-based tensor calculus in dimensions 2 to 4.

Index conventions used everywhere in the package:

* ``gamma[k, i, j]`` is the Christoffel symbol of the second kind.
* ``R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb}``
  and ``Rm_{abcd} = g_{ae} R^e_{bcd}``, so ``Rm_{abab}`` is the sectional curvature
  of the plane spanned by the first two slots.
* ``Ric_{bd} = R^a_{bad}``.
* Covariant derivatives append the derivative index last: ``DT[i, j, k] = T_{ij;k}``.
* Kulkarni-Nomizu: ``(A*B)_{ijkl} = A_ik B_jl - A_il B_jk - A_jk B_il + A_jl B_ik``.

Derivatives come from Taylor jets of the metric.  On the analytic path the
chart formulas are evaluated on coordinate jets; on the finite-difference
path the same jets are filled from Richardson-extrapolated central
difference stencils.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from . import jets as J
from .jets import Jet, jeinsum

EPS = np.finfo(float).eps

# Weyl operator norm convention: |W|^2 (all components) = 4 (|W+|^2 + |W-|^2)
WEYL_NORM_CONVENTION = "operator on orthonormal 2-forms e_a^e_b (a<b) with entries W_abcd; |W|^2 = 4(|W+|^2 + |W-|^2)"


class DomainError(ValueError):
    """Point outside the chart domain or a stencil leaving it."""


class MetricError(ValueError):
    """Metric not symmetric positive definite."""


class DimensionError(ValueError):
    """Operation called on a chart of the wrong dimension."""


@dataclass(frozen=True)
class Chart:
    """A coordinate box with a metric given by component formulas.

    ``metric(x)`` receives a sequence of coordinates (floats, arrays or jets)
    and returns the matrix as nested rows.  When ``analytic`` is true the
    formula must only use arithmetic and the functions in :mod:`staticverify.jets`,
    which lets the engine differentiate it exactly.
    """

    dim: int
    coordinate_names: tuple
    domain: tuple
    metric: Callable
    metric_derivs: Callable | None = None
    orientation: int = 1
    scale: float = 1.0
    analytic: bool = True
    sample_box: tuple | None = None
    name: str = "chart"

    def __post_init__(self):
        if not 2 <= self.dim <= 4:
            raise DimensionError(f"chart dimension must be 2, 3 or 4, got {self.dim}")
        if len(self.domain) != self.dim or len(self.coordinate_names) != self.dim:
            raise DimensionError("domain and coordinate names must match the dimension")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    def g(self, p) -> np.ndarray:
        """Metric components at a point or a batch of points."""
        p = np.asarray(p, dtype=float)
        rows = self.metric([p[..., i] for i in range(self.dim)])
        return np.array(_as_tensor(rows, p.shape[:-1], (self.dim, self.dim)))

    def box(self) -> np.ndarray:
        if self.sample_box is not None:
            return np.asarray(self.sample_box, dtype=float)
        d = np.asarray(self.domain, dtype=float)
        width = d[:, 1] - d[:, 0]
        return np.stack([d[:, 0] + 0.02 * width, d[:, 1] - 0.02 * width], axis=1)


@dataclass(frozen=True)
class TensorValue:
    """Dense components of a tensor at one or more points.

    ``valence`` is (covariant rank, contravariant rank).  ``symmetries`` lists
    (axis_a, axis_b, sign) pairs checked on construction.
    """

    valence: tuple
    components: np.ndarray
    frame: str = "coordinate"
    symmetries: tuple = field(default=())

    def __post_init__(self):
        c = self.components
        scale = max(float(np.max(np.abs(c))) if c.size else 0.0, 1.0)
        for a, b, sign in self.symmetries:
            gap = np.max(np.abs(c - sign * np.swapaxes(c, a, b))) if c.size else 0.0
            if gap > 1e-12 * scale * 1e2:
                raise ValueError(f"declared symmetry ({a},{b},{sign:+d}) violated by {gap:.3e}")

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.components, dtype=dtype)


# ----------------------------------------------------------------------------
# jets of chart functions

FD_RICHARDSON = True


def fd_steps(scale: float, degree: int) -> dict:
    """Step for each derivative order of the Richardson-extrapolated stencils.

    The stencils are fourth-order accurate and one Richardson level lifts them
    to sixth order, so the step balancing truncation against roundoff for a
    k-th derivative is about eps**(1/(k+6)).
    """
    return {k: scale * EPS ** (1.0 / (k + 6)) for k in range(1, degree + 1)}


def fd_reach(scale: float, degree: int) -> float:
    """Largest distance from the base point probed by the FD jet stencils."""
    return 3.0 * fd_steps(scale, degree)[degree] if degree > 0 else 0.0


# fourth-order central stencils on offsets -3..3
_STENCIL = {
    0: np.array([0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]),
    1: np.array([0.0, 1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12, 0.0]),
    2: np.array([0.0, -1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12, 0.0]),
    3: np.array([1 / 8, -1.0, 13 / 8, 0.0, -13 / 8, 1.0, -1 / 8]),
    4: np.array([-1 / 6, 2.0, -13 / 2, 28 / 3, -13 / 2, 2.0, -1 / 6]),
}
_HALF = 3


def fd_jet(fn: Callable, points, degree: int, scale: float, richardson: bool = FD_RICHARDSON, steps: dict | None = None) -> Jet:
    """Taylor jet of ``fn`` estimated from central differences.

    ``fn`` maps an array of points ``(..., dim)`` to an array ``(..., *shape)``.
    Mixed partials use tensor products of the one-dimensional stencils.
    """
    if degree > 4:
        raise ValueError("finite-difference jets are available up to degree 4")
    points = np.asarray(points, dtype=float)
    dim = points.shape[-1]
    b = J.basis(dim, degree)
    f0 = np.asarray(fn(points), dtype=float)
    coeffs = np.zeros(f0.shape + (b.size,))
    coeffs[..., 0] = f0
    steps = steps or fd_steps(scale, degree)

    def grid_values(h, order):
        # first and second derivative stencils only reach two points out
        half = 2 if order <= 2 else _HALF
        axis = np.arange(-half, half + 1)
        offsets = np.array(np.meshgrid(*[axis] * dim, indexing="ij")).reshape(dim, -1).T
        pts = points[..., None, :] + h * offsets
        vals = np.asarray(fn(pts), dtype=float)
        nb = points.ndim - 1
        vals = np.moveaxis(vals, nb, -1)
        return vals.reshape(vals.shape[:-1] + (2 * half + 1,) * dim), half

    for k in range(1, degree + 1):
        alphas = [i for i in range(b.size) if b.total[i] == k]
        hs = [steps[k], steps[k] / 2] if richardson else [steps[k]]
        ests = []
        for h in hs:
            grid, half = grid_values(h, k)
            cut = slice(_HALF - half, _HALF + half + 1)
            est = []
            for i in alphas:
                w = np.ones(())
                for v in range(dim):
                    w = np.multiply.outer(w, _STENCIL[b.exps[i][v]][cut])
                d = np.tensordot(grid, w, axes=dim) / h**k
                est.append(d / b.factorial[i])
            ests.append(np.stack(est, axis=-1))
        val = (16.0 * ests[1] - ests[0]) / 15.0 if richardson else ests[0]
        coeffs[..., alphas] = val
    return Jet(coeffs, b)


def _as_tensor(out, batch: tuple, tshape):
    """Normalize a chart formula result to an array or jet of shape batch + tshape."""
    if isinstance(out, (list, tuple)):
        out = J.matrix(out) if isinstance(out[0], (list, tuple)) else J.stack(list(out), axis=-1)
    shape = out.shape if isinstance(out, Jet) else np.shape(out)
    if tshape is None:
        tshape = shape[len(batch):] if shape[: len(batch)] == batch else shape
    target = tuple(batch) + tuple(tshape)
    if isinstance(out, Jet):
        if out.shape != target:
            out = Jet(np.broadcast_to(out.c, target + (out.c.shape[-1],)), out.basis, out.order)
        return out
    return np.broadcast_to(np.asarray(out, dtype=float), target)


def function_jet(fn: Callable, points, degree: int, path: str = "analytic", scale: float = 1.0, tshape=None) -> Jet:
    """Jet of a chart function ``fn(x)`` (x a sequence of coordinates)."""
    points = np.asarray(points, dtype=float)
    dim = points.shape[-1]
    batch = points.shape[:-1]
    if path == "analytic":
        out = _as_tensor(fn(J.variables(points, degree)), batch, tshape)
        if not isinstance(out, Jet):
            out = J.constant(out, J.basis(dim, degree))
        return out
    if path == "fd":

        def arr(x):
            return np.asarray(_as_tensor(fn([x[..., i] for i in range(dim)]), x.shape[:-1], tshape))

        if tshape is None:
            tshape = np.shape(arr(points))[len(batch):]
        return fd_jet(arr, points, degree, scale)
    raise ValueError(f"unknown derivative path {path!r}")


def metric_jet(chart: Chart, points, degree: int = 2, path: str = "analytic") -> Jet:
    if path == "analytic" and not chart.analytic:
        path = "fd"
    return function_jet(chart.metric, points, degree, path, chart.scale, (chart.dim, chart.dim))


def points_shape(points):
    return np.asarray(points).shape[:-1]


def check_points(chart: Chart, points, reach: float = 0.0) -> np.ndarray:
    """Validate that every point lies inside the domain with room for a stencil."""
    p = np.atleast_2d(np.asarray(points, dtype=float))
    if p.shape[-1] != chart.dim:
        raise DimensionError(f"points must have {chart.dim} coordinates")
    d = np.asarray(chart.domain, dtype=float)
    lo = p - d[:, 0]
    hi = d[:, 1] - p
    margin = np.minimum(lo, hi).min(axis=-1)
    if np.any(~np.isfinite(p)) or np.any(margin <= reach):
        bad = int(np.argmin(margin))
        raise DomainError(f"point {p[bad].tolist()} is outside the domain or within {reach:.3g} of a face")
    return p


def sample_points(chart: Chart, n: int, seed: int = 0, box=None, margin: float = 0.0) -> np.ndarray:
    """Uniform random points in the chart's sampling box.

    ``margin`` keeps the points at least that far (times 1.05) from every face,
    as finite-difference stencils require.
    """
    rng = np.random.default_rng(seed)
    b = np.array(chart.box() if box is None else box, dtype=float)
    d = np.asarray(chart.domain, dtype=float)
    b[:, 0] = np.maximum(b[:, 0], d[:, 0] + 1.05 * margin)
    b[:, 1] = np.minimum(b[:, 1], d[:, 1] - 1.05 * margin)
    u = rng.random((n, chart.dim))
    return b[:, 0] + u * (b[:, 1] - b[:, 0])


# ----------------------------------------------------------------------------
# tensor algebra helpers (plain arrays, batched over leading axes)

_LETTERS = "abcdefgh"


def kulkarni_nomizu(A, B):
    """Kulkarni-Nomizu product of two symmetric 2-tensors."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape or A.shape[-1] != A.shape[-2]:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    e = np.einsum
    return (
        e("...ik,...jl->...ijkl", A, B)
        - e("...il,...jk->...ijkl", A, B)
        - e("...jk,...il->...ijkl", A, B)
        + e("...jl,...ik->...ijkl", A, B)
    )


def kn_jet(A, B):
    """Kulkarni-Nomizu product for jets or arrays."""
    if not isinstance(A, Jet) and not isinstance(B, Jet):
        return kulkarni_nomizu(A, B)
    return (
        jeinsum("...ik,...jl->...ijkl", A, B)
        - jeinsum("...il,...jk->...ijkl", A, B)
        - jeinsum("...jk,...il->...ijkl", A, B)
        + jeinsum("...jl,...ik->...ijkl", A, B)
    )


def raise_all(T, ginv, rank: int):
    """Raise every index of a covariant tensor (jet or array)."""
    out = T
    for s in range(rank):
        src = _LETTERS[:rank]
        dst = src[:s] + "z" + src[s + 1 :]
        out = jeinsum(f"...z{src[s]},...{src}->...{dst}", ginv, out)
    return out


def inner(A, B, ginv, rank: int):
    """Metric inner product of two covariant tensors of equal rank."""
    up = raise_all(A, ginv, rank)
    idx = _LETTERS[:rank]
    return jeinsum(f"...{idx},...{idx}->...", up, B)


def orthonormal_frame(g: np.ndarray) -> np.ndarray:
    """Gram-Schmidt frame on coordinate vectors in order; columns are e_a.

    Equivalent to ``E = L^{-T}`` for the Cholesky factor ``g = L L^T``, so
    ``E`` is upper triangular and ``e_1`` is along the first coordinate.
    """
    try:
        L = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise MetricError("metric is not positive definite") from exc
    return np.swapaxes(np.linalg.inv(L), -1, -2)


def to_frame(T: np.ndarray, E: np.ndarray, rank: int) -> np.ndarray:
    """Components of a covariant tensor in the frame with columns ``E``."""
    out = T
    for s in range(rank):
        src = _LETTERS[:rank]
        dst = src[:s] + "z" + src[s + 1 :]
        out = np.einsum(f"...{src[s]}z,...{src}->...{dst}", E, out)
    return out


# ----------------------------------------------------------------------------
# local geometry


class Geometry:
    """Curvature quantities derived from a metric jet at a batch of points.

    Optionally carries a potential jet ``V`` for the static-triple formulas.
    Every quantity is a lazily computed jet; ``.value`` gives the numbers.
    """

    def __init__(self, g: Jet, V: Jet | None = None):
        self.gj = g
        self.Vj = V
        self.dim = g.shape[-1]
        gv = g.value
        if np.max(np.abs(gv - np.swapaxes(gv, -1, -2))) > 1e-12 * max(1.0, np.max(np.abs(gv))):
            raise MetricError("metric is not symmetric")
        if np.any(np.linalg.eigvalsh(gv)[..., 0] <= 0):
            raise MetricError("metric is not positive definite")

    @property
    def g(self) -> np.ndarray:
        return self.gj.value

    @cached_property
    def ginv_jet(self) -> Jet:
        return J.inv(self.gj)

    @property
    def ginv(self) -> np.ndarray:
        return self.ginv_jet.value

    @cached_property
    def gamma(self) -> Jet:
        dg = self.gj.grad()  # dg[i, j, k] = d_k g_ij
        T = jeinsum("...kji->...kij", dg) + jeinsum("...kij->...kij", dg) - jeinsum("...ijk->...kij", dg)
        return jeinsum("...lk,...kij->...lij", self.ginv_jet, T) * 0.5

    @cached_property
    def riemann_up(self) -> Jet:
        G = self.gamma
        dG = G.grad()  # dG[a, i, j, k] = d_k G^a_ij
        return (
            jeinsum("...adbc->...abcd", dG)
            - jeinsum("...acbd->...abcd", dG)
            + jeinsum("...ace,...edb->...abcd", G, G)
            - jeinsum("...ade,...ecb->...abcd", G, G)
        )

    @cached_property
    def rm(self) -> Jet:
        return jeinsum("...ae,...ebcd->...abcd", self.gj, self.riemann_up)

    @cached_property
    def ric(self) -> Jet:
        R = self.riemann_up
        return jeinsum("...abad->...bd", R)

    @cached_property
    def scalar(self) -> Jet:
        return jeinsum("...ij,...ij->...", self.ginv_jet, self.ric)

    @cached_property
    def ric0(self) -> Jet:
        return self.ric - self.gj * (self.scalar * (1.0 / self.dim))[..., None, None]

    def cov(self, T: Jet) -> Jet:
        """Covariant derivative of a covariant tensor jet (index appended last)."""
        rank = T.ndim - self.gj.ndim + 2
        out = T.grad()
        src = _LETTERS[:rank]
        for s in range(rank):
            t = src[:s] + "m" + src[s + 1 :]
            out = out - jeinsum(f"...mk{src[s]},...{t}->...{src}k", self.gamma, T)
        return out

    def norm2(self, T, rank: int):
        return inner(T, T, self.ginv_jet if isinstance(T, Jet) else self.ginv, rank)

    def raise_index(self, w):
        return jeinsum("...ij,...j->...i", self.ginv_jet, w)

    def div(self, Y: Jet) -> Jet:
        """Divergence of a vector field jet."""
        dY = Y.grad()
        return jeinsum("...ii->...", dY) + jeinsum("...iik,...k->...", self.gamma, Y)

    def hess(self, f: Jet) -> Jet:
        return self.cov(f.grad())

    def laplacian(self, f: Jet) -> Jet:
        return jeinsum("...ij,...ij->...", self.ginv_jet, self.hess(f))

    @cached_property
    def cotton(self) -> Jet:
        if self.dim != 3:
            raise DimensionError("the Cotton tensor is defined here for dimension 3")
        DRic = self.cov(self.ric)
        dR = self.scalar.grad()
        g = self.gj
        C = DRic - jeinsum("...ikj->...ijk", DRic)
        corr = jeinsum("...ij,...k->...ijk", g, dR) - jeinsum("...ik,...j->...ijk", g, dR)
        return C - corr * 0.25

    def weyl(self) -> np.ndarray:
        """Weyl tensor components (covariant, coordinate frame), dimension 4."""
        if self.dim != 4:
            raise DimensionError("weyl is implemented for dimension 4")
        g = self.g
        S = self.ric.value - (self.scalar.value / 6.0)[..., None, None] * g
        return self.rm.value - 0.5 * kulkarni_nomizu(S, g)


# ----------------------------------------------------------------------------
# public operations


def geometry(chart: Chart, p, degree: int = 2, path: str = "analytic") -> Geometry:
    reach = fd_reach(chart.scale, degree) if (path == "fd" or not chart.analytic) else 0.0
    pts = check_points(chart, p, reach)
    return Geometry(metric_jet(chart, pts, degree, path))


def _squeeze(p, arr):
    return arr[0] if np.asarray(p).ndim == 1 else arr


def christoffel(chart: Chart, p, path: str = "analytic") -> TensorValue:
    """Christoffel symbols ``G[k, i, j]`` at ``p`` (a point or a batch)."""
    geo = geometry(chart, p, 1, path)
    return TensorValue((2, 1), _squeeze(p, geo.gamma.value), symmetries=((-2, -1, 1),))


def curvature_pack(chart: Chart, p, path: str = "analytic"):
    """(Rm, Ric, R, traceless Ric) at ``p``."""
    geo = geometry(chart, p, 2, path)
    rm = TensorValue((4, 0), _squeeze(p, geo.rm.value), symmetries=((-4, -3, -1), (-2, -1, -1)))
    ric = TensorValue((2, 0), _squeeze(p, geo.ric.value), symmetries=((-2, -1, 1),))
    ric0 = TensorValue((2, 0), _squeeze(p, geo.ric0.value), symmetries=((-2, -1, 1),))
    return rm, ric, _squeeze(p, geo.scalar.value), ric0


def covariant_derivative(chart: Chart, field: Callable, p, path: str = "analytic") -> TensorValue:
    """Covariant derivative of a covariant tensor field given as a chart formula.

    ``field(x)`` returns a scalar, a list (1-form) or nested rows (2-tensor).
    """
    reach = fd_reach(chart.scale, 2) if path == "fd" else 0.0
    pts = check_points(chart, p, reach)
    degree = 2 if path == "fd" else 1
    geo = Geometry(metric_jet(chart, pts, max(degree, 1), path))
    T = function_jet(field, pts, degree, path, chart.scale)
    if T.ndim == 1:
        D = T.grad()
    else:
        D = geo.cov(T)
    rank = D.ndim - 1
    return TensorValue((rank, 0), _squeeze(p, D.value))


def cotton(chart: Chart, p, path: str = "analytic") -> TensorValue:
    if chart.dim != 3:
        raise DimensionError("cotton requires a 3-dimensional chart")
    geo = geometry(chart, p, 3, path)
    return TensorValue((3, 0), _squeeze(p, geo.cotton.value), symmetries=((-2, -1, -1),))


def selfdual_basis(orientation: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal bases of self-dual and anti-self-dual 2-forms (3 x 4 x 4 each)."""
    def form(pairs):
        w = np.zeros((4, 4))
        for (a, b), s in pairs:
            w[a, b] += s / math.sqrt(2.0)
            w[b, a] -= s / math.sqrt(2.0)
        return w

    plus = np.array([
        form([((0, 1), 1), ((2, 3), 1)]),
        form([((0, 2), 1), ((3, 1), 1)]),
        form([((0, 3), 1), ((1, 2), 1)]),
    ])
    minus = np.array([
        form([((0, 1), 1), ((2, 3), -1)]),
        form([((0, 2), 1), ((3, 1), -1)]),
        form([((0, 3), 1), ((1, 2), -1)]),
    ])
    return (plus, minus) if orientation == 1 else (minus, plus)


def weyl_blocks(W_frame: np.ndarray, orientation: int = 1):
    """Restrict the Weyl operator on 2-forms to its self-dual and anti-self-dual parts.

    The 2-form operator has entries ``W_abcd`` in the basis e_a^e_b (a<b); for
    a 2-form written as an antisymmetric matrix ``w`` this is
    ``(W w)_ab = 1/2 W_abcd w_cd`` and the pairing is ``1/2 w_ab u_ab``.
    """
    plus, minus = selfdual_basis(orientation)

    def block(basis):
        return 0.25 * np.einsum("iab,...abcd,jcd->...ij", basis, W_frame, basis)

    return block(plus), block(minus)


def weyl_selfdual(chart: Chart, p, path: str = "analytic"):
    """(W+, W-) as 3x3 matrices in an orthonormal Gram-Schmidt frame."""
    if chart.dim != 4:
        raise DimensionError("weyl_selfdual requires a 4-dimensional chart")
    geo = geometry(chart, p, 2, path)
    E = orthonormal_frame(geo.g)
    if np.any(np.abs(np.linalg.det(E)) > 1e12):
        raise MetricError("degenerate orthonormal frame")
    Wf = to_frame(geo.weyl(), E, 4)
    wp, wm = weyl_blocks(Wf, chart.orientation)
    return _squeeze(p, wp), _squeeze(p, wm)


def central_difference(fn: Callable, p, h: float) -> np.ndarray:
    """Plain second-order central-difference gradient of ``fn`` at ``p``."""
    p = np.asarray(p, dtype=float)
    dim = p.shape[-1]
    out = []
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = h
        out.append((np.asarray(fn(p + e)) - np.asarray(fn(p - e))) / (2 * h))
    return np.stack(out, axis=-1)


def euclidean_chart(dim: int = 3) -> Chart:
    def metric(x):
        return [[1.0 if i == j else 0.0 for j in range(dim)] for i in range(dim)]

    return Chart(dim, tuple(f"x{i}" for i in range(dim)), ((-1.0, 1.0),) * dim, metric, name="euclidean")


def round_sphere_chart(dim: int = 3, radius: float = 1.0) -> Chart:
    """Geodesic polar coordinates on the round sphere of the given radius."""
    names = ("s",) + ("theta", "phi", "psi")[: dim - 1]

    def metric(x):
        rows = [[0.0] * dim for _ in range(dim)]
        rows[0][0] = radius**2 + 0.0 * x[0]
        w = radius**2 * J.sin(x[0]) ** 2
        for i in range(1, dim):
            rows[i][i] = w
            w = w * J.sin(x[i]) ** 2
        return rows

    domain = ((0.0, math.pi),) + ((0.0, math.pi),) * (dim - 2) + ((-math.pi, math.pi),)
    box = ((0.1, math.pi - 0.1),) + ((0.1, math.pi - 0.1),) * (dim - 2) + ((-3.0, 3.0),)
    return Chart(dim, names, domain, metric, sample_box=box, name=f"S{dim}")


def flat_torus_chart(dim: int = 3) -> Chart:
    def metric(x):
        return [[(1.0 + 0.5 * i) if i == j else 0.0 for j in range(dim)] for i in range(dim)]

    return Chart(dim, tuple(f"x{i}" for i in range(dim)), ((0.0, 2 * math.pi),) * dim, metric, name="torus")
