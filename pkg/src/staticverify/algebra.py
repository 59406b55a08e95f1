"""Pointwise algebraic inequalities: the cubic determinant bound and a Kato-type bound.

A constrained jet is a pair (T, DT) with T a symmetric 3x3 matrix and
DT[i, j, k] = T_{ij;k} symmetric in (i, j), subject to constant trace
(sum_i T_{ii;k} = 0) and zero divergence (sum_i T_{ik;i} = 0).  These are six
linear conditions on the eighteen independent entries of DT, leaving a
twelve-dimensional space that the sampler reaches by orthogonal projection.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

KATO_CONSTANT = 3.0 / 5.0


class DegenerateError(ValueError):
    """Input violates the nondegeneracy hypothesis of an inequality."""


# ----------------------------------------------------------------------------
# determinant inequality


def det_cubic_inequality(A, eq_tol: float = 1e-8):
    """54 det(A)^2 <= |A|^6 for traceless symmetric A.

    Returns (lhs, rhs, equality_flag); the flag is set when two eigenvalues
    coincide to ``eq_tol * |A|``, which is exactly the equality case.
    """
    A = np.asarray(A, dtype=float)
    if A.shape[-2:] != (3, 3):
        raise ValueError("expected 3x3 matrices")
    norm2 = np.einsum("...ij,...ij->...", A, A)
    norm = np.sqrt(norm2)
    tr = np.trace(A, axis1=-2, axis2=-1)
    if np.any(np.abs(tr) > 1e-12 * np.maximum(norm, 1e-300)):
        raise ValueError("matrix is not traceless")
    # explicit products rather than pow keep power-of-two scaling exact
    d = det3(A)
    lhs = 54.0 * (d * d)
    rhs = norm2 * norm2 * norm2
    lam = np.linalg.eigvalsh(0.5 * (A + np.swapaxes(A, -1, -2)))
    gap = np.min(np.diff(lam, axis=-1), axis=-1)
    flag = gap <= eq_tol * norm
    if lhs.ndim == 0:
        return float(lhs), float(rhs), bool(flag)
    return lhs, rhs, flag


def det3(A) -> np.ndarray:
    """Cofactor expansion of a 3x3 determinant; exactly homogeneous under power-of-two scaling."""
    A = np.asarray(A, dtype=float)
    return (A[..., 0, 0] * (A[..., 1, 1] * A[..., 2, 2] - A[..., 1, 2] * A[..., 2, 1])
            - A[..., 0, 1] * (A[..., 1, 0] * A[..., 2, 2] - A[..., 1, 2] * A[..., 2, 0])
            + A[..., 0, 2] * (A[..., 1, 0] * A[..., 2, 1] - A[..., 1, 1] * A[..., 2, 0]))


def random_traceless(n: int, seed: int = 0) -> np.ndarray:
    """n traceless symmetric matrices from symmetrized Gaussian entries."""
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, 3, 3))
    S = 0.5 * (G + np.swapaxes(G, -1, -2))
    return S - np.trace(S, axis1=-2, axis2=-1)[:, None, None] * np.eye(3) / 3.0


def cubic_trace_gap(A) -> np.ndarray:
    """tr(A^3) - 3 det(A), zero for traceless A."""
    A = np.asarray(A, dtype=float)
    return np.einsum("...ij,...jk,...ki->...", A, A, A) - 3.0 * det3(A)


# ----------------------------------------------------------------------------
# constrained jets


@dataclass(frozen=True)
class ConstrainedJet:
    T: np.ndarray
    DT: np.ndarray
    seed: int = -1

    def constraint_residuals(self) -> tuple[np.ndarray, np.ndarray]:
        trace = np.einsum("...iik->...k", self.DT)
        div = np.einsum("...iki->...k", self.DT)
        return trace, div


@lru_cache(maxsize=None)
def jet_projector() -> np.ndarray:
    """Orthogonal projector on R^27 onto (i,j)-symmetric, trace- and divergence-free DT."""
    rows = []
    for i in range(3):
        for j in range(i + 1, 3):
            for k in range(3):
                r = np.zeros((3, 3, 3))
                r[i, j, k], r[j, i, k] = 1.0, -1.0
                rows.append(r.ravel())
    for k in range(3):
        r = np.zeros((3, 3, 3))
        for i in range(3):
            r[i, i, k] += 1.0
        rows.append(r.ravel())
        r = np.zeros((3, 3, 3))
        for i in range(3):
            r[i, k, i] += 1.0
        rows.append(r.ravel())
    Cm = np.array(rows)
    # null space of the constraint matrix via SVD
    _, s, vt = np.linalg.svd(Cm)
    rank = int(np.sum(s > 1e-10))
    N = vt[rank:]
    return N.T @ N


def jets_from_raw(raw: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map raw Gaussian vectors of length 6 + 27 to (T, DT)."""
    raw = np.asarray(raw, dtype=float)
    iu = np.triu_indices(3)
    T = np.zeros(raw.shape[:-1] + (3, 3))
    T[..., iu[0], iu[1]] = raw[..., :6]
    T = T + np.swapaxes(T, -1, -2) - T * np.eye(3)
    DT = (raw[..., 6:] @ jet_projector()).reshape(raw.shape[:-1] + (3, 3, 3))
    return T, DT


def sample_constrained_jets(n: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized sampler: n jets from one Gaussian draw."""
    rng = np.random.default_rng(seed)
    return jets_from_raw(rng.standard_normal((n, 33)))


def sample_constrained_jet(seed: int) -> ConstrainedJet:
    T, DT = sample_constrained_jets(1, seed)
    return ConstrainedJet(T[0], DT[0], seed)


def cotton_of_jet(DT: np.ndarray) -> np.ndarray:
    """C_{ijk} = T_{ij;k} - T_{ik;j}."""
    return DT - np.swapaxes(DT, -1, -2)


def kato_terms(T, DT) -> dict:
    T = np.asarray(T, dtype=float)
    DT = np.asarray(DT, dtype=float)
    t2 = np.einsum("...ij,...ij->...", T, T)
    if np.any(np.sqrt(t2) <= 1e-8):
        raise DegenerateError("|T| too small for the Kato-type inequality")
    w = np.einsum("...ij,...ijk->...k", T, DT)
    lhs = np.einsum("...k,...k->...", w, w) / t2
    grad2 = np.einsum("...ijk,...ijk->...", DT, DT)
    C = cotton_of_jet(DT)
    c2 = np.einsum("...ijk,...ijk->...", C, C)
    denom = grad2 + 0.5 * c2
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(denom > 0, lhs / np.where(denom > 0, denom, 1.0), 0.0)
    return {"lhs": lhs, "rhs": KATO_CONSTANT * denom, "ratio": ratio, "grad2": grad2, "c2": c2}


def kato_check(jet: ConstrainedJet):
    """(lhs, rhs, ratio) of |grad|T||^2 <= (3/5)(|grad T|^2 + |C|^2/2)."""
    t = kato_terms(jet.T, jet.DT)
    return float(t["lhs"]), float(t["rhs"]), float(t["ratio"])


def kato_sweep(n: int, seed: int = 0, rel: float = 1e-12, chunk: int = 20000) -> dict:
    """Check the Kato-type inequality on n sampled jets; report violations and ratio quantiles."""
    rng = np.random.default_rng(seed)
    ratios = []
    violations = 0
    done = 0
    while done < n:
        m = min(chunk, n - done)
        T, DT = jets_from_raw(rng.standard_normal((m, 33)))
        t = kato_terms(T, DT)
        violations += int(np.sum(t["lhs"] > t["rhs"] * (1 + rel)))
        ratios.append(t["ratio"])
        done += m
    r = np.concatenate(ratios)
    q = np.quantile(r, [0.0, 0.5, 0.9, 0.99, 1.0])
    return {
        "samples": n,
        "seed": seed,
        "violations": violations,
        "ratio_quantiles": {"min": float(q[0]), "median": float(q[1]), "p90": float(q[2]), "p99": float(q[3]), "max": float(q[4])},
        "constant": KATO_CONSTANT,
    }


def conjugate_jet(T, DT, Q):
    """Simultaneous orthogonal change of frame of (T, DT)."""
    T2 = np.einsum("ai,bj,...ij->...ab", Q, Q, T)
    DT2 = np.einsum("ai,bj,ck,...ijk->...abc", Q, Q, Q, DT)
    return T2, DT2


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    return q * np.sign(np.diag(r))


@lru_cache(maxsize=None)
def jet_basis() -> np.ndarray:
    """Orthonormal basis (12 x 27) of the constrained DT space."""
    w, v = np.linalg.eigh(jet_projector())
    return v[:, w > 0.5].T


def kato_sup_search(starts: int = 100, seed: int = 0, maxiter: int = 3000) -> dict:
    """Best-effort supremum of the Kato ratio by Nelder-Mead from random starts.

    The ratio is frame invariant, so T is taken diagonal; DT runs over the
    twelve-dimensional constrained space.  The value found is reported, not
    asserted to equal 3/5.
    """
    rng = np.random.default_rng(seed)
    B = jet_basis()

    def neg_ratio(x):
        d = x[:3]
        t2 = float(d @ d)
        if t2 < 1e-12:
            return 0.0
        DT = (x[3:] @ B).reshape(3, 3, 3)
        w = np.einsum("i,iik->k", d, DT)
        C = DT - DT.transpose(0, 2, 1)
        den = float(np.sum(DT * DT) + 0.5 * np.sum(C * C))
        return -float(w @ w) / t2 / den if den > 0 else 0.0

    best = 0.0
    best_x = None
    for _ in range(starts):
        res = minimize(neg_ratio, rng.standard_normal(15), method="Nelder-Mead",
                       options={"maxiter": maxiter, "xatol": 1e-9, "fatol": 1e-13})
        if -res.fun > best:
            best, best_x = -res.fun, res.x
    out = {"starts": starts, "seed": seed, "sup_ratio": float(best)}
    if best_x is not None:
        out["T_diagonal"] = best_x[:3].tolist()
    return out


# ----------------------------------------------------------------------------
# Cotton norm in an eigenframe


def cotton_norm_eigenform(lambda1: float, lambda2: float, a) -> float:
    """|C|^2 V^2 in a frame diagonalizing the traceless Ricci tensor.

    lambda3 = -lambda1 - lambda2 and a are the frame components of grad V.
    """
    a = np.asarray(a, dtype=float)
    l1, l2 = float(lambda1), float(lambda2)
    return float(4 * a[0] ** 2 * (l1 + 2 * l2) ** 2 + 4 * a[1] ** 2 * (l2 + 2 * l1) ** 2 + 4 * a[2] ** 2 * (l1 - l2) ** 2)


def cotton_norm_direct(lambda1: float, lambda2: float, a) -> float:
    """8|Ric0|^2 |a|^2 - 12 |Ric0 a|^2 for Ric0 = diag(lambda1, lambda2, -lambda1 - lambda2)."""
    a = np.asarray(a, dtype=float)
    lam = np.array([lambda1, lambda2, -lambda1 - lambda2], dtype=float)
    return float(8 * np.sum(lam**2) * np.sum(a**2) - 12 * np.sum((lam * a) ** 2))
