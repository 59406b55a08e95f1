"""Truncated multivariate Taylor polynomials ("jets") on numpy arrays.

A :class:`Jet` stores the Taylor coefficients of a tensor-valued function
about a batch of base points.  Arithmetic, a few elementary functions, matrix
inversion and einsum contractions propagate the coefficients exactly up to the
truncation order, so derivatives of any order are read off without finite
differences.  Each jet carries the order up to which its coefficients are
valid; differentiation lowers it by one and products take the minimum.

Chart formulas written with ``+ - * / **`` and the functions exported here
(``sin``, ``cos``, ``sqrt`` ...) run unchanged on floats, numpy arrays and
jets.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

__all__ = [
    "Basis",
    "Jet",
    "variables",
    "constant",
    "jeinsum",
    "stack",
    "inv",
    "det",
    "value",
    "sin",
    "cos",
    "tan",
    "exp",
    "log",
    "sqrt",
    "sinh",
    "cosh",
    "power",
]


class Basis:
    """Monomials in ``nvar`` variables of total degree at most ``degree``."""

    def __init__(self, nvar: int, degree: int):
        self.nvar = nvar
        self.degree = degree
        exps = []
        for d in range(degree + 1):
            for combo in itertools.combinations_with_replacement(range(nvar), d):
                e = [0] * nvar
                for v in combo:
                    e[v] += 1
                exps.append(tuple(e))
        # graded, and within a degree sorted so the order is reproducible
        exps.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
        self.exps = np.array(exps, dtype=int).reshape(len(exps), nvar)
        self.size = len(exps)
        self.index = {e: i for i, e in enumerate(exps)}
        self.total = self.exps.sum(axis=1)
        self.factorial = np.array([math.prod(math.factorial(a) for a in e) for e in exps], dtype=float)
        self._mul = {}
        self._diff = {}

    def mask(self, order: int) -> np.ndarray:
        return (self.total <= order).astype(float)

    def mul_table(self, order: int):
        """Pair gather indices and the scatter matrix for products truncated at ``order``."""
        if order not in self._mul:
            ii, jj, kk = [], [], []
            for i, a in enumerate(self.exps):
                for j, b in enumerate(self.exps):
                    s = a + b
                    if s.sum() <= order:
                        ii.append(i)
                        jj.append(j)
                        kk.append(self.index[tuple(s)])
            scatter = np.zeros((len(kk), self.size))
            scatter[np.arange(len(kk)), kk] = 1.0
            self._mul[order] = (np.array(ii), np.array(jj), scatter)
        return self._mul[order]

    def diff_table(self, var: int):
        if var not in self._diff:
            src = np.zeros(self.size, dtype=int)
            fac = np.zeros(self.size)
            for t, e in enumerate(self.exps):
                if sum(e) + 1 <= self.degree:
                    up = list(e)
                    up[var] += 1
                    src[t] = self.index[tuple(up)]
                    fac[t] = up[var]
            self._diff[var] = (src, fac)
        return self._diff[var]


@lru_cache(maxsize=None)
def basis(nvar: int, degree: int) -> Basis:
    return Basis(nvar, degree)


class Jet:
    """Tensor-valued truncated Taylor polynomial.

    ``c`` has shape ``(*shape, basis.size)``; coefficient ``c[..., i]`` multiplies
    ``dx**basis.exps[i]``.  Coefficients above ``order`` are kept at zero.
    """

    __slots__ = ("c", "basis", "order")
    __array_ufunc__ = None

    def __init__(self, c, basis: Basis, order: int | None = None):
        self.basis = basis
        self.order = basis.degree if order is None else int(order)
        c = np.asarray(c, dtype=float)
        if self.order < basis.degree:
            c = c * basis.mask(self.order)
        self.c = c

    # shape handling
    @property
    def shape(self):
        return self.c.shape[:-1]

    @property
    def ndim(self):
        return self.c.ndim - 1

    @property
    def value(self) -> np.ndarray:
        return self.c[..., 0]

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.c[idx + (slice(None),)], self.basis, self.order)

    def __len__(self):
        return self.shape[0]

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return Jet(self.c.reshape(tuple(shape) + (self.basis.size,)), self.basis, self.order)

    def swapaxes(self, a, b):
        a = a % self.ndim
        b = b % self.ndim
        return Jet(np.swapaxes(self.c, a, b), self.basis, self.order)

    def sum(self, axis):
        axis = axis % self.ndim if isinstance(axis, int) else tuple(x % self.ndim for x in axis)
        return Jet(self.c.sum(axis=axis), self.basis, self.order)

    def truncate(self, order: int) -> "Jet":
        return Jet(self.c, self.basis, min(order, self.order))

    # calculus
    def deriv(self, var: int) -> "Jet":
        """Partial derivative in variable ``var`` (order drops by one)."""
        if self.order < 1:
            raise ValueError("cannot differentiate an order-0 jet")
        src, fac = self.basis.diff_table(var)
        return Jet(self.c[..., src] * fac, self.basis, self.order - 1)

    def grad(self) -> "Jet":
        """All first partials, stacked on a new last tensor axis."""
        parts = [self.deriv(v).c for v in range(self.basis.nvar)]
        return Jet(np.stack(parts, axis=-2), self.basis, self.order - 1)

    def derivative(self, alpha) -> np.ndarray:
        """Value of the mixed partial of multi-index ``alpha`` at the base point."""
        i = self.basis.index[tuple(alpha)]
        if sum(alpha) > self.order:
            raise ValueError("jet order too low for this derivative")
        return self.c[..., i] * self.basis.factorial[i]

    # arithmetic
    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        return constant(other, self.basis)

    def __add__(self, other):
        o = self._lift(other)
        return Jet(self.c + o.c, self.basis, min(self.order, o.order))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return Jet(self.c - o.c, self.basis, min(self.order, o.order))

    def __rsub__(self, other):
        o = self._lift(other)
        return Jet(o.c - self.c, self.basis, min(self.order, o.order))

    def __neg__(self):
        return Jet(-self.c, self.basis, self.order)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            ii, jj, scatter = self.basis.mul_table(order)
            return Jet((self.c[..., ii] * other.c[..., jj]) @ scatter, self.basis, order)
        return Jet(self.c * np.asarray(other, dtype=float)[..., None], self.basis, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * power(other, -1)
        return Jet(self.c / np.asarray(other, dtype=float)[..., None], self.basis, self.order)

    def __rtruediv__(self, other):
        return power(self, -1) * other

    def __pow__(self, q):
        if isinstance(q, (int, np.integer)) or (isinstance(q, float) and q.is_integer() and abs(q) < 64):
            n = int(q)
            if n == 0:
                return constant(np.ones(self.shape), self.basis)
            base = self if n > 0 else power(self, -1)
            out = base
            for _ in range(abs(n) - 1):
                out = out * base
            return out
        return power(self, float(q))

    def __repr__(self):
        return f"Jet(shape={self.shape}, nvar={self.basis.nvar}, order={self.order})"


def constant(x, b: Basis) -> Jet:
    x = np.asarray(x, dtype=float)
    c = np.zeros(x.shape + (b.size,))
    c[..., 0] = x
    return Jet(c, b)


def variables(point, degree: int) -> list[Jet]:
    """Coordinate jets ``x_i = p_i + dx_i`` about a batch of points ``(..., nvar)``."""
    point = np.asarray(point, dtype=float)
    nvar = point.shape[-1]
    b = basis(nvar, degree)
    out = []
    for v in range(nvar):
        c = np.zeros(point.shape[:-1] + (b.size,))
        c[..., 0] = point[..., v]
        if degree >= 1:
            e = [0] * nvar
            e[v] = 1
            c[..., b.index[tuple(e)]] = 1.0
        out.append(Jet(c, b))
    return out


def value(x):
    return x.value if isinstance(x, Jet) else np.asarray(x, dtype=float)


def _compose(a: Jet, derivs) -> Jet:
    """f(a) from the list of derivatives f^(k)(a0), k = 0..order."""
    a0 = a.value
    da = a - a0
    out = constant(derivs[0], a.basis).truncate(a.order)
    term = None
    for k in range(1, a.order + 1):
        term = da if term is None else term * da
        out = out + term * (derivs[k] / math.factorial(k))
    return out


def power(a, q: float):
    if not isinstance(a, Jet):
        return np.power(np.asarray(a, dtype=float), q)
    a0 = a.value
    derivs = []
    coef = 1.0
    for k in range(a.order + 1):
        derivs.append(coef * np.power(a0, q - k))
        coef *= q - k
    return _compose(a, derivs)


def sqrt(a):
    if not isinstance(a, Jet):
        return np.sqrt(a)
    return power(a, 0.5)


def exp(a):
    if not isinstance(a, Jet):
        return np.exp(a)
    e = np.exp(a.value)
    return _compose(a, [e] * (a.order + 1))


def log(a):
    if not isinstance(a, Jet):
        return np.log(a)
    a0 = a.value
    derivs = [np.log(a0)]
    for k in range(1, a.order + 1):
        derivs.append((-1) ** (k - 1) * math.factorial(k - 1) / a0**k)
    return _compose(a, derivs)


def _trig(a, first, second):
    s, c = first(a.value), second(a.value)
    cycle = [s, c, -s, -c]
    return _compose(a, [cycle[k % 4] for k in range(a.order + 1)])


def sin(a):
    if not isinstance(a, Jet):
        return np.sin(a)
    return _trig(a, np.sin, np.cos)


def cos(a):
    if not isinstance(a, Jet):
        return np.cos(a)
    return _trig(a, np.cos, lambda x: -np.sin(x))


def tan(a):
    if not isinstance(a, Jet):
        return np.tan(a)
    return sin(a) / cos(a)


def sinh(a):
    if not isinstance(a, Jet):
        return np.sinh(a)
    return (exp(a) - exp(-a)) * 0.5


def cosh(a):
    if not isinstance(a, Jet):
        return np.cosh(a)
    return (exp(a) + exp(-a)) * 0.5


def stack(items, axis: int = 0):
    """Stack floats, arrays and jets; returns a jet if any input is one."""
    jets = [x for x in items if isinstance(x, Jet)]
    if not jets:
        return np.stack(np.broadcast_arrays(*[np.asarray(x, dtype=float) for x in items]), axis=axis)
    b = jets[0].basis
    order = min(j.order for j in jets)
    cs = [x.c if isinstance(x, Jet) else constant(x, b).c for x in items]
    cs = np.broadcast_arrays(*cs)
    ndim = cs[0].ndim - 1
    ax = axis if axis >= 0 else axis + ndim + 1
    return Jet(np.stack(cs, axis=ax), b, order)


def matrix(rows):
    """Assemble a nested list of components into an array or jet of shape (..., n, n)."""
    return stack([stack(list(r), axis=-1) for r in rows], axis=-2)


def jeinsum(subscripts: str, *ops):
    """einsum over tensor indices of up to two operands, jets or plain arrays.

    Subscripts refer to tensor axes only and must use lowercase letters or
    ellipsis; the coefficient axis is handled internally.
    """
    lhs, out = subscripts.replace(" ", "").split("->")
    terms = lhs.split(",")
    if len(ops) == 1:
        (a,) = ops
        if not isinstance(a, Jet):
            return np.einsum(subscripts, a)
        return Jet(np.einsum(f"{terms[0]}Z->{out}Z", a.c), a.basis, a.order)
    if len(ops) != 2:
        raise ValueError("jeinsum takes one or two operands")
    a, b = ops
    ja, jb = isinstance(a, Jet), isinstance(b, Jet)
    if not ja and not jb:
        return np.einsum(subscripts, a, b)
    if ja and jb:
        order = min(a.order, b.order)
        ii, jj, scatter = a.basis.mul_table(order)
        pairs = np.einsum(f"{terms[0]}Y,{terms[1]}Y->{out}Y", a.c[..., ii], b.c[..., jj])
        return Jet(pairs @ scatter, a.basis, order)
    if ja:
        return Jet(np.einsum(f"{terms[0]}Z,{terms[1]}->{out}Z", a.c, b), a.basis, a.order)
    return Jet(np.einsum(f"{terms[0]},{terms[1]}Z->{out}Z", a, b.c), b.basis, b.order)


def inv(m):
    """Inverse of a (..., n, n) matrix jet by the terminating Neumann series."""
    if not isinstance(m, Jet):
        return np.linalg.inv(m)
    m0i = np.linalg.inv(m.value)
    eye = np.broadcast_to(np.eye(m.shape[-1]), m.shape)
    # m = m0 (1 - step) with step free of constant terms
    step = eye - jeinsum("...ij,...jk->...ik", m0i, m)
    acc = constant(eye, m.basis).truncate(m.order)
    term = None
    for _ in range(m.order):
        term = step if term is None else jeinsum("...ij,...jk->...ik", term, step)
        acc = acc + term
    return jeinsum("...ij,...jk->...ik", acc, m0i)


def det(m):
    """Determinant of a 2x2, 3x3 or 4x4 matrix (array or jet) by cofactors."""
    n = m.shape[-1]
    if n == 1:
        return m[..., 0, 0]
    if n == 2:
        return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    total = 0.0
    for j in range(n):
        keep = [k for k in range(n) if k != j]
        minor = m[..., 1:, :][..., keep]
        total = total + (-1) ** j * m[..., 0, j] * det(minor)
    return total
