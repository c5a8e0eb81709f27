"""Fourier sequences on the D4-reduced index set.

A D4-symmetric function on the square (-d, d)^2 is expanded as
``sum_n u_n exp(i pi n.x / d)`` with ``u_{g.n} = u_n`` for every element g of
the dihedral group D4.  Only indices ``0 <= n2 <= n1`` are stored, n1-major:
the flat position of ``(n1, n2)`` is ``n1 (n1 + 1) / 2 + n2``.  The orbit size
``alpha_n`` (1, 4 or 8) weights norms and inner products.

Coefficient arrays are plain float arrays (float mode) or 1-D ``RInterval``
arrays (interval mode).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import convolve as _sp_convolve

from .interval import RInterval, conv2d, ival, ival_fn, pi_const

__all__ = [
    "Grid",
    "D4Seq",
    "PairSeq",
    "SymmetryError",
    "tri_size",
    "flat_index",
    "reduced_indices",
    "alphas",
    "orbit_size",
    "orbit",
    "unfold",
    "fold_full",
    "project",
    "resize",
    "conv",
    "seq_norm",
    "inner2",
    "eval_point",
    "eval_grid",
    "cosh_box_coeffs",
    "trace_alpha",
    "trace_matrix",
    "trace_project",
    "trace_enclose",
    "trace_residual",
    "conv_operator",
]

D4_ELEMENTS = (
    (1, 0, 0, 1),
    (0, -1, 1, 0),
    (-1, 0, 0, -1),
    (0, 1, -1, 0),
    (1, 0, 0, -1),
    (-1, 0, 0, 1),
    (0, 1, 1, 0),
    (0, -1, -1, 0),
)
"""The 8 elements of D4 as row-major 2x2 integer matrices."""


class SymmetryError(ValueError):
    """Raised when a full-grid array is not D4-symmetric."""


@dataclass(frozen=True)
class Grid:
    """Domain half-width ``d`` with coefficient order ``N0`` and operator order ``N``."""

    d: float
    N0: int
    N: int

    def __post_init__(self):
        if not self.d >= 1:
            raise ValueError("grid half-width d must satisfy d >= 1")
        if not (0 < self.N <= self.N0):
            raise ValueError("grid orders must satisfy 0 < N <= N0")

    @property
    def area(self) -> float:
        return 4.0 * self.d * self.d


# ----------------------------------------------------------------------------
# index helpers


def tri_size(order: int) -> int:
    """Number of reduced indices with n1 <= order."""
    return (order + 1) * (order + 2) // 2


def flat_index(n1, n2):
    return n1 * (n1 + 1) // 2 + n2


@lru_cache(maxsize=None)
def reduced_indices(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Arrays (n1, n2) listing the reduced indices in storage order."""
    n1 = np.repeat(np.arange(order + 1), np.arange(1, order + 2))
    n2 = np.concatenate([np.arange(k + 1) for k in range(order + 1)])
    n1.setflags(write=False)
    n2.setflags(write=False)
    return n1, n2


def _check_reduced(n) -> tuple[int, int]:
    n1, n2 = int(n[0]), int(n[1])
    if not (0 <= n2 <= n1):
        raise ValueError(f"index {n} is not in the reduced set 0 <= n2 <= n1")
    return n1, n2


def orbit_size(n) -> int:
    n1, n2 = _check_reduced(n)
    if n1 == 0:
        return 1
    if n2 == 0 or n1 == n2:
        return 4
    return 8


def orbit(n) -> list[tuple[int, int]]:
    n1, n2 = _check_reduced(n)
    seen: list[tuple[int, int]] = []
    for a, b, c, e in D4_ELEMENTS:
        m = (a * n1 + b * n2, c * n1 + e * n2)
        if m not in seen:
            seen.append(m)
    return seen


@lru_cache(maxsize=None)
def alphas(order: int) -> np.ndarray:
    """Orbit sizes in storage order."""
    n1, n2 = reduced_indices(order)
    a = np.where(n1 == 0, 1, np.where((n2 == 0) | (n1 == n2), 4, 8)).astype(np.float64)
    a.setflags(write=False)
    return a


@lru_cache(maxsize=None)
def _unfold_map(order: int) -> np.ndarray:
    """Flat reduced position for every full-grid site (offset ``order``)."""
    k = np.arange(-order, order + 1)
    a = np.abs(k)[:, None]
    b = np.abs(k)[None, :]
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)
    m = flat_index(hi, lo)
    m.setflags(write=False)
    return m


# ----------------------------------------------------------------------------
# sequence types


def _is_interval(c) -> bool:
    return isinstance(c, RInterval)


@dataclass
class D4Seq:
    """D4-symmetric sequence of coefficients ``u_n`` for ``0 <= n2 <= n1 <= order``."""

    coeffs: np.ndarray | RInterval
    order: int
    grid: Grid | None = None

    def __post_init__(self):
        if not _is_interval(self.coeffs):
            self.coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if self.coeffs.shape != (tri_size(self.order),):
            raise ValueError(
                f"expected {tri_size(self.order)} coefficients for order {self.order}, "
                f"got shape {self.coeffs.shape}"
            )

    @classmethod
    def zeros(cls, order: int, grid: Grid | None = None) -> "D4Seq":
        return cls(np.zeros(tri_size(order)), order, grid)

    @classmethod
    def delta(cls, n, order: int, grid: Grid | None = None, value: float = 1.0) -> "D4Seq":
        n1, n2 = _check_reduced(n)
        c = np.zeros(tri_size(order))
        c[flat_index(n1, n2)] = value
        return cls(c, order, grid)

    @property
    def is_interval(self) -> bool:
        return _is_interval(self.coeffs)

    def get(self, n1: int, n2: int):
        return self.coeffs[flat_index(n1, n2)]

    def to_interval(self) -> "D4Seq":
        return D4Seq(ival(self.coeffs), self.order, self.grid)

    def mid(self) -> "D4Seq":
        c = self.coeffs.mid() if self.is_interval else self.coeffs.copy()
        return D4Seq(c, self.order, self.grid)

    def _like(self, coeffs, order=None) -> "D4Seq":
        return D4Seq(coeffs, self.order if order is None else order, self.grid)

    def __add__(self, other: "D4Seq") -> "D4Seq":
        order = max(self.order, other.order)
        a, b = resize(self, order), resize(other, order)
        if a.is_interval or b.is_interval:
            return self._like(ival(a.coeffs) + ival(b.coeffs), order)
        return self._like(a.coeffs + b.coeffs, order)

    def __sub__(self, other: "D4Seq") -> "D4Seq":
        return self + other.scale(-1.0)

    def __neg__(self) -> "D4Seq":
        return self.scale(-1.0)

    def scale(self, s) -> "D4Seq":
        if self.is_interval or _is_interval(s):
            return self._like(ival(self.coeffs) * ival(s))
        return self._like(self.coeffs * s)

    def __mul__(self, other: "D4Seq") -> "D4Seq":
        return conv(self, other)


@dataclass
class PairSeq:
    """Pair ``(U1, U2)`` of D4 sequences on a common grid."""

    first: D4Seq
    second: D4Seq

    def __post_init__(self):
        if self.first.order != self.second.order:
            order = max(self.first.order, self.second.order)
            self.first = resize(self.first, order)
            self.second = resize(self.second, order)

    @property
    def order(self) -> int:
        return self.first.order

    @property
    def grid(self) -> Grid | None:
        return self.first.grid

    def flatten(self):
        a, b = self.first.coeffs, self.second.coeffs
        if _is_interval(a) or _is_interval(b):
            a, b = ival(a), ival(b)
            return RInterval(np.concatenate([a.lo, b.lo]), np.concatenate([a.hi, b.hi]))
        return np.concatenate([a, b])

    @classmethod
    def from_flat(cls, flat, order: int, grid: Grid | None = None) -> "PairSeq":
        t = tri_size(order)
        return cls(D4Seq(flat[:t], order, grid), D4Seq(flat[t:], order, grid))

    def __add__(self, other: "PairSeq") -> "PairSeq":
        return PairSeq(self.first + other.first, self.second + other.second)

    def __sub__(self, other: "PairSeq") -> "PairSeq":
        return PairSeq(self.first - other.first, self.second - other.second)

    def mid(self) -> "PairSeq":
        return PairSeq(self.first.mid(), self.second.mid())

    def to_interval(self) -> "PairSeq":
        return PairSeq(self.first.to_interval(), self.second.to_interval())


# ----------------------------------------------------------------------------
# unfolding, folding and projections


def unfold(U: D4Seq):
    """Full Z^2 array of shape (2M+1, 2M+1); entry [M+i, M+j] holds u_(i,j)."""
    return U.coeffs[_unfold_map(U.order)]


def fold_full(full, grid: Grid | None = None, tol: float = 1e-12) -> D4Seq:
    """Reduce a D4-symmetric full-grid array to a ``D4Seq``.

    Float input must be symmetric to relative tolerance ``tol``.  Interval
    input is folded by taking the hull of each orbit, which encloses the
    symmetric data whenever the true array is symmetric.
    """
    shape = full.shape
    if len(shape) != 2 or shape[0] != shape[1] or shape[0] % 2 != 1:
        raise ValueError("full grid must be square with odd side")
    order = (shape[0] - 1) // 2
    n1, n2 = reduced_indices(order)
    if _is_interval(full):
        lo = np.full(tri_size(order), np.inf)
        hi = np.full(tri_size(order), -np.inf)
        for a, b, c, e in D4_ELEMENTS:
            i = order + a * n1 + b * n2
            j = order + c * n1 + e * n2
            lo = np.minimum(lo, full.lo[i, j])
            hi = np.maximum(hi, full.hi[i, j])
        return D4Seq(RInterval(lo, hi), order, grid)
    full = np.asarray(full, dtype=np.float64)
    base = full[order + n1, order + n2]
    scale = max(float(np.max(np.abs(full))), 1e-300)
    for a, b, c, e in D4_ELEMENTS:
        other = full[order + a * n1 + b * n2, order + c * n1 + e * n2]
        if np.max(np.abs(other - base)) > tol * scale:
            raise SymmetryError("full-grid array is not D4-symmetric")
    return D4Seq(base.copy(), order, grid)


def resize(U: D4Seq, order: int) -> D4Seq:
    """Truncate or zero-pad ``U`` to the given order."""
    if order == U.order:
        return U
    t = tri_size(order)
    if order < U.order:
        return D4Seq(U.coeffs[:t], order, U.grid)
    pad = t - tri_size(U.order)
    if U.is_interval:
        c = RInterval(np.concatenate([U.coeffs.lo, np.zeros(pad)]),
                      np.concatenate([U.coeffs.hi, np.zeros(pad)]))
    else:
        c = np.concatenate([U.coeffs, np.zeros(pad)])
    return D4Seq(c, order, U.grid)


def project(U: D4Seq, M: int, part: str = "head") -> D4Seq:
    """``head`` keeps entries with n1 <= M, ``tail`` keeps those with n1 > M."""
    n1, _ = reduced_indices(U.order)
    keep = n1 <= M if part == "head" else n1 > M
    if part not in ("head", "tail"):
        raise ValueError("part must be 'head' or 'tail'")
    if U.is_interval:
        c = RInterval(np.where(keep, U.coeffs.lo, 0.0), np.where(keep, U.coeffs.hi, 0.0))
    else:
        c = np.where(keep, U.coeffs, 0.0)
    return D4Seq(c, U.order, U.grid)


# ----------------------------------------------------------------------------
# convolution, norms, inner products


_DIRECT_MAX_ORDER = 16


def conv(U: D4Seq, V: D4Seq) -> D4Seq:
    """D4-reduced convolution; the order of the result is the sum of orders."""
    order = U.order + V.order
    if U.is_interval or V.is_interval:
        full = conv2d(ival(unfold(U)), ival(unfold(V)))
        n1, n2 = reduced_indices(order)
        c = full[order + n1, order + n2]
    else:
        # direct sums are exact on integer data; FFT only pays off on large grids
        method = "direct" if order <= _DIRECT_MAX_ORDER else "fft"
        full = _sp_convolve(unfold(U), unfold(V), method=method)
        n1, n2 = reduced_indices(order)
        c = full[order + n1, order + n2]
    return D4Seq(c, order, U.grid or V.grid)


def seq_norm(U: D4Seq, kind: str = "l2"):
    """Alpha-weighted l1 or l2 norm; interval mode returns an enclosure."""
    a = alphas(U.order)
    if U.is_interval:
        if kind == "l1":
            return (U.coeffs.abs() * a).sum()
        if kind == "l2":
            return ival_fn("sqrt", (U.coeffs.sqr() * a).sum())
    else:
        if kind == "l1":
            return float(np.sum(a * np.abs(U.coeffs)))
        if kind == "l2":
            return float(np.sqrt(np.sum(a * U.coeffs ** 2)))
    raise ValueError("kind must be 'l1' or 'l2'")


def inner2(U: D4Seq, V: D4Seq):
    """Alpha-weighted inner product of real sequences."""
    order = min(U.order, V.order)
    a = alphas(order)
    u = U.coeffs[: tri_size(order)]
    v = V.coeffs[: tri_size(order)]
    if _is_interval(u) or _is_interval(v):
        return (ival(u) * ival(v) * a).sum()
    return float(np.sum(a * u * v))


# ----------------------------------------------------------------------------
# evaluation


def _float_coeffs(U: D4Seq) -> np.ndarray:
    return U.coeffs.mid() if U.is_interval else U.coeffs


def eval_grid(U: D4Seq, xs, ys, d: float | None = None) -> np.ndarray:
    """Evaluate the symmetric cosine sum on the tensor grid ``xs x ys``.

    Returns an array of shape (len(xs), len(ys)); points outside the closed
    box ``|x_i| <= d`` evaluate to 0.
    """
    d = d if d is not None else U.grid.d
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    ys = np.atleast_1d(np.asarray(ys, dtype=np.float64))
    k = np.arange(U.order + 1)
    cx = np.cos(np.pi * np.outer(xs, k) / d)
    cy = np.cos(np.pi * np.outer(ys, k) / d)
    n1, n2 = reduced_indices(U.order)
    w = 0.5 * alphas(U.order) * _float_coeffs(U)
    # symmetric coefficient matrix C[k1, k2] with both orderings
    C = np.zeros((U.order + 1, U.order + 1))
    np.add.at(C, (n1, n2), w)
    np.add.at(C, (n2, n1), w)
    out = cx @ C @ cy.T
    inside = (np.abs(xs)[:, None] <= d) & (np.abs(ys)[None, :] <= d)
    return np.where(inside, out, 0.0)


def eval_point(U: D4Seq, x, d: float | None = None) -> float:
    """Value of the represented function at the point ``x`` (0 outside the closed box)."""
    return float(eval_grid(U, [x[0]], [x[1]], d)[0, 0])


# ----------------------------------------------------------------------------
# closed-form coefficients of the cosh box function


def cosh_box_coeffs(a, grid: Grid, order: int) -> D4Seq:
    """Interval coefficients of 1_box * (cosh(2 a x1) + cosh(2 a x2)) / 2.

    The 1-D coefficients of cosh(b t) on (-d, d) are
    ``(-1)^k b sinh(b d) / (d (b^2 + (pi k / d)^2))``; only axis indices are
    nonzero.  Entries are computed up to ``order``.
    """
    a = ival(a)
    d = ival(grid.d)
    b = a * 2.0
    sh = ival_fn("sinh", b * d)
    k = np.arange(order + 1, dtype=np.float64)
    freq = pi_const() * k / d
    c = (b * sh) / (d * (b.sqr() + freq.sqr()))
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    c = c * sign
    lo = np.zeros(tri_size(order))
    hi = np.zeros(tri_size(order))
    pos = flat_index(np.arange(order + 1), 0)
    half = c * 0.5
    lo[pos] = half.lo
    hi[pos] = half.hi
    lo[0] = c.lo[0]
    hi[0] = c.hi[0]
    return D4Seq(RInterval(lo, hi), order, grid)


# ----------------------------------------------------------------------------
# boundary trace


@lru_cache(maxsize=None)
def trace_alpha(order: int) -> np.ndarray:
    """Trace weights: 1 at (0,0), 2 on the axis, 4 elsewhere."""
    n1, n2 = reduced_indices(order)
    a = np.where(n1 == 0, 1.0, np.where(n2 == 0, 2.0, 4.0))
    a.setflags(write=False)
    return a


def trace_block(order: int) -> np.ndarray:
    """Map from coefficients to cosine coefficients of the trace at x1 = d."""
    n1, n2 = reduced_indices(order)
    at = trace_alpha(order)
    T = np.zeros((order + 1, tri_size(order)))
    cols = np.arange(tri_size(order))
    # terms with n1 >= row index n2
    T[n2, cols] += at * np.where(n1 % 2 == 0, 1.0, -1.0)
    # terms (row, j) with j < row
    off = n2 < n1
    T[n1[off], cols[off]] += at[off] * np.where(n2[off] % 2 == 0, 1.0, -1.0)
    return T


def trace_matrix(grid_or_order) -> np.ndarray:
    """Block-diagonal trace matrix acting on a flattened ``PairSeq``."""
    order = grid_or_order.N0 if isinstance(grid_or_order, Grid) else int(grid_or_order)
    T = trace_block(order)
    Z = np.zeros_like(T)
    return np.block([[T, Z], [Z, T]])


def _trace_system(U0, params):
    """Trace matrix ``T``, metric direction ``D T^T`` (``D = L^{-1}``) and the flat midpoint."""
    from .model import symbol_arrays

    order = U0.order
    s = symbol_arrays(params, order)
    T1 = trace_block(order)
    if isinstance(U0, PairSeq):
        t = tri_size(order)
        u = np.asarray(U0.mid().flatten())
        # D = L^{-1}, block lower triangular per mode
        D11 = 1.0 / s.l11
        D21 = -s.l21 / (s.l11 * s.l22)
        D22 = 1.0 / s.l22
        T = trace_matrix(order)
        DT = np.zeros((2 * t, 2 * (order + 1)))
        DT[:t, : order + 1] = D11[:, None] * T1.T
        DT[t:, : order + 1] = D21[:, None] * T1.T
        DT[t:, order + 1:] = D22[:, None] * T1.T
        return T, DT, u
    return T1, (1.0 / s.l11)[:, None] * T1.T, _float_coeffs(U0)


def _rebuild(U0, flat):
    if isinstance(U0, PairSeq):
        return PairSeq.from_flat(flat, U0.order, U0.grid)
    return D4Seq(flat, U0.order, U0.grid)


def trace_project(U0, params, tol: float = 1e-10):
    """Project onto the kernel of the trace map using the inverse symbol as metric.

    Works on a ``PairSeq`` (full system) or a ``D4Seq`` (one component with the
    first diagonal symbol entry).
    """
    T, DT, u = _trace_system(U0, params)
    S = T @ DT
    cond = np.linalg.cond(S)
    if not np.isfinite(cond) or cond > 1e14:
        raise np.linalg.LinAlgError("trace projection system is singular")
    out = u - DT @ np.linalg.solve(S, T @ u)
    res = np.max(np.abs(T @ out))
    if res > tol * max(1.0, float(np.max(np.abs(u)))):
        raise np.linalg.LinAlgError(f"trace projection residual {res:g} too large")
    return _rebuild(U0, out)


def trace_enclose(U0, params):
    """Interval enclosure of an exact element of the trace kernel next to ``U0``.

    With the float direction ``D^T`` taken as exact, ``u - D^T x`` lies in the
    kernel exactly when ``(T D^T) x = T u``; that system is solved with a
    verified enclosure, so the returned interval sequence contains a function
    vanishing on the boundary of the box.
    """
    from .interval import matmul, verified_solve

    T, DT, u = _trace_system(U0, params)
    S = matmul(T, DT)
    rhs = matmul(T, u.reshape(-1, 1)).reshape(-1)
    x = verified_solve(S, rhs)
    out = ival(u) - matmul(DT, x.reshape(-1, 1)).reshape(-1)
    if isinstance(U0, PairSeq):
        t = tri_size(U0.order)
        return PairSeq(D4Seq(out[:t], U0.order, U0.grid), D4Seq(out[t:], U0.order, U0.grid))
    return D4Seq(out, U0.order, U0.grid)


def trace_residual(U0) -> float:
    """Max absolute trace coefficient of the midpoint (zero for an exact kernel element)."""
    T = trace_matrix(U0.order) if isinstance(U0, PairSeq) else trace_block(U0.order)
    u = np.asarray(U0.mid().flatten()) if isinstance(U0, PairSeq) else _float_coeffs(U0)
    return float(np.max(np.abs(T @ u)))


# ----------------------------------------------------------------------------
# convolution operators as matrices


def conv_operator(W: D4Seq, row_order: int, col_order: int, rows: slice | None = None):
    """Matrix of ``H -> W * H`` from order ``col_order`` to order ``row_order``.

    Entry (n, m) is ``sum over k in orb(m) of w_(n-k)``, written as
    ``alpha_m / 8 * sum_g w_(n - g m)`` so every term is an exact scaling.
    ``rows`` optionally selects a slice of the output indices (storage order).
    Returns a float array or an ``RInterval`` matrix following ``W``.
    """
    rn1, rn2 = reduced_indices(row_order)
    if rows is not None:
        rn1, rn2 = rn1[rows], rn2[rows]
    cn1, cn2 = reduced_indices(col_order)
    am = alphas(col_order) / 8.0
    K = W.order
    full = unfold(W)
    interval = W.is_interval
    if interval:
        acc_lo = np.zeros((rn1.size, cn1.size))
        acc_hi = np.zeros((rn1.size, cn1.size))
        flo, fhi = full.lo, full.hi
    else:
        acc = np.zeros((rn1.size, cn1.size))
    for a, b, c, e in D4_ELEMENTS:
        gm1 = a * cn1 + b * cn2
        gm2 = c * cn1 + e * cn2
        i = rn1[:, None] - gm1[None, :]
        j = rn2[:, None] - gm2[None, :]
        ok = (np.abs(i) <= K) & (np.abs(j) <= K)
        ii = np.where(ok, i + K, 0)
        jj = np.where(ok, j + K, 0)
        if interval:
            acc_lo += np.where(ok, flo[ii, jj], 0.0) * am
            acc_hi += np.where(ok, fhi[ii, jj], 0.0) * am
        else:
            acc += np.where(ok, full[ii, jj], 0.0) * am
    if not interval:
        return acc
    # the 8-term sums of exactly scaled values: bound rounding by gamma_8
    from .interval import ETA, _gamma

    g = _gamma(8)
    err = np.zeros_like(acc_lo)
    for a, b, c, e in D4_ELEMENTS:
        gm1 = a * cn1 + b * cn2
        gm2 = c * cn1 + e * cn2
        i = rn1[:, None] - gm1[None, :]
        j = rn2[:, None] - gm2[None, :]
        ok = (np.abs(i) <= K) & (np.abs(j) <= K)
        ii = np.where(ok, i + K, 0)
        jj = np.where(ok, j + K, 0)
        err += np.where(ok, np.maximum(np.abs(flo[ii, jj]), np.abs(fhi[ii, jj])), 0.0) * am
    err = np.nextafter(err * (g * (1 + 2 * g)) + 16 * ETA, np.inf)
    return RInterval(np.nextafter(acc_lo - err, -np.inf), np.nextafter(acc_hi + err, np.inf))
