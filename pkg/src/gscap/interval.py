"""Interval arithmetic with outward rounding on numpy arrays.

Every ``RInterval`` holds two float64 arrays ``lo`` and ``hi`` of the same
shape.  Basic operations are computed in round-to-nearest and then widened by
one ulp in each direction with ``np.nextafter``; since IEEE-754 operations are
correctly rounded, the exact result always lies inside the widened interval.

Elementary functions go through ``mpmath.iv`` (rigorous arbitrary precision
intervals) and are rounded outward to doubles.  Matrix products and 2-D
convolutions use a midpoint-radius representation together with the a-priori
bound ``|fl(x.y) - x.y| <= gamma_n |x|.|y|`` for floating point dot products.
"""
from __future__ import annotations

import math
from typing import Callable, Iterable

import numpy as np
from mpmath import iv, libmp
from scipy.signal import convolve2d

__all__ = [
    "RInterval",
    "IMatrix",
    "IntervalDomainError",
    "ival",
    "ival_arith",
    "ival_fn",
    "pi_const",
    "matmul",
    "conv2d",
    "opnorm_inf_ub",
    "opnorm_one_ub",
    "opnorm2_ub",
    "to_decimal",
    "from_decimal",
    "verified_solve",
]

U_ROUND = 2.0 ** -53
ETA = 2.0 ** -1074
_MP_PREC = 96


class IntervalDomainError(ValueError):
    """Raised when an operation is applied outside its domain."""


def _down(x):
    return np.nextafter(x, -np.inf)


def _up(x):
    return np.nextafter(x, np.inf)


def _nonneg(lo, a: "RInterval", b: "RInterval"):
    """Sums, products and quotients of nonnegative intervals stay nonnegative."""
    return np.where((a.lo >= 0) & (b.lo >= 0), np.maximum(lo, 0.0), lo)


def _gamma(n: int) -> float:
    """Upper bound for gamma_n = n u / (1 - n u)."""
    nu = n * U_ROUND
    if nu >= 0.5:
        raise IntervalDomainError(f"dot product length {n} too large for rounding bound")
    return _up(_up(nu) / _down(1.0 - nu) * (1.0 + 4 * U_ROUND))


def _inflate(t, n: int):
    """Upper bound on an exact nonnegative sum of ``n`` products given its float value."""
    g = _gamma(n + 2)
    return _up(_up(t * (1.0 + g)) + (n + 2) * ETA)


class RInterval:
    """Array of closed real intervals ``[lo, hi]``.

    Scalars are 0-d arrays.  All arithmetic returns enclosures of the exact
    result for every choice of members of the operands.
    """

    __slots__ = ("lo", "hi")
    __array_priority__ = 1000

    def __init__(self, lo, hi=None, check: bool = True):
        lo = np.asarray(lo, dtype=np.float64)
        hi = lo if hi is None else np.asarray(hi, dtype=np.float64)
        if lo.shape != hi.shape:
            lo, hi = np.broadcast_arrays(lo, hi)
            lo, hi = lo.copy(), hi.copy()
        if check:
            if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
                raise IntervalDomainError("interval endpoints must be finite")
            if np.any(lo > hi):
                raise IntervalDomainError("interval with lo > hi")
        self.lo = lo
        self.hi = hi

    # construction helpers ------------------------------------------------
    @classmethod
    def point(cls, x) -> "RInterval":
        x = np.asarray(x, dtype=np.float64)
        return cls(x, x.copy())

    @classmethod
    def from_midrad(cls, mid, rad) -> "RInterval":
        mid = np.asarray(mid, dtype=np.float64)
        rad = np.asarray(rad, dtype=np.float64)
        return cls(_down(mid - rad), _up(mid + rad))

    @classmethod
    def zeros(cls, shape) -> "RInterval":
        return cls(np.zeros(shape), np.zeros(shape))

    @classmethod
    def hull(cls, a: "RInterval", b: "RInterval") -> "RInterval":
        a, b = ival(a), ival(b)
        return cls(np.minimum(a.lo, b.lo), np.maximum(a.hi, b.hi))

    # array protocol ------------------------------------------------------
    @property
    def shape(self):
        return self.lo.shape

    @property
    def ndim(self):
        return self.lo.ndim

    @property
    def size(self):
        return self.lo.size

    def __len__(self):
        return len(self.lo)

    def __getitem__(self, key) -> "RInterval":
        return RInterval(self.lo[key], self.hi[key], check=False)

    def __setitem__(self, key, value) -> None:
        value = ival(value)
        self.lo[key] = value.lo
        self.hi[key] = value.hi

    def copy(self) -> "RInterval":
        return RInterval(self.lo.copy(), self.hi.copy(), check=False)

    def reshape(self, *shape) -> "RInterval":
        return RInterval(self.lo.reshape(*shape), self.hi.reshape(*shape), check=False)

    @property
    def T(self) -> "RInterval":
        return RInterval(self.lo.T, self.hi.T, check=False)

    def mid(self) -> np.ndarray:
        return 0.5 * self.lo + 0.5 * self.hi

    def rad(self) -> np.ndarray:
        m = self.mid()
        return np.maximum(_up(m - self.lo), _up(self.hi - m))

    def midrad(self):
        m = self.mid()
        r = np.maximum(_up(m - self.lo), _up(self.hi - m))
        return m, r

    def mag(self) -> np.ndarray:
        """Upper bound of |x| over the interval."""
        return np.maximum(np.abs(self.lo), np.abs(self.hi))

    def mig(self) -> np.ndarray:
        """Lower bound of |x| over the interval."""
        out = np.minimum(np.abs(self.lo), np.abs(self.hi))
        return np.where((self.lo <= 0) & (self.hi >= 0), 0.0, out)

    def width(self) -> np.ndarray:
        return _up(self.hi - self.lo)

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return (self.lo <= x) & (x <= self.hi)

    def contains_interval(self, other: "RInterval") -> np.ndarray:
        other = ival(other)
        return (self.lo <= other.lo) & (other.hi <= self.hi)

    def __repr__(self) -> str:
        if self.ndim == 0:
            return f"RInterval([{float(self.lo)!r}, {float(self.hi)!r}])"
        return f"RInterval(shape={self.shape})"

    def __float__(self) -> float:
        return float(self.mid())

    # arithmetic -----------------------------------------------------------
    def __neg__(self) -> "RInterval":
        return RInterval(-self.hi, -self.lo, check=False)

    def __pos__(self) -> "RInterval":
        return self

    def __add__(self, other) -> "RInterval":
        other = ival(other)
        lo = _nonneg(_down(self.lo + other.lo), self, other)
        return RInterval(lo, _up(self.hi + other.hi), check=False)

    __radd__ = __add__

    def __sub__(self, other) -> "RInterval":
        other = ival(other)
        return RInterval(_down(self.lo - other.hi), _up(self.hi - other.lo), check=False)

    def __rsub__(self, other) -> "RInterval":
        return ival(other) - self

    def __mul__(self, other) -> "RInterval":
        other = ival(other)
        p = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        lo = np.minimum(np.minimum(p[0], p[1]), np.minimum(p[2], p[3]))
        hi = np.maximum(np.maximum(p[0], p[1]), np.maximum(p[2], p[3]))
        return RInterval(_nonneg(_down(lo), self, other), _up(hi), check=False)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RInterval":
        other = ival(other)
        if np.any((other.lo <= 0) & (other.hi >= 0)):
            raise IntervalDomainError("division by an interval containing zero")
        p = (self.lo / other.lo, self.lo / other.hi, self.hi / other.lo, self.hi / other.hi)
        lo = np.minimum(np.minimum(p[0], p[1]), np.minimum(p[2], p[3]))
        hi = np.maximum(np.maximum(p[0], p[1]), np.maximum(p[2], p[3]))
        return RInterval(_nonneg(_down(lo), self, other), _up(hi), check=False)

    def __rtruediv__(self, other) -> "RInterval":
        return ival(other) / self

    def __pow__(self, k: int) -> "RInterval":
        return ival_fn("powi", self, k)

    def __matmul__(self, other) -> "RInterval":
        return matmul(self, other)

    def __rmatmul__(self, other) -> "RInterval":
        return matmul(ival(other), self)

    def sqr(self) -> "RInterval":
        lo2 = self.lo * self.lo
        hi2 = self.hi * self.hi
        hi = _up(np.maximum(lo2, hi2))
        lo = np.where((self.lo <= 0) & (self.hi >= 0), 0.0, _down(np.minimum(lo2, hi2)))
        return RInterval(np.maximum(lo, 0.0), hi, check=False)

    def abs(self) -> "RInterval":
        return RInterval(self.mig(), self.mag(), check=False)

    def scale2(self, e) -> "RInterval":
        """Exact multiplication by 2**e (no rounding unless under/overflow)."""
        return RInterval(np.ldexp(self.lo, e), np.ldexp(self.hi, e), check=False)

    def sum(self, axis=None) -> "RInterval":
        """Rigorous sum using the a-priori floating point summation bound."""
        n = self.lo.size if axis is None else self.lo.shape[axis]
        if n == 0:
            return RInterval.zeros(np.sum(self.lo, axis=axis).shape)
        slo = np.sum(self.lo, axis=axis)
        shi = np.sum(self.hi, axis=axis)
        g = _gamma(max(n, 1))
        elo = _up(_up(np.sum(np.abs(self.lo), axis=axis) * g) * (1 + 4 * U_ROUND)) + n * ETA
        ehi = _up(_up(np.sum(np.abs(self.hi), axis=axis) * g) * (1 + 4 * U_ROUND)) + n * ETA
        lo = _down(slo - elo)
        # a sum of nonnegative terms is nonnegative
        lo = np.where(np.all(self.lo >= 0, axis=axis), np.maximum(lo, 0.0), lo)
        return RInterval(lo, _up(shi + ehi), check=False)

    def max_hi(self) -> float:
        return float(np.max(self.hi))


IMatrix = RInterval
"""Two-dimensional ``RInterval``; products through :func:`matmul`."""


def ival(x) -> RInterval:
    """Coerce numbers, arrays or intervals to an ``RInterval``.

    Floats are taken as exact binary values.  Use :func:`from_decimal` or
    :func:`exact` for decimal constants that are not representable.
    """
    if isinstance(x, RInterval):
        return x
    return RInterval.point(x)


# ----------------------------------------------------------------------------
# elementary functions through mpmath.iv


class _mp_prec:
    """Temporarily set the working precision of ``mpmath.iv``."""

    def __enter__(self):
        self._old = iv.prec
        iv.prec = _MP_PREC

    def __exit__(self, *exc):
        iv.prec = self._old
        return False


def _mp_to_bounds(v) -> tuple[float, float]:
    a, b = v._mpi_
    return (
        libmp.to_float(a, rnd=libmp.round_floor),
        libmp.to_float(b, rnd=libmp.round_ceiling),
    )


def _float_to_mp(x: float):
    return iv.mpf(float(x))


def _apply_mp(f: Callable, x: RInterval) -> RInterval:
    lo = np.empty(x.shape)
    hi = np.empty(x.shape)
    flat_lo = x.lo.reshape(-1)
    flat_hi = x.hi.reshape(-1)
    olo = lo.reshape(-1)
    ohi = hi.reshape(-1)
    with _mp_prec():
        for i in range(flat_lo.size):
            v = f(iv.mpf([float(flat_lo[i]), float(flat_hi[i])]))
            olo[i], ohi[i] = _mp_to_bounds(v)
    return RInterval(lo, hi)


def _cosh_mp(v):
    e = iv.exp(v)
    return (e + 1 / e) / 2


def _sinh_mp(v):
    e = iv.exp(v)
    return (e - 1 / e) / 2


_PI: RInterval | None = None


def pi_const() -> RInterval:
    """Enclosure of pi of width one ulp."""
    global _PI
    if _PI is None:
        with _mp_prec():
            lo, hi = _mp_to_bounds(iv.pi)
        _PI = RInterval(lo, hi)
    return _PI


def ival_fn(fn: str, x=None, k: int | None = None) -> RInterval:
    """Enclosure of an elementary function applied to an interval array."""
    if fn == "pi_const":
        return pi_const()
    x = ival(x)
    if fn == "abs":
        return x.abs()
    if fn == "powi":
        if k is None or int(k) != k:
            raise IntervalDomainError("powi needs an integer exponent")
        k = int(k)
        if k == 0:
            return RInterval.point(np.ones(x.shape))
        if k < 0:
            return 1.0 / ival_fn("powi", x, -k)
        if k % 2 == 0:
            return ival_fn("powi", x.sqr(), k // 2)
        out = x
        for _ in range(k - 1):
            out = out * x
        return out
    if fn == "sqrt":
        if np.any(x.lo < 0):
            raise IntervalDomainError("sqrt of an interval with negative part")
        return RInterval(_down(np.sqrt(x.lo)), _up(np.sqrt(x.hi)))
    if fn == "ln":
        if np.any(x.lo <= 0):
            raise IntervalDomainError("ln of an interval with nonpositive part")
        return _apply_mp(iv.log, x)
    if fn == "exp":
        return _apply_mp(iv.exp, x)
    if fn == "cosh":
        return _apply_mp(_cosh_mp, x)
    if fn == "sinh":
        return _apply_mp(_sinh_mp, x)
    if fn == "sin":
        return _apply_mp(iv.sin, x)
    if fn == "cos":
        return _apply_mp(iv.cos, x)
    raise IntervalDomainError(f"unknown function {fn!r}")


def ival_arith(op: str, x, y) -> RInterval:
    x, y = ival(x), ival(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise IntervalDomainError(f"unknown operation {op!r}")


def isqrt(x) -> RInterval:
    return ival_fn("sqrt", x)


def iexp(x) -> RInterval:
    return ival_fn("exp", x)


def iln(x) -> RInterval:
    return ival_fn("ln", x)


def imax(*xs) -> RInterval:
    """Interval enclosure of the pointwise maximum."""
    xs = [ival(x) for x in xs]
    lo = xs[0].lo
    hi = xs[0].hi
    for x in xs[1:]:
        lo = np.maximum(lo, x.lo)
        hi = np.maximum(hi, x.hi)
    return RInterval(lo, hi, check=False)


def imin(*xs) -> RInterval:
    xs = [ival(x) for x in xs]
    lo = xs[0].lo
    hi = xs[0].hi
    for x in xs[1:]:
        lo = np.minimum(lo, x.lo)
        hi = np.minimum(hi, x.hi)
    return RInterval(lo, hi, check=False)


def exact(num: int, den: int = 1) -> RInterval:
    """Enclosure of the rational num/den."""
    return ival(float(num)) / ival(float(den)) if den != 1 else ival(float(num))


def from_decimal(s: str) -> RInterval:
    """Tight enclosure of a decimal string."""
    with _mp_prec():
        lo, hi = _mp_to_bounds(iv.mpf(s))
    return RInterval(lo, hi)


def to_decimal(x: float) -> str:
    """Decimal string with 18 significant digits (exact float round trip)."""
    return format(float(x), ".17e")


# ----------------------------------------------------------------------------
# matrix products and convolutions


def matmul(a, b) -> RInterval:
    """Rigorous enclosure of a product of interval matrices (midpoint-radius)."""
    a, b = ival(a), ival(b)
    am, ar = a.midrad()
    bm, br = b.midrad()
    k = am.shape[-1] if am.ndim else 1
    cm = am @ bm
    g = _gamma(k + 1)
    abs_am = np.abs(am)
    abs_bm = np.abs(bm)
    t = abs_am @ (br + g * abs_bm)
    if np.any(ar):
        t = t + ar @ (abs_bm + br)
    cr = _inflate(t, k)
    return RInterval(_down(cm - cr), _up(cm + cr), check=False)


def conv2d(a, b) -> RInterval:
    """Rigorous full 2-D linear convolution of interval arrays."""
    a, b = ival(a), ival(b)
    am, ar = a.midrad()
    bm, br = b.midrad()
    k = min(am.size, bm.size)
    cm = convolve2d(am, bm, mode="full")
    g = _gamma(k + 1)
    abs_am = np.abs(am)
    abs_bm = np.abs(bm)
    t = convolve2d(abs_am, br + g * abs_bm, mode="full")
    if np.any(ar):
        t = t + convolve2d(ar, abs_bm + br, mode="full")
    # float convolution of nonnegative data may slightly underestimate
    cr = _inflate(np.maximum(t, 0.0), k)
    return RInterval(_down(cm - cr), _up(cm + cr), check=False)


# ----------------------------------------------------------------------------
def verified_solve(A, b) -> RInterval:
    """Enclosure of the solutions of ``A x = b`` for all members of interval ``A`` and ``b``.

    Krawczyk-type residual correction: with ``C ~ inv(mid A)`` and
    ``||I - C A||_inf <= q < 1``, every solution lies in
    ``x~ + C (b - A x~) + [-e, e]`` with ``e = q ||C (b - A x~)||_inf / (1 - q)``.
    """
    A, b = ival(A), ival(b)
    C = np.linalg.inv(A.mid())
    xt = C @ b.mid()
    r = b - matmul(A, xt.reshape(-1, 1)).reshape(-1)
    Cr = matmul(C, r.reshape(-1, 1)).reshape(-1)
    E = ival(np.eye(A.shape[0])) - matmul(C, A)
    q = opnorm_inf_ub(E)
    if not q < 1.0:
        raise IntervalDomainError("verified_solve: matrix not verified invertible")
    e = float(_up(q * float(np.max(Cr.mag())) / _down(1.0 - q)))
    return Cr + xt + RInterval(-e, e)


# operator norms


_FSUM_MAX = 512


def opnorm_inf_ub(a) -> float:
    """Upper bound of the max row sum of |A|.

    Short rows are summed with the correctly rounded ``math.fsum`` and nudged
    up once (at most one ulp above the exact sum).  Long rows use the vector
    sum inflated by the a-priori summation error bound.
    """
    a = ival(a)
    m = a.mag()
    if m.size == 0:
        return 0.0
    n = m.shape[1]
    if n <= _FSUM_MAX:
        return float(_up(max(math.fsum(row) for row in m.tolist())))
    return float(np.max(_inflate(np.sum(m, axis=1), n)))


def opnorm_one_ub(a) -> float:
    a = ival(a)
    return opnorm_inf_ub(a.T)


def _root_up(x: float, k: int, log2scale: int = 0) -> float:
    """Upper bound of (x * 2**log2scale) ** (1/k)."""
    if x <= 0:
        return 0.0
    with _mp_prec():
        v = iv.exp((iv.log(iv.mpf(x)) + log2scale * iv.log(2)) / k)
        return _mp_to_bounds(v)[1]


def _sqrt_up(x: float) -> float:
    return float(_up(np.sqrt(x)))


def conjugate_weights(a, weights) -> RInterval:
    """Return W^{1/2} A W^{-1/2} with W = diag(weights)."""
    a = ival(a)
    w = ival(np.asarray(weights, dtype=np.float64))
    sw = ival_fn("sqrt", w)
    left = sw.reshape(-1, 1)
    right = sw.reshape(1, -1)
    if a.shape[0] != w.size or a.shape[1] != w.size:
        raise IntervalDomainError("weights must match a square matrix")
    return (a * left) / right


def _power_bound_psd(s: RInterval, squarings: int) -> float:
    """Upper bound of rho(S) via ||S^(2^m)||_inf^(1/2^m); S the exact matrix enclosed."""
    t = s
    log2scale = 0
    for _ in range(squarings):
        mag = float(np.max(t.mag()))
        if mag == 0.0:
            return 0.0
        e = int(math.floor(math.log2(mag)))
        t = t.scale2(-e)
        log2scale = 2 * (log2scale + e)
        t = matmul(t, t)
    nrm = opnorm_inf_ub(t)
    return _root_up(nrm, 2 ** squarings, log2scale)


def opnorm2_ub(
    a,
    weights=None,
    selfadjoint: bool = False,
    squarings: int = 0,
) -> RInterval:
    """Certified upper bound for the weighted spectral norm of ``a``.

    The weighted norm is the standard spectral norm of W^{1/2} A W^{-1/2}.
    For a general matrix the bound is sqrt(||A~||_1 ||A~||_inf).  When
    ``selfadjoint`` is set the matrix must be a weighted self-adjoint positive
    semidefinite product C C*, and the row-sum bound ||A~||_inf is used.
    ``squarings > 0`` additionally bounds the norm through repeated squaring
    of the (Gram) matrix, ||S||_2 <= ||S^(2^m)||_inf^(1/2^m), and the minimum
    of all bounds is returned.  The result is the point interval [U, U].
    """
    a = ival(a)
    if a.ndim != 2:
        raise IntervalDomainError("opnorm2_ub expects a matrix")
    if weights is not None:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (a.shape[0],) or a.shape[0] != a.shape[1] or not np.all(w > 0):
            raise IntervalDomainError("weights must be positive and match a square matrix")
    if weights is not None and np.ptp(w) != 0:
        at = conjugate_weights(a, w)
    else:
        at = a
    if selfadjoint:
        if at.shape[0] != at.shape[1]:
            raise IntervalDomainError("self-adjoint mode needs a square matrix")
        best = opnorm_inf_ub(at)
        if squarings > 0:
            best = min(best, _power_bound_psd(at, squarings))
    else:
        n1 = opnorm_one_ub(at)
        ninf = opnorm_inf_ub(at)
        best = min(_sqrt_up(float(_up(n1 * ninf))), max(n1, ninf))
        if squarings > 0:
            gram = matmul(at.T, at)
            best = min(best, _sqrt_up(_power_bound_psd(gram, squarings)))
    return RInterval(best, best)


def iter_chunks(n: int, size: int) -> Iterable[slice]:
    for start in range(0, n, size):
        yield slice(start, min(n, start + size))
