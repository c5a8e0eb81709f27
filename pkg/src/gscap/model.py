"""The Gray-Scott zero-finding problem on D4 sequences.

After rescaling, a stationary pattern ``(u1, u2)`` solves ``F(U) = LU + G(U) = 0``
with the Fourier symbol

    l11 = -lambda1 |2 pi k|^2 - 1,   l21 = lambda2 lambda1 - 1,
    l22 = -|2 pi k|^2 - lambda2,     l12 = 0,

at the frequency ``k = n / (2 d)``, and the nonlinearity
``G(U) = ((U2 + 1 - lambda1 U1) * U1 * U1, 0)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .d4seq import D4Seq, Grid, PairSeq, conv, reduced_indices, resize
from .interval import RInterval, ival, pi_const

__all__ = [
    "GSParams",
    "SymbolArrays",
    "exact_ival",
    "params_from_physical",
    "symbol",
    "symbol_arrays",
    "apply_L",
    "apply_L_inv",
    "G_full",
    "F_full",
    "dg_sequences",
    "dg_action",
    "DGData",
]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(float(x))


def exact_ival(x) -> RInterval:
    """Tight enclosure of a rational given as Fraction, int, float or string ('1/9', '0.0567')."""
    f = _as_fraction(x)
    if f.denominator == 1:
        return ival(float(f.numerator)) if abs(f.numerator) < 2 ** 53 else _big(f)
    return _big(f)


def _big(f: Fraction) -> RInterval:
    from .interval import from_decimal

    num = from_decimal(str(f.numerator))
    den = from_decimal(str(f.denominator))
    return num / den


@dataclass(frozen=True)
class GSParams:
    """Parameters ``lambda1, lambda2`` with the grid.

    ``lambda1`` and ``lambda2`` may be given as strings (``'1/9'``,
    ``'0.0567'``) so that the interval computations use the exact rational.
    """

    lambda1: str | float | Fraction
    lambda2: str | float | Fraction
    grid: Grid

    def __post_init__(self):
        if not (_as_fraction(self.lambda1) > 0 and _as_fraction(self.lambda2) > 0):
            raise ValueError("lambda1 and lambda2 must be positive")

    @property
    def l1(self) -> float:
        return float(_as_fraction(self.lambda1))

    @property
    def l2(self) -> float:
        return float(_as_fraction(self.lambda2))

    @cached_property
    def l1_iv(self) -> RInterval:
        return exact_ival(self.lambda1)

    @cached_property
    def l2_iv(self) -> RInterval:
        return exact_ival(self.lambda2)

    @property
    def d(self) -> float:
        return self.grid.d

    @property
    def a1(self) -> float:
        return float(np.sqrt(1.0 / self.l1))

    @property
    def a2(self) -> float:
        return float(np.sqrt(self.l2))

    def with_lambda2(self, lambda2) -> "GSParams":
        return GSParams(self.lambda1, lambda2, self.grid)

    def with_grid(self, grid: Grid) -> "GSParams":
        return GSParams(self.lambda1, self.lambda2, grid)


def params_from_physical(thetaF, thetaK, deltaU, deltaV, grid: Grid | None = None) -> GSParams:
    """Map the physical feed/kill rates and diffusivities to ``(lambda1, lambda2)``."""
    vals = [_as_fraction(v) for v in (thetaF, thetaK, deltaU, deltaV)]
    if any(v <= 0 for v in vals):
        raise ValueError("physical parameters must be positive")
    tF, tK, dU, dV = vals
    lam2 = tF / (tF + tK) ** 2
    lam1 = (tF + tK) * dV / dU
    return GSParams(lam1, lam2, grid if grid is not None else Grid(1.0, 1, 1))


@dataclass
class SymbolArrays:
    """Symbol entries per reduced index up to some order (float or interval)."""

    l11: np.ndarray | RInterval
    l22: np.ndarray | RInterval
    l21: float | RInterval

    @property
    def inv11(self):
        return 1.0 / self.l11

    @property
    def inv22(self):
        return 1.0 / self.l22

    @property
    def inv21(self):
        """The (2,1) entry of the inverse symbol, ``-l21 / (l11 l22)``."""
        return -(self.l21 / (self.l11 * self.l22)) if isinstance(self.l11, RInterval) \
            else -self.l21 / (self.l11 * self.l22)


def _freq2(params: GSParams, n1, n2, interval: bool):
    """|2 pi k|^2 = pi^2 |n|^2 / d^2."""
    nn = np.asarray(n1, dtype=np.float64) ** 2 + np.asarray(n2, dtype=np.float64) ** 2
    if interval:
        p = pi_const()
        return p.sqr() * nn / ival(params.d).sqr()
    return (np.pi / params.d) ** 2 * nn


def symbol_arrays(params: GSParams, order: int, interval: bool = False) -> SymbolArrays:
    n1, n2 = reduced_indices(order)
    f = _freq2(params, n1, n2, interval)
    if interval:
        l1, l2 = params.l1_iv, params.l2_iv
        return SymbolArrays(-(l1 * f) - 1.0, -f - l2, l2 * l1 - 1.0)
    l1, l2 = params.l1, params.l2
    return SymbolArrays(-l1 * f - 1.0, -f - l2, l2 * l1 - 1.0)


def symbol(params: GSParams, n, interval: bool = False) -> dict:
    """Symbol and inverse-symbol entries at one index ``n`` (any integer pair)."""
    f = _freq2(params, n[0], n[1], interval)
    if interval:
        l1, l2 = params.l1_iv, params.l2_iv
        l11 = -(l1 * f) - 1.0
        l22 = -f - l2
        l21 = l2 * l1 - 1.0
        return {"l11": l11, "l22": l22, "l21": l21, "inv11": 1.0 / l11,
                "inv22": 1.0 / l22, "inv21": -(l21 / (l11 * l22))}
    l1, l2 = params.l1, params.l2
    l11 = -l1 * f - 1.0
    l22 = -f - l2
    l21 = l2 * l1 - 1.0
    return {"l11": float(l11), "l22": float(l22), "l21": l21, "inv11": float(1 / l11),
            "inv22": float(1 / l22), "inv21": float(-l21 / (l11 * l22))}


def apply_L(params: GSParams, U: PairSeq) -> PairSeq:
    interval = U.first.is_interval or U.second.is_interval
    s = symbol_arrays(params, U.order, interval)
    u1, u2 = U.first.coeffs, U.second.coeffs
    if interval:
        u1, u2 = ival(u1), ival(u2)
        return PairSeq(U.first._like(s.l11 * u1), U.second._like(u1 * s.l21 + s.l22 * u2))
    return PairSeq(U.first._like(s.l11 * u1), U.second._like(s.l21 * u1 + s.l22 * u2))


def apply_L_inv(params: GSParams, U: PairSeq) -> PairSeq:
    interval = U.first.is_interval or U.second.is_interval
    s = symbol_arrays(params, U.order, interval)
    u1, u2 = U.first.coeffs, U.second.coeffs
    if interval:
        u1, u2 = ival(u1), ival(u2)
    return PairSeq(U.first._like(s.inv11 * u1), U.second._like(s.inv21 * u1 + s.inv22 * u2))


def _lam1(params: GSParams, interval: bool):
    return params.l1_iv if interval else params.l1


def _one(order: int, grid, interval: bool) -> D4Seq:
    d = D4Seq.delta((0, 0), order, grid)
    return d.to_interval() if interval else d


def G_full(params: GSParams, U: PairSeq) -> PairSeq:
    """Nonlinearity ``((U2 + 1 - lambda1 U1) * U1 * U1, 0)`` of order 3M."""
    interval = U.first.is_interval or U.second.is_interval
    M = U.order
    u1, u2 = U.first, U.second
    inner = u2 + _one(M, U.grid, interval) - u1.scale(_lam1(params, interval))
    g1 = conv(conv(inner, u1), u1)
    zero = D4Seq.zeros(3 * M, U.grid)
    return PairSeq(g1, zero.to_interval() if interval else zero)


def F_full(params: GSParams, U: PairSeq) -> PairSeq:
    """``F(U) = LU + G(U)`` at order 3M."""
    LU = apply_L(params, U)
    G = G_full(params, U)
    return PairSeq(G.first + LU.first, G.second + LU.second)


@dataclass
class DGData:
    """Sequences defining the derivative of G at U0 and the quadratic part."""

    V1: D4Seq
    V2: D4Seq
    Q: D4Seq

    def truncated(self, N: int) -> tuple[D4Seq, D4Seq]:
        """``V^N``: both sequences truncated to order 2N."""
        return resize(self.V1, min(2 * N, self.V1.order)), resize(self.V2, min(2 * N, self.V2.order))


def dg_sequences(params: GSParams, U0: PairSeq) -> DGData:
    """V1 = 2 U2*U1 + 2 U1 - 3 lambda1 U1*U1, V2 = U1*U1 and Q = U2 + 1 - 3 lambda1 U1."""
    interval = U0.first.is_interval or U0.second.is_interval
    lam1 = _lam1(params, interval)
    u1, u2 = U0.first, U0.second
    u11 = conv(u1, u1)
    V1 = conv(u2, u1).scale(2.0) + u1.scale(2.0) - u11.scale(lam1 * 3.0 if interval else 3.0 * lam1)
    V2 = u11
    Q = u2 + _one(U0.order, U0.grid, interval) - u1.scale(lam1 * 3.0 if interval else 3.0 * lam1)
    return DGData(V1, V2, Q)


def dg_action(params: GSParams, U0: PairSeq, H: PairSeq) -> PairSeq:
    """``DG(U0) H = (V1*H1 + V2*H2, 0)``."""
    dg = dg_sequences(params, U0)
    first = conv(dg.V1, H.first) + conv(dg.V2, H.second)
    zero = D4Seq.zeros(first.order, U0.grid)
    return PairSeq(first, zero.to_interval() if first.is_interval else zero)
