"""The scalar case ``lambda1 lambda2 = 1``.

The second equation forces ``u2 = 0`` and the system collapses to
``lambda1 Lap u - u + u^2 - lambda1 u^3 = 0``.  On Fourier coefficients this
is ``F_r(U) = L11 U + G_r(U)`` with ``G_r(U) = U*U - lambda1 U*U*U``.  The
approximate inverse is ``B_r = pi_N + B_r^N`` and all bounds live in the
single-component space, with ``N0 = N``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .approxinv import ApproxInverse, build_Br, convmat
from .bounds import (
    BoundReport,
    DecayConstants,
    KappaSet,
    _a_values,
    _green_constants,
    _sandwich,
    _sqrt_alpha,
    _sym,
    _tail_gram,
    _zu1_prefactor,
    cosh_form,
    decay_constants,
    kappas,
    lattice_constant,
    phi,
    psd_norm,
    strip_constant,
    tail_max,
    tilde,
)
from .d4seq import D4Seq, Grid, alphas, conv, conv_operator, resize, seq_norm, tri_size
from .interval import RInterval, isqrt, ival, matmul
from .model import GSParams, _as_fraction, symbol_arrays

__all__ = [
    "ReducedProblem",
    "as_params",
    "reduced_G",
    "reduced_F",
    "reduced_V0",
    "reduced_build_Br",
    "ReducedBounds",
    "reduced_bounds",
    "reduced_z2_at",
]


@dataclass(frozen=True)
class ReducedProblem:
    """``lambda1`` and the grid; ``lambda2 = 1 / lambda1`` is implied."""

    lambda1: str | float | Fraction
    grid: Grid

    @property
    def params(self) -> GSParams:
        l1 = _as_fraction(self.lambda1)
        return GSParams(l1, 1 / l1, self.grid)


def as_params(problem: ReducedProblem | GSParams) -> GSParams:
    return problem.params if isinstance(problem, ReducedProblem) else problem


def _lam1(params: GSParams, interval: bool):
    return params.l1_iv if interval else params.l1


def reduced_G(problem: ReducedProblem | GSParams, U: D4Seq) -> D4Seq:
    """``U*U - lambda1 U*U*U`` at order 3M."""
    params = as_params(problem)
    u2 = conv(U, U)
    return resize(u2, 3 * U.order) - conv(u2, U).scale(_lam1(params, U.is_interval))


def reduced_F(problem: ReducedProblem | GSParams, U: D4Seq) -> D4Seq:
    """``L11 U + G_r(U)`` at order 3M."""
    params = as_params(problem)
    s = symbol_arrays(params, U.order, U.is_interval)
    LU = resize(U._like(s.l11 * (ival(U.coeffs) if U.is_interval else U.coeffs)), 3 * U.order)
    return reduced_G(params, U) + LU


def reduced_V0(problem: ReducedProblem | GSParams, U: D4Seq) -> D4Seq:
    """``V0 = 2 U - 3 lambda1 U*U``, the sequence of ``DG_r(U)``."""
    params = as_params(problem)
    lam = _lam1(params, U.is_interval)
    return resize(U.scale(2.0), 2 * U.order) - conv(U, U).scale(lam * 3.0 if U.is_interval else 3.0 * lam)


def reduced_build_Br(problem: ReducedProblem | GSParams, U0: D4Seq, squarings: int = 8) -> ApproxInverse:
    """Numerical inverse of ``pi^N (I + V0 L11^{-1}) pi^N`` with a certified norm."""
    return build_Br(as_params(problem), U0, squarings)


# ----------------------------------------------------------------------------
# bounds


@dataclass
class ReducedBounds:
    Y0: BoundReport
    Z2: BoundReport
    Z1: BoundReport
    Zu1: BoundReport
    Zu2: BoundReport
    Z1_total: BoundReport
    br_norm: RInterval
    kappas: KappaSet
    decay: DecayConstants


def reduced_z2_at(report: BoundReport, s) -> RInterval:
    return report.parts["const"] + report.parts["slope"] * ival(s)


def _y0(params: GSParams, U: D4Seq, binv: ApproxInverse) -> BoundReport:
    N = params.grid.N
    F = reduced_F(params, U)
    t = tri_size(N)
    f = ival(F.coeffs)
    g = matmul(ival(binv.b11), f[:t].reshape(-1, 1)).reshape(-1)
    head = (g.sqr() * alphas(N)).sum()
    tail = (f[t:].sqr() * alphas(F.order)[t:]).sum()
    total = isqrt(head + tail) * isqrt(ival(params.grid.area))
    return BoundReport(total, {"head": isqrt(head), "tail": isqrt(tail)})


def _z2(params: GSParams, U: D4Seq, binv: ApproxInverse, kap: KappaSet, sq: int,
        kappa2: RInterval | None = None) -> BoundReport:
    """Affine ``Z2(s) = const + slope * s``; ``kappa2`` may be replaced by a periodic majorant."""
    N = params.grid.N
    k2 = kap.kappa2 if kappa2 is None else kappa2
    l1 = params.l1_iv
    bmax = binv.b11_norm_max1
    Bt = tilde(binv.b11, N, N)
    UU = conv(U, U)
    # B U0 U0* B* restricted to the finite block is B (U0*U0 compressed) B*
    St = _sym(tilde(convmat(UU, N), N, N))
    ub2 = psd_norm(_sandwich(Bt, St), sq)
    u1 = seq_norm(U, "l1")
    mixed = isqrt(ub2 + u1.sqr())
    const = bmax * k2 * 2.0 + l1 * 6.0 * mixed * k2
    slope = bmax * l1 * 3.0 * k2.sqr()
    return BoundReport(const, {"const": const, "slope": slope, "BU0": isqrt(ub2), "U0_l1": u1, "mixed": mixed})


def _z1(params: GSParams, V0: D4Seq, binv: ApproxInverse, sq: int) -> BoundReport:
    N = params.grid.N
    t = tri_size(N)
    s = symbol_arrays(params, N, interval=True)
    Bt = tilde(binv.b11, N, N)
    M = ival(np.eye(t)) + convmat(V0, N) * s.inv11.reshape(1, -1)
    E = ival(np.eye(t)) - matmul(ival(binv.b11), M)
    Et = tilde(E, N, N)
    z11 = isqrt(psd_norm(_sym(matmul(Et, Et.T)), sq))

    top = N + V0.order
    i11 = tail_max("inv11", params, N)
    G = _tail_gram(V0, top, N, N)
    z12 = i11 * isqrt(psd_norm(_sandwich(Bt, G), sq))

    t0, t1 = tri_size(N), tri_size(top)
    P = conv_operator(V0, top, N, rows=slice(t0, t1)) * s.inv11.reshape(1, -1)
    Pt = (P * _sqrt_alpha(top)[t0:t1].reshape(-1, 1)) / _sqrt_alpha(N).reshape(1, -1)
    z13 = isqrt(psd_norm(_sym(matmul(Pt.T, Pt)), sq))

    z14 = i11 * seq_norm(V0, "l1")
    z1 = phi(z11, z12, z13, z14)
    return BoundReport(z1, {"Z11": z11, "Z12": z12, "Z13": z13, "Z14": z14})


def _zu(params: GSParams, V0: D4Seq, dc: DecayConstants) -> tuple[BoundReport, BoundReport]:
    a1, _ = _a_values(params)
    grid = params.grid
    d, area = grid.d, grid.area
    e1 = cosh_form(V0, a1, d)
    zu1 = _zu1_prefactor(dc.C0_f11, a1, d, area) * e1
    C1 = lattice_constant(a1, d)
    c11, c21 = _green_constants(dc.C11_f11, dc.C12_f11, a1, d, area)
    cv = strip_constant(V0, grid)
    zu2 = C1 * 4.0 / isqrt(ival(area)) * (c11 * e1 + c21 * cv)
    return (
        BoundReport(zu1, {"E1V0": e1}),
        BoundReport(zu2, {"C1": C1, "Cv0": cv, "C11": c11, "C21": c21}),
    )


def reduced_bounds(problem: ReducedProblem | GSParams, U0: D4Seq, binv: ApproxInverse,
                   squarings: int = 6) -> ReducedBounds:
    """All bounds of the scalar problem for a traced candidate ``U0`` of order N."""
    params = as_params(problem)
    N = params.grid.N
    if U0.order > N:
        raise ValueError("the scalar problem uses N0 = N: the candidate order must not exceed N")
    U = resize(U0, N).to_interval()
    kap = kappas(params)
    dc = decay_constants(params)
    V0 = reduced_V0(params, U)
    y0 = _y0(params, U, binv)
    z2 = _z2(params, U, binv, kap, squarings)
    z1 = _z1(params, V0, binv, squarings)
    zu1, zu2 = _zu(params, V0, dc)
    zu = isqrt(zu1.value.sqr() + zu2.value.sqr())
    total = z1.value + binv.b11_norm_max1 * zu
    z1t = BoundReport(total, {"Z1": z1.value, "Zu": zu})
    return ReducedBounds(y0, z2, z1, zu1, zu2, z1t, binv.b11_norm, kap, dc)
