"""Rigorous bounds for the full two-component problem.

Every bound is an ``RInterval`` whose upper endpoint is the certified value.
Finite-dimensional operator norms are taken in the alpha-weighted l2 space;
they are evaluated on the conjugated matrices ``D^{1/2} X D^{-1/2}`` with
``D = diag(alpha)``, which turns weighted adjoints into transposes.

Quadratic forms whose values are far below the size of the coefficients
(strip norms near the boundary, cosh-weighted norms) are evaluated exactly on
the float midpoints with high-precision ``mpmath.iv`` arithmetic; the interval
radii of the inputs are then added through the triangle inequality.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from mpmath import iv

from .approxinv import ApproxInverse, convmat
from .d4seq import (
    D4Seq,
    PairSeq,
    alphas,
    conv,
    conv_operator,
    project,
    reduced_indices,
    seq_norm,
    tri_size,
)
from .interval import (
    RInterval,
    _mp_to_bounds,
    imax,
    imin,
    isqrt,
    iter_chunks,
    ival,
    ival_fn,
    matmul,
    opnorm2_ub,
    pi_const,
)
from .model import F_full, GSParams, dg_sequences, symbol, symbol_arrays

__all__ = [
    "KappaSet",
    "kappas",
    "DecayConstants",
    "decay_constants",
    "phi",
    "riemann_tail",
    "lattice_constant",
    "tail_max",
    "strip_norms",
    "cosh_form",
    "BoundReport",
    "FullContext",
    "prepare_full",
    "bound_Y0",
    "bound_Z2",
    "bound_Z1_finite",
    "bound_Zu1",
    "bound_Zu2",
    "bound_Z1_total",
    "FullBounds",
    "full_bounds",
    "weighted_norm",
    "psd_norm",
]

_HP_PREC = 256


def _up(x) -> float:
    return float(ival(x).hi)


def _pt(x: float) -> RInterval:
    return RInterval(float(x), float(x))


# ----------------------------------------------------------------------------
# closed-form constants


@dataclass
class KappaSet:
    """Embedding constants: ``kappa2`` for the scalar algebra, ``kappa0`` for
    products of the two components and ``kappa3`` for the cubic term."""

    kappa0: RInterval
    kappa2: RInterval
    kappa3: RInterval


def kappas(params: GSParams) -> KappaSet:
    l1, l2 = params.l1_iv, params.l2_iv
    p = pi_const()
    k2 = 1.0 / (isqrt(l1 * p) * 2.0)
    prod = l2 * l1
    s2 = isqrt(ival(2.0))
    k3 = s2 / (p * 4.0) * imin(1.0 / prod, 1.0 / isqrt(prod))
    half = 1.0 / (isqrt(p * l2) * 2.0)
    first = isqrt((l1 * k2 + half).sqr() + 1.0 / (p * l2 * 4.0))
    second = s2 * half
    third = k2 / l2 * isqrt((1.0 - prod).sqr() + 1.0)
    k0 = imin(imax(first, second), third)
    return KappaSet(k0, k2, k3)


@dataclass
class DecayConstants:
    """Constants in the pointwise exponential decay of the kernels of
    ``L11^{-1}``, ``L22^{-1}`` and of their first derivatives."""

    C0_f11: RInterval
    C0_f22: RInterval
    C11_f11: RInterval
    C12_f11: RInterval
    C11_f22: RInterval
    C12_f22: RInterval


def _a_values(params: GSParams) -> tuple[RInterval, RInterval]:
    return isqrt(1.0 / params.l1_iv), isqrt(params.l2_iv)


def decay_constants(params: GSParams) -> DecayConstants:
    a1, a2 = _a_values(params)
    p = pi_const()
    e54 = ival_fn("exp", ival(1.25))
    sp2 = isqrt(p / 2.0)
    s2 = isqrt(ival(2.0))

    def c0(a):
        return imax(e54 * 2.0 * isqrt(isqrt(2.0 / a)), isqrt(p / (isqrt(a) * 2.0)))

    def c11(a):
        return sp2 / isqrt(a + 1.0) * (1.0 + 1.0 / a)

    def c12(a):
        return sp2 * (s2 * a + 1.0)

    a1sq = a1.sqr()
    return DecayConstants(
        C0_f11=a1sq * c0(a1),
        C0_f22=c0(a2),
        C11_f11=a1sq * a1 * c11(a1),
        C12_f11=a1sq * c12(a1),
        C11_f22=a2 * c11(a2),
        C12_f22=c12(a2),
    )


def phi(x1, x2, x3, x4) -> RInterval:
    """Block-operator norm majorant ``min{max(x1,x4)+max(x2,x3), sqrt(sum x_i^2)}``."""
    x1, x2, x3, x4 = (ival(x) for x in (x1, x2, x3, x4))
    a = imax(x1, x4) + imax(x2, x3)
    b = isqrt(x1.sqr() + x2.sqr() + x3.sqr() + x4.sqr())
    return imin(a, b)


def riemann_tail(s, t, d) -> RInterval:
    """Upper bound of ``sup_{q >= d} (4q^2)^{-1} sum_n g(n / 2q)^2``.

    Here ``g(xi) = 1 / (s |2 pi xi|^2 + t)``, so that ``1/|l11|`` is
    ``(s, t) = (lambda1, 1)`` and ``1/|l22|`` is ``(1, lambda2)``.  The bound
    is ``||g||^2 + g(0)^2 / (4 d^2) + (2/d) int_0^inf g(x, 0)^2 dx`` with
    ``||g||^2 = 1/(4 pi s t)`` and the axis integral ``1/(8 t^{3/2} s^{1/2})``.
    """
    s, t, d = ival(s), ival(t), ival(d)
    p = pi_const()
    return 1.0 / (p * s * t * 4.0) + 1.0 / (d.sqr() * t.sqr() * 4.0) \
        + 1.0 / (d * t * isqrt(t) * isqrt(s) * 4.0)


def lattice_constant(a, d) -> RInterval:
    """``sqrt(sum_{n in Z^2} (a^2 + |pi n / d|^2)^{-2})`` bounded through :func:`riemann_tail`.

    Equals ``sqrt(d^2/(pi a^2) + 1/a^4 + d/a^3)``.
    """
    a, d = ival(a), ival(d)
    return isqrt(d.sqr() * 4.0 * riemann_tail(1.0, a.sqr(), d))


def tail_max(name: str, params: GSParams, N: int) -> RInterval:
    """Supremum over indices with ``n1 > N`` of a symbol expression.

    Supported: ``inv11`` (``1/|l11|``), ``inv22`` (``1/|l22|``) and ``inv21``
    (``|l21|/|l11 l22|``).  Each is nonincreasing in ``|n|^2`` because
    ``|l11|``, ``|l22|`` are increasing and ``l21`` is constant, so the
    supremum is attained at ``n = (N+1, 0)``.
    """
    s = symbol(params, (N + 1, 0), interval=True)
    if name == "inv11":
        return s["inv11"].abs()
    if name == "inv22":
        return s["inv22"].abs()
    if name == "inv21":
        return s["inv21"].abs()
    raise ValueError(f"tail_max: unsupported expression {name!r}")


# ----------------------------------------------------------------------------
# weighted operator norms


def _sqrt_alpha(order: int) -> RInterval:
    return isqrt(ival(alphas(order)))


def tilde(X, row_order: int, col_order: int) -> RInterval:
    """``D_r^{1/2} X D_c^{-1/2}`` as an interval matrix."""
    X = ival(X)
    sr = _sqrt_alpha(row_order).reshape(-1, 1)
    sc = _sqrt_alpha(col_order).reshape(1, -1)
    return (X * sr) / sc


def _tilde_blocks(X, row_order: int, col_order: int, row_blocks: int, col_blocks: int) -> RInterval:
    X = ival(X)
    sr = RInterval(np.tile(_sqrt_alpha(row_order).lo, row_blocks), np.tile(_sqrt_alpha(row_order).hi, row_blocks))
    sc = RInterval(np.tile(_sqrt_alpha(col_order).lo, col_blocks), np.tile(_sqrt_alpha(col_order).hi, col_blocks))
    return (X * sr.reshape(-1, 1)) / sc.reshape(1, -1)


def psd_norm(S: RInterval, squarings: int = 6) -> RInterval:
    """Norm of a symmetric positive semidefinite matrix given in conjugated form."""
    return opnorm2_ub(S, selfadjoint=True, squarings=squarings)


def weighted_norm(Xt: RInterval, squarings: int = 6) -> RInterval:
    """Spectral norm of an already conjugated (possibly rectangular) matrix."""
    r, c = Xt.shape
    gram = matmul(Xt.T, Xt) if c <= r else matmul(Xt, Xt.T)
    n2 = psd_norm(gram, squarings)
    return isqrt(n2)


def _sym(S: RInterval) -> RInterval:
    """Intersection of S and S^T (the enclosed exact matrix is symmetric)."""
    return RInterval(np.maximum(S.lo, S.lo.T), np.minimum(S.hi, S.hi.T))


def _sandwich(Bt: RInterval, St: RInterval) -> RInterval:
    """``Bt St Bt^T`` for symmetric ``St``."""
    return _sym(matmul(matmul(Bt, St), Bt.T))


def _tail_gram(W: D4Seq, row_top: int, col_order: int, N: int, chunk: int = 4096) -> RInterval:
    """Conjugated Gram matrix ``P~^T P~`` of the rows ``N < n1 <= row_top`` of ``H -> W*H``."""
    t0, t1 = tri_size(N), tri_size(row_top)
    sa_r = _sqrt_alpha(row_top)
    sc = _sqrt_alpha(col_order).reshape(1, -1)
    Wi = W.to_interval()
    gram = None
    for sl in iter_chunks(t1 - t0, chunk):
        rows = slice(t0 + sl.start, t0 + sl.stop)
        P = conv_operator(Wi, row_top, col_order, rows=rows)
        Pt = (P * sa_r[rows].reshape(-1, 1)) / sc
        g = matmul(Pt.T, Pt)
        gram = g if gram is None else gram + g
    return _sym(gram)


# ----------------------------------------------------------------------------
# high-precision quadratic forms on the unfolded cosine coefficients


def _folded(V: D4Seq) -> tuple[np.ndarray, np.ndarray]:
    """Cosine-basis array ``c_k1 c_k2 v_(k1,k2)`` (c_0 = 1, c_k = 2) of the midpoint, and radii."""
    K = V.order
    n1, n2 = reduced_indices(K)
    if V.is_interval:
        m, r = V.coeffs.midrad()
    else:
        m, r = np.asarray(V.coeffs, dtype=np.float64), np.zeros(tri_size(K))
    A = np.zeros((K + 1, K + 1))
    A[n1, n2] = m
    A[n2, n1] = m
    c = np.where(np.arange(K + 1) == 0, 1.0, 2.0)
    return A * c[:, None] * c[None, :], r


def _iv_matrix(a: np.ndarray):
    return iv.matrix([[iv.mpf(float(x)) for x in row] for row in a])


def _iv_sum_hadamard(A, B) -> object:
    s = iv.mpf(0)
    for i in range(A.rows):
        for j in range(A.cols):
            s += A[i, j] * B[i, j]
    return s


def _hankel_pair(fn, K: int):
    """Matrices ``(f(k-k') + f(k+k'))/2`` and ``(f(k-k') - f(k+k'))/2`` for k, k' in 0..K."""
    vals = [fn(k) for k in range(2 * K + 1)]
    P = iv.matrix(K + 1, K + 1)
    M = iv.matrix(K + 1, K + 1)
    for i in range(K + 1):
        for j in range(K + 1):
            a = vals[abs(i - j)]
            b = vals[i + j]
            P[i, j] = (a + b) / 2
            M[i, j] = (a - b) / 2
    return P, M


def _upper(v) -> float:
    lo, hi = _mp_to_bounds(v)
    return max(hi, 0.0)


def strip_norms(V: D4Seq, d: float) -> dict[str, RInterval]:
    """Norms of ``w = gamma^dagger(V)`` on the corner square ``S = (d-1, d)^2``.

    Returns upper bounds of ``||1_S w||``, ``||1_S d_x1 w||`` and of the
    boundary-line norm ``||1_(d-1,d) w(d, .)||``.  Uses
    ``int_{d-1}^{d} cos(pi k x/d) dx = J(k)`` with ``J(k) = (d/(pi k)) (-1)^k sin(pi k/d)``.
    """
    if d < 1:
        raise ValueError("the strip (d-1, d) needs d >= 1")
    A, rad = _folded(V)
    K = V.order
    old = iv.prec
    iv.prec = _HP_PREC
    try:
        dd = iv.mpf(float(d))

        def J(k):
            if k == 0:
                return iv.mpf(1)
            return dd / (iv.pi * k) * (-1) ** k * iv.sin(iv.pi * k / dd)

        G, S = _hankel_pair(J, K)
        Am = _iv_matrix(A)
        w2 = _iv_sum_hadamard(Am, G * Am * G)
        Bm = _iv_matrix(A * np.arange(K + 1)[:, None])
        dw2 = (iv.pi / dd) ** 2 * _iv_sum_hadamard(Bm, S * Bm * G)
        sign = np.where(np.arange(K + 1) % 2 == 0, 1.0, -1.0)
        b = _iv_matrix((sign @ A).reshape(-1, 1))
        line2 = (b.T * G * b)[0, 0]
        vals = [_upper(iv.sqrt(iv.mpf([0, max(_upper(x), 0.0)]))) for x in (w2, dw2, line2)]
    finally:
        iv.prec = old
    # radii of the inputs: sup-norm of the perturbation over a unit-area square
    a = alphas(K)
    n1, _ = reduced_indices(K)
    sup = float(ival(rad * a).sum().hi)
    dsup = float((ival(rad * a * n1) * (pi_const() / ival(d))).sum().hi)
    w, dw, line = (_pt(v) for v in vals)
    return {
        "w": RInterval(0.0, float((w + sup).hi)),
        "dw": RInterval(0.0, float((dw + dsup).hi)),
        "line": RInterval(0.0, float((line + sup).hi)),
    }


def cosh_form(V: D4Seq, a, d: float) -> RInterval:
    """Upper bound of ``sqrt((V, E * V))`` with ``E`` the coefficients of
    ``1_box (cosh(2 a x1) + cosh(2 a x2)) / 2``.

    By symmetry ``(V, E*V) = |Omega0|^{-1} int v^2 cosh(2 a x1)``, which in the
    cosine basis is ``sum_k2 nu_k2 A[:, k2]^T C A[:, k2]`` with
    ``C = (c(k-k') + c(k+k'))/2`` and ``nu = (1, 1/2, 1/2, ...)``.
    """
    A, rad = _folded(V)
    K = V.order
    a_iv = ival(a)
    old = iv.prec
    iv.prec = _HP_PREC
    try:
        dd = iv.mpf(float(d))
        b = 2 * iv.mpf([float(a_iv.lo), float(a_iv.hi)])
        ex = iv.exp(b * dd)
        sh = (ex - 1 / ex) / 2

        def c(k):
            return (-1) ** k * b * sh / (dd * (b * b + (iv.pi * k / dd) ** 2))

        C, _ = _hankel_pair(c, K)
        Am = _iv_matrix(A)
        CA = C * Am
        total = iv.mpf(0)
        for k2 in range(K + 1):
            col = iv.mpf(0)
            for k1 in range(K + 1):
                col += Am[k1, k2] * CA[k1, k2]
            total += col if k2 == 0 else col / 2
        val = _upper(iv.sqrt(iv.mpf([0, max(_upper(total), 0.0)])))
        e00 = _upper(sh / (b * dd))
    finally:
        iv.prec = old
    sup = float(ival(rad * alphas(K)).sum().hi)
    return RInterval(0.0, float((_pt(val) + ival(sup) * isqrt(ival(e00))).hi))


def strip_constant(V: D4Seq, grid) -> RInterval:
    """``C(w) = |Omega0|^{-1/2} (2 ||1_S d_x1 w|| ||1_S w|| + ||1_(d-1,d) w(d,.)||^2)^{1/2}``.

    The factor 2 comes from ``d/dt w^2 = 2 w d_t w`` in the fundamental theorem
    of calculus on the strip.
    """
    s = strip_norms(V, grid.d)
    inner = s["dw"] * s["w"] * 2.0 + s["line"].sqr()
    return isqrt(inner) / isqrt(ival(grid.area))


# ----------------------------------------------------------------------------
# full-system context


@dataclass
class BoundReport:
    """A certified value with its named constituents."""

    value: RInterval
    parts: dict[str, RInterval] = field(default_factory=dict)

    def upper(self) -> float:
        return float(self.value.hi)


@dataclass
class FullContext:
    """Shared interval data for the full-system bounds."""

    params: GSParams
    U0: PairSeq
    binv: ApproxInverse
    V1: D4Seq
    V2: D4Seq
    Q: D4Seq
    V1N: D4Seq
    V2N: D4Seq
    squarings: int = 6

    @property
    def N(self) -> int:
        return self.params.grid.N

    @property
    def B11t(self) -> RInterval:
        return tilde(self.binv.b11, self.N, self.N)


def prepare_full(params: GSParams, U0: PairSeq, binv: ApproxInverse, squarings: int = 6) -> FullContext:
    Ui = U0.to_interval()
    dg = dg_sequences(params, Ui)
    V1N, V2N = dg.truncated(params.grid.N)
    return FullContext(params, Ui, binv, dg.V1, dg.V2, dg.Q, V1N, V2N, squarings)


def _seq_l2sq(coeffs: RInterval, order: int) -> RInterval:
    return (ival(coeffs).sqr() * alphas(order)).sum()


# ----------------------------------------------------------------------------
# Y0


def bound_Y0(ctx: FullContext) -> BoundReport:
    """``|Omega0|^{1/2} (||B^N pi^N F(U0)||^2 + ||(I - pi^N) F(U0)||^2)^{1/2}``."""
    params, N = ctx.params, ctx.N
    F = F_full(params, ctx.U0)
    K = F.order
    t = tri_size(N)
    f1, f2 = ival(F.first.coeffs), ival(F.second.coeffs)
    head1 = f1[:t].reshape(-1, 1)
    head2 = f2[:t].reshape(-1, 1)
    g1 = matmul(ival(ctx.binv.b11), head1) + matmul(ival(ctx.binv.b12), head2)
    a = alphas(N)
    head = (g1.reshape(-1).sqr() * a).sum() + (head2.reshape(-1).sqr() * a).sum()
    at = alphas(K)[t:]
    tail = (f1[t:].sqr() * at).sum() + (f2[t:].sqr() * at).sum()
    total = isqrt(head + tail) * isqrt(ival(params.grid.area))
    return BoundReport(total, {"head": isqrt(head), "tail": isqrt(tail)})


# ----------------------------------------------------------------------------
# Z2


def bound_Z2(ctx: FullContext, kap: KappaSet | None = None) -> BoundReport:
    """``Z2(r) = const + slope * r`` with ``const = 2 sqrt(k2^2 + 4 k0^2) sqrt(phi(Z21, Z22, Z22, Z23))``
    and ``slope = 3 k3 max{1, ||B11||}``.

    ``W = Q*Q + U01*U01``.  ``Z21 = ||B11 W B11*||`` on the finite block,
    ``Z22 = sqrt(||B11 W pi_N W B11*||)`` and ``Z23 = ||W||_1``.
    """
    params, N = ctx.params, ctx.N
    kap = kap or kappas(params)
    u1 = ctx.U0.first
    W = conv(ctx.Q, ctx.Q) + conv(u1, u1)
    Bt = ctx.B11t
    Wt = _sym(tilde(convmat(W, N), N, N))
    z21 = psd_norm(_sandwich(Bt, Wt), ctx.squarings)
    G = _tail_gram(W, N + W.order, N, N)
    z22 = isqrt(psd_norm(_sandwich(Bt, G), ctx.squarings))
    z23 = seq_norm(W, "l1")
    ph = phi(z21, z22, z22, z23)
    const = isqrt(kap.kappa2.sqr() + kap.kappa0.sqr() * 4.0) * isqrt(ph) * 2.0
    slope = kap.kappa3 * ctx.binv.b11_norm_max1 * 3.0
    return BoundReport(const, {"Z21": z21, "Z22": z22, "Z23": z23, "const": const, "slope": slope})


def z2_at(report: BoundReport, r: float) -> RInterval:
    return report.parts["const"] + report.parts["slope"] * ival(r)


# ----------------------------------------------------------------------------
# Z1 on the periodic problem


def _interval_blocks(ctx: FullContext):
    params, N = ctx.params, ctx.N
    s = symbol_arrays(params, N, interval=True)
    C1 = convmat(ctx.V1N, N)
    C2 = convmat(ctx.V2N, N)
    t = tri_size(N)
    eye = ival(np.eye(t))
    A = eye + C1 * s.inv11.reshape(1, -1) + C2 * s.inv21.reshape(1, -1)
    A12 = C2 * s.inv22.reshape(1, -1)
    return A, A12, s


def bound_Z1_finite(ctx: FullContext) -> BoundReport:
    """``Z1 = phi(Z11, Z12, Z13, Z14)`` for ``||I - B(I + DG^N L^{-1})||``."""
    params, N = ctx.params, ctx.N
    sq = ctx.squarings
    t = tri_size(N)
    A, A12, s = _interval_blocks(ctx)
    B11 = ival(ctx.binv.b11)
    B12 = ival(ctx.binv.b12)
    E1 = ival(np.eye(t)) - matmul(B11, A)
    E2 = -(matmul(B11, A12) + B12)
    E = RInterval(np.hstack([E1.lo, E2.lo]), np.hstack([E1.hi, E2.hi]))
    Et = _tilde_blocks(E, N, N, 1, 2)
    z11 = isqrt(psd_norm(_sym(matmul(Et, Et.T)), sq))

    Bt = ctx.B11t
    top = 3 * N
    G1 = _tail_gram(ctx.V1N, top, N, N)
    G2 = _tail_gram(ctx.V2N, top, N, N)
    m1 = psd_norm(_sandwich(Bt, G1), sq)
    m2 = psd_norm(_sandwich(Bt, G2), sq)
    i11 = tail_max("inv11", params, N)
    i22 = tail_max("inv22", params, N)
    i21 = tail_max("inv21", params, N)
    z12 = isqrt((isqrt(m1) * i11 + isqrt(m2) * i21).sqr() + m2 * i22.sqr())

    # Z13: tail rows of DG^N L^{-1} on the finite part, Gram accumulated by row chunks
    t0, t1 = tri_size(N), tri_size(top)
    sa_r = _sqrt_alpha(top)
    sc = _sqrt_alpha(N)
    sc2 = RInterval(np.tile(sc.lo, 2), np.tile(sc.hi, 2)).reshape(1, -1)
    V1i, V2i = ctx.V1N.to_interval(), ctx.V2N.to_interval()
    gram = None
    for sl in iter_chunks(t1 - t0, 1024):
        rows = slice(t0 + sl.start, t0 + sl.stop)
        P1 = conv_operator(V1i, top, N, rows=rows)
        P2 = conv_operator(V2i, top, N, rows=rows)
        K1 = P1 * s.inv11.reshape(1, -1) + P2 * s.inv21.reshape(1, -1)
        K2 = P2 * s.inv22.reshape(1, -1)
        Kt = RInterval(np.hstack([K1.lo, K2.lo]), np.hstack([K1.hi, K2.hi]))
        Kt = (Kt * sa_r[rows].reshape(-1, 1)) / sc2
        g = matmul(Kt.T, Kt)
        gram = g if gram is None else gram + g
    z13 = isqrt(psd_norm(_sym(gram), sq))

    v1 = seq_norm(ctx.V1N, "l1")
    v2 = seq_norm(ctx.V2N, "l1")
    z14 = isqrt((v1 * i11 + v2 * i21).sqr() + (v2 * i22).sqr())
    z1 = phi(z11, z12, z13, z14)
    return BoundReport(z1, {"Z11": z11, "Z12": z12, "Z13": z13, "Z14": z14, "M1": m1, "M2": m2})


# ----------------------------------------------------------------------------
# unbounded-domain corrections


def _zu1_prefactor(C0, a, d, area) -> RInterval:
    """``sqrt(2) C0 (2 pi)^{1/4} e^{-a d} |Omega0|^{1/2} / a^{3/4}``."""
    a = ival(a)
    p = pi_const()
    q = isqrt(isqrt(p * 2.0))
    a34 = isqrt(a) * isqrt(isqrt(a))
    return isqrt(ival(2.0)) * C0 * q * ival_fn("exp", -(a * ival(d))) * isqrt(ival(area)) / a34


def bound_Zu1(ctx: FullContext, dc: DecayConstants | None = None) -> BoundReport:
    """``Zu1 = sqrt((Zu11 + Zu13)^2 + Zu12^2)`` for ``||1_{outside} DG^N L^{-1}||``.

    For the cross kernel the bound ``|f3| <= K0(a1 |x|) = |f11| / a1^2`` is
    used when ``1/lambda1 <= lambda2`` (factor ``lambda1``); the displayed
    statement carries ``lambda2`` there, which is larger whenever
    ``lambda2 >= lambda1`` and remains a valid but looser bound.
    """
    params = ctx.params
    dc = dc or decay_constants(params)
    a1, a2 = _a_values(params)
    d, area = params.d, params.grid.area
    p1 = _zu1_prefactor(dc.C0_f11, a1, d, area)
    p2 = _zu1_prefactor(dc.C0_f22, a2, d, area)
    e11 = cosh_form(ctx.V1N, a1, d)
    e22 = cosh_form(ctx.V2N, a2, d)
    zu11 = p1 * e11
    zu12 = p2 * e22
    inv_l1 = 1.0 / params.l1_iv
    branch_a = float(inv_l1.lo) >= float(params.l2_iv.hi)
    branch_b = float(inv_l1.hi) <= float(params.l2_iv.lo)
    cand = []
    if not branch_b:
        cand.append(zu12)
    e21 = None
    if not branch_a:
        e21 = cosh_form(ctx.V2N, a1, d)
        cand.append(params.l1_iv * p1 * e21)
    zu13 = imax(*cand)
    zu1 = isqrt((zu11 + zu13).sqr() + zu12.sqr())
    parts = {"Zu11": zu11, "Zu12": zu12, "Zu13": zu13, "E1V1": e11, "E2V2": e22}
    if e21 is not None:
        parts["E1V2"] = e21
    return BoundReport(zu1, parts)


def _green_constants(C11, C12, a, d, area) -> tuple[RInterval, RInterval]:
    a = ival(a)
    sa = isqrt(ival(area))
    c1 = sa * 2.0 * ival_fn("exp", -(a * ival(d))) * (C11 * ival_fn("exp", -a) + C12) / a
    ln2 = ival_fn("ln", ival(2.0))
    c2 = sa * 2.0 * C11 * isqrt(ln2.sqr() + ln2 * 2.0 + 2.0)
    return c1, c2


def bound_Zu2(ctx: FullContext, dc: DecayConstants | None = None) -> BoundReport:
    """``Zu2 = sqrt((Zu21 + Zu23)^2 + Zu22^2)`` for the periodization error inside the box."""
    params = ctx.params
    dc = dc or decay_constants(params)
    a1, a2 = _a_values(params)
    grid = params.grid
    d, area = grid.d, grid.area
    sa = isqrt(ival(area))
    C1 = lattice_constant(a1, d)
    C2 = lattice_constant(a2, d)
    c11, c21 = _green_constants(dc.C11_f11, dc.C12_f11, a1, d, area)
    c12, c22 = _green_constants(dc.C11_f22, dc.C12_f22, a2, d, area)
    cv1 = strip_constant(ctx.V1N, grid)
    cv2 = strip_constant(ctx.V2N, grid)
    e11 = cosh_form(ctx.V1N, a1, d)
    e22 = cosh_form(ctx.V2N, a2, d)
    e12 = cosh_form(ctx.V2N, a1, d)
    zu21 = C1 * 4.0 / sa * (c11 * e11 + c21 * cv1)
    zu22 = C2 * 4.0 / sa * (c12 * e22 + c22 * cv2)
    zu23 = imin(C1, C2) * (zu22 / C2 + params.l1_iv * 4.0 / sa * (c11 * e12 + c21 * cv2))
    zu2 = isqrt((zu21 + zu23).sqr() + zu22.sqr())
    return BoundReport(zu2, {
        "Zu21": zu21, "Zu22": zu22, "Zu23": zu23, "C1": C1, "C2": C2,
        "Cv1": cv1, "Cv2": cv2,
    })


# ----------------------------------------------------------------------------
# assembly


def bound_Z1_total(ctx: FullContext, z1: BoundReport, zu1: BoundReport, zu2: BoundReport) -> BoundReport:
    """``Z1 + max{1,||B11||} (Zu + phi(1, 0, |l1 l2 - 1|/l2, 1/l2) sqrt(||V1^N-V1||_1^2 + ||V2^N-V2||_1^2))``."""
    params, N = ctx.params, ctx.N
    zu = isqrt(zu1.value.sqr() + zu2.value.sqr())
    l1, l2 = params.l1_iv, params.l2_iv
    ph = phi(1.0, 0.0, (l1 * l2 - 1.0).abs() / l2, 1.0 / l2)
    K = 2 * N
    t1 = project(ctx.V1, K, "tail") if ctx.V1.order > K else None
    t2 = project(ctx.V2, K, "tail") if ctx.V2.order > K else None
    d1 = seq_norm(t1, "l1") if t1 is not None else ival(0.0)
    d2 = seq_norm(t2, "l1") if t2 is not None else ival(0.0)
    trunc = ph * isqrt(d1.sqr() + d2.sqr())
    bmax = ctx.binv.b11_norm_max1
    total = z1.value + bmax * (zu + trunc)
    return BoundReport(total, {"Zu": zu, "trunc": trunc, "Z1": z1.value})


@dataclass
class FullBounds:
    Y0: BoundReport
    Z2: BoundReport
    Z1: BoundReport
    Zu1: BoundReport
    Zu2: BoundReport
    Z1_total: BoundReport
    b11_norm: RInterval
    kappas: KappaSet
    decay: DecayConstants


def full_bounds(params: GSParams, U0: PairSeq, binv: ApproxInverse, squarings: int = 6) -> FullBounds:
    ctx = prepare_full(params, U0, binv, squarings)
    kap = kappas(params)
    dc = decay_constants(params)
    y0 = bound_Y0(ctx)
    z2 = bound_Z2(ctx, kap)
    z1 = bound_Z1_finite(ctx)
    zu1 = bound_Zu1(ctx, dc)
    zu2 = bound_Zu2(ctx, dc)
    z1t = bound_Z1_total(ctx, z1, zu1, zu2)
    return FullBounds(y0, z2, z1, zu1, zu2, z1t, binv.b11_norm, kap, dc)
