"""Property suites with fixed seeds and the trial counts of the acceptance criteria.

Each ``check_*`` function raises ``AssertionError`` on the first violation and
returns a short summary string otherwise.
"""
from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np

from gscap.bounds import phi
from gscap.d4seq import (
    D4Seq,
    Grid,
    PairSeq,
    conv,
    eval_grid,
    fold_full,
    seq_norm,
    trace_project,
    tri_size,
    unfold,
)
from gscap.interval import RInterval, ival, ival_fn, opnorm2_ub
from gscap.model import G_full, GSParams, dg_action
from gscap.periodic import check_radius
from gscap.proof import RadiiError, radii_find

GRID = Grid(3.0, 6, 6)


def _int_seq(rng, order):
    return D4Seq(rng.integers(-9, 10, tri_size(order)).astype(float), order, GRID)


def exact_full_conv(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full 2-D convolution of integer-valued arrays in Python integers."""
    A = a.astype(np.int64).astype(object)
    B = b.astype(np.int64).astype(object)
    ra, ca = A.shape
    rb, cb = B.shape
    out = np.zeros((ra + rb - 1, ca + cb - 1), dtype=object)
    for i in range(ra):
        for j in range(ca):
            if A[i, j]:
                out[i:i + rb, j:j + cb] += A[i, j] * B
    return out


def check_conv_oracle(rng, trials: int = 200) -> str:
    for _ in range(trials):
        p, q = (int(x) for x in rng.integers(0, 7, 2))
        U, V = _int_seq(rng, p), _int_seq(rng, q)
        ref = exact_full_conv(unfold(U), unfold(V)).astype(float)
        got = conv(U, V)
        assert np.array_equal(got.coeffs, fold_full(ref, GRID).coeffs), (p, q)
        iv = conv(U.to_interval(), V.to_interval())
        assert np.all(iv.coeffs.contains(got.coeffs))
    return f"{trials} pairs exact"


def check_parseval_young(rng, trials: int = 100) -> str:
    for _ in range(trials):
        p, q = (int(x) for x in rng.integers(0, 7, 2))
        U = D4Seq(rng.standard_normal(tri_size(p)), p, GRID)
        V = D4Seq(rng.standard_normal(tri_size(q)), q, GRID)
        full = unfold(U)
        assert math.isclose(seq_norm(U, "l2") ** 2, float(np.sum(full * full)), rel_tol=1e-12)
        assert seq_norm(conv(U, V), "l2") <= seq_norm(U, "l2") * seq_norm(V, "l1") + 1e-12
    return f"{trials} pairs"


def check_trace_kernel(rng, trials: int = 50) -> str:
    worst = 0.0
    for _ in range(trials):
        order = int(rng.integers(2, 9))
        d = float(rng.uniform(1.0, 8.0))
        grid = Grid(d, order, order)
        params = GSParams(Fraction(1, 9), Fraction(int(rng.integers(5, 12))), grid)
        t = tri_size(order)
        U = PairSeq(D4Seq(rng.standard_normal(t), order, grid), D4Seq(rng.standard_normal(t), order, grid))
        P = trace_project(U, params)
        ts = np.linspace(-d, d, 64)
        for raw, comp in ((U.first, P.first), (U.second, P.second)):
            b = float(np.max(np.abs(eval_grid(comp, [d], ts))))
            ratio = b / seq_norm(raw, "l1")
            worst = max(worst, ratio)
            assert ratio <= 1e-9, ratio
    return f"{trials} candidates, worst {worst:.1e}"


def check_phi_majorization(rng, trials: int = 50) -> str:
    for _ in range(trials):
        n = int(rng.integers(1, 7))
        blocks = [rng.standard_normal((n, n)) * rng.uniform(0, 3) for _ in range(4)]
        norms = [np.linalg.norm(b, 2) * (1 + 1e-14) for b in blocks]
        full = np.block([[blocks[0], blocks[1]], [blocks[2], blocks[3]]])
        assert float(phi(*norms).hi) >= np.linalg.norm(full, 2)
    return f"{trials} block operators"


_FNS = {
    "sqrt": (lambda x: np.abs(x) + 1e-300, mpmath.sqrt),
    "exp": (lambda x: np.clip(x, -700, 700), mpmath.exp),
    "ln": (lambda x: np.abs(x) + 1e-300, mpmath.log),
    "cosh": (lambda x: np.clip(x, -700, 700), mpmath.cosh),
    "sinh": (lambda x: np.clip(x, -700, 700), mpmath.sinh),
    "abs": (lambda x: x, abs),
}


def _sample_doubles(rng, n):
    return rng.standard_normal(n) * 10.0 ** rng.uniform(-8, 2.5, n)


def check_enclosures(rng, points: int = 10_000) -> str:
    with mpmath.workprec(120):
        for name, (dom, ref) in _FNS.items():
            x = dom(_sample_doubles(rng, points))
            enc = ival_fn(name, ival(x))
            for xi, lo, hi in zip(x.tolist(), enc.lo.tolist(), enc.hi.tolist()):
                v = ref(mpmath.mpf(xi))
                assert mpmath.mpf(lo) <= v <= mpmath.mpf(hi), (name, xi)
        x = _sample_doubles(rng, points)
        k = rng.integers(-4, 6, points)
        for xi, ki in zip(x.tolist(), k.tolist()):
            if xi == 0 and ki < 0:
                continue
            enc = ival_fn("powi", ival(xi), int(ki))
            v = mpmath.mpf(xi) ** int(ki)
            assert mpmath.mpf(float(enc.lo)) <= v <= mpmath.mpf(float(enc.hi)), (xi, ki)
        a, b = _sample_doubles(rng, points), _sample_doubles(rng, points)
        b[b == 0] = 1.0
        for op in ("add", "sub", "mul", "div"):
            r = {"add": ival(a) + ival(b), "sub": ival(a) - ival(b),
                 "mul": ival(a) * ival(b), "div": ival(a) / ival(b)}[op]
            f = {"add": lambda u, w: u + w, "sub": lambda u, w: u - w,
                 "mul": lambda u, w: u * w, "div": lambda u, w: u / w}[op]
            for ai, bi, lo, hi in zip(a.tolist(), b.tolist(), r.lo.tolist(), r.hi.tolist()):
                v = f(mpmath.mpf(ai), mpmath.mpf(bi))
                assert mpmath.mpf(lo) <= v <= mpmath.mpf(hi), (op, ai, bi)
    # inclusion monotonicity on nested intervals
    x = np.abs(_sample_doubles(rng, 1000)) + 1e-3
    w = np.abs(rng.standard_normal(1000)) * x * 0.1
    inner = RInterval(x, x + w)
    outer = RInterval(x - w * 0.5, x + 2 * w)
    for name in ("sqrt", "exp", "ln", "cosh", "sinh"):
        if name in ("exp", "cosh", "sinh"):
            inner_c, outer_c = RInterval(np.minimum(inner.lo, 50), np.minimum(inner.hi, 50)), \
                RInterval(np.minimum(outer.lo, 50), np.minimum(outer.hi, 51))
        else:
            inner_c, outer_c = inner, outer
        assert np.all(ival_fn(name, outer_c).contains_interval(ival_fn(name, inner_c))), name
    assert np.all((outer * outer).contains_interval(inner * inner))
    return f"{points} points per function"


def check_opnorm_dominance(rng, trials: int = 100) -> str:
    for _ in range(trials):
        n = int(rng.integers(1, 21))
        a = rng.standard_normal((n, n)) * 10.0 ** rng.uniform(-3, 3)
        w = rng.uniform(0.1, 10.0, n)
        conj = np.sqrt(w)[:, None] * a / np.sqrt(w)[None, :]
        ref = np.linalg.norm(conj, 2)
        for sq in (0, 3):
            assert float(opnorm2_ub(ival(a), w, squarings=sq).hi) >= ref
        S = conj @ conj.T
        back = S * np.sqrt(w)[None, :] / np.sqrt(w)[:, None]
        assert float(opnorm2_ub(ival(back), w, selfadjoint=True, squarings=4).hi) >= \
            np.linalg.norm(S, 2) * (1 - 1e-12)
    return f"{trials} matrices"


def check_radii_consistency(rng, trials: int = 200) -> str:
    found = 0
    with mpmath.workprec(200):
        for _ in range(trials):
            Y0 = 10.0 ** rng.uniform(-8, -1)
            Z1 = rng.uniform(0, 0.99)
            c = 10.0 ** rng.uniform(-1, 3)
            s = rng.uniform(0, 10)
            try:
                chk = radii_find(Y0, Z1, c, s)
            except RadiiError:
                continue
            found += 1
            again = check_radius(Y0, Z1, c, s, chk.r)
            assert again.ok
            r = mpmath.mpf(chk.r)
            z2 = mpmath.mpf(c) + mpmath.mpf(s) * r
            assert z2 * r * r / 2 - (1 - mpmath.mpf(Z1)) * r + mpmath.mpf(Y0) < 0
            assert mpmath.mpf(Z1) + z2 * r < 1
    assert found > trials // 4
    return f"{found}/{trials} verified radii re-checked"


def check_dg_slope(rng) -> str:
    grid = Grid(3.0, 5, 5)
    params = GSParams(Fraction(1, 9), Fraction(10), grid)
    t = tri_size(5)
    U = PairSeq(D4Seq(0.3 * rng.standard_normal(t), 5, grid), D4Seq(0.3 * rng.standard_normal(t), 5, grid))
    H = PairSeq(D4Seq(rng.standard_normal(t), 5, grid), D4Seq(rng.standard_normal(t), 5, grid))
    G0 = G_full(params, U).first
    hs, errs = [], []
    for e in np.geomspace(1e-1, 1e-4, 7):
        He = PairSeq(H.first.scale(e), H.second.scale(e))
        Ue = PairSeq(U.first + He.first, U.second + He.second)
        rem = G_full(params, Ue).first - G0 - dg_action(params, U, He).first
        hs.append(e * math.hypot(seq_norm(H.first), seq_norm(H.second)))
        errs.append(seq_norm(rem))
    slope = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    assert slope >= 1.9, slope
    return f"slope {slope:.3f}"


def reduced_full_pairs(U: D4Seq) -> dict[str, tuple[float, float]]:
    """Full-system bounds specialized to V2 = 0 next to the scalar bounds.

    Returns ``name -> (full value, reduced value)`` for the upper endpoints
    of the quantities both routes compute, plus the midpoint block of the
    numerical inverse as a max-abs difference.
    """
    from gscap.approxinv import ApproxInverse, build_BN
    from gscap.bounds import bound_Y0, bound_Z1_finite, prepare_full
    from gscap.reduced import ReducedProblem, reduced_bounds, reduced_build_Br

    grid = U.grid
    prob = ReducedProblem(Fraction(1, 9), grid)
    binv_r = reduced_build_Br(prob, U)
    red = reduced_bounds(prob, U, binv_r)
    pair = PairSeq(U, D4Seq.zeros(U.order, grid))
    full_inv = build_BN(prob.params, pair)
    t = tri_size(grid.N)
    binv = ApproxInverse(full_inv.b11, np.zeros((t, t)), grid.N, full_inv.b11_norm)
    ctx = prepare_full(prob.params, pair, binv)
    ctx.V2 = D4Seq.zeros(ctx.V2.order, grid).to_interval()
    ctx.V2N = D4Seq.zeros(ctx.V2N.order, grid).to_interval()
    out = {"Y0": (float(bound_Y0(ctx).value.hi), float(red.Y0.value.hi))}
    z1 = bound_Z1_finite(ctx)
    for k in ("Z12", "Z13", "Z14"):
        out[k] = (float(z1.parts[k].hi), float(red.Z1.parts[k].hi))
    out["B_block"] = (float(np.max(np.abs(binv_r.b11 - full_inv.b11))), 0.0)
    return out


def check_reduced_full(U: D4Seq) -> str:
    pairs = reduced_full_pairs(U)
    worst = 0.0
    for name, (a, b) in pairs.items():
        if name == "B_block":
            assert a <= 1e-12, a
            continue
        rel = abs(a - b) / max(abs(b), 1e-300)
        worst = max(worst, rel)
        assert rel <= 1e-10, (name, a, b)
    return f"Y0, Z12-Z14 agree to {worst:.1e} relative"
