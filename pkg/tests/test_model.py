from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from gscap.d4seq import D4Seq, Grid, PairSeq, eval_grid, fold_full, seq_norm, tri_size
from gscap.model import (
    F_full,
    G_full,
    GSParams,
    apply_L,
    apply_L_inv,
    dg_action,
    dg_sequences,
    params_from_physical,
    symbol,
    symbol_arrays,
)

GRID = Grid(2.0, 4, 4)
P = GSParams(Fraction(1, 9), Fraction(10), GRID)


def rand_pair(rng, order=4, scale=1.0):
    t = tri_size(order)
    return PairSeq(D4Seq(scale * rng.standard_normal(t), order, GRID),
                   D4Seq(scale * rng.standard_normal(t), order, GRID))


def test_params_validation():
    with pytest.raises(ValueError):
        GSParams(0, 1, GRID)
    with pytest.raises(ValueError):
        GSParams(1, -1, GRID)


def test_params_from_physical():
    p = params_from_physical("0.04", "0.06", 1, 1)
    assert Fraction(p.lambda2) == 4 and Fraction(p.lambda1) == Fraction(1, 10)
    q = params_from_physical("0.3", "0.7", 2, 2)
    assert Fraction(q.lambda1) == 1
    with pytest.raises(ValueError):
        params_from_physical(0, 1, 1, 1)


def test_physical_scaling():
    # scaling both rates by c scales lambda2 by 1/c and lambda1 by c
    a = params_from_physical("0.04", "0.06", 1, 1)
    b = params_from_physical("0.08", "0.12", 1, 1)
    assert Fraction(b.lambda2) == Fraction(a.lambda2) / 2
    assert Fraction(b.lambda1) == Fraction(a.lambda1) * 2


def test_symbol_at_zero():
    s = symbol(P, (0, 0))
    assert s["l11"] == -1.0 and s["l22"] == -10.0
    r = symbol(GSParams(Fraction(1, 9), 9, GRID), (3, 1), interval=True)
    assert r["l21"].contains(0.0)


def test_symbol_identity(rng):
    l1 = P.l1_iv
    for n in rng.integers(0, 40, (50, 2)):
        s = symbol(P, tuple(n), interval=True)
        diff = s["inv22"] - l1 / s["l11"] - (-s["inv21"])
        assert diff.contains(0.0)


def test_symbol_bounds():
    s = symbol_arrays(P, 10)
    assert np.all(s.l11 <= -1.0) and np.all(s.l22 <= -P.l2)


def test_apply_L_delta():
    U = PairSeq(D4Seq.delta((0, 0), 2, GRID), D4Seq.zeros(2, GRID))
    LU = apply_L(P, U)
    assert LU.first.coeffs[0] == -1.0
    assert LU.second.coeffs[0] == pytest.approx(10 / 9 - 1)


def test_apply_L_inverse(rng):
    U = rand_pair(rng)
    back = apply_L_inv(P, apply_L(P, U))
    assert np.allclose(back.flatten(), U.flatten())


def test_L_norm_two_ways(rng):
    U = rand_pair(rng)
    LU = apply_L(P, U)
    s = symbol_arrays(P, 4)
    M = np.block([[np.diag(s.l11), np.zeros((15, 15))], [s.l21 * np.eye(15), np.diag(s.l22)]])
    assert np.allclose(M @ U.flatten(), LU.flatten())


def test_G_examples():
    zero = PairSeq(D4Seq.zeros(2, GRID), D4Seq.zeros(2, GRID))
    assert not np.any(G_full(P, zero).flatten())
    assert not np.any(F_full(P, zero).flatten())
    c = 0.7
    U = PairSeq(D4Seq.delta((0, 0), 2, GRID, c), D4Seq.zeros(2, GRID))
    g = G_full(P, U).first.coeffs[0]
    assert g == pytest.approx(c * c - c ** 3 / 9)


def test_G_grid_oracle(rng):
    # G is a trigonometric polynomial of order 3M: sample, FFT, fold
    U = rand_pair(rng, 3, 0.3)
    G = G_full(P, U).first
    d, K = GRID.d, 32
    xs = -d + 2 * d * np.arange(K) / K
    u1 = eval_grid(U.first, xs, xs)
    u2 = eval_grid(U.second, xs, xs)
    vals = (u2 + 1 - P.l1 * u1) * u1 * u1
    F = np.fft.fftshift(np.fft.fft2(vals)) / K ** 2
    phase = np.exp(1j * np.pi * np.arange(-K // 2, K // 2))
    F = (F * phase[:, None] * phase[None, :]).real
    c, M = K // 2, 9
    ref = fold_full(F[c - M:c + M + 1, c - M:c + M + 1], tol=1e-10)
    assert np.allclose(ref.coeffs, G.coeffs, atol=1e-12)


def test_constant_state_residual():
    # -c + c^2 - lambda1 c^3 = 0 with lambda1 = 1/9: c = (9 - sqrt(45)) / 2
    c = (9 - np.sqrt(45)) / 2
    U = PairSeq(D4Seq.delta((0, 0), 1, GRID, c), D4Seq.zeros(1, GRID))
    F = F_full(P, U)
    assert abs(F.first.coeffs[0]) < 1e-12
    assert F.second.coeffs[0] == pytest.approx((10 / 9 - 1) * c)
    Q = GSParams(Fraction(1, 9), 9, GRID)
    assert abs(F_full(Q, U).second.coeffs[0]) < 1e-12


def test_dg_examples():
    zero = PairSeq(D4Seq.zeros(2, GRID), D4Seq.zeros(2, GRID))
    dg = dg_sequences(P, zero)
    assert not np.any(dg.V1.coeffs) and not np.any(dg.V2.coeffs)
    assert dg.Q.coeffs[0] == 1.0 and not np.any(dg.Q.coeffs[1:])
    c = 0.5
    U = PairSeq(D4Seq.delta((0, 0), 2, GRID, c), D4Seq.zeros(2, GRID))
    assert dg_sequences(P, U).V1.coeffs[0] == pytest.approx(2 * c - 3 * c * c / 9)


def test_dg_action_zero_and_delta(rng):
    U = rand_pair(rng, 3, 0.3)
    H0 = PairSeq(D4Seq.zeros(3, GRID), D4Seq.zeros(3, GRID))
    assert not np.any(dg_action(P, U, H0).flatten())
    H = PairSeq(D4Seq.delta((0, 0), 3, GRID), D4Seq.zeros(3, GRID))
    dg = dg_sequences(P, U)
    out = dg_action(P, U, H).first
    assert np.allclose(out.coeffs[: tri_size(dg.V1.order)], dg.V1.coeffs)


def test_dg_finite_difference(rng):
    U = rand_pair(rng, 3, 0.3)
    H = rand_pair(rng, 3, 0.3)
    G0 = G_full(P, U).first
    D = dg_action(P, U, H).first
    errs = []
    for eps in (1e-2, 1e-3):
        Ue = PairSeq(U.first + H.first.scale(eps), U.second + H.second.scale(eps))
        diff = (G_full(P, Ue).first - G0).scale(1 / eps) - D
        errs.append(seq_norm(diff, "l2"))
    assert errs[1] < errs[0] / 5


def test_truncation_order():
    U = PairSeq(D4Seq.delta((1, 0), 6, GRID), D4Seq.zeros(6, GRID))
    V1, V2 = dg_sequences(P, U).truncated(2)
    assert V1.order == 4 and V2.order == 4
