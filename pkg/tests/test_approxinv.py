from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from gscap.approxinv import (
    ConditioningError,
    _invert,
    b11_norm_ub,
    build_BN,
    build_Br,
    convmat,
    finite_block,
    weighted_adjoint,
)
from gscap.candidate import read_candidate
from gscap.d4seq import D4Seq, Grid, PairSeq, alphas, conv, resize, tri_size
from gscap.model import GSParams

GRID = Grid(3.0, 6, 6)


def test_convmat_delta_is_identity():
    assert np.array_equal(convmat(D4Seq.delta((0, 0), 0, GRID), 5), np.eye(tri_size(5)))


def test_convmat_agrees_with_conv(rng):
    V = D4Seq(rng.standard_normal(tri_size(3)), 3, GRID)
    C = convmat(V, 6)
    for _ in range(20):
        H = D4Seq(rng.standard_normal(tri_size(6)), 6, GRID)
        ref = resize(conv(V, H), 6)
        assert np.allclose(C @ H.coeffs, ref.coeffs, atol=1e-12)


def test_convmat_orbit_entry():
    # row (0,0), column (1,0): sum over the orbit of (1,0) of v_(0-k) = 4 v_(1,0)
    V = D4Seq.delta((1, 0), 1, GRID, 1.0)
    C = convmat(V, 2)
    assert C[0, 1] == pytest.approx(4.0)


def test_convmat_weighted_self_adjoint(rng):
    V = D4Seq(rng.standard_normal(tri_size(3)), 3, GRID)
    C = convmat(V, 5)
    assert np.allclose(weighted_adjoint(C), C, atol=1e-12)
    a = alphas(5)
    assert np.allclose(a[:, None] * C, (a[:, None] * C).T, atol=1e-12)


def test_zero_candidate_gives_identity():
    p = GSParams(Fraction(1, 9), Fraction(10), GRID)
    zero = PairSeq(D4Seq.zeros(6, GRID), D4Seq.zeros(6, GRID))
    inv = build_BN(p, zero)
    assert np.array_equal(inv.b11, np.eye(tri_size(6)))
    assert not np.any(inv.b12)
    assert float(inv.b11_norm.hi) == pytest.approx(1.0, abs=1e-14)


def test_identity_norm_bound():
    u = b11_norm_ub(np.eye(tri_size(4)), 4)
    assert 1.0 <= float(u.hi) <= 1.0 + 1e-14


def test_ill_conditioned_rejected():
    with pytest.raises(ConditioningError):
        _invert(np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_reduced_fixture_inverse(reduced_spike_path):
    cand = read_candidate(reduced_spike_path)
    grid = Grid(cand.d, cand.order, 20)
    p = GSParams(Fraction(1, 9), 9, grid)
    U = D4Seq(cand.U.coeffs, cand.order, grid)
    inv = build_Br(p, U)
    assert float(inv.b11_norm.hi) <= 4.24406
    # float SVD of the conjugated matrix is dominated
    s = np.sqrt(alphas(20))
    conj = s[:, None] * inv.b11 / s[None, :]
    assert float(inv.b11_norm.hi) >= np.linalg.norm(conj, 2)


def test_full_block_residual(full_spike_path):
    cand = read_candidate(full_spike_path)
    grid = Grid(cand.d, cand.order, 12)
    p = GSParams(Fraction(cand.lambda1), Fraction(cand.lambda2), grid)
    U = cand.with_grid(grid).U
    inv = build_BN(p, U)
    A, A12 = finite_block(p, U)
    assert np.max(np.abs(np.eye(A.shape[0]) - inv.b11 @ A)) <= 1e-10
    assert np.allclose(inv.b12, -inv.b11 @ A12)
