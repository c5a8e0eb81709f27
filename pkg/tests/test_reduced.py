from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from property_checks import reduced_full_pairs

from gscap.candidate import read_candidate
from gscap.d4seq import D4Seq, Grid, PairSeq, tri_size
from gscap.model import G_full
from gscap.reduced import (
    ReducedProblem,
    reduced_bounds,
    reduced_build_Br,
    reduced_F,
    reduced_G,
    reduced_z2_at,
)

GRID = Grid(4.0, 12, 12)
PROB = ReducedProblem(Fraction(1, 9), GRID)


@pytest.fixture(scope="module")
def small_spike(reduced_spike_path):
    cand = read_candidate(reduced_spike_path)
    return D4Seq(cand.U.coeffs[: tri_size(12)], 12, GRID)


def test_problem_implies_lambda2():
    assert Fraction(PROB.params.lambda2) == 9


def test_reduced_F_examples():
    assert not np.any(reduced_F(PROB, D4Seq.zeros(3, GRID)).coeffs)
    c = 0.8
    F = reduced_F(PROB, D4Seq.delta((0, 0), 2, GRID, c))
    assert F.coeffs[0] == pytest.approx(c * c - c ** 3 / 9 - c)
    assert not np.any(F.coeffs[1:])


def test_reduced_G_matches_full(rng):
    U = D4Seq(0.3 * rng.standard_normal(tri_size(3)), 3, GRID)
    full = G_full(PROB.params, PairSeq(U, D4Seq.zeros(3, GRID)))
    assert np.allclose(full.first.coeffs, reduced_G(PROB, U).coeffs, atol=1e-14)


def test_fixture_residual(reduced_spike_path):
    cand = read_candidate(reduced_spike_path)
    p = ReducedProblem(Fraction(1, 9), Grid(cand.d, cand.order, cand.order))
    F = reduced_F(p, cand.U)
    head = F.coeffs[: tri_size(cand.order)]
    # Newton converged to 1e-13; the projection moves the head by the boundary value
    assert np.max(np.abs(head)) < 1e-4


def test_zero_candidate():
    Z = D4Seq.zeros(6, Grid(4.0, 6, 6))
    p = ReducedProblem(Fraction(1, 9), Z.grid)
    binv = reduced_build_Br(p, Z)
    assert np.array_equal(binv.b11, np.eye(tri_size(6)))
    b = reduced_bounds(p, Z, binv)
    assert float(b.Y0.value.hi) < 1e-100
    for k in ("Z11", "Z12", "Z13", "Z14"):
        assert float(b.Z1.parts[k].hi) < 1e-14


def test_z2_affine(small_spike):
    b = reduced_bounds(PROB, small_spike, reduced_build_Br(PROB, small_spike))
    s = 1e-3
    z = [float(reduced_z2_at(b.Z2, k * s).mid()) for k in (1, 2, 3)]
    assert z[1] - z[0] == pytest.approx(z[2] - z[1], rel=1e-9)


def test_candidate_order_checked(small_spike):
    p = ReducedProblem(Fraction(1, 9), Grid(4.0, 12, 8))
    with pytest.raises(ValueError):
        reduced_bounds(p, small_spike, reduced_build_Br(p, D4Seq(small_spike.coeffs[: tri_size(8)], 8, p.grid)))


def test_cross_check_full_vs_reduced(small_spike):
    for name, (full, red) in reduced_full_pairs(small_spike).items():
        if name == "B_block":
            assert full <= 1e-12
        else:
            assert full == pytest.approx(red, rel=1e-10), name
