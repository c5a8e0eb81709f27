from __future__ import annotations

import mpmath
import numpy as np
import pytest

from gscap.interval import (
    IntervalDomainError,
    RInterval,
    conv2d,
    from_decimal,
    ival,
    ival_arith,
    ival_fn,
    matmul,
    opnorm2_ub,
    pi_const,
    to_decimal,
    verified_solve,
)


def test_add_exact_integers():
    r = ival_arith("add", ival(1.0), ival(2.0))
    assert r.contains(3.0)


def test_mul_sign_mixed():
    r = ival_arith("mul", RInterval(-1.0, 2.0), ival(3.0))
    assert float(r.lo) <= -3.0 and float(r.hi) >= 6.0


def test_div_third_is_tight():
    r = ival_arith("div", ival(1.0), ival(3.0))
    with mpmath.workprec(200):
        third = mpmath.mpf(1) / 3
        assert mpmath.mpf(float(r.lo)) <= third <= mpmath.mpf(float(r.hi))
    assert np.nextafter(np.nextafter(float(r.lo), 1.0), 1.0) >= float(r.hi)


def test_div_by_zero_interval_rejected():
    with pytest.raises(IntervalDomainError):
        ival_arith("div", ival(1.0), RInterval(-1.0, 1.0))


def test_invalid_endpoints_rejected():
    with pytest.raises(IntervalDomainError):
        RInterval(2.0, 1.0)
    with pytest.raises(IntervalDomainError):
        RInterval(float("nan"), 1.0)


def test_sqrt_and_pi_and_cosh():
    assert ival_fn("sqrt", ival(4.0)).contains(2.0)
    p = pi_const()
    assert 3.14159265358979 <= float(p.lo) and float(p.hi) <= 3.14159265358980
    assert ival_fn("cosh", ival(1.0)).contains(1.5430806348152437)


def test_domain_errors():
    with pytest.raises(IntervalDomainError):
        ival_fn("sqrt", ival(-1.0))
    with pytest.raises(IntervalDomainError):
        ival_fn("ln", ival(0.0))


def test_decimal_round_trip(rng):
    for x in rng.standard_normal(50) * 10.0 ** rng.integers(-20, 20, 50):
        assert float(to_decimal(float(x))) == float(x)
    assert from_decimal("0.1").contains(0.1)


def test_matmul_encloses_exact_product(rng):
    a = rng.standard_normal((6, 4))
    b = rng.standard_normal((4, 5))
    r = matmul(ival(a), ival(b))
    with mpmath.workprec(200):
        for i in range(6):
            for j in range(5):
                s = mpmath.fsum(mpmath.mpf(a[i, k]) * mpmath.mpf(b[k, j]) for k in range(4))
                assert mpmath.mpf(float(r.lo[i, j])) <= s <= mpmath.mpf(float(r.hi[i, j]))


def test_conv2d_integer_exact():
    a = np.arange(9.0).reshape(3, 3)
    b = np.ones((2, 2))
    r = conv2d(ival(a), ival(b))
    from scipy.signal import convolve2d

    assert np.all(r.contains(convolve2d(a, b)))


def test_opnorm2_identity():
    u = opnorm2_ub(ival(np.eye(2)), np.ones(2))
    assert 1.0 <= float(u.hi) <= 1.0 + 4 * np.finfo(float).eps


def test_opnorm2_nilpotent():
    u = opnorm2_ub(ival(np.array([[0.0, 2.0], [0.0, 0.0]])), np.ones(2))
    assert float(u.hi) >= 2.0


def test_opnorm2_weighted_dominates_svd(rng):
    a = rng.standard_normal((5, 5))
    w = rng.uniform(0.5, 8.0, 5)
    conj = np.sqrt(w)[:, None] * a / np.sqrt(w)[None, :]
    u = opnorm2_ub(ival(a), w, squarings=4)
    assert float(u.hi) >= np.linalg.norm(conj, 2)


def test_verified_solve_encloses(rng):
    A = rng.standard_normal((8, 8)) + 8 * np.eye(8)
    x = rng.standard_normal(8)
    b = A @ x
    enc = verified_solve(ival(A), ival(b))
    assert np.all(enc.contains(np.linalg.solve(A, b)))
    assert float(np.max(enc.width())) < 1e-12


def test_verified_solve_singular_rejected():
    A = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-17]])
    with pytest.raises((IntervalDomainError, np.linalg.LinAlgError)):
        verified_solve(ival(A), ival(np.ones(2)))
