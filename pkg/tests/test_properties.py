from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from property_checks import exact_full_conv

from gscap.bounds import phi
from gscap.d4seq import D4Seq, Grid, conv, fold_full, seq_norm, tri_size, unfold
from gscap.interval import RInterval, ival, ival_fn, opnorm2_ub
from gscap.model import GSParams, symbol
from gscap.periodic import check_radius
from gscap.proof import RadiiError, radii_find

GRID = Grid(3.0, 6, 6)
SETTINGS = settings(deadline=None, suppress_health_check=[HealthCheck.too_slow])

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
small_int = st.integers(-20, 20)


@st.composite
def int_seqs(draw, max_order=6):
    order = draw(st.integers(0, max_order))
    vals = draw(st.lists(small_int, min_size=tri_size(order), max_size=tri_size(order)))
    return D4Seq(np.array(vals, dtype=float), order, GRID)


@st.composite
def float_seqs(draw, max_order=6):
    order = draw(st.integers(0, max_order))
    vals = draw(arrays(float, tri_size(order), elements=st.floats(-100, 100)))
    return D4Seq(vals, order, GRID)


@SETTINGS
@given(int_seqs(), int_seqs())
def test_conv_matches_full_grid_integer_oracle(U, V):
    ref = exact_full_conv(unfold(U), unfold(V)).astype(float)
    assert np.array_equal(conv(U, V).coeffs, fold_full(ref, GRID).coeffs)


@SETTINGS
@given(int_seqs(4), int_seqs(4))
def test_interval_conv_encloses_float_conv(U, V):
    enc = conv(U.to_interval(), V.to_interval())
    assert np.all(enc.coeffs.contains(conv(U, V).coeffs))


@SETTINGS
@given(float_seqs())
def test_parseval_unfold(U):
    full = unfold(U)
    assert math.isclose(seq_norm(U, "l2") ** 2, float(np.sum(full * full)), rel_tol=1e-12, abs_tol=1e-300)


@SETTINGS
@given(float_seqs(), float_seqs())
def test_young_inequality(U, V):
    lhs = seq_norm(conv(U, V), "l2")
    assert lhs <= seq_norm(U, "l2") * seq_norm(V, "l1") * (1 + 1e-12) + 1e-12


@SETTINGS
@given(st.lists(st.floats(0, 1e3), min_size=4, max_size=4), st.integers(0, 10**6))
def test_phi_dominates_block_norm(scales, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    blocks = [rng.standard_normal((n, n)) * s for s in scales]
    norms = [np.linalg.norm(b, 2) * (1 + 1e-13) for b in blocks]
    full = np.block([[blocks[0], blocks[1]], [blocks[2], blocks[3]]])
    assert float(phi(*norms).hi) >= np.linalg.norm(full, 2) * (1 - 1e-15)


@SETTINGS
@given(st.sampled_from(["sqrt", "exp", "ln", "cosh", "sinh", "abs"]), finite)
def test_ival_fn_encloses_extended_precision_value(name, x):
    if name in ("sqrt", "ln"):
        x = abs(x) + 1e-300
    ref = {"sqrt": mpmath.sqrt, "exp": mpmath.exp, "ln": mpmath.log,
           "cosh": mpmath.cosh, "sinh": mpmath.sinh, "abs": abs}[name]
    if name in ("exp", "cosh", "sinh"):
        x = max(min(x, 700.0), -700.0)
    enc = ival_fn(name, ival(x))
    with mpmath.workprec(120):
        v = ref(mpmath.mpf(x))
        assert mpmath.mpf(float(enc.lo)) <= v <= mpmath.mpf(float(enc.hi))


@SETTINGS
@given(finite, finite, st.floats(0, 10), st.floats(0, 10), st.sampled_from(["+", "-", "*"]))
def test_inclusion_monotone(a, b, wa, wb, op):
    inner_a, inner_b = ival(a), ival(b)
    outer_a, outer_b = RInterval(a - wa, a + wa), RInterval(b - wb, b + wb)
    f = {"+": lambda x, y: x + y, "-": lambda x, y: x - y, "*": lambda x, y: x * y}[op]
    assert np.all(f(outer_a, outer_b).contains_interval(f(inner_a, inner_b)))


@SETTINGS
@given(st.integers(1, 20), st.integers(0, 10**6))
def test_opnorm2_dominates_conjugated_svd(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    w = rng.uniform(0.1, 10.0, n)
    conj = np.sqrt(w)[:, None] * a / np.sqrt(w)[None, :]
    assert float(opnorm2_ub(ival(a), w).hi) >= np.linalg.norm(conj, 2)


@SETTINGS
@given(st.floats(1e-9, 1e-1), st.floats(0, 0.99), st.floats(1e-2, 1e3), st.floats(0, 10))
def test_radii_find_self_consistent(Y0, Z1, c, s):
    try:
        chk = radii_find(Y0, Z1, c, s)
    except RadiiError:
        return
    assert check_radius(Y0, Z1, c, s, chk.r).ok
    with mpmath.workprec(200):
        r = mpmath.mpf(chk.r)
        z2 = mpmath.mpf(c) + mpmath.mpf(s) * r
        assert z2 * r * r / 2 - (1 - mpmath.mpf(Z1)) * r + mpmath.mpf(Y0) < 0
        assert mpmath.mpf(Z1) + z2 * r < 1


@SETTINGS
@given(st.integers(0, 200), st.integers(0, 200), st.floats(1.0, 20.0), st.integers(1, 30), st.integers(1, 30))
def test_symbol_identity_holds_as_containment(n1, n2, d, p, q):
    params = GSParams(Fraction(p, q), Fraction(q, p) * 3, Grid(d, 4, 4))
    s = symbol(params, (n1, n2), interval=True)
    diff = s["inv22"] - params.l1_iv / s["l11"] + s["inv21"]
    assert diff.contains(0.0)
