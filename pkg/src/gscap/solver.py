"""Numerical (non-rigorous) construction of approximate solutions.

Pipeline: radial seed from the exact 1-D spike, Newton on the truncated
system, natural-parameter continuation, and projection onto the kernel of the
boundary trace.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .d4seq import (
    D4Seq,
    Grid,
    PairSeq,
    conv,
    conv_operator,
    eval_grid,
    fold_full,
    resize,
    seq_norm,
    trace_project,
    tri_size,
)
from .model import F_full, GSParams, dg_sequences, symbol_arrays

__all__ = [
    "NewtonConfig",
    "ContinuationConfig",
    "ConvergenceError",
    "ContinuationError",
    "BoundaryError",
    "NewtonResult",
    "seed_1d_radial",
    "reduced_residual",
    "newton_solve",
    "newton_solve_reduced",
    "solve_seeded",
    "continue_param",
    "build_u0",
    "build_u0_reduced",
    "boundary_residual",
    "BOUNDARY_TOL",
]

log = logging.getLogger(__name__)

# Boundary values above this fraction of ||U||_1 mean the box is too small for
# the pattern; the trace projection then distorts the candidate noticeably.
BOUNDARY_TOL = 1e-3


class ConvergenceError(RuntimeError):
    """Newton failed; ``residual`` holds the last residual norm."""

    def __init__(self, msg: str, residual: float, history: list[float]):
        super().__init__(msg)
        self.residual = residual
        self.history = history


class ContinuationError(RuntimeError):
    """Continuation failed; ``partial`` holds the converged chain so far."""

    def __init__(self, msg: str, partial: list):
        super().__init__(msg)
        self.partial = partial


class BoundaryError(ValueError):
    """The candidate is not small on the boundary; increase d."""


@dataclass
class NewtonConfig:
    tol: float = 1e-14
    max_iter: int = 30
    damping: float = 1.0
    stall_tol: float = 1e-15

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")


@dataclass
class ContinuationConfig:
    target: float
    step: float = 0.25
    max_steps: int = 200
    max_halvings: int = 6
    newton: NewtonConfig = field(default_factory=lambda: NewtonConfig(tol=1e-13))

    def __post_init__(self):
        if self.step == 0:
            raise ValueError("continuation step must be nonzero")


@dataclass
class NewtonResult:
    solution: D4Seq | PairSeq
    history: list[float]
    iterations: int


# ----------------------------------------------------------------------------
# seed


def seed_profile(params: GSParams, r, form: str = "sqrt"):
    """Radial lift of the exact 1-D spike ``3 / (1 + Q cosh(arg))``."""
    lam1 = params.l1
    if not 0 < lam1 < 2.0 / 9.0:
        raise ValueError("the spike seed needs 0 < lambda1 < 2/9")
    Q = np.sqrt(1.0 - 4.5 * lam1)
    r = np.asarray(r, dtype=np.float64)
    if form == "sqrt":
        arg = np.sqrt(r / lam1)
    elif form == "linear":
        arg = r / np.sqrt(lam1)
    else:
        raise ValueError("seed form must be 'sqrt' or 'linear'")
    return 3.0 / (1.0 + Q * np.cosh(arg))


def sample_coefficients(f: Callable, grid: Grid, order: int) -> D4Seq:
    """D4 coefficients up to ``order`` of a symmetric function sampled on the box."""
    K = 2 * (order + 1)
    d = grid.d
    x = -d + 2.0 * d * np.arange(K) / K
    vals = f(x[:, None], x[None, :])
    F = np.fft.fft2(vals) / (K * K)
    k = np.arange(-order, order + 1)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    full = np.real(F[np.ix_(k % K, k % K)]) * sign[:, None] * sign[None, :]
    # enforce exact symmetry before folding (sampling is symmetric to rounding)
    full = 0.5 * (full + full.T)
    full = 0.5 * (full + full[::-1, :])
    full = 0.5 * (full + full[:, ::-1])
    return fold_full(full, grid, tol=1e-10)


def seed_1d_radial(params: GSParams, grid: Grid | None = None, form: str = "sqrt") -> D4Seq:
    grid = grid or params.grid
    return sample_coefficients(
        lambda x, y: seed_profile(params, np.sqrt(x * x + y * y), form), grid, grid.N0
    )


# ----------------------------------------------------------------------------
# Newton


def reduced_residual(params: GSParams, U: D4Seq) -> D4Seq:
    """``F_r(U) = l11 U + U*U - lambda1 U*U*U`` at order 3M."""
    s = symbol_arrays(params, U.order)
    u2 = conv(U, U)
    g = u2 - conv(u2, U).scale(params.l1)
    return g + U._like(s.l11 * U.coeffs)


def _reduced_jacobian(params: GSParams, U: D4Seq) -> np.ndarray:
    M = U.order
    s = symbol_arrays(params, M)
    V0 = U.scale(2.0) - conv(U, U).scale(3.0 * params.l1)
    J = conv_operator(V0, M, M)
    J[np.diag_indices_from(J)] += s.l11
    return J


def _full_jacobian(params: GSParams, U: PairSeq) -> np.ndarray:
    M = U.order
    t = tri_size(M)
    s = symbol_arrays(params, M)
    dg = dg_sequences(params, U)
    J = np.zeros((2 * t, 2 * t))
    J[:t, :t] = conv_operator(dg.V1, M, M)
    J[:t, t:] = conv_operator(dg.V2, M, M)
    idx = np.arange(t)
    J[idx, idx] += s.l11
    J[t + idx, idx] += s.l21
    J[t + idx, t + idx] += s.l22
    return J


def _weighted_l2(vec: np.ndarray, order: int, comps: int) -> float:
    from .d4seq import alphas

    a = np.tile(alphas(order), comps)
    return float(np.sqrt(np.sum(a * vec * vec)))


def _newton(
    x0: np.ndarray,
    residual: Callable[[np.ndarray], np.ndarray],
    jacobian: Callable[[np.ndarray], np.ndarray],
    norm: Callable[[np.ndarray], float],
    cfg: NewtonConfig,
) -> tuple[np.ndarray, list[float]]:
    x = x0.copy()
    r = residual(x)
    hist = [norm(r)]
    log.info("newton start residual %.3e", hist[-1])
    for it in range(cfg.max_iter):
        if hist[-1] <= cfg.tol:
            return x, hist
        J = jacobian(x)
        step = np.linalg.solve(J, r)
        x = x - cfg.damping * step
        r = residual(x)
        hist.append(norm(r))
        log.info("newton iter %d residual %.3e step %.3e", it + 1, hist[-1], norm(step))
        if not np.isfinite(hist[-1]):
            break
        if norm(step) <= cfg.stall_tol * max(1.0, norm(x)) and hist[-1] <= 1e3 * cfg.tol:
            return x, hist
    if hist[-1] <= cfg.tol:
        return x, hist
    raise ConvergenceError(
        f"Newton did not converge: residual {hist[-1]:.3e} after {len(hist) - 1} iterations",
        hist[-1],
        hist,
    )


def newton_solve_reduced(params: GSParams, U_init: D4Seq, cfg: NewtonConfig | None = None) -> NewtonResult:
    """Newton for the single-component problem on the finite order of ``U_init``."""
    cfg = cfg or NewtonConfig()
    M = U_init.order
    grid = U_init.grid or params.grid

    def res(x):
        return resize(reduced_residual(params, D4Seq(x, M, grid)), M).coeffs

    def jac(x):
        return _reduced_jacobian(params, D4Seq(x, M, grid))

    x, hist = _newton(U_init.coeffs.copy(), res, jac, lambda v: _weighted_l2(v, M, 1), cfg)
    return NewtonResult(D4Seq(x, M, grid), hist, len(hist) - 1)


def newton_solve(params: GSParams, U_init: PairSeq, cfg: NewtonConfig | None = None) -> NewtonResult:
    """Newton for the full two-component problem on the order of ``U_init``."""
    cfg = cfg or NewtonConfig()
    M = U_init.order
    grid = U_init.grid or params.grid

    def res(x):
        F = F_full(params, PairSeq.from_flat(x, M, grid))
        return PairSeq(resize(F.first, M), resize(F.second, M)).flatten()

    def jac(x):
        return _full_jacobian(params, PairSeq.from_flat(x, M, grid))

    x, hist = _newton(U_init.flatten(), res, jac, lambda v: _weighted_l2(v, M, 2), cfg)
    return NewtonResult(PairSeq.from_flat(x, M, grid), hist, len(hist) - 1)


def _localized(U: D4Seq) -> bool:
    scale = seq_norm(U, "l1")
    return scale > 0 and boundary_residual(U) <= BOUNDARY_TOL * scale


def solve_seeded(params: GSParams, mode: str = "full", form: str = "sqrt",
                 cfg: NewtonConfig | None = None) -> tuple[NewtonResult, str]:
    """Newton from the radial spike seed, returning the result and the seed form used.

    Attempts in order: the requested form, the same form with half steps, then
    the other form.  A result that is not small on the boundary (for instance
    the constant state) is rejected.
    """
    cfg = cfg or NewtonConfig(tol=1e-13)
    grid = params.grid
    forms = [form, "linear" if form == "sqrt" else "sqrt"]
    attempts = [(forms[0], cfg.damping), (forms[0], 0.5 * cfg.damping), (forms[1], cfg.damping)]
    last: Exception | None = None
    for f, damp in attempts:
        seed = seed_1d_radial(params, grid, f)
        c = NewtonConfig(cfg.tol, max(cfg.max_iter, 80 if damp < 1 else cfg.max_iter), damp, cfg.stall_tol)
        try:
            if mode == "reduced":
                res = newton_solve_reduced(params, seed, c)
                first = res.solution
            else:
                res = newton_solve(params, PairSeq(seed, D4Seq.zeros(seed.order, grid)), c)
                first = res.solution.first
        except (ConvergenceError, np.linalg.LinAlgError) as exc:
            last = exc
            log.info("seed %s (damping %g) failed: %s", f, damp, exc)
            continue
        if _localized(first):
            if (f, damp) != attempts[0]:
                log.warning("seed form %r with damping %g was used", f, damp)
            return res, f
        log.info("seed %s (damping %g) converged to a non-localized state", f, damp)
        last = ConvergenceError("converged to a non-localized state", res.history[-1], res.history)
    raise ConvergenceError(f"no seed converged to a localized pattern: {last}",
                           getattr(last, "residual", float("nan")), getattr(last, "history", []))


# ----------------------------------------------------------------------------
# continuation


def continue_param(
    params_from: GSParams,
    params_to: GSParams,
    U_start: PairSeq,
    cfg: ContinuationConfig | None = None,
) -> list[tuple[GSParams, PairSeq]]:
    """Natural-parameter continuation in ``lambda2`` with step halving.

    The start candidate is first corrected by Newton.  Intermediate
    parameters are floats; the final entry uses ``params_to`` exactly.
    """
    from fractions import Fraction

    start = float(params_from.l2)
    target = float(params_to.l2)
    cfg = cfg or ContinuationConfig(target=target)
    first = newton_solve(params_from, U_start, cfg.newton)
    chain: list[tuple[GSParams, PairSeq]] = [(params_from, first.solution)]
    if start == target:
        return chain
    step = abs(cfg.step) * (1 if target > start else -1)
    cur = start
    U = first.solution
    steps = 0
    halvings = 0
    while cur != target:
        if steps >= cfg.max_steps:
            raise ContinuationError("continuation exceeded max_steps", chain)
        nxt = cur + step
        if (step > 0 and nxt >= target) or (step < 0 and nxt <= target):
            nxt = target
        p = params_to if nxt == target else params_from.with_lambda2(Fraction(nxt))
        try:
            U = newton_solve(p, U, cfg.newton).solution
        except (ConvergenceError, np.linalg.LinAlgError) as exc:
            halvings += 1
            if halvings > cfg.max_halvings:
                raise ContinuationError(f"continuation failed at lambda2={nxt}: {exc}", chain)
            step /= 2
            log.info("continuation step halved to %g", step)
            continue
        cur = nxt
        steps += 1
        chain.append((p, U))
        log.info("continuation reached lambda2=%g", cur)
    return chain


# ----------------------------------------------------------------------------
# trace projection


def boundary_residual(U: D4Seq, samples: int = 64) -> float:
    """Max of |u(d, t)| over equispaced t in [-d, d]."""
    d = U.grid.d
    t = np.linspace(-d, d, samples)
    return float(np.max(np.abs(eval_grid(U, [d], t))))


def build_u0(params: GSParams, U_raw: PairSeq, threshold: float = BOUNDARY_TOL) -> PairSeq:
    """Project a converged candidate onto the trace kernel (full system)."""
    for comp in (U_raw.first, U_raw.second):
        scale = max(seq_norm(comp.mid(), "l1"), 1e-300)
        b = boundary_residual(comp.mid())
        if b > threshold * max(scale, seq_norm(U_raw.first.mid(), "l1")):
            raise BoundaryError(
                f"boundary value {b:.3e} too large relative to the candidate; increase d"
            )
    return trace_project(U_raw, params)


def build_u0_reduced(params: GSParams, U_raw: D4Seq, threshold: float = BOUNDARY_TOL) -> D4Seq:
    scale = max(seq_norm(U_raw.mid(), "l1"), 1e-300)
    b = boundary_residual(U_raw.mid())
    if b > threshold * scale:
        raise BoundaryError(
            f"boundary value {b:.3e} too large relative to the candidate; increase d"
        )
    return trace_project(U_raw, params)
