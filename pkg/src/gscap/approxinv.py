"""Approximate inverse of the derivative of the zero-finding map.

The operator is block upper-triangular,

    B = [[B11, B12], [0, pi^N]] + tail identity,

with ``B11^N`` the numerical inverse of the finite top-left block of
``I + DG(U0) L^{-1}`` and ``B12^N = -B11^N pi^N V2 L22^{-1} pi^N``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .d4seq import D4Seq, PairSeq, alphas, conv_operator, resize, tri_size
from .interval import RInterval, ival, opnorm2_ub
from .model import GSParams, dg_sequences, symbol_arrays

__all__ = [
    "ApproxInverse",
    "ConditioningError",
    "convmat",
    "weighted_adjoint",
    "build_BN",
    "build_Br",
    "b11_norm_ub",
    "finite_block",
]


class ConditioningError(np.linalg.LinAlgError):
    """The finite block is numerically singular."""


@dataclass
class ApproxInverse:
    """Finite blocks of the approximate inverse together with a certified norm bound."""

    b11: np.ndarray
    b12: np.ndarray | None
    order: int
    b11_norm: RInterval

    @property
    def b11_iv(self) -> RInterval:
        return ival(self.b11)

    @property
    def b12_iv(self) -> RInterval | None:
        return None if self.b12 is None else ival(self.b12)

    @property
    def b11_norm_max1(self) -> RInterval:
        """max{1, ||B11^N||}: the norm of the whole first diagonal block."""
        return RInterval(max(1.0, float(self.b11_norm.hi)), max(1.0, float(self.b11_norm.hi)))


def convmat(V: D4Seq, order: int, col_order: int | None = None):
    """Matrix of ``H -> V * H`` on coefficients up to ``order``."""
    return conv_operator(V, order, order if col_order is None else col_order)


def weighted_adjoint(A, row_order: int | None = None, col_order: int | None = None):
    """Adjoint in the alpha-weighted inner product: (A*)_ij = (alpha_j / alpha_i) A_ji."""
    r, c = A.shape
    if row_order is None:
        row_order = _order_of(r)
    if col_order is None:
        col_order = _order_of(c)
    ar = alphas(row_order)
    ac = alphas(col_order)
    # A* maps row space back to column space: entry (i, j), i over columns of A
    scale = ar[None, :] / ac[:, None]
    return A.T * scale


def _order_of(size: int) -> int:
    M = int(round((np.sqrt(8 * size + 1) - 3) / 2))
    if tri_size(M) != size:
        raise ValueError(f"{size} is not a triangular index-set size")
    return M


def finite_block(params: GSParams, U0: PairSeq) -> tuple[np.ndarray, np.ndarray]:
    """Float blocks ``pi^N (I + V1 L11^-1 + V2 L21inv) pi^N`` and ``pi^N V2 L22^-1 pi^N``.

    ``L21inv = -L22^{-1} L21 L11^{-1}`` is the (2,1) entry of the inverse symbol.
    """
    N = params.grid.N
    dg = dg_sequences(params, U0.mid())
    V1N, V2N = dg.truncated(N)
    s = symbol_arrays(params, N)
    C1 = convmat(V1N, N)
    C2 = convmat(V2N, N)
    A = np.eye(tri_size(N)) + C1 * s.inv11[None, :] + C2 * s.inv21[None, :]
    A12 = C2 * s.inv22[None, :]
    return A, A12


def _invert(A: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > 1e12:
        raise ConditioningError(f"finite block is ill conditioned (cond ~ {cond:.3e})")
    return np.linalg.inv(A)


def b11_norm_ub(b11: np.ndarray, order: int, squarings: int = 8) -> RInterval:
    """Certified upper bound of the weighted spectral norm of ``b11``."""
    return opnorm2_ub(ival(b11), alphas(order), squarings=squarings)


def build_BN(params: GSParams, U0: PairSeq, squarings: int = 8) -> ApproxInverse:
    """Approximate inverse for the full two-component system."""
    N = params.grid.N
    A, A12 = finite_block(params, U0)
    B11 = _invert(A)
    B12 = -B11 @ A12
    return ApproxInverse(B11, B12, N, b11_norm_ub(B11, N, squarings))


def build_Br(params: GSParams, U0: D4Seq, squarings: int = 8) -> ApproxInverse:
    """Approximate inverse ``inv(pi^N (I + V0 L11^-1) pi^N)`` for the reduced equation."""
    N = params.grid.N
    U = U0.mid()
    V0 = U.scale(2.0) - (U * U).scale(3.0 * params.l1)
    V0N = resize(V0, min(2 * N, V0.order))
    s = symbol_arrays(params, N)
    A = np.eye(tri_size(N)) + convmat(V0N, N) * s.inv11[None, :]
    B = _invert(A)
    return ApproxInverse(B, None, N, b11_norm_ub(B, N, squarings))
