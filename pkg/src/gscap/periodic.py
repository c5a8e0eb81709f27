"""Certificates for the branch of periodic solutions limiting a localized pattern.

Replacing the embedding constants by majorants that hold uniformly for all
periods ``2q``, ``q >= d``, gives modified bounds ``Z1^`` and ``Z2^(r)``.  If
the radii inequalities hold for them as well, the localized pattern is the
limit of a smooth family of ``2q``-periodic solutions.
"""
from __future__ import annotations

from dataclasses import dataclass

from .bounds import FullBounds, phi
from .interval import RInterval, imax, imin, isqrt, ival, pi_const
from .model import GSParams

__all__ = [
    "KappaHats",
    "kappa_hats",
    "RadiiCheck",
    "check_radius",
    "PeriodicReport",
    "periodic_condition",
    "periodic_full",
    "periodic_reduced",
]


@dataclass
class KappaHats:
    kappa2: RInterval
    kappa3: RInterval
    kappa0: RInterval


def _lattice_root(inv_coef: RInterval, shift: RInterval, d: RInterval) -> RInterval:
    """``sqrt(1/(4 pi s) + 1/(4 d^2 s^2) + pi / (2 d sqrt(s)))``."""
    p = pi_const()
    return isqrt(1.0 / (p * inv_coef * 4.0) + 1.0 / (d.sqr() * shift.sqr() * 4.0)
                 + p / (d * isqrt(inv_coef) * 2.0))


def kappa_hats(params: GSParams, d: float | None = None) -> KappaHats:
    """Embedding constants valid for every period ``2q`` with ``q >= d``.

    These dominate the Riemann-sum bounds of the lattice sums of ``1/l11^2`` and
    ``1/l22^2`` (the third term ``pi/(2 d sqrt(s))`` is larger than the exact
    axis contribution ``1/(4 d s^{3/2})``).
    """
    dd = ival(params.d if d is None else d)
    if float(dd.lo) < 1.0:
        raise ValueError("kappa_hats needs d >= 1")
    l1, l2 = params.l1_iv, params.l2_iv
    p = pi_const()
    k2 = isqrt(1.0 / (p * l1 * 4.0) + 1.0 / (dd.sqr() * 4.0) + p / (dd * isqrt(l1) * 2.0))
    t22 = _lattice_root(l2, l2, dd)
    s2 = isqrt(ival(2.0))
    k3 = s2 * imin(k2.sqr() / l2, k2 * t22)
    k01 = isqrt((l1 * k2 + t22).sqr() + t22.sqr())
    k02 = s2 * t22
    k0 = imin(imax(k01, k02), k2 / l2 * isqrt((1.0 - l2 * l1).sqr() + 1.0))
    return KappaHats(k2, k3, k0)


# ----------------------------------------------------------------------------
# radii inequalities


@dataclass
class RadiiCheck:
    """Both radii inequalities at ``r``: ``poly < 0`` and ``contraction < 1``."""

    r: float
    z2: RInterval
    poly: RInterval
    contraction: RInterval

    @property
    def ok(self) -> bool:
        return float(self.poly.hi) < 0.0 and float(self.contraction.hi) < 1.0


def check_radius(Y0, Z1, z2_const, z2_slope, r: float) -> RadiiCheck:
    """Evaluate ``Z2(r) r^2 / 2 - (1 - Z1) r + Y0`` and ``Z1 + Z2(r) r`` rigorously."""
    Y0, Z1, c, s = (ival(x) for x in (Y0, Z1, z2_const, z2_slope))
    rr = ival(float(r))
    z2 = c + s * rr
    poly = z2 * rr.sqr() * 0.5 - (1.0 - Z1) * rr + Y0
    return RadiiCheck(float(r), z2, poly, Z1 + z2 * rr)


# ----------------------------------------------------------------------------
# periodic-branch condition


@dataclass
class PeriodicReport:
    mode: str
    kappa2_hat: RInterval
    kappa3_hat: RInterval | None
    kappa0_hat: RInterval | None
    z1_hat: RInterval
    z2_hat_const: RInterval
    z2_hat_slope: RInterval
    check: RadiiCheck

    @property
    def z2_hat_at_r(self) -> RInterval:
        return self.check.z2

    @property
    def verdict(self) -> bool:
        return float(self.z1_hat.hi) < 1.0 and self.check.ok


def periodic_full(bounds: FullBounds, params: GSParams, r: float) -> PeriodicReport:
    """``Z1^ = Z1 + max{1,||B11||} Zu`` and
    ``Z2^(r) = 2 sqrt(phi(Z21,Z22,Z22,Z23)) sqrt(k2^2 + 4 k0^2) + 3 k3 max{1,||B11||} r``."""
    kh = kappa_hats(params)
    bmax = ival(max(1.0, float(bounds.b11_norm.hi)))
    z1h = bounds.Z1_total.value + bmax * bounds.Z1_total.parts["Zu"]
    p = bounds.Z2.parts
    ph = phi(p["Z21"], p["Z22"], p["Z22"], p["Z23"])
    const = isqrt(ph) * isqrt(kh.kappa2.sqr() + kh.kappa0.sqr() * 4.0) * 2.0
    slope = kh.kappa3 * bmax * 3.0
    chk = check_radius(bounds.Y0.value, z1h, const, slope, r)
    return PeriodicReport("full", kh.kappa2, kh.kappa3, kh.kappa0, z1h, const, slope, chk)


def periodic_reduced(bounds, params: GSParams, r: float) -> PeriodicReport:
    """``Z2^(s) = max{1,||B_r||} (2 k2 + 3 lambda1 k2^2 s) + 6 lambda1 sqrt(||B_r U0||^2 + ||U0||_1^2) k2``."""
    kh = kappa_hats(params)
    k2 = kh.kappa2
    l1 = params.l1_iv
    bmax = ival(max(1.0, float(bounds.br_norm.hi)))
    z1h = bounds.Z1_total.value + bmax * bounds.Z1_total.parts["Zu"]
    mixed = bounds.Z2.parts["mixed"]
    const = bmax * k2 * 2.0 + l1 * 6.0 * mixed * k2
    slope = bmax * l1 * 3.0 * k2.sqr()
    chk = check_radius(bounds.Y0.value, z1h, const, slope, r)
    return PeriodicReport("reduced", k2, None, None, z1h, const, slope, chk)


def periodic_condition(mode: str, bounds, params: GSParams, r: float) -> PeriodicReport:
    if mode == "full":
        return periodic_full(bounds, params, r)
    if mode == "reduced":
        return periodic_reduced(bounds, params, r)
    raise ValueError(f"unknown mode {mode!r}")
