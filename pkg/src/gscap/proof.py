"""Radii-polynomial verification, pipeline orchestration and certificates.

A proof succeeds at radius ``r`` when both

    Z2(r) r^2 / 2 - (1 - Z1) r + Y0 < 0   and   Z1 + Z2(r) r < 1

hold at the upper endpoints of their interval enclosures.
"""
from __future__ import annotations

import json
import logging
import math
import platform
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .approxinv import build_BN
from .bounds import full_bounds
from .d4seq import D4Seq, PairSeq, trace_enclose, trace_project, trace_residual
from .interval import RInterval, ival, to_decimal
from .model import GSParams, _as_fraction
from .periodic import PeriodicReport, RadiiCheck, check_radius, periodic_condition
from .reduced import reduced_bounds, reduced_build_Br

__all__ = [
    "SCHEMA",
    "EXIT_BOTH",
    "EXIT_LOCALIZED",
    "EXIT_FAILURE",
    "ProofError",
    "RadiiError",
    "CertificateError",
    "radii_find",
    "Certificate",
    "prove",
    "write_certificate",
    "read_certificate",
]

log = logging.getLogger(__name__)

SCHEMA = "gscap-certificate/1"
EXIT_BOTH = 0
EXIT_LOCALIZED = 10
EXIT_FAILURE = 20


class ProofError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage: str, msg: str):
        super().__init__(f"[{stage}] {msg}")
        self.stage = stage


class RadiiError(ProofError):
    """No radius verifies; ``margin`` is the signed worst slack at the best probe."""

    def __init__(self, msg: str, margin: float, r: float | None):
        super().__init__("radii", msg)
        self.margin = margin
        self.r = r


class CertificateError(ValueError):
    """Malformed or internally inconsistent certificate."""


# ----------------------------------------------------------------------------
# radius search


def _margin(chk: RadiiCheck) -> float:
    """Largest violation (positive means failure) over both inequalities."""
    return max(float(chk.poly.hi), float(chk.contraction.hi) - 1.0)


def _window(Y0: float, Z1: float, z2: float) -> tuple[float, float] | None:
    """Float estimate of the interval of radii where both inequalities hold for constant ``z2``."""
    a = 1.0 - Z1
    if z2 <= 0:
        return (Y0 / a, math.inf) if a > 0 else None
    disc = a * a - 2.0 * z2 * Y0
    if disc <= 0:
        return None
    sq = math.sqrt(disc)
    lo = (a - sq) / z2
    hi = min((a + sq) / z2, a / z2)
    return (lo, hi) if lo < hi else None


def radii_find(Y0, Z1, z2_const, z2_slope, probe: float | None = None) -> RadiiCheck:
    """Radius ``r0`` at which both inequalities verify rigorously.

    A supplied probe is tried first.  Otherwise the window is computed with
    ``Z2`` frozen at its value at the current guess, the midpoint of the window
    is re-evaluated with the true ``Z2(r)``, and a short geometric scan of the
    window is used as fallback.
    """
    Y0, Z1, c, s = (ival(x) for x in (Y0, Z1, z2_const, z2_slope))
    if not float(Z1.hi) < 1.0:
        raise RadiiError(f"Z1 = {float(Z1.hi):.6g} is not below 1", float(Z1.hi) - 1.0, None)
    best: RadiiCheck | None = None
    tried: list[RadiiCheck] = []
    if probe is not None:
        chk = check_radius(Y0, Z1, c, s, probe)
        if chk.ok:
            return chk
        tried.append(chk)
    y, z = float(Y0.hi), float(Z1.hi)
    guess = 0.0
    for _ in range(4):
        w = _window(y, z, float((c + s * ival(guess)).hi))
        if w is None:
            break
        lo, hi = w
        if not math.isfinite(hi):
            hi = max(2.0 * lo, 1e-8)
        r = 0.5 * (lo + hi)
        chk = check_radius(Y0, Z1, c, s, r)
        if chk.ok:
            return chk
        tried.append(chk)
        guess = r
    w = _window(y, z, float(c.hi))
    if w is not None:
        lo, hi = w
        hi = hi if math.isfinite(hi) else max(2.0 * lo, 1e-8)
        lo = max(lo, hi * 1e-12)
        for r in np.geomspace(lo, hi, 40)[1:-1]:
            chk = check_radius(Y0, Z1, c, s, float(r))
            if chk.ok:
                return chk
            tried.append(chk)
    if tried:
        best = min(tried, key=_margin)
        raise RadiiError(
            f"no verifiable radius; best probe r = {best.r:.6g} has margin {_margin(best):.3e}",
            _margin(best), best.r,
        )
    raise RadiiError("the radii polynomial has no positive window", float("inf"), None)


# ----------------------------------------------------------------------------
# certificate


def _enc(x) -> list[str]:
    x = ival(x)
    return [to_decimal(float(x.lo)), to_decimal(float(x.hi))]


def _dec(v) -> RInterval:
    try:
        lo, hi = (float(t) for t in v)
    except (TypeError, ValueError) as exc:
        raise CertificateError(f"bad interval encoding {v!r}") from exc
    return RInterval(lo, hi)


def _toolchain() -> dict[str, str]:
    import mpmath
    import scipy

    from . import __version__

    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "mpmath": mpmath.__version__,
        "gscap": __version__,
    }


@dataclass
class Certificate:
    """All enclosures of a proof run together with the verified radius and verdicts.

    ``bounds`` maps names to intervals; ``Y0``, ``Z1_total``, ``Z2_const`` and
    ``Z2_slope`` are the entries the radii inequalities are re-checked from.
    ``periodic`` holds ``z1_hat``, ``z2_hat_const`` and ``z2_hat_slope`` (and
    the kappa-hat constants) when the branch check was run.
    """

    mode: str
    params: dict
    candidate_digest: str
    kappas: dict[str, RInterval]
    decay: dict[str, RInterval]
    bounds: dict[str, RInterval]
    periodic: dict[str, RInterval] | None
    r0: RInterval
    verdicts: dict[str, bool]
    toolchain: dict[str, str] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    def exit_code(self) -> int:
        if not self.verdicts.get("localized"):
            return EXIT_FAILURE
        if self.periodic is None or self.verdicts.get("periodic"):
            return EXIT_BOTH
        return EXIT_LOCALIZED

    def recheck(self) -> dict[str, bool]:
        """Re-evaluate both radii conditions from the stored enclosures."""
        b = self.bounds
        r = float(self.r0.hi)
        loc = check_radius(b["Y0"], b["Z1_total"], b["Z2_const"], b["Z2_slope"], r).ok
        out = {"localized": loc, "periodic": False}
        if self.periodic is not None:
            p = self.periodic
            chk = check_radius(b["Y0"], p["z1_hat"], p["z2_hat_const"], p["z2_hat_slope"], r)
            out["periodic"] = loc and chk.ok and float(p["z1_hat"].hi) < 1.0
        return out

    def validate(self) -> None:
        if self.mode not in ("full", "reduced"):
            raise CertificateError(f"unknown mode {self.mode!r}")
        if float(self.r0.lo) != float(self.r0.hi) or not float(self.r0.lo) > 0:
            raise CertificateError("r0 must be a positive point value")
        for key in ("Y0", "Z1_total", "Z2_const", "Z2_slope"):
            if key not in self.bounds:
                raise CertificateError(f"missing bound {key}")
        re = self.recheck()
        if re["localized"] != bool(self.verdicts.get("localized")):
            raise CertificateError("localized verdict does not match the stored bounds")
        if self.periodic is not None and re["periodic"] != bool(self.verdicts.get("periodic")):
            raise CertificateError("periodic verdict does not match the stored bounds")

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "mode": self.mode,
            "params": self.params,
            "candidate_digest": self.candidate_digest,
            "kappas": {k: _enc(v) for k, v in self.kappas.items()},
            "decay": {k: _enc(v) for k, v in self.decay.items()},
            "bounds": {k: _enc(v) for k, v in self.bounds.items()},
            "periodic": None if self.periodic is None else {k: _enc(v) for k, v in self.periodic.items()},
            "r0": _enc(self.r0),
            "verdicts": dict(self.verdicts),
            "toolchain": dict(self.toolchain),
            "timings": {k: round(v, 3) for k, v in self.timings.items()},
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Certificate":
        if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
            raise CertificateError(f"not a {SCHEMA} document")
        try:
            per = doc["periodic"]
            cert = cls(
                mode=doc["mode"],
                params=dict(doc["params"]),
                candidate_digest=str(doc["candidate_digest"]),
                kappas={k: _dec(v) for k, v in doc["kappas"].items()},
                decay={k: _dec(v) for k, v in doc["decay"].items()},
                bounds={k: _dec(v) for k, v in doc["bounds"].items()},
                periodic=None if per is None else {k: _dec(v) for k, v in per.items()},
                r0=_dec(doc["r0"]),
                verdicts={k: bool(v) for k, v in doc["verdicts"].items()},
                toolchain=dict(doc.get("toolchain", {})),
                timings=dict(doc.get("timings", {})),
            )
        except (KeyError, AttributeError, TypeError) as exc:
            raise CertificateError(f"malformed certificate: {exc}") from exc
        cert.validate()
        return cert


def write_certificate(cert: Certificate, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(cert.to_json(), indent=1) + "\n")
    return path


def read_certificate(path) -> Certificate:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise CertificateError(f"{path}: not valid JSON ({exc})") from exc
    return Certificate.from_json(doc)


# ----------------------------------------------------------------------------
# pipeline


def _traced(U0, params: GSParams, apply_trace: bool):
    U = U0.mid()
    scale = float(np.max(np.abs(U.flatten() if isinstance(U, PairSeq) else U.coeffs)))
    res = trace_residual(U)
    if res > 1e-12 * max(1.0, scale):
        if not apply_trace:
            raise ProofError("trace", f"candidate is not in the trace kernel (residual {res:.3e}); "
                             "project it first or allow the projection")
        U = trace_project(U, params)
    try:
        return trace_enclose(U, params)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ProofError("trace", str(exc)) from exc


def _check_reduced(params: GSParams):
    if _as_fraction(params.lambda1) * _as_fraction(params.lambda2) != 1:
        raise ProofError("setup", "the scalar mode needs lambda1 * lambda2 = 1 exactly")


def prove(mode: str, params: GSParams, U0: D4Seq | PairSeq, probe: float | None = None,
          periodic: bool = True, squarings: int = 6, apply_trace: bool = False,
          digest: str = "") -> Certificate:
    """Run trace -> approximate inverse -> bounds -> radius -> periodic branch.

    Failing inequalities give a certificate with false verdicts; a failed
    radius search is recorded at the probe (or the best scanned radius).
    """
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    if mode == "reduced":
        _check_reduced(params)
        if not isinstance(U0, D4Seq):
            raise ProofError("setup", "the scalar mode expects a single-component candidate")
    elif mode == "full":
        if not isinstance(U0, PairSeq):
            raise ProofError("setup", "the full mode expects a two-component candidate")
    else:
        raise ProofError("setup", f"unknown mode {mode!r}")
    U = _traced(U0, params, apply_trace)
    timings["trace"] = time.perf_counter() - t0

    t = time.perf_counter()
    try:
        binv = build_BN(params, U, squarings=8) if mode == "full" else reduced_build_Br(params, U)
    except np.linalg.LinAlgError as exc:
        raise ProofError("approxinv", str(exc)) from exc
    timings["approxinv"] = time.perf_counter() - t
    log.info("approximate inverse: ||B|| <= %.6g", float(binv.b11_norm.hi))

    t = time.perf_counter()
    if mode == "full":
        fb = full_bounds(params, U, binv, squarings)
        bounds = {
            "Y0": fb.Y0.value, "Z1": fb.Z1.value, "Zu1": fb.Zu1.value, "Zu2": fb.Zu2.value,
            "Zu": fb.Z1_total.parts["Zu"], "Z1_trunc": fb.Z1_total.parts["trunc"],
            "Z1_total": fb.Z1_total.value,
            "Z21": fb.Z2.parts["Z21"], "Z22": fb.Z2.parts["Z22"], "Z23": fb.Z2.parts["Z23"],
            "Z2_const": fb.Z2.parts["const"], "Z2_slope": fb.Z2.parts["slope"],
            "B_norm": fb.b11_norm,
        }
        kap = {"kappa0": fb.kappas.kappa0, "kappa2": fb.kappas.kappa2, "kappa3": fb.kappas.kappa3}
        dc = fb.decay
        res = fb
    else:
        rb = reduced_bounds(params, U, binv, squarings)
        bounds = {
            "Y0": rb.Y0.value, "Z1": rb.Z1.value, "Zu1": rb.Zu1.value, "Zu2": rb.Zu2.value,
            "Zu": rb.Z1_total.parts["Zu"], "Z1_total": rb.Z1_total.value,
            "Z11": rb.Z1.parts["Z11"], "Z12": rb.Z1.parts["Z12"], "Z13": rb.Z1.parts["Z13"],
            "Z14": rb.Z1.parts["Z14"],
            "BU0": rb.Z2.parts["BU0"], "U0_l1": rb.Z2.parts["U0_l1"], "Z2_mixed": rb.Z2.parts["mixed"],
            "Z2_const": rb.Z2.parts["const"], "Z2_slope": rb.Z2.parts["slope"],
            "B_norm": rb.br_norm,
        }
        kap = {"kappa2": rb.kappas.kappa2}
        dc = rb.decay
        res = rb
    timings["bounds"] = time.perf_counter() - t
    decay = {k: getattr(dc, k) for k in dc.__dataclass_fields__}

    try:
        chk = radii_find(bounds["Y0"], bounds["Z1_total"], bounds["Z2_const"], bounds["Z2_slope"], probe)
    except RadiiError as exc:
        log.warning("%s", exc)
        r = exc.r if exc.r is not None else (probe if probe is not None else 1e-6)
        chk = check_radius(bounds["Y0"], bounds["Z1_total"], bounds["Z2_const"], bounds["Z2_slope"], r)
    bounds["Z2_at_r0"] = chk.z2
    bounds["poly_at_r0"] = chk.poly
    bounds["contraction_at_r0"] = chk.contraction

    per_doc = None
    per_ok = False
    if periodic:
        rep: PeriodicReport = periodic_condition(mode, res, params, chk.r)
        per_doc = {
            "kappa2_hat": rep.kappa2_hat,
            "z1_hat": rep.z1_hat,
            "z2_hat_const": rep.z2_hat_const,
            "z2_hat_slope": rep.z2_hat_slope,
            "z2_hat_at_r0": rep.z2_hat_at_r,
            "poly_at_r0": rep.check.poly,
        }
        if rep.kappa3_hat is not None:
            per_doc["kappa3_hat"] = rep.kappa3_hat
            per_doc["kappa0_hat"] = rep.kappa0_hat
        per_ok = rep.verdict and chk.ok
    timings["total"] = time.perf_counter() - t0

    grid = params.grid
    cert = Certificate(
        mode=mode,
        params={
            "lambda1": str(_as_fraction(params.lambda1)),
            "lambda2": str(_as_fraction(params.lambda2)),
            "d": float(grid.d), "N": int(grid.N), "N0": int(grid.N0),
        },
        candidate_digest=digest,
        kappas=kap,
        decay=decay,
        bounds=bounds,
        periodic=per_doc,
        r0=RInterval(chk.r, chk.r),
        verdicts={"localized": chk.ok, "periodic": per_ok},
        toolchain=_toolchain(),
        timings=timings,
    )
    return cert
