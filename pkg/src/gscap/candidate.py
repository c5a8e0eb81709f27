"""Coefficient files for approximate solutions.

A candidate is a JSON document

    {"lambda1": "1/9", "lambda2": "10", "d": 8.0, "order": 50,
     "component_count": 2, "coeffs": [[...], [...]]}

with coefficients as decimal strings in the reduced storage order
(``(n1, n2)`` with ``0 <= n2 <= n1 <= order``, n1-major).  The decimal
strings carry 17 digits after the point, so floats round-trip exactly.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .d4seq import D4Seq, Grid, PairSeq, tri_size
from .interval import to_decimal
from .model import GSParams, _as_fraction

__all__ = [
    "CandidateFormatError",
    "Candidate",
    "write_candidate",
    "read_candidate",
    "candidate_digest",
]


class CandidateFormatError(ValueError):
    """Malformed coefficient file."""


def _frac_str(x) -> str:
    return str(_as_fraction(x))


@dataclass
class Candidate:
    lambda1: str
    lambda2: str
    d: float
    U: D4Seq | PairSeq

    @property
    def order(self) -> int:
        return self.U.order

    @property
    def components(self) -> int:
        return 2 if isinstance(self.U, PairSeq) else 1

    def params(self, N: int | None = None) -> GSParams:
        grid = Grid(self.d, self.order, self.order if N is None else N)
        return GSParams(Fraction(self.lambda1), Fraction(self.lambda2), grid)

    def with_grid(self, grid: Grid) -> "Candidate":
        U = self.U
        if isinstance(U, PairSeq):
            U = PairSeq(D4Seq(U.first.coeffs, U.order, grid), D4Seq(U.second.coeffs, U.order, grid))
        else:
            U = D4Seq(U.coeffs, U.order, grid)
        return Candidate(self.lambda1, self.lambda2, self.d, U)


def _comps(U) -> list[np.ndarray]:
    if isinstance(U, PairSeq):
        U = U.mid()
        return [U.first.coeffs, U.second.coeffs]
    return [U.mid().coeffs]


def write_candidate(path, U: D4Seq | PairSeq, lambda1, lambda2) -> Path:
    """Write the float midpoint of ``U`` with its parameters; returns the path."""
    if U.grid is None:
        raise ValueError("the candidate must carry its grid")
    doc = {
        "lambda1": _frac_str(lambda1),
        "lambda2": _frac_str(lambda2),
        "d": float(U.grid.d),
        "order": int(U.order),
        "component_count": 2 if isinstance(U, PairSeq) else 1,
        "coeffs": [[to_decimal(x) for x in c] for c in _comps(U)],
    }
    path = Path(path)
    path.write_text(json.dumps(doc, indent=1) + "\n")
    return path


def read_candidate(path) -> Candidate:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise CandidateFormatError(f"{path}: not valid JSON ({exc})") from exc
    missing = {"lambda1", "lambda2", "d", "order", "component_count", "coeffs"} - set(doc)
    if missing:
        raise CandidateFormatError(f"{path}: missing fields {sorted(missing)}")
    order = int(doc["order"])
    k = int(doc["component_count"])
    coeffs = doc["coeffs"]
    if k not in (1, 2) or len(coeffs) != k:
        raise CandidateFormatError(f"{path}: component_count must be 1 or 2 and match coeffs")
    try:
        arrs = [np.array([float(x) for x in c]) for c in coeffs]
    except (TypeError, ValueError) as exc:
        raise CandidateFormatError(f"{path}: coefficients must be decimal strings") from exc
    if any(a.shape != (tri_size(order),) for a in arrs):
        raise CandidateFormatError(f"{path}: expected {tri_size(order)} coefficients per component")
    d = float(doc["d"])
    grid = Grid(d, order, order)
    seqs = [D4Seq(a, order, grid) for a in arrs]
    U = PairSeq(*seqs) if k == 2 else seqs[0]
    return Candidate(_frac_str(doc["lambda1"]), _frac_str(doc["lambda2"]), d, U)


def candidate_digest(path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()
