from __future__ import annotations

import json

import numpy as np
import pytest

from gscap.candidate import (
    CandidateFormatError,
    candidate_digest,
    read_candidate,
    write_candidate,
)
from gscap.d4seq import D4Seq, Grid, PairSeq, tri_size


def test_round_trip_pair(tmp_path, rng):
    grid = Grid(5.0, 4, 4)
    U = PairSeq(D4Seq(rng.standard_normal(tri_size(4)), 4, grid),
                D4Seq(rng.standard_normal(tri_size(4)) * 1e-20, 4, grid))
    path = write_candidate(tmp_path / "c.json", U, "1/9", 10)
    c = read_candidate(path)
    assert c.lambda1 == "1/9" and c.lambda2 == "10" and c.components == 2
    assert np.array_equal(c.U.first.coeffs, U.first.coeffs)
    assert np.array_equal(c.U.second.coeffs, U.second.coeffs)
    assert candidate_digest(path).startswith("sha256:")


def test_round_trip_scalar(tmp_path, rng):
    U = D4Seq(rng.standard_normal(tri_size(3)), 3, Grid(2.0, 3, 3))
    c = read_candidate(write_candidate(tmp_path / "s.json", U, 0.25, 4))
    assert c.components == 1 and c.lambda1 == "1/4"
    assert np.array_equal(c.U.coeffs, U.coeffs)


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("order"),
    lambda d: d.update(component_count=3),
    lambda d: d["coeffs"][0].pop(),
    lambda d: d["coeffs"][0].__setitem__(0, "x"),
])
def test_malformed_rejected(tmp_path, rng, mutate):
    U = D4Seq(rng.standard_normal(tri_size(2)), 2, Grid(2.0, 2, 2))
    path = write_candidate(tmp_path / "m.json", U, "1/9", 9)
    doc = json.loads(path.read_text())
    mutate(doc)
    path.write_text(json.dumps(doc))
    with pytest.raises(CandidateFormatError):
        read_candidate(path)


def test_not_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{")
    with pytest.raises(CandidateFormatError):
        read_candidate(p)
