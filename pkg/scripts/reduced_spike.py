"""Reduced spike (lambda1 = 1/9, lambda2 = 9, d = 4, N = 20): approx and prove.

    python3 scripts/reduced_spike.py [OUTDIR]
"""
from __future__ import annotations

import sys
from pathlib import Path

from gscap.cli import main


def run(out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    cand = out / "reduced_spike.json"
    rc = main(["approx", "--mode", "reduced", "--lambda1", "1/9", "--d", "4", "--N0", "20",
               "--out", str(cand)])
    if rc:
        return rc
    return main(["prove", str(cand), "--N", "20", "--r0", "5e-4"])


if __name__ == "__main__":
    sys.exit(run(Path(sys.argv[1] if len(sys.argv) > 1 else "out")))
