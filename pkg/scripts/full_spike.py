"""Full-system spike (lambda1 = 1/9, lambda2 = 10, d = 8, N0 = 50, N = 20).

Newton at lambda2 = 9 from the linear seed, continuation to lambda2 = 10,
then the proof at r0 = 6e-6.

    python3 scripts/full_spike.py [OUTDIR]
"""
from __future__ import annotations

import sys
from pathlib import Path

from gscap.cli import main


def run(out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    start = out / "full_spike_9.json"
    chain = out / "chain"
    rc = main(["approx", "--mode", "full", "--lambda1", "1/9", "--lambda2", "9", "--d", "8",
               "--N0", "50", "--seed-form", "linear", "--out", str(start)])
    if rc:
        return rc
    rc = main(["continue", "--from", str(start), "--lambda2", "10", "--step", "0.5", "--out", str(chain)])
    if rc:
        return rc
    return main(["prove", str(chain / "final.json"), "--N", "20", "--r0", "6e-6"])


if __name__ == "__main__":
    sys.exit(run(Path(sys.argv[1] if len(sys.argv) > 1 else "out")))
