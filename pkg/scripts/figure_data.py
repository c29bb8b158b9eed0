"""Regenerate the CSV data behind every figure preset (entanglement maps,
finite-time convergence, SNR contour) into an output directory."""
import argparse
import sys
from pathlib import Path

from squeezed_gie.cli import PRESETS, main


def run(out_dir: Path, presets, threads: int) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in presets:
        cmd = PRESETS[name]["command"]
        code = main([cmd, "--preset", name, "--threads", str(threads), "--out", str(out_dir / f"{name}.csv")])
        if code:
            return code
    return 0


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out-dir", type=Path, default=Path("results"))
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("presets", nargs="*", default=sorted(PRESETS))
    a = p.parse_args()
    sys.exit(run(a.out_dir, a.presets, a.threads))
