"""Minimal total measurement time for SNR = 1 with and without squeezing,
at the calibrated coupling; prints a small table and writes JSON."""
import argparse
import json
import math
from pathlib import Path

from squeezed_gie import ExperimentConfig, calibrate_epsilon, e_fil, time_to_snr


def main(out: Path, target: float):
    ref = ExperimentConfig(epsilon=0.0, squeeze_r=1.0, squeeze_phi_rad=math.pi / 2, laser_power_w=1e-10)
    eps = calibrate_epsilon(ref, 0.30)
    rows = []
    for r in (1.0, 0.0):
        cfg = ref.replace(epsilon=eps, squeeze_r=r)
        t, n0 = time_to_snr(cfg, target)
        rows.append({"squeeze_r": r, "e_fil": e_fil(cfg).e_fil, "t_total_s": t, "log10_t_total": math.log10(t),
                     "n0": n0})
        print(f"r = {r:.1f}: E_Fil = {rows[-1]['e_fil']:.4f}, T_total = 10^{math.log10(t):.3f} s, N0 = {n0}")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps({"epsilon": eps, "target_snr": target, "rows": rows}, indent=2) + "\n")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", type=Path, default=Path("results/detection_time.json"))
    p.add_argument("--target-snr", type=float, default=1.0)
    a = p.parse_args()
    main(a.out, a.target_snr)
