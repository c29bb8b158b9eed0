"""Full Monte Carlo cross-check of the analytic spectra, conditional
correlators, finite-time entanglement degree and feedback spectrum."""
import argparse
import json
import math
from pathlib import Path

from squeezed_gie import ExperimentConfig, calibrate_epsilon
from squeezed_gie.oracle import ValidationPlan, run_validation


def main(out: Path, n_traj: int, workers: int):
    ref = ExperimentConfig(epsilon=0.0, squeeze_r=1.0, squeeze_phi_rad=math.pi / 2, laser_power_w=1e-10)
    cfg = ref.replace(epsilon=calibrate_epsilon(ref, 0.30))
    res = run_validation(cfg, ValidationPlan(n_traj=n_traj, workers=workers))
    for c in res.checks:
        print(f"{'ok  ' if c.passed else 'FAIL'} {c.name:22s} analytic {c.analytic:.6g}  "
              f"empirical {c.empirical:.6g}  tol {c.tolerance:.3g} ({c.kind})")
    print(f"wall time {res.wall_time_s:.0f} s, residual transient {res.transient:.2e}")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(res.to_dict(), indent=2) + "\n")
    return 0 if res.passed else 3


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", type=Path, default=Path("results/oracle_validation.json"))
    p.add_argument("--n-traj", type=int, default=200)
    p.add_argument("--workers", type=int, default=1)
    a = p.parse_args()
    raise SystemExit(main(a.out, a.n_traj, a.workers))
