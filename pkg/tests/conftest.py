import math

import pytest

from squeezed_gie import ExperimentConfig, calibrate_epsilon

# one line per acceptance criterion, printed at the end of the run
CRITERIA: dict[str, tuple[bool, str]] = {}


def record(criterion: str, passed: bool, detail: str) -> None:
    CRITERIA[criterion] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(CRITERIA, key=lambda k: (int(k.split()[0]), k)):
        ok, detail = CRITERIA[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")


@pytest.fixture(scope="session")
def table_cfg():
    """Default parameters, 1e-10 W, phase squeezing r = 1, coupling still zero."""
    return ExperimentConfig(epsilon=0.0, squeeze_r=1.0, squeeze_phi_rad=math.pi / 2, laser_power_w=1e-10)


@pytest.fixture(scope="session")
def eps_cal(table_cfg):
    return calibrate_epsilon(table_cfg, 0.30)


@pytest.fixture(scope="session")
def cfg(table_cfg, eps_cal):
    """Calibrated reference scenario (E_Fil(Omega_+) = 0.30 at r = 1)."""
    return table_cfg.replace(epsilon=eps_cal)
