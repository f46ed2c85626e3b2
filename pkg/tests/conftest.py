import numpy as np
import pytest

from majorana_cf import DriveSpec, propagate
from majorana_cf.cli import PRESETS
from majorana_cf.oracle import default_dt
from majorana_cf.spectrum import minimal_window

ACCEPTANCE = {}


def record(key, passed, detail):
    """Store one acceptance line for the terminal summary."""
    ACCEPTANCE[key] = (bool(passed), detail)
    print(f"{key} {'PASS' if passed else 'FAIL'}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key} {'PASS' if passed else 'FAIL'}: {detail}")


def preset_drive(name):
    p = PRESETS[name]
    return DriveSpec.monochromatic(p["epsilon"], p["amplitude"], p["omega_drive"])


@pytest.fixture(scope="session")
def preset_traces():
    """Oracle traces over the full decay window for every figure5 preset."""
    out = {}
    for name in PRESETS:
        d = preset_drive(name)
        dt = default_dt(d)
        out[name] = propagate(d, dt, int(np.ceil(1.05 * minimal_window(0.01) / dt)))
    return out
