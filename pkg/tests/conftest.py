import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from polar_rcsc.code import PolarCode, construct_frozen_set  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
PINNED_1024 = ROOT / "data" / "polar_1024_512.frz"


@pytest.fixture
def code_8_3():
    return PolarCode.from_frozen_indices(3, [0, 1, 2, 3, 4])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def small_codes():
    """A spread of small codes, including the degenerate rates."""
    out = [PolarCode.from_frozen_indices(3, [0, 1, 2, 3, 4])]
    for n in (1, 2, 3, 4):
        N = 1 << n
        for K in sorted({0, 1, N // 2, N - 1, N}):
            out.append(construct_frozen_set(n, K))
    return out


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if not mod or not mod.REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.REPORT, key=lambda k: (int(k[1:].split()[0].rstrip("b")), k)):
        terminalreporter.write_line(mod.REPORT[key])
