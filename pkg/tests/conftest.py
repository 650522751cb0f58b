import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from substatic import WarpedProductModel
from substatic.warped import EtaDefinedProfile

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def eta_model(a: float, b: float, s_max: float = 4.0, name: str = "ETA") -> WarpedProductModel:
    """n = 3 model with ``eta(t) = -a t - b t^2`` (``eta'' = -2b``)."""

    def eta(t):
        t = np.asarray(t, dtype=float)
        return -a * t - b * t**2, -a - 2 * b * t, np.full_like(t, -2.0 * b), np.zeros_like(t)

    return WarpedProductModel(name, 3, 1.0, 1.0, EtaDefinedProfile(eta), s_max=s_max)


@pytest.fixture
def negative_model():
    # eta'' = -2 < 0 everywhere; horizon at s = 1 where 1 - s^-4 vanishes
    return eta_model(0.0, 1.0, name="NEG")


ACCEPTANCE: dict = {}


@pytest.fixture
def accept(request):
    """Record an acceptance verdict; the terminal summary prints one line per criterion."""

    def record(key: str, ok: bool, detail: str = ""):
        ACCEPTANCE[key] = (bool(ok), detail)
        assert ok, f"acceptance {key} failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int("".join(c for c in k if c.isdigit())), k)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key:<4s} {'PASS' if ok else 'FAIL'}  {detail}")
