import sys
from pathlib import Path

import pytest

# Make the sibling oracles module importable regardless of rootdir layout.
sys.path.insert(0, str(Path(__file__).resolve().parent))

try:
    from hypothesis import HealthCheck, settings

    settings.register_profile(
        "pkg",
        max_examples=40,
        deadline=None,
        suppress_health_check=[HealthCheck.too_slow],
    )
    settings.load_profile("pkg")
except ImportError:  # pragma: no cover - hypothesis is an optional test dep
    pass


@pytest.fixture(scope="session")
def ref_cycle_config():
    """The reference cycle used throughout: compression 0.35 -> 1.0,
    beta_cold = 2, beta_hot = 0.2, equal stroke times."""
    from ottosta.thermo_cycle import CycleConfig

    def make(tau: float, **kw) -> CycleConfig:
        return CycleConfig(
            omega1=0.35, omega2=1.0, beta1=2.0, beta2=0.2, tau1=tau, tau3=tau, **kw
        )

    return make
