import pathlib

import pytest
from hypothesis import HealthCheck, settings

from barstream.metrics import EvaluationLog

settings.register_profile(
    "suite",
    max_examples=50,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def make_log(labels, probs):
    """Build an EvaluationLog from parallel label/probability lists."""
    log = EvaluationLog()
    for t, (y, p) in enumerate(zip(labels, probs)):
        log.append(t, y, p)
    return log


@pytest.fixture
def fixtures_dir():
    return FIXTURES
