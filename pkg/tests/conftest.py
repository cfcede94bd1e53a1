import numpy as np
import pytest

from volrad.imgio import GrayImage


def brute_counts(z: np.ndarray, center: int, sq_dists) -> np.ndarray:
    """All-pairs oracle: points within each squared radius of ``center``."""
    h, w = z.shape
    yy, xx = np.indices((h, w))
    cy, cx = divmod(int(center), w)
    d2 = (yy - cy) ** 2 + (xx - cx) ** 2 + (z.astype(np.int64) - int(z[cy, cx])) ** 2
    d2 = np.sort(d2.ravel())
    return np.searchsorted(d2, np.asarray(sq_dists), side="right")


def brute_grid(r_max: int) -> list[int]:
    vals = {
        a * a + b * b + c * c
        for a in range(-r_max, r_max + 1)
        for b in range(-r_max, r_max + 1)
        for c in range(-r_max, r_max + 1)
    }
    return sorted(v for v in vals if 1 <= v <= r_max * r_max)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_image(rng):
    def make(h=32, w=32, hi=256):
        return GrayImage(rng.integers(0, hi, size=(h, w)))

    return make


# ------------------------------------------------- acceptance report lines

_CRITERIA: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


def pytest_runtest_logreport(report):
    label = getattr(report, "criterion_label", None)
    if label is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        outcome = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        _CRITERIA[label] = (outcome, report.nodeid)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion_label = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA, key=lambda s: int(s.split()[0])):
        outcome, _ = _CRITERIA[label]
        terminalreporter.write_line(f"{outcome}  criterion {label}")
