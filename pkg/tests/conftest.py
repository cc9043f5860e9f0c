import pytest

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def record_criterion():
    def _record(number: int, title: str, ok: bool, detail: str):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}: {detail}")
        print(ACCEPTANCE_LINES[-1])
    return _record


_SAMPLE_CACHE: dict = {}


def cached_samples(N: int, n: int, samples: int, seed: int, kind: str = "product"):
    """Monte Carlo spectra shared between test modules within one session."""
    from ginprod.sampler import GinibreSpec, sample_spectra

    key = (N, n, samples, seed, kind)
    if key not in _SAMPLE_CACHE:
        _SAMPLE_CACHE[key] = sample_spectra(GinibreSpec(N, n, seed, samples), kind)
    return _SAMPLE_CACHE[key]


@pytest.fixture(scope="session")
def mc():
    return cached_samples
