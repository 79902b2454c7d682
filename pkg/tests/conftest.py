import pytest

from gencanvas.adapters import MockImageAdapter, MockLanguageAdapter
from gencanvas.config import RuntimeConfig
from gencanvas.lexicon import load_lexicon
from gencanvas.runtime import CanvasRuntime
from gencanvas.scheduler import VirtualClock


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon()


@pytest.fixture()
def language(lexicon):
    return MockLanguageAdapter(lexicon)


@pytest.fixture()
def image_adapter(lexicon):
    return MockImageAdapter(lexicon, default_size=(64, 64))


@pytest.fixture()
def make_runtime(lexicon):
    def factory(**config_kwargs) -> CanvasRuntime:
        config_kwargs.setdefault("mock_image_size", 64)
        cfg = RuntimeConfig(**config_kwargs)
        return CanvasRuntime(cfg, clock=VirtualClock())

    return factory


@pytest.fixture()
def runtime(make_runtime):
    return make_runtime()


# -- acceptance reporting -----------------------------------------------------

_acceptance_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _acceptance_results.append((name, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _acceptance_results:
        terminalreporter.write_line(f"[{outcome}] {name}")
