import functools
import time
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from cpodpo.critical import CriticalOptions, solve_cpe
from cpodpo.graph import parse_graph, parse_parameters, random_parameters
from cpodpo.solver import SolverOptions

DATA = Path(__file__).resolve().parents[1] / "src" / "cpodpo" / "data"

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def data_path(name: str) -> Path:
    return DATA / name


@functools.cache
def graph(name: str):
    return parse_graph((DATA / f"{name}.json").read_text())


def params_file(g, name: str):
    return parse_parameters(g, (DATA / f"{name}.json").read_text())


RUN_SECONDS: dict = {}
ACCEPTANCE_LINES: list[str] = []


@functools.cache
def run(name: str, seed: int, gamma_seed: int = 0, faces: bool = False):
    """Cached full pipeline run, shared between the module tests and the acceptance suite."""
    g = graph(name)
    c = random_parameters(g, seed)
    opts = CriticalOptions(solver=SolverOptions(gamma_seed=gamma_seed), skip_faces=not faces)
    t0 = time.perf_counter()
    rep = solve_cpe(g, c, opts)
    RUN_SECONDS[(name, seed, gamma_seed, faces)] = time.perf_counter() - t0
    return g, c, rep


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, merging the instances a criterion was split over."""
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted({n for n, *_ in ACCEPTANCE_LINES}):
        parts = [x for x in ACCEPTANCE_LINES if x[0] == number]
        title = parts[0][1]
        instances = [inst for _, _, inst, _, _ in parts if inst]
        bad = [f"{inst or title}: {detail}" for _, _, inst, ok, detail in parts if not ok]
        head = f"criterion {number} ({title}" + (f" on {', '.join(instances)})" if instances else ")")
        status = "FAIL: " + " | ".join(bad) if bad else "PASS"
        terminalreporter.write_line(f"{head}: {status}")


@pytest.fixture
def hexagonal():
    return graph("hexagonal")
