from fractions import Fraction

import pytest

from hetcache.grouping import group_users, worst_case_demand
from hetcache.model import SystemConfig, generate_library
from hetcache.placement import partition_subfiles, place_random

EXAMPLE1_MU = (Fraction(1, 8), Fraction(1, 4), Fraction(1, 2), Fraction(1))


class Instance:
    """Everything derived from (config, seed, demand) for one bit-level run."""

    def __init__(self, config, seed=0, demand=None):
        self.config = config
        self.seed = seed
        self.demand = worst_case_demand(config) if demand is None else demand
        self.library = generate_library(config, seed)
        self.placement = place_random(config, seed)
        self.partition = partition_subfiles(config, self.placement)
        self.grouping = group_users(config, self.demand)


@pytest.fixture
def example1():
    return SystemConfig(2, 1024, 4, EXAMPLE1_MU)


@pytest.fixture
def example1_instance(example1):
    return Instance(example1, seed=3)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record a one-line PASS/FAIL verdict for an acceptance criterion."""
    state = {}

    def note(label, detail=""):
        state["label"], state["detail"] = label, detail

    yield note
    failed = request.node.rep_call.failed if hasattr(request.node, "rep_call") else True
    if "label" in state:
        ACCEPTANCE_LINES.append(f"{'FAIL' if failed else 'PASS'}  {state['label']}  {state['detail']}".rstrip())


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
