import sys

import pytest
from hypothesis import settings

from fuzzyseg.model import bundled_class_models
from fuzzyseg.rulebase import induct

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")


@pytest.fixture(scope="session")
def class_models():
    return bundled_class_models()


@pytest.fixture(scope="session")
def rulebases(class_models):
    return [induct(m) for m in class_models.values()]


@pytest.fixture(scope="session")
def rulebase_by_class(rulebases):
    return {rb.class_id: rb for rb in rulebases}


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
