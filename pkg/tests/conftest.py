import copy

import pytest

from bladeopt.config import apply_overrides, config_from_dict


def make_config(output_dir, overrides=(), **data):
    """Small surrogate experiment; keyword sections are merged into the document."""
    doc = {"version": 1, "name": "t", "n_hh": 3, "budget": {"max_generations": 4},
           "output_dir": str(output_dir)}
    doc.update(copy.deepcopy(data))
    return config_from_dict(apply_overrides(doc, overrides))


@pytest.fixture
def small_config(tmp_path):
    def factory(name="run", overrides=(), **data):
        return make_config(tmp_path / name, overrides, **data)

    return factory


# acceptance results, printed once at the end of the session
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
