from importlib.resources import files

import pytest

from cyclo.proof_format import load

EXAMPLES = files("cyclo") / "examples"


def example(name: str):
    return load(EXAMPLES / f"{name}.proof")


@pytest.fixture
def nr():
    return example("nr")


@pytest.fixture
def stutter():
    return example("stutter")


@pytest.fixture
def fig4():
    return example("fig4")
