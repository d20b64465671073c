import pytest

import helpers


@pytest.fixture
def ex1():
    return helpers.scenario(helpers.EX1)


@pytest.fixture
def ex2():
    return helpers.scenario(helpers.EX2)


@pytest.fixture
def ex3():
    return helpers.scenario(helpers.EX3)
