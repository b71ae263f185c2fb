import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import pytest

from credpersuasion.instances import example1, school, used_car


@pytest.fixture
def usedcar():
    return used_car()


@pytest.fixture
def schoolp():
    return school()


@pytest.fixture
def ex1():
    return example1()
