import pytest

from drshadow import *


@pytest.fixture
def vls():
    return load_system('vls')


@pytest.fixture
def frm():
    return load_system('frm')


@pytest.fixture
def halving():
    return load_system('halving')


@pytest.fixture
def identity():
    return load_system('nat-identity')


@pytest.fixture
def cantor():
    return CantorSpace()


@pytest.fixture
def nat():
    return NatSpace()
