import sys
from pathlib import Path

import pytest

from obsgames.game import parse_game

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).resolve().parent.parent / "data"


def load_game(name: str):
    return parse_game((DATA / name).read_text())


@pytest.fixture(scope="session")
def table1():
    return load_game("table1.game")


@pytest.fixture(scope="session")
def g2():
    return load_game("g2.game")


@pytest.fixture(scope="session")
def pennies():
    return load_game("matching_pennies.game")


@pytest.fixture
def data_dir():
    return DATA
