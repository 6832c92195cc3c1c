from pathlib import Path

import pytest

import fairgate as fg

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN_DIR


@pytest.fixture(scope="session")
def loan_graph() -> fg.CausalGraph:
    return fg.load_graph(DATA_DIR / "loan.cg")


@pytest.fixture(scope="session")
def loan_closure(loan_graph) -> fg.Closure:
    return fg.close(loan_graph)


@pytest.fixture(scope="session")
def table1() -> fg.Dataset:
    return fg.generate_table1()
