from pathlib import Path

import pytest

from claimfreq.portfolio import parse_portfolio_csv

DATA = Path(__file__).resolve().parents[1] / "data"
TABLE1 = DATA / "table1.csv"


@pytest.fixture(scope="session")
def table1_path() -> Path:
    return TABLE1


@pytest.fixture(scope="session")
def histories():
    return parse_portfolio_csv(TABLE1.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def by_tariff(histories):
    return {h.tariff_id: h for h in histories}
