import pytest

from prefsel.io_cli import load_case_study, load_golden_tables


@pytest.fixture(scope="session")
def case_study():
    """Bundled green-supplier table (gamma=5) and the 8 expert judgments."""
    return load_case_study(gamma=5)


@pytest.fixture(scope="session")
def golden():
    return load_golden_tables()
