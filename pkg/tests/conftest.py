import pytest

from toroidal.catalog import CATALOG
from toroidal.dependencies import get_services


@pytest.fixture(scope="session")
def services():
    return get_services()


@pytest.fixture(scope="session")
def etds(services):
    """Validated catalog ETDs, keyed by name."""
    etd_service = services["etd_service"]
    return {name: etd_service.validate(etd_file, window=8) for name, etd_file in CATALOG.items()}
