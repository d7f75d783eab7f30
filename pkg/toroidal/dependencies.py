from functools import lru_cache

from toroidal.catalog import CATALOG
from toroidal.config import Settings, load_settings
from toroidal.schemas.etd import EtdFile
from toroidal.services.base_change import BaseChangeService
from toroidal.services.degeneration import DegenerationService
from toroidal.services.etd import EtdService
from toroidal.services.forms import FormsService
from toroidal.services.frobenius import FrobeniusService
from toroidal.services.monoid import MonoidService


@lru_cache
def get_settings() -> Settings:
    """Settings from the environment - cached for the process"""
    return load_settings()


@lru_cache
def get_catalog() -> dict[str, EtdFile]:
    return dict(CATALOG)


@lru_cache
def get_monoid_service() -> MonoidService:
    return MonoidService(saturation_bound=get_settings().saturation_bound)


@lru_cache
def get_etd_service() -> EtdService:
    """Serves EtdService"""
    return EtdService(monoid_service=get_monoid_service(), window=get_settings().window)


@lru_cache
def get_forms_service() -> FormsService:
    return FormsService(etd_service=get_etd_service())


def get_base_change_service(jobs: int = 1) -> BaseChangeService:
    return BaseChangeService(forms_service=get_forms_service(), jobs=jobs)


def get_frobenius_service(jobs: int = 1) -> FrobeniusService:
    return FrobeniusService(forms_service=get_forms_service(), jobs=jobs)


def get_degeneration_service(jobs: int = 1) -> DegenerationService:
    """Serves DegenerationService with the configured u-bound"""
    return DegenerationService(
        forms_service=get_forms_service(),
        frobenius_service=get_frobenius_service(jobs),
        ubound=get_settings().ubound,
        jobs=jobs,
    )


def get_services(jobs: int = 1) -> dict:
    """Fresh service graph with default bounds, independent of the environment"""
    monoid_service = MonoidService()
    etd_service = EtdService(monoid_service=monoid_service)
    forms_service = FormsService(etd_service=etd_service)
    frobenius_service = FrobeniusService(forms_service=forms_service, jobs=jobs)
    return {
        "monoid_service": monoid_service,
        "etd_service": etd_service,
        "forms_service": forms_service,
        "base_change_service": BaseChangeService(forms_service=forms_service, jobs=jobs),
        "frobenius_service": frobenius_service,
        "degeneration_service": DegenerationService(
            forms_service=forms_service, frobenius_service=frobenius_service, jobs=jobs
        ),
    }
