import pytest

from toroidal.exceptions import (
    AmbientRankMismatchError,
    DegenerateSimplexError,
    NotInEssentialSetError,
    UnsupportedBaseError,
)
from toroidal.schemas.degeneration import HodgeFlag
from toroidal.services.degeneration import DegenerationService


class TestDegenerationOperations:
    """
    Kernel complex acyclicity, cohomology totals and lattice simplices
    """

    @pytest.fixture
    def degeneration_service(self, services) -> DegenerationService:
        return services["degeneration_service"]

    @pytest.mark.parametrize("name", ["a1", "xytw"])
    @pytest.mark.parametrize("truncation", [0, 1, 2])
    def test_kernel_complex_is_acyclic(self, etds, degeneration_service, name, truncation):
        verdict = degeneration_service.verify_k_acyclic(
            etds[name], truncation, window=8, ubound=6
        )

        assert verdict.entries, "The window should contain degrees of E_K"
        assert verdict.passed, f"{name}: {verdict.failures}"

    def test_corrupted_differential_is_caught(self, etds, degeneration_service):
        verdict = degeneration_service.verify_k_acyclic(
            etds["a1"], 0, window=8, ubound=6, corrupted=True
        )

        assert not verdict.passed
        assert verdict.corrupted

    def test_kernel_complex(self, etds, degeneration_service):
        a1 = etds["a1"]
        complex_ = degeneration_service.kernel_complex(a1, 1, (2, 1), ubound=4)

        assert complex_.rank == 2
        assert not complex_.in_essential_set, "(2,1) = (1,0) + (1,1)"
        assert complex_.fiber_rank == 1
        for k in range(complex_.rank):
            assert degeneration_service.squares_to_zero(complex_, k)

        with pytest.raises(NotInEssentialSetError):
            degeneration_service.kernel_complex(a1, 0, (1, 1))
        with pytest.raises(UnsupportedBaseError):
            degeneration_service.kernel_complex(etds["bacha"], 0, (0, 0))

    def test_hodge_totals(self, etds, degeneration_service):
        xytw = degeneration_service.hodge_report(etds["xytw"], None, 2, window=9)
        assert xytw.passed, f"totals {xytw.totals} against {xytw.predicted}"

        a1 = degeneration_service.hodge_report(etds["a1"], None, 0, window=6)
        assert a1.totals == (1, 1), "Only the degree 0 contributes in characteristic 0"
        assert a1.passed
        assert a1.flags == []

    def test_hodge_flags_the_reductions_mode(self, etds, degeneration_service):
        report = degeneration_service.hodge_report(etds["bacha"], None, 2, window=6)

        assert report.passed
        assert report.flags == [
            HodgeFlag(point=(0, 0), degree=1, lattice_dimension=0, reductions_dimension=1)
        ]

    def test_simplices(self, degeneration_service):
        unit = degeneration_service.simplex_from_edges([(1, 0), (0, 1)])
        assert degeneration_service.is_elementary(unit)
        assert degeneration_service.is_standard(unit)

        doubled = degeneration_service.simplex_from_edges([(2, 0), (0, 2)])
        assert not degeneration_service.is_elementary(doubled)
        assert not degeneration_service.is_standard(doubled)

        reeve = degeneration_service.simplex_from_edges([(1, 0, 0), (0, 1, 0), (1, 1, 2)])
        assert degeneration_service.is_elementary(reeve), "Reeve tetrahedra are empty"
        assert not degeneration_service.is_standard(reeve), "Its volume is 2"

    def test_degenerate_simplices(self, degeneration_service):
        with pytest.raises(DegenerateSimplexError):
            degeneration_service.simplex_from_edges([])
        with pytest.raises(DegenerateSimplexError):
            degeneration_service.simplex_from_edges([(1, 0), (2, 0)])
        with pytest.raises(AmbientRankMismatchError):
            degeneration_service.simplex_from_edges([(1, 0), (1,)])
