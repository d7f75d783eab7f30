import pytest

from tests.oracles import (
    absolute_forms_span,
    is_saturated,
    relative_forms_span,
    same_rational_span,
)
from toroidal.exceptions import NotInEssentialSetError
from toroidal.schemas.etd import MonoidIdeal
from toroidal.services.forms import FormsService
from toroidal.services.lattice import dot


class TestFormsOperations:
    """
    Graded pieces of W^m and W^m_{P/Q}, their Koszul complexes and the
    structural checks around them
    """

    @pytest.fixture
    def forms_service(self, services) -> FormsService:
        return services["forms_service"]

    @staticmethod
    def unused_normals(etd, point):
        return [
            etd.p.facet_normals[i]
            for i in etd.unused_facets
            if dot(etd.p.facet_normals[i], point) == 0
        ]

    def test_absolute_forms_match_the_oracle(self, etds, forms_service: FormsService):
        for name, etd in etds.items():
            n = etd.ambient_rank
            checked = set()
            points = forms_service.monoid_service.enumerate_up_to(etd.p, None, 12)
            for point in points:
                normals = self.unused_normals(etd, point)
                for m in range(n + 1):
                    value = forms_service.w_absolute(etd, m, point).value
                    key = (value.basis, tuple(normals), m)
                    if key in checked:
                        continue
                    checked.add(key)
                    assert same_rational_span(
                        value.basis, absolute_forms_span(normals, n, m)
                    ), f"{name}: W^{m} at {point} differs from the oracle"
                    assert is_saturated(value.basis, value.ambient_rank), (
                        f"{name}: W^{m} at {point} is not saturated"
                    )

    def test_relative_forms_match_the_oracle(self, etds, forms_service: FormsService):
        for name, etd in etds.items():
            n, d = etd.ambient_rank, etd.fiber_dimension
            checked = set()
            points = forms_service.monoid_service.enumerate_up_to(etd.p, None, 12)
            for point in points:
                normals = self.unused_normals(etd, point)
                for m in range(d + 1):
                    value = forms_service.w_relative(etd, m, point).value
                    key = (value.basis, tuple(normals), m)
                    if key in checked:
                        continue
                    checked.add(key)
                    span = relative_forms_span(normals, list(etd.projection), n, d, m)
                    assert same_rational_span(value.basis, span), (
                        f"{name}: W^{m}_(P/Q) at {point} differs from the oracle"
                    )

    def test_forms_depend_only_on_the_face(self, etds, forms_service: FormsService):
        xytw = etds["xytw"]

        for m in range(3):
            assert (
                forms_service.w_absolute(xytw, m, (1, 0, 0)).value
                == forms_service.w_absolute(xytw, m, (3, 0, 0)).value
            )
        assert forms_service.w_relative(xytw, 1, (1, 0, 0)).rank == 1
        assert forms_service.w_relative(xytw, 1, (0, 1, 0)).rank == 2, (
            "Both facets through d are used"
        )
        assert forms_service.w_relative(xytw, 0, (0, 0, 0)).rank == 1

    def test_split_sequence(self, etds, forms_service: FormsService):
        verdict = forms_service.check_split_sequence(etds["xytw"], (1, 0, 0), 1)

        assert (verdict.absolute_rank, verdict.relative_rank, verdict.kernel_rank) == (2, 1, 1)
        assert verdict.passed, f"Sequence at (1,0,0) should split: {verdict}"

        for name, etd in etds.items():
            for point in etd.p.generators:
                for m in range(etd.fiber_dimension + 1):
                    assert forms_service.check_split_sequence(etd, point, m).passed, (
                        f"{name}: sequence fails at {point}, m={m}"
                    )

    def test_wedge_of_intersection(self, etds, forms_service: FormsService):
        for name, etd in etds.items():
            for point in [etd.p.zero, *etd.p.generators]:
                for m in range(etd.ambient_rank + 1):
                    verdict = forms_service.wedge_intersection_check(etd, m, point)
                    assert verdict.passed, f"{name}: wedge^{m} at {point}"

    def test_free_basis(self, etds, forms_service: FormsService):
        for name, etd in etds.items():
            for m in range(etd.fiber_dimension + 1):
                verdict = forms_service.free_basis_report(etd, m, window=5)
                assert verdict.passed, f"{name}, m={m}: {verdict.failures}"
                assert verdict.checked > 0

    def test_lattice_and_reductions_modes(self, etds, forms_service: FormsService):
        bacha = etds["bacha"]

        assert forms_service.w_relative(bacha, 1, (0, 0)).rank == 0, (
            "The two rays meet only in 0"
        )
        assert forms_service.w_relative(bacha, 1, (0, 0), 2, "lattice").rank == 0
        assert forms_service.w_relative(bacha, 1, (0, 0), 2, "reductions").rank == 1, (
            "Mod 2 the rays (1,0) and (1,2) coincide"
        )
        assert forms_service.w_relative(bacha, 1, (0, 0), 3, "reductions").rank == 0
        assert forms_service.w_relative(bacha, 1, (0, 0), 0).ring == "QQ"

    def test_fiber_complex(self, etds, forms_service: FormsService, services):
        a1 = etds["a1"]
        ideal = services["etd_service"].monoid_ideal(a1)

        unit = forms_service.fiber_complex(a1, ideal, 2, (1, 0))
        assert not unit.vanishes
        assert forms_service.cohomology(unit).dimensions == (0, 0)

        doubled = forms_service.fiber_complex(a1, ideal, 2, (2, 0))
        assert doubled.vanishes, "[(2,0)] vanishes in characteristic 2"
        assert forms_service.cohomology(doubled).dimensions == (1, 1)
        assert forms_service.cohomology(
            forms_service.fiber_complex(a1, ideal, 3, (2, 0))
        ).dimensions == (0, 0)

        with pytest.raises(NotInEssentialSetError):
            forms_service.fiber_complex(a1, ideal, 2, (1, 1))

    def test_complexes_square_to_zero(self, etds, forms_service: FormsService):
        xytw = etds["xytw"]
        everything = MonoidIdeal(generators=())

        for point in forms_service.monoid_service.enumerate_up_to(xytw.p, None, 3):
            for p in (0, 2, 3):
                absolute = forms_service.absolute_complex(xytw, everything, p, point)
                assert forms_service.cohomology(absolute).squares_to_zero, (
                    f"d^2 != 0 at {point} in characteristic {p}"
                )

    def test_absolute_complex(self, etds, forms_service: FormsService, services):
        xytw = etds["xytw"]
        ideal = services["etd_service"].monoid_ideal(xytw)

        exact = forms_service.absolute_complex(xytw, ideal, 0, (1, 1, 0))
        assert not exact.vanishes
        assert not any(forms_service.cohomology(exact).dimensions), "e ^ - is exact"

        zero = forms_service.absolute_complex(xytw, ideal, 0, (0, 0, 0))
        assert zero.vanishes

        with pytest.raises(NotInEssentialSetError):
            forms_service.absolute_complex(xytw, ideal, 0, (1, 0, 1))
        with pytest.raises(NotInEssentialSetError):
            forms_service.absolute_complex(
                etds["a1"], services["etd_service"].monoid_ideal(etds["a1"]), 2, (1, 1)
            )
