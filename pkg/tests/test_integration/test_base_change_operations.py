import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from sympy import primerange

from toroidal.exceptions import NotPrimeError
from toroidal.services.base_change import BaseChangeService

rays = st.tuples(st.integers(1, 3), st.integers(-3, 3))
cones = st.tuples(rays, rays).filter(
    lambda pair: pair[0][0] * pair[1][1] != pair[0][1] * pair[1][0]
)


class TestBaseChangeOperations:
    """
    Intersections of relative forms against intersections of their reductions
    """

    @pytest.fixture
    def base_change_service(self, services) -> BaseChangeService:
        return services["base_change_service"]

    def test_bacha_fails_in_characteristic_two(self, etds, base_change_service):
        bacha = etds["bacha"]
        report = base_change_service.check_iso_condition(bacha, 1, 2)

        assert not report.passed
        failing = report.failures[0]
        assert (failing.lattice_rank, failing.reduced_dimension) == (0, 1)
        assert failing.face == (), "The failure sits at the zero face"
        for p in (0, 3, 5, 7):
            assert base_change_service.check_iso_condition(bacha, 1, p).passed, (
                f"bacha should pass in characteristic {p}"
            )

    def test_obstruction_bound(self, etds, base_change_service):
        bound = base_change_service.p0_bound(etds["bacha"])

        assert bound.primes == (2,)
        assert bound.p0 == 3
        assert bound.degrees == (0, 1, 2)
        assert all(2 in w.primes for w in bound.witnesses)

    def test_catalog_bounds(self, etds, base_change_service):
        for name in ("a1", "xytw", "danilov-pair"):
            bound = base_change_service.p0_bound(etds[name])
            for report in base_change_service.sweep_primes(
                etds[name], primerange(bound.p0, bound.p0 + 8)
            ):
                assert report.passed, f"{name} fails above p0 at char {report.characteristic}"

    def test_element_window_agrees(self, etds, base_change_service):
        for name, etd in etds.items():
            for p in (2, 3):
                report = base_change_service.check_iso_condition(etd, 1, p, window=4)
                assert report.window_agrees, f"{name}: face and element levels disagree at {p}"

        elements = base_change_service.element_window_check(etds["bacha"], 1, 2, 3)
        assert elements.agrees
        assert elements.checked == 4, "Only x = 0 and x = 1 fit under the grading (2, 0)"

    @staticmethod
    def outcomes(report):
        return [
            (w.face, w.subfamily, w.lattice_rank, w.reduced_dimension)
            for w in report.witnesses
        ]

    def test_interior_point_multiple_does_not_matter(self, etds, base_change_service):
        for name, etd in etds.items():
            for p in (0, 2, 3):
                for m in range(etd.fiber_dimension + 1):
                    once = base_change_service.check_iso_condition(etd, m, p)
                    twice = base_change_service.check_iso_condition(etd, m, p, k=2)
                    assert self.outcomes(once) == self.outcomes(twice), (
                        f"{name}, m={m}, char {p}: the result depends on e_F"
                    )

    def test_splitting_does_not_matter(self, etds, services, base_change_service):
        xytw = etds["xytw"]
        changed = services["etd_service"].with_splitting(xytw, [[1, 1], [0, 1]])

        for p in (0, 2, 3):
            for m in range(xytw.fiber_dimension + 1):
                assert self.outcomes(
                    base_change_service.check_iso_condition(xytw, m, p)
                ) == self.outcomes(base_change_service.check_iso_condition(changed, m, p))
        original = base_change_service.p0_bound(xytw)
        assert base_change_service.p0_bound(changed).p0 == original.p0

    def test_rejects_non_primes(self, etds, base_change_service):
        with pytest.raises(NotPrimeError):
            base_change_service.check_iso_condition(etds["a1"], 1, 4)
        with pytest.raises(NotPrimeError):
            base_change_service.sweep_primes(etds["a1"], [9])

    @staticmethod
    def random_etd(services, kind, cone, subset, extra):
        """
        Builds one of three ETD shapes: a plane cone over a point, a plane
        cone times the line Q = N*e_3, or N^3 over the sum of the
        coordinates in `subset`.
        """
        monoid_service = services["monoid_service"]
        etd_service = services["etd_service"]

        if kind == "semistable":
            rank = 3
            p_generators = [[int(i == j) for j in range(3)] for i in range(3)]
            q_generators = [[int(i in subset) for i in range(3)]]
        else:
            plane = monoid_service.from_cone(2, list(cone))
            if kind == "cone":
                rank, q_generators = 2, []
                p_generators = [list(g) for g in plane.generators]
            else:
                rank, q_generators = 3, [[0, 0, 1]]
                p_generators = [list(g) + [0] for g in plane.generators] + [[0, 0, 1]]
        assume(len(p_generators) <= 6)

        minimal = etd_service.from_data(rank, p_generators, q_generators, window=2)
        chosen = set(minimal.minimal_facets) | {
            i for i, keep in zip(minimal.unused_facets, extra) if keep
        }
        facets = [list(minimal.p.facet_faces[i].support) for i in sorted(chosen)]
        return etd_service.from_data(
            rank, p_generators, q_generators, facets=facets, window=2
        )

    @settings(max_examples=50, deadline=None)
    @given(
        st.sampled_from(["cone", "cone_times_line", "semistable"]),
        cones,
        st.sets(st.integers(0, 2), min_size=1),
        st.lists(st.booleans(), min_size=6, max_size=6),
    )
    def test_random_etds(self, services, kind, cone, subset, extra):
        service: BaseChangeService = services["base_change_service"]
        etd = self.random_etd(services, kind, cone, subset, extra)
        bound = service.p0_bound(etd)
        assert bound.degrees == tuple(range(etd.fiber_dimension + 1))

        for p in bound.primes:
            assert any(
                not report.passed for report in service.sweep_primes(etd, [p])
            ), f"{p} was reported but every instance passes"
        for report in service.sweep_primes(etd, primerange(bound.p0, 14)):
            assert report.passed, (
                f"char {report.characteristic}, m={report.degree} >= p0 = {bound.p0} "
                f"fails for {kind} {etd.p.generators}"
            )
