from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toroidal.exceptions import AmbientRankMismatchError, NotInSpaceError, NotPrimeError
from toroidal.services.lattice import (
    annihilator,
    as_int_matrix,
    check_prime,
    contains,
    coordinates,
    diagonal,
    dot,
    field_left_kernel,
    field_span,
    full_lattice,
    index_in_saturation,
    intersect,
    intersect_mod_p,
    is_saturated,
    koszul_cohomology,
    koszul_dimensions,
    obstruction_primes,
    reduce_mod_p,
    saturate,
    smith_normal_form,
    solve_integer,
    solve_left,
    subspace_contains,
    sublattice,
    vec_mat,
    wedge_power,
    wedge_vectors,
)

small = st.integers(min_value=-6, max_value=6)


def vectors(n, count):
    return st.lists(st.tuples(*([small] * n)), min_size=0, max_size=count)


class TestLatticeOperations:
    """
    Exact linear algebra over Z, Q and F_p
    """

    def test_smith_normal_form(self):
        M = [[2, 4], [6, 8]]
        U, D, V = smith_normal_form(M)

        assert U * as_int_matrix(M) * V == D, "U*M*V does not give the Smith form"
        assert diagonal(D) == [2, 4], "Invariant factors of [[2,4],[6,8]] are 2 and 4"

    def test_sublattice_is_canonical(self):
        A = sublattice(2, [(2, 0), (0, 2), (2, 2)])
        B = sublattice(2, [(0, 2), (2, 0)])

        assert A == B, "Same lattice from different generators should compare equal"
        assert A.rank == 2
        assert index_in_saturation(A) == 4, "2Z x 2Z has index 4 in Z^2"
        assert not is_saturated(A)

    def test_saturate(self):
        A = sublattice(2, [(2, 4)])

        assert saturate(A) == sublattice(2, [(1, 2)]), "Saturation of Z(2,4) is Z(1,2)"
        assert is_saturated(saturate(A))
        for form in annihilator(A):
            assert dot(form, (1, 2)) == 0, "Annihilator must vanish on the saturation"

    def test_membership_and_coordinates(self):
        A = sublattice(2, [(2, 0), (0, 3)])

        assert contains(A, (4, 3))
        assert not contains(A, (1, 0))
        assert vec_mat(coordinates(A, (4, -3)), A.basis) == (4, -3)
        with pytest.raises(NotInSpaceError):
            coordinates(A, (1, 0))
        with pytest.raises(AmbientRankMismatchError):
            contains(A, (1, 0, 0))

    def test_solve_integer(self):
        assert solve_integer([(2, 0), (0, 3)], (4, 3)) == (2, 1)
        assert solve_integer([(2, 0), (0, 3)], (1, 0)) is None, "(1,0) is not in 2Z x 3Z"
        assert solve_integer([], (0, 0)) == ()

    def test_intersect(self):
        A = sublattice(2, [(2, 0), (0, 1)])
        B = sublattice(2, [(3, 0), (0, 1)])

        assert intersect(A, B) == sublattice(2, [(6, 0), (0, 1)])
        assert intersect(sublattice(2, [(1, 0)]), sublattice(2, [(1, 2)])).rank == 0

    def test_reduction_of_an_intersection(self):
        """Z(1,0) and Z(1,2) meet in 0 but their reductions mod 2 coincide"""
        A = sublattice(2, [(1, 0)])
        B = sublattice(2, [(1, 2)])

        assert intersect_mod_p(A, B, 2).dimension == 1
        assert intersect_mod_p(A, B, 3).dimension == 0
        assert obstruction_primes(A, B) == [2], "Only 2 should obstruct base change"
        assert reduce_mod_p(B, 2) == reduce_mod_p(A, 2)

    def test_field_solving(self):
        rows = [(1, 1, 0), (0, 1, 1)]

        assert solve_left(rows, (1, 2, 1)) == [Fraction(1), Fraction(1)]
        assert solve_left(rows, (1, 0, 0)) is None
        kernel = field_left_kernel([(1, 1), (2, 2)], 2)
        assert len(kernel) == 1
        assert vec_mat(kernel[0], [(1, 1), (2, 2)]) == (0, 0)

    def test_field_span_mod_p(self):
        U = field_span(2, [(2, 1), (4, 2)], 3)

        assert U.dimension == 1
        assert subspace_contains(U, (1, 2)), "(1,2) = 2*(2,1) mod 3"
        assert not subspace_contains(U, (1, 0))

    def test_check_prime(self):
        assert check_prime(13) == 13
        for value in (0, 1, 4, 15):
            with pytest.raises(NotPrimeError):
                check_prime(value)

    def test_wedge_products(self):
        assert wedge_vectors([(1, 0, 0), (0, 1, 0)], 3) == (1, 0, 0)
        assert wedge_vectors([(0, 1, 0), (1, 0, 0)], 3) == (-1, 0, 0)
        assert wedge_power(full_lattice(3), 2).value == full_lattice(3)
        assert wedge_power(sublattice(3, [(1, 0, 0), (0, 2, 0)]), 2).value == sublattice(
            3, [(2, 0, 0)]
        )
        assert wedge_power(sublattice(3, [(1, 0, 0)]), 2).rank == 0

    def test_koszul_complex(self):
        assert koszul_dimensions((1, 0), 2) == [0, 0, 0], "Koszul complex of a unit is exact"
        assert koszul_dimensions((0, 0), 2) == [1, 2, 1]
        assert koszul_dimensions((2, 0), 2, 2) == [1, 2, 1], "(2,0) vanishes mod 2"
        assert koszul_dimensions((2, 0), 2, 3) == [0, 0, 0]

        V = field_span(3, [(1, 0, 0), (0, 1, 0)], 0)
        assert koszul_cohomology(V, (1, 1, 0), 1) == 0
        with pytest.raises(NotInSpaceError):
            koszul_cohomology(V, (0, 0, 1), 1)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=3))
    def test_smith_form_round_trip(self, M):
        U, D, V = smith_normal_form(M)
        d = diagonal(D)

        assert U * as_int_matrix(M) * V == D
        assert all(b % a == 0 for a, b in zip(d, d[1:])), f"{d} is not a divisor chain"

    @settings(max_examples=50, deadline=None)
    @given(vectors(3, 3))
    def test_saturation_is_idempotent(self, rows):
        A = sublattice(3, rows)
        S = saturate(A)

        assert saturate(S) == S
        assert is_saturated(S)
        assert S.rank == A.rank
        assert all(contains(S, b) for b in A.basis), "A must lie in its saturation"

    @settings(max_examples=50, deadline=None)
    @given(vectors(3, 3), vectors(3, 3))
    def test_intersection_properties(self, first, second):
        A, B = sublattice(3, first), sublattice(3, second)
        C = intersect(A, B)

        assert all(contains(A, c) and contains(B, c) for c in C.basis)
        assert C == intersect(B, A), "Intersection should not depend on the order"

    @settings(max_examples=40, deadline=None)
    @given(vectors(3, 2), vectors(3, 2))
    def test_obstruction_primes_are_exact(self, first, second):
        A, B = sublattice(3, first), sublattice(3, second)
        primes = obstruction_primes(A, B)
        rank = intersect(A, B).rank

        for p in (2, 3, 5, 7, 11, 13):
            reduced = intersect_mod_p(A, B, p).dimension
            assert (reduced > rank) == (p in primes), (
                f"p={p}: reduced dimension {reduced}, integral rank {rank}, "
                f"reported {primes}"
            )
