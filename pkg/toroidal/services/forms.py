"""
Graded pieces of the sheaves of toroidal forms.

For p in P the degree-p piece of W^m is wedge^m L_p, where L_p is the
intersection of P^gp with the groups H^gp of the facets H outside the
chosen facet set that contain p. The relative version is wedge^m of the
image of L_p in P^gp/Q^gp = Z^d. Both depend on p only through its face.
"""

import logging
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Optional, Sequence

from toroidal.exceptions.etd import NotInEssentialSetError
from toroidal.schemas.etd import Etd, MonoidIdeal
from toroidal.schemas.forms import (
    ComplexCohomology,
    DegreeComplex,
    FreeBasisVerdict,
    GradedWModule,
    Mode,
    SplitSequenceVerdict,
    WedgeIntersectionVerdict,
)
from toroidal.schemas.lattice import FieldSubspace, Sublattice, Vector
from toroidal.schemas.monoid import Face
from toroidal.services.etd import EtdService
from toroidal.services.lattice import (
    check_prime,
    compound_matrix,
    contains,
    coordinates,
    field_span,
    image,
    intersect_all,
    intersect_all_subspaces,
    koszul_dimensions,
    left_kernel,
    normalize,
    reduce_mod_p,
    sub,
    sublattice,
    subspace_coordinates,
    tensor,
    vec_mat,
    wedge_matrix,
    wedge_power,
    wedge_vectors,
)

logger = logging.getLogger(__name__)


@lru_cache(maxsize=4096)
def _intersection(lattices: tuple[Sublattice, ...], ambient_rank: int) -> Sublattice:
    return intersect_all(list(lattices), ambient_rank)


class FormsService:
    def __init__(self, etd_service: EtdService):
        self.etd_service = etd_service

    @property
    def monoid_service(self):
        return self.etd_service.monoid_service

    # ------------------------------------------------------------------
    # degree-one pieces
    # ------------------------------------------------------------------

    @staticmethod
    def unused_facets_at(etd: Etd, face: Face) -> tuple[int, ...]:
        """Unused facets containing the face."""
        return tuple(i for i in etd.unused_facets if i in face.facets)

    def cutting_lattices(self, etd: Etd, face: Face) -> tuple[Sublattice, ...]:
        monoids = self.monoid_service
        return (etd.p.lattice,) + tuple(
            monoids.face_lattice(etd.p, etd.p.facet_faces[i])
            for i in self.unused_facets_at(etd, face)
        )

    def absolute_lattice(self, etd: Etd, face: Face) -> Sublattice:
        """L_p for any p generating `face`."""
        return _intersection(self.cutting_lattices(etd, face), etd.ambient_rank)

    def relative_lattice(self, etd: Etd, face: Face) -> Sublattice:
        return image(
            self.absolute_lattice(etd, face), etd.projection, etd.fiber_dimension
        )

    def degree_one(
        self,
        etd: Etd,
        face: Face,
        characteristic: Optional[int] = None,
        mode: Mode = "lattice",
        relative: bool = True,
    ) -> Sublattice | FieldSubspace:
        """
        Degree-one piece at `face` over Z (characteristic None), Q or F_p.

        In "reductions" mode over F_p the cutting lattices are reduced mod p
        before intersecting; otherwise the integral intersection is reduced.
        """
        if characteristic is None:
            if relative:
                return self.relative_lattice(etd, face)
            return self.absolute_lattice(etd, face)

        if characteristic and mode == "reductions":
            p = check_prime(characteristic)
            space = intersect_all_subspaces(
                [reduce_mod_p(L, p) for L in self.cutting_lattices(etd, face)],
                etd.ambient_rank,
                p,
            )
            if not relative:
                return space
            return field_span(
                etd.fiber_dimension,
                [vec_mat(b, etd.projection) for b in space.basis],
                p,
            )

        lattice = (
            self.relative_lattice(etd, face)
            if relative
            else self.absolute_lattice(etd, face)
        )
        return tensor(lattice, characteristic)

    # ------------------------------------------------------------------
    # W^m
    # ------------------------------------------------------------------

    def _w_module(
        self,
        kind: str,
        etd: Etd,
        m: int,
        p: Sequence[int],
        characteristic: Optional[int],
        mode: Mode,
    ) -> GradedWModule:
        p = tuple(int(x) for x in p)
        face = self.etd_service.face_of(etd, p)
        base = self.degree_one(
            etd, face, characteristic, mode, relative=(kind == "relative")
        )
        return GradedWModule(
            kind=kind,
            degree=m,
            point=p,
            face=face,
            characteristic=characteristic,
            mode=mode,
            value=wedge_power(base, m).value,
        )

    def w_absolute(
        self,
        etd: Etd,
        m: int,
        p: Sequence[int],
        characteristic: Optional[int] = None,
        mode: Mode = "lattice",
    ) -> GradedWModule:
        return self._w_module("absolute", etd, m, p, characteristic, mode)

    def w_relative(
        self,
        etd: Etd,
        m: int,
        p: Sequence[int],
        characteristic: Optional[int] = None,
        mode: Mode = "lattice",
    ) -> GradedWModule:
        return self._w_module("relative", etd, m, p, characteristic, mode)

    def w_relative_at_face(self, etd: Etd, m: int, face: Face) -> Sublattice:
        return wedge_power(self.relative_lattice(etd, face), m).value

    # ------------------------------------------------------------------
    # Koszul complexes in one degree
    # ------------------------------------------------------------------

    def fiber_complex(
        self,
        etd: Etd,
        ideal: MonoidIdeal,
        characteristic: int,
        e: Sequence[int],
        mode: Mode = "lattice",
    ) -> DegreeComplex:
        """
        Degree-e part of the relative complex over k[Q]/K:
        (wedge^* W_e, [e] ^ -) with [e] the image of e in W_e.
        """
        e = tuple(int(x) for x in e)
        if not self.etd_service.in_essential_ideal_set(etd, ideal, e):
            raise NotInEssentialSetError(
                f"{e} is not in E_K", witness={"point": list(e)}
            )
        face = self.etd_service.face_of(etd, e)
        space = self.degree_one(etd, face, characteristic, mode, relative=True)
        klass = subspace_coordinates(space, self.etd_service.project(etd, e))
        return DegreeComplex(
            kind="fiber",
            point=e,
            characteristic=characteristic,
            mode=mode,
            space=space,
            klass=tuple(klass),
        )

    def absolute_complex(
        self,
        etd: Etd,
        ideal: MonoidIdeal,
        characteristic: int,
        e: Sequence[int],
        mode: Mode = "lattice",
    ) -> DegreeComplex:
        """(wedge^* L_e, e ^ -) for e in E_K, with no quotient by Q^gp."""
        e = tuple(int(x) for x in e)
        if not self.etd_service.in_essential_ideal_set(etd, ideal, e):
            raise NotInEssentialSetError(
                f"{e} is not in E_K", witness={"point": list(e)}
            )
        face = self.etd_service.face_of(etd, e)
        space = self.degree_one(etd, face, characteristic, mode, relative=False)
        return DegreeComplex(
            kind="absolute",
            point=e,
            characteristic=characteristic,
            mode=mode,
            space=space,
            klass=tuple(subspace_coordinates(space, e)),
        )

    @staticmethod
    def cohomology(complex_: DegreeComplex) -> ComplexCohomology:
        dim, char = complex_.dimension, complex_.characteristic
        klass = list(complex_.klass)
        squares = True
        for m in range(dim - 1):
            first = wedge_matrix(klass, dim, m)
            second = wedge_matrix(klass, dim, m + 1)
            for row in first:
                if any(normalize(x, char) for x in vec_mat(row, second)):
                    squares = False
        return ComplexCohomology(
            point=complex_.point,
            dimensions=tuple(koszul_dimensions(klass, dim, char)),
            squares_to_zero=squares,
        )

    # ------------------------------------------------------------------
    # structural checks
    # ------------------------------------------------------------------

    def check_split_sequence(
        self, etd: Etd, p: Sequence[int], m: int
    ) -> SplitSequenceVerdict:
        """
        0 -> Q^gp ^ W^{m-1}_p -> W^m_p -> W^m_{P/Q,p} -> 0 in degree p:
        exactness, surjectivity of wedge^m of the projection, and the
        splitting induced by the section.
        """
        p = tuple(int(x) for x in p)
        n, d = etd.ambient_rank, etd.fiber_dimension
        face = self.etd_service.face_of(etd, p)
        L = self.absolute_lattice(etd, face)
        absolute = wedge_power(L, m).value
        relative = wedge_power(self.relative_lattice(etd, face), m).value

        pi_m = compound_matrix(etd.projection, m, d)
        lambda_m = compound_matrix(etd.section, m, n)
        width = comb(d, m)

        images = [vec_mat(b, pi_m) for b in absolute.basis]
        surjective = sublattice(width, images) == relative

        kernel = sublattice(
            comb(n, m),
            [vec_mat(y, absolute.basis) for y in left_kernel(images, width)],
        )
        if m == 0:
            expected = sublattice(1)
        else:
            expected = sublattice(
                comb(n, m),
                [
                    wedge_vectors([q, *rest], n)
                    for q in etd.q.lattice.basis
                    for rest in combinations(L.basis, m - 1)
                ],
            )
        exact = kernel == expected

        split = True
        for b in relative.basis:
            lifted = vec_mat(b, lambda_m) if lambda_m else (0,) * comb(n, m)
            if not contains(absolute, lifted) or vec_mat(lifted, pi_m) != b:
                split = False
        retraction = []
        if split:
            for x in absolute.basis:
                back = vec_mat(vec_mat(x, pi_m), lambda_m) if width else (0,) * len(x)
                rest = sub(x, back)
                if not contains(kernel, rest):
                    split = False
                    break
                retraction.append(coordinates(kernel, rest))

        verdict = SplitSequenceVerdict(
            point=p,
            degree=m,
            absolute_rank=absolute.rank,
            relative_rank=relative.rank,
            kernel_rank=kernel.rank,
            exact=exact,
            surjective=surjective,
            split=split,
            retraction=tuple(retraction),
        )
        logger.debug(f"Split sequence at {p}, m={m}: {verdict}")
        return verdict

    def free_basis_report(
        self, etd: Etd, m: int, window: Optional[int] = None
    ) -> FreeBasisVerdict:
        """Multiplication by z^q is an isomorphism W_e -> W_{e+q} on the window."""
        window = etd.window if window is None else window
        etd_service = self.etd_service
        points = self.monoid_service.enumerate_up_to(etd.p, etd.grading.form, window)
        failures = []
        for p in points:
            split = etd_service.decompose(etd, p)
            source = self.w_relative_at_face(etd, m, etd_service.face_of(etd, split.essential))
            target = self.w_relative_at_face(etd, m, etd_service.face_of(etd, p))
            if source != target:
                failures.append(
                    {
                        "point": list(p),
                        "essential": list(split.essential),
                        "base": list(split.base),
                        "source_rank": source.rank,
                        "target_rank": target.rank,
                    }
                )
        return FreeBasisVerdict(
            degree=m, window=window, checked=len(points), failures=failures
        )

    def wedge_intersection_check(
        self, etd: Etd, m: int, p: Sequence[int]
    ) -> WedgeIntersectionVerdict:
        """Compares wedge^m of the intersection with the intersection of wedges."""
        p = tuple(int(x) for x in p)
        face = self.etd_service.face_of(etd, p)
        cutting = self.cutting_lattices(etd, face)
        n = etd.ambient_rank
        lhs = wedge_power(self.absolute_lattice(etd, face), m).value
        rhs = intersect_all([wedge_power(L, m).value for L in cutting], comb(n, m))
        return WedgeIntersectionVerdict(
            point=p, degree=m, wedge_of_intersection=lhs, intersection_of_wedges=rhs
        )

