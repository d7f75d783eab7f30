import logging
from fractions import Fraction
from functools import partial
from math import comb
from typing import Optional, Sequence

from toroidal.exceptions.etd import NotInEssentialSetError
from toroidal.exceptions.lattice import (
    AmbientRankMismatchError,
    NoSolutionError,
    ZeroVectorError,
)
from toroidal.schemas.etd import Etd, MonoidIdeal
from toroidal.schemas.forms import Mode
from toroidal.schemas.frobenius import (
    CartierEntry,
    CartierVerdict,
    FrobeniusDecomposition,
    FrobeniusEntry,
    VanishingVerdict,
)
from toroidal.schemas.lattice import Vector
from toroidal.services.forms import FormsService
from toroidal.services.lattice import (
    check_prime,
    contraction_matrix,
    dot,
    scale,
    subspace_coordinates,
    vec_mat,
    wedge_matrix,
)
from toroidal.services.workers import map_jobs

logger = logging.getLogger(__name__)


class FrobeniusService:
    def __init__(self, forms_service: FormsService, jobs: int = 1):
        """
        Frobenius-type decomposition of the relative Koszul complex in
        characteristic p: the degree e part is acyclic unless e lies in pE,
        in which case it carries all of wedge^* W_e.
        """
        self.forms_service = forms_service
        self.jobs = jobs

    @property
    def etd_service(self):
        return self.forms_service.etd_service

    def in_frobenius_image(self, etd: Etd, p: int, e: Sequence[int]) -> bool:
        """e in pE: e is divisible by p and e/p lies in E."""
        if any(x % p for x in e):
            return False
        return self.etd_service.is_essential(etd, tuple(x // p for x in e))

    def frobenius_map(
        self,
        etd: Etd,
        p: int,
        ideal: Optional[MonoidIdeal] = None,
        window: Optional[int] = None,
    ) -> FrobeniusDecomposition:
        """
        For every e in E up to the window: p*e lies in the same face, is
        again in E, and has vanishing class in W_{pe} tensor F_p. The map
        is the same over every F_p[Q]/K; K is recorded on the result.
        """
        p = check_prime(p)
        window = etd.window if window is None else window
        if ideal is None:
            ideal = self.default_ideal(etd)
        etd_service = self.etd_service
        entries = []
        for e in etd_service.enumerate_essential(etd, window):
            target = scale(p, e)
            entries.append(
                FrobeniusEntry(
                    source=e,
                    target=target,
                    same_face=etd_service.face_of(etd, e) == etd_service.face_of(etd, target),
                    target_essential=etd_service.is_essential(etd, target),
                    class_vanishes=self._class_vanishes(etd, p, target),
                )
            )
        return FrobeniusDecomposition(
            etd=etd.name,
            prime=p,
            window=window,
            ideal=ideal.generators,
            entries=entries,
        )

    def _class_vanishes(self, etd: Etd, p: int, e: Vector) -> bool:
        space = self.forms_service.degree_one(
            etd, self.etd_service.face_of(etd, e), p, relative=True
        )
        return not any(subspace_coordinates(space, self.etd_service.project(etd, e)))

    def verify_decomposition(
        self,
        etd: Etd,
        p: int,
        ideal: Optional[MonoidIdeal] = None,
        window: Optional[int] = None,
        mode: Mode = "lattice",
    ) -> CartierVerdict:
        """
        Compares dim H^m of every degree of the fiber complex over F_p[Q]/K
        with binom(dim W_e, m) when the essential part e is in pE and with 0
        otherwise. K defaults to the maximal ideal of Q.
        """
        p = check_prime(p)
        window = etd.window if window is None else window
        etd_service = self.etd_service
        if ideal is None:
            ideal = self.default_ideal(etd)
        points = etd_service.enumerate_essential_ideal_set(etd, ideal, window)
        work = partial(self._cartier_entry, etd, p, ideal, mode)
        entries = map_jobs(work, points, self.jobs)
        verdict = CartierVerdict(
            etd=etd.name,
            prime=p,
            window=window,
            ideal=ideal.generators,
            entries=entries,
        )
        logger.info(
            f"Frobenius decomposition for {etd.name} at p={p}: "
            f"{len(verdict.failures)} of {len(entries)} degrees disagree"
        )
        return verdict

    def default_ideal(self, etd: Etd) -> MonoidIdeal:
        """Maximal ideal of Q, or the empty ideal when Q = 0."""
        if etd.q.rank == 0:
            return MonoidIdeal(generators=())
        return self.etd_service.monoid_ideal(etd)

    def _cartier_entry(
        self, etd: Etd, p: int, ideal: MonoidIdeal, mode: Mode, point: Vector
    ) -> CartierEntry:
        forms = self.forms_service
        essential = self.etd_service.decompose(etd, point).essential
        complex_ = forms.fiber_complex(etd, ideal, p, point, mode)
        dimensions = forms.cohomology(complex_).dimensions
        in_image = self.in_frobenius_image(etd, p, essential)
        dim = complex_.dimension
        if in_image:
            expected = tuple(comb(dim, m) for m in range(dim + 1))
        else:
            expected = (0,) * (dim + 1)
        return CartierEntry(
            point=point,
            essential=essential,
            in_frobenius_image=in_image,
            dimensions=dimensions,
            expected=expected,
        )

    def vanishing_iff_pE(self, etd: Etd, p: int, e: Sequence[int]) -> VanishingVerdict:
        """[e] = 0 in W_e tensor F_p exactly when e is in pE, for e in E."""
        p = check_prime(p)
        e = tuple(int(x) for x in e)
        if not self.etd_service.is_essential(etd, e):
            raise NotInEssentialSetError(f"{e} is not in E", witness={"point": list(e)})
        ideal = self.default_ideal(etd)
        complex_ = self.forms_service.fiber_complex(etd, ideal, p, e)
        return VanishingVerdict(
            point=e,
            prime=p,
            class_vanishes=complex_.vanishes,
            in_frobenius_image=self.in_frobenius_image(etd, p, e),
        )

    @staticmethod
    def koszul_divide(
        v: Sequence, ell: Sequence, degree: int
    ) -> tuple[Fraction, ...]:
        """
        For l in wedge^degree Q^n with v ^ l = 0, returns l~ with v ^ l~ = l,
        namely the contraction of l with v divided by <v, v>.
        """
        v = [Fraction(x) for x in v]
        ell = [Fraction(x) for x in ell]
        dim = len(v)
        if not any(v):
            raise ZeroVectorError("Cannot divide by the zero vector")
        if len(ell) != comb(dim, degree):
            raise AmbientRankMismatchError(
                f"Element of length {len(ell)} is not in wedge^{degree} of a "
                f"{dim}-dimensional space"
            )
        if degree == 0:
            if any(ell):
                raise NoSolutionError("A nonzero scalar is not divisible by a vector")
            return ()
        if any(vec_mat(ell, wedge_matrix(v, dim, degree))):
            raise NoSolutionError("v ^ l is not zero, so l is not divisible by v")
        norm = dot(v, v)
        return tuple(x / norm for x in vec_mat(ell, contraction_matrix(v, dim, degree)))
