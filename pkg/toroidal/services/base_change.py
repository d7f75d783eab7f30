import logging
from functools import partial
from math import comb
from typing import Iterable, Optional, Sequence

from toroidal.schemas.base_change import (
    BaseChangeReport,
    BaseChangeWitness,
    ElementWindowReport,
    ObstructionBound,
)
from toroidal.schemas.etd import Etd
from toroidal.schemas.lattice import Sublattice, Vector
from toroidal.schemas.monoid import Face
from toroidal.services.forms import FormsService
from toroidal.services.lattice import (
    add,
    check_prime,
    intersect_all,
    intersect_all_subspaces,
    obstruction_primes,
    reduce_mod_p,
    tensor,
)
from toroidal.services.workers import map_jobs

logger = logging.getLogger(__name__)


class BaseChangeService:
    def __init__(self, forms_service: FormsService, jobs: int = 1):
        """
        Checks that intersections of the relative forms commute with
        reduction to a field.

        Args:
            forms_service: computes the degree pieces being intersected
            jobs: worker processes used per essential face
        """
        self.forms_service = forms_service
        self.jobs = jobs

    @property
    def etd_service(self):
        return self.forms_service.etd_service

    def _family(
        self, etd: Etd, m: int, point: Vector, subfamily: Sequence[Face], k: int = 1
    ) -> list[Sublattice]:
        """W^m_{P/Q} at point + k*e_F for each F in the subfamily."""
        etd_service = self.etd_service
        lattices = []
        for face in subfamily:
            shifted = add(point, etd_service.interior_point(etd, face, k))
            lattices.append(
                self.forms_service.w_relative_at_face(
                    etd, m, etd_service.face_of(etd, shifted)
                )
            )
        return lattices

    @staticmethod
    def _reduced_dimension(
        lattices: list[Sublattice], ambient_rank: int, characteristic: int
    ) -> int:
        if characteristic == 0:
            spaces = [tensor(L, 0) for L in lattices]
        else:
            spaces = [reduce_mod_p(L, characteristic) for L in lattices]
        return intersect_all_subspaces(spaces, ambient_rank, characteristic).dimension

    def _witness(
        self,
        etd: Etd,
        m: int,
        characteristic: int,
        face: Face,
        point: Vector,
        subfamily: Sequence[Face],
        k: int = 1,
        with_primes: bool = False,
    ) -> BaseChangeWitness:
        width = comb(etd.fiber_dimension, m)
        lattices = self._family(etd, m, point, subfamily, k)
        primes = tuple(obstruction_primes(*lattices)) if with_primes else ()
        return BaseChangeWitness(
            face=face.support,
            point=point,
            subfamily=tuple(f.support for f in subfamily),
            degree=m,
            lattice_rank=intersect_all(lattices, width).rank,
            reduced_dimension=self._reduced_dimension(lattices, width, characteristic),
            primes=primes,
        )

    def _face_witnesses(
        self,
        etd: Etd,
        m: int,
        characteristic: int,
        k: int,
        with_primes: bool,
        face: Face,
    ) -> list[BaseChangeWitness]:
        point = self.etd_service.interior_point(etd, face)
        return [
            self._witness(etd, m, characteristic, face, point, subfamily, k, with_primes)
            for subfamily in self.etd_service.subsets_of(
                self.etd_service.cover_faces(etd)
            )
        ]

    def _all_witnesses(
        self, etd: Etd, m: int, characteristic: int, k: int = 1, with_primes: bool = False
    ) -> list[BaseChangeWitness]:
        work = partial(self._face_witnesses, etd, m, characteristic, k, with_primes)
        per_face = map_jobs(work, etd.essential_faces, self.jobs)
        return [w for witnesses in per_face for w in witnesses]

    def check_iso_condition(
        self,
        etd: Etd,
        m: int,
        characteristic: int,
        window: Optional[int] = None,
        k: int = 1,
    ) -> BaseChangeReport:
        """
        For every essential face G and every nonempty subfamily of the rank
        d-1 essential faces, compares the rank of the integral intersection
        of W^m_{P/Q} at e_G + k*e_F with the dimension of the intersection
        of the reductions.

        W^m_{P/Q} in a degree depends only on the face of that degree, so
        the face-level check covers every degree of E. When `window` is
        given the element-level check on that window is run as well and
        `window_agrees` records whether both levels agree.
        """
        if characteristic:
            check_prime(characteristic)
        witnesses = self._all_witnesses(etd, m, characteristic, k)
        report = BaseChangeReport(
            etd=etd.name, degree=m, characteristic=characteristic, witnesses=witnesses
        )
        if window is not None:
            elements = self.element_window_check(etd, m, characteristic, window, report)
            report = report.model_copy(update={"window_agrees": elements.agrees})
        logger.info(
            f"Base change for {etd.name}, m={m}, char {characteristic}: "
            f"{len(report.failures)} of {len(witnesses)} instances fail"
        )
        return report

    def element_window_check(
        self,
        etd: Etd,
        m: int,
        characteristic: int,
        window: int,
        face_report: Optional[BaseChangeReport] = None,
    ) -> ElementWindowReport:
        """Runs the condition at every e in E of degree at most `window`."""
        etd_service = self.etd_service
        if face_report is None:
            face_report = self.check_iso_condition(etd, m, characteristic)
        verdicts = {(w.face, w.subfamily): w.passed for w in face_report.witnesses}

        points = etd_service.enumerate_essential(etd, window)
        families = etd_service.subsets_of(etd_service.cover_faces(etd))
        disagreements = []
        for point in points:
            face = etd_service.face_of(etd, point)
            for subfamily in families:
                witness = self._witness(etd, m, characteristic, face, point, subfamily)
                expected = verdicts.get((witness.face, witness.subfamily))
                if expected != witness.passed:
                    disagreements.append(
                        {
                            "point": list(point),
                            "subfamily": [list(s) for s in witness.subfamily],
                            "element_level": witness.passed,
                            "face_level": expected,
                        }
                    )
        return ElementWindowReport(
            degree=m,
            characteristic=characteristic,
            window=window,
            checked=len(points),
            disagreements=disagreements,
        )

    def p0_bound(
        self, etd: Etd, degrees: Optional[Iterable[int]] = None
    ) -> ObstructionBound:
        """
        All primes where some instance of the condition fails. The condition
        holds for every prime p >= p0 = 1 + (largest such prime), or p0 = 2.
        """
        if degrees is None:
            degrees = range(etd.fiber_dimension + 1)
        degrees = tuple(degrees)
        witnesses = []
        primes: set[int] = set()
        for m in degrees:
            for witness in self._all_witnesses(etd, m, 0, with_primes=True):
                if witness.primes:
                    witnesses.append(witness)
                    primes |= set(witness.primes)
        p0 = max(primes) + 1 if primes else 2
        return ObstructionBound(
            etd=etd.name,
            degrees=degrees,
            primes=tuple(sorted(primes)),
            p0=p0,
            witnesses=witnesses,
        )

    def sweep_primes(
        self,
        etd: Etd,
        primes: Iterable[int],
        degrees: Optional[Iterable[int]] = None,
    ) -> list[BaseChangeReport]:
        if degrees is None:
            degrees = range(etd.fiber_dimension + 1)
        degrees = tuple(degrees)
        return [
            self.check_iso_condition(etd, m, check_prime(p))
            for p in primes
            for m in degrees
        ]
