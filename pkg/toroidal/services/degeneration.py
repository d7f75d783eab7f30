"""
Degree-by-degree checks behind degeneration of the relative Hodge to
de Rham spectral sequence: acyclicity of the u-graded kernel complex over a
base Q = N, windowed cohomology totals, and lattice simplex predicates.
"""

import logging
from fractions import Fraction
from functools import partial
from itertools import product
from math import comb
from typing import Optional, Sequence

from toroidal.exceptions.etd import DegenerateSimplexError, NotInEssentialSetError
from toroidal.exceptions.lattice import AmbientRankMismatchError
from toroidal.schemas.degeneration import (
    AcyclicityEntry,
    AcyclicityVerdict,
    HodgeFlag,
    HodgeReport,
    SimplexDatum,
    UComplexDegree,
)
from toroidal.schemas.etd import Etd, MonoidIdeal
from toroidal.schemas.forms import Mode
from toroidal.schemas.lattice import Vector
from toroidal.services.forms import FormsService
from toroidal.services.frobenius import FrobeniusService
from toroidal.services.lattice import (
    field_left_kernel,
    field_rank,
    invariant_factors,
    solve_left,
    subsets,
    tensor,
    vec_mat,
    wedge_matrix,
)
from toroidal.services.workers import map_jobs

logger = logging.getLogger(__name__)


class DegenerationService:
    def __init__(
        self,
        forms_service: FormsService,
        frobenius_service: FrobeniusService,
        ubound: int = 6,
        jobs: int = 1,
    ):
        self.forms_service = forms_service
        self.frobenius_service = frobenius_service
        self.ubound = ubound
        self.jobs = jobs

    @property
    def etd_service(self):
        return self.forms_service.etd_service

    # ------------------------------------------------------------------
    # kernel complex
    # ------------------------------------------------------------------

    def kernel_complex(
        self,
        etd: Etd,
        truncation: int,
        e: Sequence[int],
        ubound: Optional[int] = None,
        corrupted: bool = False,
    ) -> UComplexDegree:
        """
        Degree-e part of the kernel complex for K = (truncation + 1)*rho + Q.

        `corrupted` drops the u-derivative term of the differential; it
        exists as a negative control for the acyclicity check.
        """
        ubound = self.ubound if ubound is None else ubound
        etd_service = self.etd_service
        rho = etd_service.base_generator(etd)
        ideal = etd_service.truncation_ideal(etd, truncation)
        e = tuple(int(x) for x in e)
        if not etd_service.in_essential_ideal_set(etd, ideal, e):
            raise NotInEssentialSetError(
                f"{e} is not in E_K for K = {truncation + 1}*rho + Q",
                witness={"point": list(e), "truncation": truncation},
            )

        face = etd_service.face_of(etd, e)
        span = tensor(self.forms_service.absolute_lattice(etd, face), 0)
        n = etd.ambient_rank
        basis = [tuple(Fraction(x) for x in rho)]
        for row in span.basis:
            if field_rank(basis + [row], n) > len(basis):
                basis.append(row)

        fiber_rank = self.forms_service.degree_one(etd, face, 0).dimension
        return UComplexDegree(
            point=e,
            truncation=truncation,
            ubound=ubound,
            rank=len(basis),
            rho=tuple(solve_left(basis, rho)),
            klass=tuple(solve_left(basis, e)),
            in_essential_set=etd_service.is_essential(etd, e),
            fiber_rank=fiber_rank,
            corrupted=corrupted,
        )

    @staticmethod
    def chain_basis(
        complex_: UComplexDegree, k: int, top: int, restricted: bool = True
    ) -> list[tuple[int, tuple[int, ...]]]:
        """Basis (s, I) of degree-k chains supported in u-degrees <= top."""
        keep_all = not (restricted and complex_.in_essential_set)
        return [
            (s, I)
            for s in range(top + 1)
            for I in subsets(complex_.rank, k)
            if s > 0 or keep_all or 0 in I
        ]

    def differential(
        self, complex_: UComplexDegree, k: int, top: int
    ) -> list[list[Fraction]]:
        """
        Matrix of d on chains of degree k supported in u-degrees <= top,
        rows over `chain_basis(k, top)`, columns over the unrestricted
        degree k + 1 basis.
        """
        rank = complex_.rank
        source = self.chain_basis(complex_, k, top)
        target = {
            key: j
            for j, key in enumerate(self.chain_basis(complex_, k + 1, top, False))
        }
        by_e = wedge_matrix(complex_.klass, rank, k)
        by_rho = wedge_matrix(complex_.rho, rank, k)
        targets = subsets(rank, k + 1)
        index = {I: i for i, I in enumerate(subsets(rank, k))}

        matrix = []
        for s, I in source:
            row = [Fraction(0)] * len(target)
            for j, J in enumerate(targets):
                row[target[(s, J)]] += by_e[index[I]][j]
                if s > 0 and not complex_.corrupted:
                    row[target[(s - 1, J)]] += s * by_rho[index[I]][j]
            matrix.append(row)
        return matrix

    def squares_to_zero(self, complex_: UComplexDegree, k: int) -> bool:
        top = complex_.ubound
        first = self.differential(complex_, k, top)
        second = self.differential(complex_, k + 1, top)
        columns = self.chain_basis(complex_, k + 1, top, False)
        restricted = set(self.chain_basis(complex_, k + 1, top))
        kept = [j for j, key in enumerate(columns) if key in restricted]
        for row in first:
            if any(row[j] for j in range(len(columns)) if j not in kept):
                return False
            image = vec_mat([row[j] for j in kept], second) if kept else ()
            if any(image):
                return False
        return True

    def _acyclicity_entry(
        self, complex_: UComplexDegree, k: int
    ) -> AcyclicityEntry:
        top = complex_.ubound
        chains = self.chain_basis(complex_, k, top)
        source = self.differential(complex_, k, top)
        width = len(self.chain_basis(complex_, k + 1, top, False))
        cocycles = field_left_kernel(source, width) if chains else []

        # boundaries of chains supported one u-degree higher
        wide = self.chain_basis(complex_, k, top + 1, False)
        position = {key: j for j, key in enumerate(wide)}
        boundaries = []
        if k > 0:
            boundaries = self.differential(complex_, k - 1, top + 1)
        embedded = []
        for y in cocycles:
            row = [Fraction(0)] * len(wide)
            for coeff, key in zip(y, chains):
                row[position[key]] = coeff
            embedded.append(row)

        boundary_rank = field_rank(boundaries, len(wide)) if boundaries else 0
        combined_rank = (
            field_rank(boundaries + embedded, len(wide))
            if boundaries or embedded
            else 0
        )

        consistent = True
        if complex_.in_essential_set:
            lowest = sum(1 for s, _ in chains if s == 0)
            consistent = comb(complex_.rank, k) == lowest + comb(complex_.fiber_rank, k)

        return AcyclicityEntry(
            point=complex_.point,
            degree=k,
            chains=len(chains),
            cocycles=len(cocycles),
            boundaries=boundary_rank,
            acyclic=combined_rank == boundary_rank,
            squares_to_zero=self.squares_to_zero(complex_, k),
            sequence_consistent=consistent,
        )

    def _degree_entries(
        self,
        etd: Etd,
        truncation: int,
        ubound: int,
        corrupted: bool,
        point: Vector,
    ) -> list[AcyclicityEntry]:
        complex_ = self.kernel_complex(etd, truncation, point, ubound, corrupted)
        return [
            self._acyclicity_entry(complex_, k) for k in range(complex_.rank + 1)
        ]

    def verify_k_acyclic(
        self,
        etd: Etd,
        truncation: int,
        window: Optional[int] = None,
        ubound: Optional[int] = None,
        corrupted: bool = False,
    ) -> AcyclicityVerdict:
        """
        For every e in E_K up to the window and every k, each cocycle of
        the kernel complex supported in u-degrees <= ubound is the boundary
        of a chain supported in u-degrees <= ubound + 1.
        """
        window = etd.window if window is None else window
        ubound = self.ubound if ubound is None else ubound
        etd_service = self.etd_service
        ideal = etd_service.truncation_ideal(etd, truncation)
        points = etd_service.enumerate_essential_ideal_set(etd, ideal, window)
        work = partial(self._degree_entries, etd, truncation, ubound, corrupted)
        entries = [entry for batch in map_jobs(work, points, self.jobs) for entry in batch]
        verdict = AcyclicityVerdict(
            etd=etd.name,
            truncation=truncation,
            window=window,
            ubound=ubound,
            corrupted=corrupted,
            entries=entries,
        )
        for failure in verdict.failures:
            logger.warning(
                f"Kernel complex of {etd.name} not acyclic at {failure.point}, "
                f"k={failure.degree}"
            )
        logger.info(
            f"Kernel complex acyclicity for {etd.name}, truncation {truncation}: "
            f"{len(points)} degrees, passed={verdict.passed}"
        )
        return verdict

    # ------------------------------------------------------------------
    # cohomology totals
    # ------------------------------------------------------------------

    def hodge_report(
        self,
        etd: Etd,
        ideal: Optional[MonoidIdeal],
        characteristic: int,
        window: Optional[int] = None,
        mode: Mode = "lattice",
    ) -> HodgeReport:
        """
        Sums dim H^m of the fiber complexes over the window and compares
        with the prediction: in characteristic p only degrees whose
        essential part lies in pE contribute; in characteristic 0 only
        degrees with [e] = 0.
        """
        window = etd.window if window is None else window
        etd_service = self.etd_service
        forms = self.forms_service
        if ideal is None:
            ideal = self.frobenius_service.default_ideal(etd)
        d = etd.fiber_dimension
        totals = [0] * (d + 1)
        predicted = [0] * (d + 1)
        contributions = {}
        flags = []

        for point in etd_service.enumerate_essential_ideal_set(etd, ideal, window):
            complex_ = forms.fiber_complex(etd, ideal, characteristic, point, mode)
            dims = forms.cohomology(complex_).dimensions
            essential = etd_service.decompose(etd, point).essential
            if characteristic:
                contributes = self.frobenius_service.in_frobenius_image(
                    etd, characteristic, essential
                )
            else:
                contributes = not any(etd_service.project(etd, essential))
            for m, dim in enumerate(dims):
                totals[m] += dim
                if contributes:
                    predicted[m] += comb(complex_.dimension, m)
            if any(dims):
                contributions[",".join(map(str, point))] = dims

            if characteristic:
                flags += self._mode_flags(etd, point, characteristic)

        for flag in flags:
            logger.warning(
                f"W^{flag.degree} of {etd.name} at {flag.point}: lattice dimension "
                f"{flag.lattice_dimension}, reductions dimension "
                f"{flag.reductions_dimension}"
            )
        return HodgeReport(
            etd=etd.name,
            characteristic=characteristic,
            window=window,
            ideal=ideal.generators,
            contributions=contributions,
            totals=tuple(totals),
            predicted=tuple(predicted),
            flags=flags,
        )

    def _mode_flags(self, etd: Etd, point: Vector, p: int) -> list[HodgeFlag]:
        forms = self.forms_service
        flags = []
        for m in range(1, etd.fiber_dimension + 1):
            lattice = forms.w_relative(etd, m, point, p, "lattice").rank
            reductions = forms.w_relative(etd, m, point, p, "reductions").rank
            if lattice != reductions:
                flags.append(
                    HodgeFlag(
                        point=point,
                        degree=m,
                        lattice_dimension=lattice,
                        reductions_dimension=reductions,
                    )
                )
        return flags

    # ------------------------------------------------------------------
    # lattice simplices
    # ------------------------------------------------------------------

    @staticmethod
    def simplex_from_edges(edges: Sequence[Sequence[int]]) -> SimplexDatum:
        edges = [tuple(int(x) for x in v) for v in edges]
        if not edges:
            raise DegenerateSimplexError("A simplex needs at least one edge")
        origin = (0,) * len(edges[0])
        return DegenerationService._checked(SimplexDatum(vertices=(origin, *edges)))

    @staticmethod
    def _checked(simplex: SimplexDatum) -> SimplexDatum:
        if not simplex.vertices:
            raise DegenerateSimplexError("A simplex needs at least one vertex")
        n = simplex.ambient_rank
        if any(len(v) != n for v in simplex.vertices):
            raise AmbientRankMismatchError("Simplex vertices live in different lattices")
        edges = simplex.edges
        if field_rank(edges, n) != len(edges):
            raise DegenerateSimplexError(
                f"Vertices {list(simplex.vertices)} are affinely dependent",
                witness={"vertices": [list(v) for v in simplex.vertices]},
            )
        return simplex

    def is_elementary(self, simplex: SimplexDatum) -> bool:
        """The vertices are the only lattice points of the simplex."""
        simplex = self._checked(simplex)
        origin = simplex.vertices[0]
        edges = simplex.edges
        vertices = set(simplex.vertices)
        n = simplex.ambient_rank
        ranges = [
            range(min(v[j] for v in vertices), max(v[j] for v in vertices) + 1)
            for j in range(n)
        ]
        for point in product(*ranges):
            if point in vertices:
                continue
            weights = solve_left(edges, [a - b for a, b in zip(point, origin)])
            if weights is not None and all(w >= 0 for w in weights) and sum(weights) <= 1:
                logger.debug(f"Lattice point {point} lies in {simplex.vertices}")
                return False
        return True

    def is_standard(self, simplex: SimplexDatum) -> bool:
        """The edge vectors from one vertex extend to a basis of Z^n."""
        simplex = self._checked(simplex)
        edges = simplex.edges
        if not edges:
            return True
        return all(d == 1 for d in invariant_factors(edges, simplex.ambient_rank))
