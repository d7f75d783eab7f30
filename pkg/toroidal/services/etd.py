import logging
from collections import deque
from itertools import combinations
from typing import Optional, Sequence

from toroidal.exceptions.etd import (
    BasisNotFaceUnionError,
    EtdError,
    FacetSetTooSmallError,
    InvalidFacetError,
    InvalidIdealError,
    NotFreeBasisError,
    NotInjectiveError,
    UnsupportedBaseError,
)
from toroidal.exceptions.monoid import NotInMonoidError
from toroidal.schemas.etd import (
    BadFace,
    CoverReport,
    EssentialDecomposition,
    Etd,
    EtdFile,
    FacetClassification,
    MonoidIdeal,
)
from toroidal.schemas.lattice import Vector
from toroidal.schemas.monoid import Face, ToricMonoid
from toroidal.services.lattice import (
    add,
    determinant,
    diagonal,
    dot,
    matrix_rows,
    smith_normal_form,
    sub,
    to_domain_matrix,
    unimodular_inverse,
    vec_mat,
)
from toroidal.services.monoid import MonoidService

logger = logging.getLogger(__name__)


class EtdService:
    def __init__(self, monoid_service: MonoidService, window: int = 20):
        """
        Validates elementary log toroidal data and answers combinatorial
        questions about them.

        Args:
            monoid_service: builds P and Q from their generators
            window: default degree bound for the finite certification of
                the free-basis and face-union conditions
        """
        self.monoid_service = monoid_service
        self.window = window

    # ------------------------------------------------------------------
    # validation
    # ------------------------------------------------------------------

    def validate(self, etd_file: EtdFile, window: Optional[int] = None) -> Etd:
        """
        Builds an Etd from its file description and certifies it.

        The free-basis condition and the face-union condition on E are
        checked for every p in P of degree at most the window.
        """
        monoids = self.monoid_service
        n = etd_file.ambient_rank
        if window is None:
            window = etd_file.window if etd_file.window is not None else self.window

        p = monoids.from_generators(n, etd_file.p_generators)
        if etd_file.q_generators:
            q = monoids.from_generators(n, etd_file.q_generators)
        else:
            q = monoids.trivial(n)
        for kappa in q.generators:
            if not monoids.contains(p, kappa):
                raise NotInjectiveError(
                    f"Generator {kappa} of Q is not in P",
                    witness={"q_generator": list(kappa)},
                )

        minimal = tuple(
            i
            for i, u in enumerate(p.facet_normals)
            if any(dot(u, kappa) > 0 for kappa in q.generators)
        )
        facets = self._resolve_facets(p, etd_file, minimal)
        if not set(minimal) <= set(facets):
            missing = sorted(set(minimal) - set(facets))
            raise FacetSetTooSmallError(
                f"Facet set {list(facets)} misses the vertical facets {missing}",
                witness={"missing_facets": missing},
            )

        if etd_file.grading is not None:
            grading = monoids.validate_grading(p, etd_file.grading)
        else:
            grading = monoids.default_grading(p)

        projection, section = self._splitting(p, q)
        essential = tuple(
            face for face in p.faces if not self._meets_base(p, q, face)
        )
        etd = Etd(
            name=etd_file.name,
            p=p,
            q=q,
            facets=facets,
            minimal_facets=minimal,
            fiber_dimension=p.rank - q.rank,
            grading=grading,
            window=window,
            projection=projection,
            section=section,
            essential_faces=essential,
            fingerprint=etd_file.fingerprint(),
        )
        self._certify(etd)
        logger.info(
            f"Validated ETD {etd.name}: rank P {p.rank}, rank Q {q.rank}, "
            f"facets {list(facets)}, window {window}"
        )
        return etd

    def from_data(
        self,
        ambient_rank: int,
        p_generators: Sequence[Sequence[int]],
        q_generators: Sequence[Sequence[int]] = (),
        facets="min",
        name: str = "etd",
        window: Optional[int] = None,
    ) -> Etd:
        etd_file = EtdFile(
            name=name,
            ambient_rank=ambient_rank,
            p_generators=[list(g) for g in p_generators],
            q_generators=[list(g) for g in q_generators],
            facets=facets,
        )
        return self.validate(etd_file, window=window)

    def _resolve_facets(
        self, p: ToricMonoid, etd_file: EtdFile, minimal: tuple[int, ...]
    ) -> tuple[int, ...]:
        if etd_file.facets == "min":
            return minimal
        if etd_file.facets == "max":
            return tuple(range(len(p.facet_normals)))

        chosen = set()
        for descriptor in etd_file.facets:
            point = p.zero
            for index in descriptor:
                point = add(point, etd_file.p_generators[index])
            face = self.monoid_service.face_generated_by(p, point)
            if face not in p.facet_faces:
                raise InvalidFacetError(
                    f"Descriptor {descriptor} generates a face of rank {face.rank}, "
                    f"not a facet",
                    witness={"descriptor": descriptor, "rank": face.rank},
                )
            chosen.add(p.facet_faces.index(face))
        return tuple(sorted(chosen))

    def _meets_base(self, p: ToricMonoid, q: ToricMonoid, face: Face) -> bool:
        return any(
            any(kappa) and self.monoid_service.face_contains(p, face, kappa)
            for kappa in q.generators
        )

    @staticmethod
    def _splitting(p: ToricMonoid, q: ToricMonoid):
        """
        Projection P^gp -> Z^d with kernel Q^gp, and a section of it.

        In P^gp coordinates the Smith form U*C*V = D of the Q^gp basis C has
        D = (I | 0), so the last d columns of V vanish on Q^gp.
        """
        r, k = p.rank, q.rank
        if r == 0:
            return tuple(() for _ in range(p.ambient_rank)), ()
        if k == 0:
            V = [tuple(int(i == j) for j in range(r)) for i in range(r)]
            V_inv = V
        else:
            q_coords = [vec_mat(b, p.coordinate_map) for b in q.lattice.basis]
            _, D, V_matrix = smith_normal_form(to_domain_matrix(q_coords, r))
            if any(x != 1 for x in diagonal(D)):
                raise EtdError("Q^gp is not saturated in P^gp")
            V = matrix_rows(V_matrix)
            V_inv = matrix_rows(unimodular_inverse(V_matrix))

        tail = [row[k:] for row in V]
        projection = tuple(vec_mat(row, tail) for row in p.coordinate_map)
        section = tuple(vec_mat(row, p.lattice.basis) for row in V_inv[k:])
        return projection, section

    def _certify(self, etd: Etd) -> None:
        memo: dict[Vector, frozenset] = {}
        points = self.monoid_service.enumerate_up_to(etd.p, etd.grading.form, etd.window)
        for point in points:
            residues = self._residues(etd, point, memo)
            if len(residues) != 1:
                raise NotFreeBasisError(
                    f"{point} has {len(residues)} decompositions e + q",
                    witness={"point": list(point), "residues": sorted(map(list, residues))},
                )
            if point in residues:
                face = self.monoid_service.face_generated_by(etd.p, point)
                if face not in etd.essential_faces:
                    raise BasisNotFaceUnionError(
                        f"{point} is in E but its face meets Q",
                        witness={"point": list(point), "face": list(face.support)},
                    )

    # ------------------------------------------------------------------
    # essential set and decomposition
    # ------------------------------------------------------------------

    def _residues(self, etd: Etd, p: Vector, memo: dict) -> frozenset:
        """Elements e of E with p - e in Q, by memoized descent along Q."""
        monoids = self.monoid_service
        kappas = [k for k in etd.q.generators if any(k)]
        stack = [tuple(p)]
        while stack:
            x = stack[-1]
            if x in memo:
                stack.pop()
                continue
            below = [sub(x, k) for k in kappas if monoids.contains(etd.p, sub(x, k))]
            pending = [y for y in below if y not in memo]
            if pending:
                stack.extend(pending)
                continue
            stack.pop()
            if below:
                memo[x] = frozenset().union(*(memo[y] for y in below))
            else:
                memo[x] = frozenset([x])
        return memo[tuple(p)]

    def is_essential(self, etd: Etd, p: Sequence[int]) -> bool:
        monoids = self.monoid_service
        if not monoids.contains(etd.p, p):
            return False
        return not any(
            monoids.contains(etd.p, sub(p, k)) for k in etd.q.generators if any(k)
        )

    def decompose(self, etd: Etd, p: Sequence[int]) -> EssentialDecomposition:
        """The unique e in E and q in Q with p = e + q."""
        p = tuple(int(x) for x in p)
        if not self.monoid_service.contains(etd.p, p):
            raise NotInMonoidError(f"{p} is not in P")
        residues = self._residues(etd, p, {})
        if len(residues) != 1:
            raise NotFreeBasisError(
                f"{p} has {len(residues)} decompositions e + q",
                witness={"point": list(p), "residues": sorted(map(list, residues))},
            )
        (e,) = residues
        return EssentialDecomposition(point=p, essential=e, base=sub(p, e))

    def enumerate_essential(self, etd: Etd, bound: Optional[int] = None) -> list[Vector]:
        bound = etd.window if bound is None else bound
        points = self.monoid_service.enumerate_up_to(etd.p, etd.grading.form, bound)
        return [p for p in points if self.is_essential(etd, p)]

    def face_of(self, etd: Etd, p: Sequence[int]) -> Face:
        return self.monoid_service.face_generated_by(etd.p, p)

    def interior_point(self, etd: Etd, face: Face, k: int = 1) -> Vector:
        return self.monoid_service.interior_point(etd.p, face, k)

    # ------------------------------------------------------------------
    # faces
    # ------------------------------------------------------------------

    def essential_faces(self, etd: Etd) -> list[Face]:
        return list(etd.essential_faces)

    def cover_faces(self, etd: Etd) -> list[Face]:
        """Essential faces of rank d - 1; their localizations form the cover."""
        return [f for f in etd.essential_faces if f.rank == etd.fiber_dimension - 1]

    def bad_faces(self, etd: Etd) -> list[BadFace]:
        """Faces whose essential subfaces all have rank at most d - 2."""
        bad = []
        for face in etd.p.faces:
            top = max(f.rank for f in etd.essential_faces if f.is_subface_of(face))
            if top <= etd.fiber_dimension - 2:
                base = tuple(
                    i
                    for i, kappa in enumerate(etd.q.generators)
                    if any(kappa) and self.monoid_service.face_contains(etd.p, face, kappa)
                )
                bad.append(BadFace(face=face, essential_rank=top, base_generators=base))
        return bad

    def cover(self, etd: Etd) -> CoverReport:
        """
        Checks that the charts P_F over the rank d - 1 essential faces cover
        every face outside the bad set and avoid the bad set.
        """
        charts = self.cover_faces(etd)
        bad = self.bad_faces(etd)
        bad_faces = [b.face for b in bad]
        uncovered = [
            face
            for face in etd.p.faces
            if not any(face.is_subface_of(b) for b in bad_faces)
            and not any(f.is_subface_of(face) for f in charts)
        ]
        bad_charts = [
            f for f in charts if any(f.is_subface_of(b) for b in bad_faces)
        ]
        return CoverReport(
            chart_faces=tuple(charts),
            bad_faces=tuple(bad),
            uncovered=tuple(uncovered),
            bad_charts=tuple(bad_charts),
        )

    def classify_facets(self, etd: Etd) -> FacetClassification:
        return FacetClassification(
            vertical=etd.minimal_facets,
            horizontal=tuple(i for i in etd.facets if i not in etd.minimal_facets),
            unused=etd.unused_facets,
        )

    def is_log_smooth(self, etd: Etd) -> bool:
        return etd.fiber_dimension <= 1 or etd.facets == etd.maximal_facets

    def smooth_type_decomposition(self, etd: Etd) -> tuple[list[Face], list[Face]]:
        """
        Splits the cover faces into those whose containing facets are all
        used and those lying on an unused facet.
        """
        used, unused = [], []
        for face in self.cover_faces(etd):
            if set(face.facets) <= set(etd.facets):
                used.append(face)
            else:
                unused.append(face)
        return used, unused

    # ------------------------------------------------------------------
    # splitting
    # ------------------------------------------------------------------

    @staticmethod
    def project(etd: Etd, p: Sequence[int]) -> Vector:
        if etd.fiber_dimension == 0:
            return ()
        return vec_mat(p, etd.projection)

    @staticmethod
    def lift(etd: Etd, c: Sequence[int]) -> Vector:
        if not etd.section:
            return etd.p.zero
        return vec_mat(c, etd.section)

    def split(self, etd: Etd, p: Sequence[int]) -> tuple[Vector, Vector]:
        """p = lift(project(p)) + (component in Q^gp)."""
        lifted = self.lift(etd, self.project(etd, p))
        return lifted, sub(p, lifted)

    def with_splitting(self, etd: Etd, change: Sequence[Sequence[int]]) -> Etd:
        """Same ETD with the quotient coordinates changed by a unimodular matrix."""
        d = etd.fiber_dimension
        rows = [tuple(int(x) for x in row) for row in change]
        if len(rows) != d or any(len(row) != d for row in rows):
            raise EtdError(f"Change of splitting must be a {d} x {d} matrix")
        if d and abs(determinant(rows)) != 1:
            raise EtdError(
                "Change of splitting is not unimodular", witness={"matrix": rows}
            )
        if d == 0:
            return etd
        inverse = matrix_rows(unimodular_inverse(to_domain_matrix(rows, d)))
        return etd.model_copy(
            update={
                "projection": tuple(vec_mat(row, rows) for row in etd.projection),
                "section": tuple(vec_mat(row, etd.section) for row in inverse),
            }
        )

    # ------------------------------------------------------------------
    # products
    # ------------------------------------------------------------------

    def product(self, etd: Etd, extra: int) -> Etd:
        """Q -> P x N^extra, with facets F x N^extra for F in the facet set."""
        n = etd.ambient_rank
        pad = (0,) * extra
        p_generators = [list(g) + list(pad) for g in etd.p.generators]
        p_generators += [
            [0] * n + [int(i == j) for j in range(extra)] for i in range(extra)
        ]
        new_indices = list(range(len(etd.p.generators), len(p_generators)))
        descriptors = [
            list(etd.p.facet_faces[i].support) + new_indices for i in etd.facets
        ]
        etd_file = EtdFile(
            name=f"{etd.name}x{extra}",
            ambient_rank=n + extra,
            p_generators=p_generators,
            q_generators=[list(g) + list(pad) for g in etd.q.generators if any(g)],
            facets=descriptors,
        )
        return self.validate(etd_file, window=etd.window)

    # ------------------------------------------------------------------
    # monoid ideals of Q
    # ------------------------------------------------------------------

    def monoid_ideal(
        self, etd: Etd, generators: Optional[Sequence[Sequence[int]]] = None
    ) -> MonoidIdeal:
        """Ideal of Q generated by `generators`; the maximal ideal by default."""
        if generators is None:
            generators = [k for k in etd.q.generators if any(k)]
        vectors = tuple(tuple(int(x) for x in g) for g in generators)
        if not vectors:
            raise InvalidIdealError("A monoid ideal needs at least one generator")
        for g in vectors:
            if not any(g):
                raise InvalidIdealError("The zero vector generates all of Q")
            if not self.monoid_service.contains(etd.q, g):
                raise InvalidIdealError(
                    f"Ideal generator {g} is not in Q", witness={"generator": list(g)}
                )
        return MonoidIdeal(generators=vectors)

    def truncation_ideal(self, etd: Etd, truncation: int) -> MonoidIdeal:
        """K = (truncation + 1) * rho + Q for Q of rank one generated by rho."""
        rho = self.base_generator(etd)
        return self.monoid_ideal(etd, [tuple((truncation + 1) * x for x in rho)])

    def base_generator(self, etd: Etd) -> Vector:
        if etd.q.rank != 1:
            raise UnsupportedBaseError(
                f"Q has rank {etd.q.rank}; this needs Q = N",
                witness={"rank": etd.q.rank},
            )
        (b,) = etd.q.lattice.basis
        return b if self.monoid_service.contains(etd.q, b) else tuple(-x for x in b)

    def in_essential_ideal_set(
        self, etd: Etd, ideal: MonoidIdeal, p: Sequence[int]
    ) -> bool:
        """p in E_K = {p in P : p - k not in P for all k in K}."""
        monoids = self.monoid_service
        if not monoids.contains(etd.p, p):
            return False
        return not any(monoids.contains(etd.p, sub(p, k)) for k in ideal.generators)

    def enumerate_essential_ideal_set(
        self, etd: Etd, ideal: MonoidIdeal, bound: Optional[int] = None
    ) -> list[Vector]:
        bound = etd.window if bound is None else bound
        points = self.monoid_service.enumerate_up_to(etd.p, etd.grading.form, bound)
        return [p for p in points if self.in_essential_ideal_set(etd, ideal, p)]

    def quotient_base_dimension(
        self, etd: Etd, ideal: MonoidIdeal, cap: int = 10000
    ) -> int:
        """dim k[Q]/K, the number of points of Q outside K."""
        monoids = self.monoid_service
        kappas = [k for k in etd.q.generators if any(k)]

        def in_ideal(x):
            return any(monoids.contains(etd.q, sub(x, k)) for k in ideal.generators)

        seen = {etd.q.zero}
        queue = deque([etd.q.zero])
        while queue:
            x = queue.popleft()
            for k in kappas:
                y = add(x, k)
                if y not in seen and not in_ideal(y):
                    seen.add(y)
                    if len(seen) > cap:
                        raise UnsupportedBaseError(
                            f"Q/K has more than {cap} points; K must be Q+-primary"
                        )
                    queue.append(y)
        return len(seen)

    @staticmethod
    def subsets_of(faces: Sequence[Face]) -> list[tuple[Face, ...]]:
        """Nonempty subfamilies, smallest first."""
        return [
            combo
            for size in range(1, len(faces) + 1)
            for combo in combinations(faces, size)
        ]
