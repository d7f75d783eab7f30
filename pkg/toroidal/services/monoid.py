import logging
from collections import deque
from fractions import Fraction
from itertools import combinations, product
from math import ceil, floor, gcd
from typing import Optional, Sequence

from toroidal.exceptions.monoid import (
    EmptyGeneratorsError,
    InvalidGradingError,
    NotAFaceError,
    NotInMonoidError,
    NotSaturatedMonoidError,
    NotSharpError,
)
from toroidal.exceptions.lattice import AmbientRankMismatchError
from toroidal.schemas.lattice import Sublattice, Vector
from toroidal.schemas.monoid import Face, LocalGrading, Localization, ToricMonoid
from toroidal.services.lattice import (
    add,
    annihilator,
    dot,
    field_rank,
    left_kernel,
    matrix_rows,
    saturate,
    scale,
    smith_normal_form,
    sub,
    sublattice,
    to_domain_matrix,
    vec_mat,
)

logger = logging.getLogger(__name__)


class MonoidService:
    def __init__(self, saturation_bound: int = 20):
        """
        Builds and queries sharp toric monoids.

        Args:
            saturation_bound: degree (in the default grading) up to which
                `from_generators` checks that the generators produce every
                lattice point of their cone
        """
        self.saturation_bound = saturation_bound

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    def from_generators(
        self, ambient_rank: int, generators: Sequence[Sequence[int]]
    ) -> ToricMonoid:
        """
        Builds the monoid generated by `generators`, which must be the
        lattice points of a strictly convex rational cone.

        Raises:
            EmptyGeneratorsError: no generators were given
            NotSharpError: the cone contains a line
            NotSaturatedMonoidError: a lattice point of the cone of low
                degree is not a sum of generators
        """
        if not generators:
            raise EmptyGeneratorsError("A toric monoid needs at least one generator")
        monoid = self._build(ambient_rank, generators)
        self._check_saturated(monoid)
        return monoid

    @staticmethod
    def trivial(ambient_rank: int) -> ToricMonoid:
        zero = (0,) * ambient_rank
        face = Face(support=(0,), facets=(), rank=0)
        return ToricMonoid(
            ambient_rank=ambient_rank,
            generators=(zero,),
            lattice=sublattice(ambient_rank),
            coordinate_map=tuple(() for _ in range(ambient_rank)),
            facet_normals=(),
            facet_faces=(),
            faces=(face,),
        )

    def from_cone(self, ambient_rank: int, rays: Sequence[Sequence[int]]) -> ToricMonoid:
        """Saturated monoid of the cone spanned by `rays`, via its Hilbert basis."""
        if not rays:
            raise EmptyGeneratorsError("A cone needs at least one ray")
        cone = self._build(ambient_rank, rays)
        h = self.default_grading(cone).form
        limit = sum(dot(h, ray) for ray in cone.generators)
        points = [p for p in self._cone_points(cone, h, limit) if any(p)]

        hilbert: list[Vector] = []
        for point in points:
            if not any(self.contains(cone, sub(point, y)) for y in hilbert):
                hilbert.append(point)
        logger.debug(f"Hilbert basis of cone over {list(rays)}: {hilbert}")
        return self.from_generators(ambient_rank, hilbert)

    def product(self, first: ToricMonoid, second: ToricMonoid) -> ToricMonoid:
        n1, n2 = first.ambient_rank, second.ambient_rank
        generators = [tuple(g) + (0,) * n2 for g in first.generators]
        generators += [(0,) * n1 + tuple(g) for g in second.generators]
        return self.from_generators(n1 + n2, generators)

    def _build(self, ambient_rank: int, generators: Sequence[Sequence[int]]) -> ToricMonoid:
        generators = tuple(dict.fromkeys(tuple(int(x) for x in g) for g in generators))
        for g in generators:
            if len(g) != ambient_rank:
                raise AmbientRankMismatchError(
                    f"Generator {g} does not live in Z^{ambient_rank}"
                )

        lattice = saturate(sublattice(ambient_rank, generators))
        r = lattice.rank
        if r == 0:
            monoid = self.trivial(ambient_rank)
            return monoid.model_copy(update={"generators": generators})

        # coordinates in the basis of P^gp: v -> v*T
        U, _, V = smith_normal_form(to_domain_matrix(lattice.basis, ambient_rank))
        left = [row[:r] for row in matrix_rows(V)]
        coordinate_map = tuple(vec_mat(row, matrix_rows(U)) for row in left)
        coords = [vec_mat(g, coordinate_map) for g in generators]

        normals = self._facet_normals(coords, r)
        if field_rank(normals, r) < r:
            raise NotSharpError(
                f"The cone over {list(generators)} contains a line"
            )
        ambient = sorted(
            tuple(dot(row, u) for row in coordinate_map) for u in normals
        )

        zero_sets = [
            frozenset(i for i, g in enumerate(generators) if dot(u, g) == 0)
            for u in ambient
        ]
        faces = self._face_lattice(generators, zero_sets, ambient_rank)
        by_support = {face.support: face for face in faces}
        facet_faces = tuple(by_support[tuple(sorted(z))] for z in zero_sets)

        return ToricMonoid(
            ambient_rank=ambient_rank,
            generators=generators,
            lattice=lattice,
            coordinate_map=coordinate_map,
            facet_normals=tuple(ambient),
            facet_faces=facet_faces,
            faces=faces,
        )

    @staticmethod
    def _facet_normals(coords: list[Vector], r: int) -> list[Vector]:
        """Primitive inner normals of the cone over `coords` in Z^r."""
        normals: set[Vector] = set()
        nonzero = [c for c in coords if any(c)]
        for combo in combinations(range(len(nonzero)), r - 1):
            rows = [nonzero[i] for i in combo]
            if field_rank(rows, r) != r - 1:
                continue
            columns = [tuple(row[j] for row in rows) for j in range(r)]
            kernel = left_kernel(columns, r - 1)
            if len(kernel) != 1:
                continue
            u = kernel[0]
            values = [dot(u, c) for c in nonzero]
            if all(x >= 0 for x in values):
                normals.add(u)
            elif all(x <= 0 for x in values):
                normals.add(scale(-1, u))
        return sorted(normals)

    @staticmethod
    def _face_lattice(
        generators: tuple[Vector, ...], zero_sets: list[frozenset], ambient_rank: int
    ) -> tuple[Face, ...]:
        everything = frozenset(range(len(generators)))
        seen = {everything}
        queue = deque([everything])
        while queue:
            support = queue.popleft()
            for zero_set in zero_sets:
                smaller = support & zero_set
                if smaller not in seen:
                    seen.add(smaller)
                    queue.append(smaller)

        faces = []
        for support in seen:
            faces.append(
                Face(
                    support=tuple(sorted(support)),
                    facets=tuple(i for i, z in enumerate(zero_sets) if support <= z),
                    rank=field_rank([generators[i] for i in support], ambient_rank),
                )
            )
        faces.sort(key=lambda face: (face.rank, face.support))
        return tuple(faces)

    def _check_saturated(self, monoid: ToricMonoid) -> None:
        h = self.default_grading(monoid).form
        bound = self.saturation_bound
        expected = set(self._cone_points(monoid, h, bound))

        generated = {monoid.zero}
        queue = deque([monoid.zero])
        while queue:
            point = queue.popleft()
            for g in monoid.generators:
                nxt = add(point, g)
                if nxt not in generated and dot(h, nxt) <= bound:
                    generated.add(nxt)
                    queue.append(nxt)

        missing = sorted(expected - generated, key=lambda p: (dot(h, p), p))
        if missing:
            raise NotSaturatedMonoidError(
                f"{missing[0]} lies in the cone but is not a sum of generators",
                missing=missing[0],
            )

    # ------------------------------------------------------------------
    # queries
    # ------------------------------------------------------------------

    @staticmethod
    def contains(monoid: ToricMonoid, p: Sequence[int]) -> bool:
        if len(p) != monoid.ambient_rank:
            raise AmbientRankMismatchError(
                f"{tuple(p)} does not live in Z^{monoid.ambient_rank}"
            )
        if any(dot(c, p) for c in annihilator(monoid.lattice)):
            return False
        return all(dot(u, p) >= 0 for u in monoid.facet_normals)

    @staticmethod
    def face_generators(monoid: ToricMonoid, face: Face) -> list[Vector]:
        return [monoid.generators[i] for i in face.support]

    @staticmethod
    def face_lattice(monoid: ToricMonoid, face: Face) -> Sublattice:
        """F^gp, a saturated sublattice of Z^n."""
        return saturate(
            sublattice(monoid.ambient_rank, [monoid.generators[i] for i in face.support])
        )

    def face_contains(self, monoid: ToricMonoid, face: Face, p: Sequence[int]) -> bool:
        if not self.contains(monoid, p):
            return False
        return all(dot(monoid.facet_normals[i], p) == 0 for i in face.facets)

    def face_generated_by(self, monoid: ToricMonoid, p: Sequence[int]) -> Face:
        """Smallest face containing p."""
        if not self.contains(monoid, p):
            raise NotInMonoidError(f"{tuple(p)} is not in the monoid")
        zero = [u for u in monoid.facet_normals if dot(u, p) == 0]
        support = tuple(
            i
            for i, g in enumerate(monoid.generators)
            if all(dot(u, g) == 0 for u in zero)
        )
        for face in monoid.faces:
            if face.support == support:
                return face
        raise NotAFaceError(f"No face of the monoid has support {support}")

    @staticmethod
    def interior_point(monoid: ToricMonoid, face: Face, k: int = 1) -> Vector:
        """k times the sum of the generators of the face."""
        point = monoid.zero
        for i in face.support:
            point = add(point, monoid.generators[i])
        return scale(k, point)

    def face_join(self, monoid: ToricMonoid, first: Face, second: Face) -> Face:
        return self.face_generated_by(
            monoid,
            add(self.interior_point(monoid, first), self.interior_point(monoid, second)),
        )

    @staticmethod
    def facets(monoid: ToricMonoid) -> list[Face]:
        return list(monoid.facet_faces)

    @staticmethod
    def rays(monoid: ToricMonoid) -> list[Vector]:
        """Primitive generators of the rank-one faces."""
        rays = []
        for face in monoid.faces:
            if face.rank != 1:
                continue
            v = monoid.generators[face.support[0]]
            g = gcd(*v)
            rays.append(tuple(x // g for x in v))
        return rays

    # ------------------------------------------------------------------
    # gradings and enumeration
    # ------------------------------------------------------------------

    @staticmethod
    def default_grading(monoid: ToricMonoid) -> LocalGrading:
        form = (0,) * monoid.ambient_rank
        for u in monoid.facet_normals:
            form = add(form, u)
        return LocalGrading(form=form)

    @staticmethod
    def validate_grading(monoid: ToricMonoid, form: Sequence[int]) -> LocalGrading:
        form = tuple(int(x) for x in form)
        if len(form) != monoid.ambient_rank:
            raise AmbientRankMismatchError(
                f"Grading {form} does not live on Z^{monoid.ambient_rank}"
            )
        for g in monoid.generators:
            if any(g) and dot(form, g) <= 0:
                raise InvalidGradingError(
                    f"Grading {form} is not positive on the generator {g}"
                )
        return LocalGrading(form=form)

    def enumerate_up_to(
        self, monoid: ToricMonoid, h: Optional[Sequence[int]], bound: int
    ) -> list[Vector]:
        """
        All p in P with h(p) <= bound, sorted by (h(p), p). `h` defaults to
        the sum of the facet normals.
        """
        if h is None:
            h = self.default_grading(monoid).form
        else:
            h = self.validate_grading(monoid, h).form
        return self._cone_points(monoid, h, bound)

    def _cone_points(self, monoid: ToricMonoid, h: Sequence[int], bound: int) -> list[Vector]:
        if bound < 0:
            return []
        r = monoid.rank
        if r == 0:
            return [monoid.zero]

        # the polytope {p in cone : h(p) <= bound} is the hull of 0 and the
        # points bound/h(g) * g; bound it coordinatewise in P^gp
        corners = [(0,) * r]
        for g in monoid.generators:
            height = dot(h, g)
            if height > 0:
                c = vec_mat(g, monoid.coordinate_map)
                corners.append(tuple(Fraction(bound, height) * x for x in c))
        ranges = [
            range(floor(min(c[j] for c in corners)), ceil(max(c[j] for c in corners)) + 1)
            for j in range(r)
        ]

        points = []
        for coords in product(*ranges):
            p = vec_mat(coords, monoid.lattice.basis)
            if dot(h, p) <= bound and all(dot(u, p) >= 0 for u in monoid.facet_normals):
                points.append(p)
        points.sort(key=lambda p: (dot(h, p), p))
        return points

    # ------------------------------------------------------------------
    # localization
    # ------------------------------------------------------------------

    def localize(self, monoid: ToricMonoid, face: Face) -> Localization:
        """
        P_F = P + (-F) together with its splitting F^gp x P_F / F^gp.

        The sharp part is embedded in Z^(n - rank F^gp) through `projection`,
        which kills F^gp.
        """
        if face not in monoid.faces:
            raise NotAFaceError(f"{face.support} is not a face of the monoid")
        n = monoid.ambient_rank
        group = self.face_lattice(monoid, face)
        f = group.rank
        if f == 0:
            projection = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        else:
            _, _, V = smith_normal_form(to_domain_matrix(group.basis, n))
            projection = tuple(row[f:] for row in matrix_rows(V))

        images = [vec_mat(g, projection) if f < n else () for g in monoid.generators]
        if f == n:
            sharp_part = self.trivial(0)
        else:
            sharp_part = self.from_generators(n - f, images)

        generators = monoid.generators + tuple(
            scale(-1, g) for g in self.face_generators(monoid, face) if any(g)
        )
        return Localization(
            face=face,
            generators=generators,
            group=group,
            projection=projection,
            sharp_part=sharp_part,
        )
