from typing import Tuple

from pydantic import BaseModel, ConfigDict

from toroidal.schemas.lattice import Sublattice, Vector


class Face(BaseModel):
    """
    Face of a toric monoid, identified by the generators it contains
    (`support`, indices into the owner's generators) and by the facets
    containing it (`facets`, indices into the owner's facet normals).
    """

    model_config = ConfigDict(frozen=True)

    support: Tuple[int, ...]
    facets: Tuple[int, ...]
    rank: int

    def is_subface_of(self, other: "Face") -> bool:
        return set(self.support) <= set(other.support)


class LocalGrading(BaseModel):
    model_config = ConfigDict(frozen=True)

    form: Vector


class ToricMonoid(BaseModel):
    """
    Sharp toric monoid P = Z^n intersected with the cone over `generators`.

    `coordinate_map` (n x r, by rows) sends v in P^gp to its coordinates in
    the basis of `lattice`; `facet_normals` are integer forms on Z^n that
    restrict to the primitive inner facet normals on P^gp.
    """

    model_config = ConfigDict(frozen=True)

    ambient_rank: int
    generators: Tuple[Vector, ...]
    lattice: Sublattice
    coordinate_map: Tuple[Vector, ...]
    facet_normals: Tuple[Vector, ...]
    facet_faces: Tuple[Face, ...]
    faces: Tuple[Face, ...]

    @property
    def rank(self) -> int:
        return self.lattice.rank

    @property
    def zero(self) -> Vector:
        return (0,) * self.ambient_rank

    @property
    def full_face(self) -> Face:
        return self.faces[-1]


class Localization(BaseModel):
    """P_F = P + (-F), split as F^gp x P_F / F^gp."""

    model_config = ConfigDict(frozen=True)

    face: Face
    generators: Tuple[Vector, ...]
    group: Sublattice
    projection: Tuple[Vector, ...]
    sharp_part: ToricMonoid
