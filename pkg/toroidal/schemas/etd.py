import hashlib
import json
import re
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    ValidationInfo,
    field_validator,
)

from toroidal.schemas.lattice import Vector
from toroidal.schemas.monoid import Face, LocalGrading, ToricMonoid

_INTEGER = re.compile(r"^[+-]?\d+$")


def _parse_integer(value):
    """Integers arrive as JSON numbers or as decimal strings (for big values)."""
    if isinstance(value, bool):
        raise ValueError("booleans are not integers")
    if isinstance(value, int):
        return value
    if isinstance(value, str) and _INTEGER.match(value.strip()):
        return int(value.strip())
    raise ValueError(f"{value!r} is not an integer")


BigInt = Annotated[int, BeforeValidator(_parse_integer)]
IntVector = List[BigInt]
FacetDescriptor = List[int]
FacetSpec = Union[Literal["min", "max"], List[FacetDescriptor]]


class EtdFile(BaseModel):
    """
    On-disk description of an elementary log toroidal datum Q -> P.

    `facets` is "min", "max", or a list of facet descriptors, each a list of
    indices into `p_generators` whose sum generates the facet.
    """

    model_config = ConfigDict(extra="forbid")

    name: str = "etd"
    ambient_rank: int = Field(ge=0)
    p_generators: List[IntVector] = Field(min_length=1)
    q_generators: List[IntVector] = []
    facets: FacetSpec = "min"
    grading: Optional[IntVector] = None
    window: Optional[int] = Field(default=None, ge=0)
    ubound: Optional[int] = Field(default=None, ge=0)
    truncation: Optional[int] = Field(default=None, ge=0)

    @field_validator("p_generators", "q_generators")
    @classmethod
    def _check_vector_lengths(cls, vectors, info: ValidationInfo):
        n = info.data.get("ambient_rank")
        if n is None:
            return vectors
        for i, v in enumerate(vectors):
            if len(v) != n:
                raise ValueError(f"vector {i} has length {len(v)}, expected {n}")
        return vectors

    @field_validator("grading")
    @classmethod
    def _check_grading_length(cls, grading, info: ValidationInfo):
        n = info.data.get("ambient_rank")
        if grading is not None and n is not None and len(grading) != n:
            raise ValueError(f"grading has length {len(grading)}, expected {n}")
        return grading

    @field_validator("facets")
    @classmethod
    def _check_descriptors(cls, facets, info: ValidationInfo):
        if isinstance(facets, str):
            return facets
        count = len(info.data.get("p_generators") or [])
        for descriptor in facets:
            for index in descriptor:
                if not 0 <= index < count:
                    raise ValueError(
                        f"facet descriptor {descriptor} refers to generator {index}"
                    )
        return facets

    def canonical_json(self) -> str:
        return json.dumps(
            self.model_dump(mode="json"), sort_keys=True, separators=(",", ":")
        )

    def fingerprint(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()


class Etd(BaseModel):
    """
    Validated ETD. Facets are indices into `p.facet_normals`;
    `projection` (n x d, by rows) realizes P^gp -> P^gp/Q^gp = Z^d and
    `section` (d x n) is a splitting of it.
    """

    model_config = ConfigDict(frozen=True)

    name: str
    p: ToricMonoid
    q: ToricMonoid
    facets: Tuple[int, ...]
    minimal_facets: Tuple[int, ...]
    fiber_dimension: int
    grading: LocalGrading
    window: int
    projection: Tuple[Vector, ...]
    section: Tuple[Vector, ...]
    essential_faces: Tuple[Face, ...]
    fingerprint: str = ""

    @property
    def maximal_facets(self) -> Tuple[int, ...]:
        return tuple(range(len(self.p.facet_normals)))

    @property
    def unused_facets(self) -> Tuple[int, ...]:
        return tuple(i for i in self.maximal_facets if i not in self.facets)

    @property
    def ambient_rank(self) -> int:
        return self.p.ambient_rank


class EssentialDecomposition(BaseModel):
    model_config = ConfigDict(frozen=True)

    point: Vector
    essential: Vector
    base: Vector


class BadFace(BaseModel):
    model_config = ConfigDict(frozen=True)

    face: Face
    essential_rank: int
    base_generators: Tuple[int, ...]


class FacetClassification(BaseModel):
    vertical: Tuple[int, ...]
    horizontal: Tuple[int, ...]
    unused: Tuple[int, ...]


class CoverReport(BaseModel):
    """Charts P_F, F essential of rank d-1, covering P away from the bad faces."""

    chart_faces: Tuple[Face, ...]
    bad_faces: Tuple[BadFace, ...]
    uncovered: Tuple[Face, ...]
    bad_charts: Tuple[Face, ...]

    @property
    def covered(self) -> bool:
        return not self.uncovered and not self.bad_charts


class MonoidIdeal(BaseModel):
    """Monoid ideal K of Q, given by its generators."""

    model_config = ConfigDict(frozen=True)

    generators: Tuple[Vector, ...]
