from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from toroidal.schemas.lattice import FieldSubspace, FieldVector, Sublattice, Vector
from toroidal.schemas.monoid import Face

Mode = Literal["lattice", "reductions"]


def ring_label(characteristic: Optional[int]) -> str:
    if characteristic is None:
        return "ZZ"
    if characteristic == 0:
        return "QQ"
    return f"GF({characteristic})"


class GradedWModule(BaseModel):
    """
    Degree-p piece of W^m (absolute, inside wedge^m of the ambient group) or
    of W^m_{P/Q} (relative, inside wedge^m Z^d). `characteristic` is None for
    the integral module, 0 for Q and p for F_p.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["absolute", "relative"]
    degree: int
    point: Vector
    face: Face
    characteristic: Optional[int] = None
    mode: Mode = "lattice"
    value: Sublattice | FieldSubspace

    @property
    def rank(self) -> int:
        if isinstance(self.value, Sublattice):
            return self.value.rank
        return self.value.dimension

    @property
    def ring(self) -> str:
        return ring_label(self.characteristic)


class DegreeComplex(BaseModel):
    """(wedge^* V, [e] ^ -) for one degree e; `klass` is [e] in the basis of V."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["fiber", "absolute"]
    point: Vector
    characteristic: int
    mode: Mode = "lattice"
    space: FieldSubspace
    klass: FieldVector

    @property
    def dimension(self) -> int:
        return self.space.dimension

    @property
    def vanishes(self) -> bool:
        return not any(self.klass)


class ComplexCohomology(BaseModel):
    point: Vector
    dimensions: Tuple[int, ...]
    squares_to_zero: bool


class SplitSequenceVerdict(BaseModel):
    point: Vector
    degree: int
    absolute_rank: int
    relative_rank: int
    kernel_rank: int
    exact: bool
    surjective: bool
    split: bool
    retraction: Tuple[Vector, ...] = ()

    @property
    def passed(self) -> bool:
        return self.exact and self.surjective and self.split


class FreeBasisVerdict(BaseModel):
    degree: int
    window: int
    checked: int
    failures: List[Dict[str, Any]] = []

    @property
    def passed(self) -> bool:
        return not self.failures


class WedgeIntersectionVerdict(BaseModel):
    point: Vector
    degree: int
    wedge_of_intersection: Sublattice
    intersection_of_wedges: Sublattice

    @property
    def passed(self) -> bool:
        return self.wedge_of_intersection == self.intersection_of_wedges
