from typing import List, Tuple

from pydantic import BaseModel

from toroidal.schemas.lattice import Vector


class FrobeniusEntry(BaseModel):
    """Behaviour of one degree e of E under e -> p*e."""

    source: Vector
    target: Vector
    same_face: bool
    target_essential: bool
    class_vanishes: bool

    @property
    def passed(self) -> bool:
        return self.same_face and self.target_essential and self.class_vanishes


class FrobeniusDecomposition(BaseModel):
    etd: str
    prime: int
    window: int
    ideal: Tuple[Vector, ...] = ()
    entries: List[FrobeniusEntry] = []

    @property
    def passed(self) -> bool:
        return all(entry.passed for entry in self.entries)

    @property
    def image(self) -> List[Vector]:
        return [entry.target for entry in self.entries]


class CartierEntry(BaseModel):
    """
    Computed cohomology of the degree-`point` fiber complex against the
    prediction from its essential part `essential`.
    """

    point: Vector
    essential: Vector
    in_frobenius_image: bool
    dimensions: Tuple[int, ...]
    expected: Tuple[int, ...]

    @property
    def passed(self) -> bool:
        return self.dimensions == self.expected


class CartierVerdict(BaseModel):
    etd: str
    prime: int
    window: int
    ideal: Tuple[Vector, ...]
    entries: List[CartierEntry] = []

    @property
    def passed(self) -> bool:
        return all(entry.passed for entry in self.entries)

    @property
    def failures(self) -> List[CartierEntry]:
        return [entry for entry in self.entries if not entry.passed]


class VanishingVerdict(BaseModel):
    point: Vector
    prime: int
    class_vanishes: bool
    in_frobenius_image: bool

    @property
    def passed(self) -> bool:
        return self.class_vanishes == self.in_frobenius_image
