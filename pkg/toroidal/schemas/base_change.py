from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel

from toroidal.schemas.lattice import Vector


class BaseChangeWitness(BaseModel):
    """
    One instance of the base change condition: the subfamily of rank d-1
    essential faces joined with the essential face `face` at degree `point`.
    """

    face: Tuple[int, ...]
    point: Vector
    subfamily: Tuple[Tuple[int, ...], ...]
    degree: int
    lattice_rank: int
    reduced_dimension: int
    primes: Tuple[int, ...] = ()

    @property
    def passed(self) -> bool:
        return self.lattice_rank == self.reduced_dimension


class BaseChangeReport(BaseModel):
    etd: str
    degree: int
    characteristic: int
    witnesses: List[BaseChangeWitness] = []
    window_agrees: Optional[bool] = None

    @property
    def passed(self) -> bool:
        return all(w.passed for w in self.witnesses) and self.window_agrees is not False

    @property
    def failures(self) -> List[BaseChangeWitness]:
        return [w for w in self.witnesses if not w.passed]


class ElementWindowReport(BaseModel):
    degree: int
    characteristic: int
    window: int
    checked: int
    disagreements: List[Dict[str, Any]] = []

    @property
    def agrees(self) -> bool:
        return not self.disagreements


class ObstructionBound(BaseModel):
    """Primes where the base change condition fails; it holds for p >= p0."""

    etd: str
    degrees: Tuple[int, ...]
    primes: Tuple[int, ...]
    p0: int
    witnesses: List[BaseChangeWitness] = []
