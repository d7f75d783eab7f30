from typing import Dict, List, Tuple

from pydantic import BaseModel, ConfigDict

from toroidal.schemas.lattice import FieldVector, Vector


class UComplexDegree(BaseModel):
    """
    Degree-e part of the u-graded kernel complex over Q, in an adapted
    basis b_0 = rho, b_1, ... of L_e tensor Q.

    Chains of degree k are sums of u^s * b_I for s <= ubound and |I| = k;
    the subcomplex keeps at s = 0 only the b_I with 0 in I when e is in E.
    """

    model_config = ConfigDict(frozen=True)

    point: Vector
    truncation: int
    ubound: int
    rank: int
    rho: FieldVector
    klass: FieldVector
    in_essential_set: bool
    fiber_rank: int
    corrupted: bool = False


class AcyclicityEntry(BaseModel):
    point: Vector
    degree: int
    chains: int
    cocycles: int
    boundaries: int
    acyclic: bool
    squares_to_zero: bool
    sequence_consistent: bool = True

    @property
    def passed(self) -> bool:
        return self.acyclic and self.squares_to_zero and self.sequence_consistent


class AcyclicityVerdict(BaseModel):
    etd: str
    truncation: int
    window: int
    ubound: int
    corrupted: bool = False
    entries: List[AcyclicityEntry] = []

    @property
    def passed(self) -> bool:
        return all(entry.passed for entry in self.entries)

    @property
    def failures(self) -> List[AcyclicityEntry]:
        return [entry for entry in self.entries if not entry.passed]


class HodgeFlag(BaseModel):
    """Degree where the lattice and reductions constructions of W^m differ."""

    point: Vector
    degree: int
    lattice_dimension: int
    reductions_dimension: int


class HodgeReport(BaseModel):
    etd: str
    characteristic: int
    window: int
    ideal: Tuple[Vector, ...]
    contributions: Dict[str, Tuple[int, ...]] = {}
    totals: Tuple[int, ...] = ()
    predicted: Tuple[int, ...] = ()
    flags: List[HodgeFlag] = []

    @property
    def passed(self) -> bool:
        return self.totals == self.predicted


class SimplexDatum(BaseModel):
    model_config = ConfigDict(frozen=True)

    vertices: Tuple[Vector, ...]

    @property
    def ambient_rank(self) -> int:
        return len(self.vertices[0]) if self.vertices else 0

    @property
    def dimension(self) -> int:
        return len(self.vertices) - 1

    @property
    def edges(self) -> List[Vector]:
        origin = self.vertices[0]
        return [tuple(a - b for a, b in zip(v, origin)) for v in self.vertices[1:]]
