from fractions import Fraction
from typing import Tuple

from pydantic import BaseModel, ConfigDict

Vector = Tuple[int, ...]
FieldVector = Tuple[Fraction, ...]


class Sublattice(BaseModel):
    """
    Finitely generated subgroup of Z^n. Build through
    `toroidal.services.lattice.sublattice` so the basis is Hermite-reduced
    and structural equality is lattice equality.
    """

    model_config = ConfigDict(frozen=True)

    ambient_rank: int
    basis: Tuple[Vector, ...] = ()

    @property
    def rank(self) -> int:
        return len(self.basis)


class FieldSubspace(BaseModel):
    """
    Subspace of k^n for k = Q (characteristic 0) or F_p.
    Basis rows are in reduced row echelon form; entries of an F_p subspace
    are integral fractions in [0, p).
    """

    model_config = ConfigDict(frozen=True)

    characteristic: int
    ambient_rank: int
    basis: Tuple[FieldVector, ...] = ()
    pivots: Tuple[int, ...] = ()

    @property
    def dimension(self) -> int:
        return len(self.basis)


class WedgeSpace(BaseModel):
    """
    m-th exterior power of a sublattice or subspace, embedded in the exterior
    power of the ambient space. Coordinates are indexed by the m-subsets of
    range(ambient_rank) in lexicographic order.
    """

    model_config = ConfigDict(frozen=True)

    base: Sublattice | FieldSubspace
    degree: int
    value: Sublattice | FieldSubspace

    @property
    def rank(self) -> int:
        if isinstance(self.value, Sublattice):
            return self.value.rank
        return self.value.dimension
