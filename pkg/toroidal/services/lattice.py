"""
Exact linear algebra over Z, Q and F_p.

Everything here is a pure function over immutable values. Matrices are sympy
DomainMatrix objects; vectors are plain tuples of Python ints (or Fractions
for field vectors) so that they hash and compare exactly.
"""

import logging
from fractions import Fraction
from functools import lru_cache, reduce
from itertools import combinations
from math import comb, lcm
from typing import Iterable, Sequence

from sympy import factorint, isprime
from sympy.polys.domains import GF, QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import hermite_normal_form, smith_normal_decomp

from toroidal.schemas.lattice import FieldSubspace, Sublattice, Vector, WedgeSpace
from toroidal.exceptions.lattice import (
    AmbientRankMismatchError,
    NotInSpaceError,
    NotPrimeError,
)

logger = logging.getLogger(__name__)

IntMatrix = DomainMatrix


# ---------------------------------------------------------------------------
# vectors
# ---------------------------------------------------------------------------


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def add(u: Sequence[int], v: Sequence[int]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence[int], v: Sequence[int]) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def scale(k, v: Sequence[int]) -> Vector:
    return tuple(k * a for a in v)


def vec_mat(v: Sequence, rows: Sequence[Sequence]) -> tuple:
    """Row vector times matrix, with the matrix given by its rows."""
    if not rows:
        return ()
    ncols = len(rows[0])
    out = [0] * ncols
    for coeff, row in zip(v, rows):
        if coeff:
            for j, entry in enumerate(row):
                out[j] += coeff * entry
    return tuple(out)


def subsets(n: int, m: int) -> list[tuple[int, ...]]:
    """Ordered m-subsets of range(n), the index set of the wedge basis."""
    return list(combinations(range(n), m))


# ---------------------------------------------------------------------------
# domains and matrices
# ---------------------------------------------------------------------------


def check_prime(p: int) -> int:
    if not isinstance(p, int) or p < 2 or not isprime(p):
        raise NotPrimeError(f"{p} is not a prime")
    return p


def field_domain(characteristic: int):
    if characteristic == 0:
        return QQ
    return GF(check_prime(characteristic))


def _to_entry(x, domain, characteristic: int):
    if domain == ZZ:
        return int(x)
    x = Fraction(x)
    if characteristic == 0:
        return (x.numerator, x.denominator)
    return x.numerator * pow(x.denominator, -1, characteristic) % characteristic


def _from_entry(x, domain, characteristic: int):
    if domain == ZZ:
        return int(x)
    if characteristic == 0:
        return Fraction(int(domain.numer(x)), int(domain.denom(x)))
    return Fraction(int(x) % characteristic)


def normalize(x, characteristic: int) -> Fraction:
    """Canonical field representative of x (a Fraction in [0, p) for F_p)."""
    x = Fraction(x)
    if characteristic == 0:
        return x
    return Fraction(
        x.numerator * pow(x.denominator, -1, characteristic) % characteristic
    )


def to_domain_matrix(
    rows: Sequence[Sequence], ncols: int, domain=ZZ, characteristic: int = 0
) -> DomainMatrix:
    rows = [list(r) for r in rows]
    for row in rows:
        if len(row) != ncols:
            raise AmbientRankMismatchError(
                f"Row of length {len(row)} in a matrix with {ncols} columns"
            )
    if not rows or ncols == 0:
        return DomainMatrix.zeros((len(rows), ncols), domain).to_dense()
    entries = [[_to_entry(x, domain, characteristic) for x in row] for row in rows]
    return DomainMatrix.from_list(entries, domain).to_dense()


def as_int_matrix(M) -> DomainMatrix:
    if isinstance(M, DomainMatrix):
        return M.convert_to(ZZ).to_dense()
    rows = [list(r) for r in M]
    ncols = len(rows[0]) if rows else 0
    return to_domain_matrix(rows, ncols)


def matrix_rows(M: DomainMatrix, characteristic: int = 0) -> list[tuple]:
    domain = M.domain
    return [
        tuple(_from_entry(x, domain, characteristic) for x in row)
        for row in M.to_list()
    ]


def _field_rows(rows, ncols: int, characteristic: int) -> DomainMatrix:
    return to_domain_matrix(
        rows, ncols, field_domain(characteristic), characteristic
    )


def field_rank(rows: Sequence[Sequence], ncols: int, characteristic: int = 0) -> int:
    if not rows or ncols == 0:
        return 0
    return _field_rows(rows, ncols, characteristic).rank()


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


def smith_normal_form(M) -> tuple[DomainMatrix, DomainMatrix, DomainMatrix]:
    """
    Returns (U, D, V) with U, V unimodular, D diagonal with d1 | d2 | ...
    and U*M*V == D.
    """
    M = as_int_matrix(M)
    D, U, V = smith_normal_decomp(M)
    return U.to_dense(), D.to_dense(), V.to_dense()


def diagonal(D: DomainMatrix) -> list[int]:
    rows = D.to_list()
    nrows, ncols = D.shape
    return [int(rows[i][i]) for i in range(min(nrows, ncols)) if rows[i][i] != 0]


def invariant_factors(rows: Sequence[Sequence[int]], ncols: int) -> list[int]:
    if not rows or ncols == 0:
        return []
    _, D, _ = smith_normal_form(to_domain_matrix(rows, ncols))
    return diagonal(D)


def unimodular_inverse(V: DomainMatrix) -> DomainMatrix:
    if V.shape[0] == 0:
        return V
    return V.convert_to(QQ).inv().convert_to(ZZ).to_dense()


def left_kernel(rows: Sequence[Sequence[int]], ncols: int) -> list[Vector]:
    """Z-basis of {y : y*S = 0} where S is the matrix with the given rows."""
    nrows = len(rows)
    if nrows == 0:
        return []
    if ncols == 0:
        return [tuple(1 if i == j else 0 for j in range(nrows)) for i in range(nrows)]
    U, D, _ = smith_normal_form(to_domain_matrix(rows, ncols))
    r = len(diagonal(D))
    return [tuple(row) for row in matrix_rows(U)[r:]]


def solve_integer(rows: Sequence[Sequence[int]], v: Sequence[int]) -> Vector | None:
    """Integer x with x*B == v for B given by its rows, or None."""
    if not rows:
        return () if not any(v) else None
    ncols = len(v)
    U, D, V = smith_normal_form(to_domain_matrix(rows, ncols))
    w = vec_mat(v, matrix_rows(V))
    d = diagonal(D)
    y = []
    for i, entry in enumerate(w):
        if i < len(d):
            if entry % d[i]:
                return None
            y.append(entry // d[i])
        elif entry:
            return None
    y += [0] * (len(rows) - len(y))
    return vec_mat(y, matrix_rows(U))


def field_left_kernel(
    rows: Sequence[Sequence], ncols: int, characteristic: int = 0
) -> list[tuple[Fraction, ...]]:
    """Basis of {y : y*M = 0} over Q or F_p, for M given by its rows."""
    nrows = len(rows)
    if nrows == 0:
        return []
    identity = [tuple(Fraction(int(i == j)) for j in range(nrows)) for i in range(nrows)]
    if ncols == 0:
        return identity
    M = _field_rows(rows, ncols, characteristic)
    if M.rank() == 0:
        return identity
    return matrix_rows(M.transpose().nullspace(), characteristic)


def solve_left(
    rows: Sequence[Sequence], v: Sequence, characteristic: int = 0
) -> list[Fraction] | None:
    """
    Field solution c of c*B == v for B with independent rows, or None when
    v is not in the row space.
    """
    k = len(rows)
    if k == 0:
        return [] if not any(normalize(x, characteristic) for x in v) else None
    augmented = [[rows[i][j] for i in range(k)] + [v[j]] for j in range(len(v))]
    R, pivots = _field_rows(augmented, k + 1, characteristic).rref()
    if k in pivots:
        return None
    solution = [Fraction(0)] * k
    reduced = matrix_rows(R, characteristic)
    for i, col in enumerate(pivots):
        solution[col] = reduced[i][k]
    return solution


# ---------------------------------------------------------------------------
# sublattices
# ---------------------------------------------------------------------------


def sublattice(ambient_rank: int, vectors: Iterable[Sequence[int]] = ()) -> Sublattice:
    """Sublattice spanned by `vectors`, canonicalized by Hermite normal form."""
    rows = [tuple(int(x) for x in v) for v in vectors]
    for row in rows:
        if len(row) != ambient_rank:
            raise AmbientRankMismatchError(
                f"Vector {row} does not live in Z^{ambient_rank}"
            )
    rows = [row for row in rows if any(row)]
    if not rows:
        return Sublattice(ambient_rank=ambient_rank, basis=())

    # column-style HNF of the transpose drops dependent generators
    W = hermite_normal_form(to_domain_matrix(rows, ambient_rank).transpose())
    basis = tuple(tuple(int(x) for x in col) for col in W.transpose().to_list())
    return Sublattice(ambient_rank=ambient_rank, basis=basis)


def full_lattice(ambient_rank: int) -> Sublattice:
    return sublattice(
        ambient_rank,
        [tuple(int(i == j) for j in range(ambient_rank)) for i in range(ambient_rank)],
    )


def _check_ambient(*lattices) -> int:
    ranks = {A.ambient_rank for A in lattices}
    if len(ranks) > 1:
        raise AmbientRankMismatchError(
            f"Ambient ranks {sorted(ranks)} do not agree"
        )
    return ranks.pop()


@lru_cache(maxsize=4096)
def saturate(A: Sublattice) -> Sublattice:
    """(Q * A) intersected with Z^n."""
    if A.rank == 0:
        return A
    _, _, V = smith_normal_form(to_domain_matrix(A.basis, A.ambient_rank))
    rows = matrix_rows(unimodular_inverse(V))[: A.rank]
    return sublattice(A.ambient_rank, rows)


def is_saturated(A: Sublattice) -> bool:
    return all(d == 1 for d in invariant_factors(A.basis, A.ambient_rank))


@lru_cache(maxsize=4096)
def annihilator(A: Sublattice) -> tuple[Vector, ...]:
    """
    Integer linear forms c_1..c_{n-r} with v in saturate(A) iff c_j(v) = 0
    for all j. Over F_p they also cut out saturate(A) tensor F_p.
    """
    n = A.ambient_rank
    if A.rank == 0:
        return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    _, _, V = smith_normal_form(to_domain_matrix(A.basis, n))
    columns = list(zip(*matrix_rows(V)))
    return tuple(tuple(col) for col in columns[A.rank:])


def contains(A: Sublattice, v: Sequence[int]) -> bool:
    if len(v) != A.ambient_rank:
        raise AmbientRankMismatchError(
            f"Vector {tuple(v)} does not live in Z^{A.ambient_rank}"
        )
    return solve_integer(A.basis, v) is not None


def coordinates(A: Sublattice, v: Sequence[int]) -> Vector:
    x = solve_integer(A.basis, v)
    if x is None:
        raise NotInSpaceError(f"{tuple(v)} is not in the lattice")
    return x


def index_in_saturation(A: Sublattice) -> int:
    return reduce(lambda a, b: a * b, invariant_factors(A.basis, A.ambient_rank), 1)


def intersect(A: Sublattice, B: Sublattice) -> Sublattice:
    n = _check_ambient(A, B)
    if A.rank == 0 or B.rank == 0:
        return sublattice(n)
    kernel = left_kernel(A.basis + B.basis, n)
    return sublattice(n, [vec_mat(y[: A.rank], A.basis) for y in kernel])


def intersect_all(lattices: Sequence[Sublattice], ambient_rank: int) -> Sublattice:
    """Intersection of a family; the empty family gives Z^n."""
    if not lattices:
        return full_lattice(ambient_rank)
    return reduce(intersect, lattices)


def image(A: Sublattice, rows: Sequence[Sequence[int]], target_rank: int) -> Sublattice:
    """Image of A under the map v -> v*M."""
    return sublattice(target_rank, [vec_mat(b, rows) for b in A.basis])


# ---------------------------------------------------------------------------
# field subspaces
# ---------------------------------------------------------------------------


def field_span(
    ambient_rank: int, vectors: Iterable[Sequence], characteristic: int = 0
) -> FieldSubspace:
    rows = [tuple(normalize(x, characteristic) for x in v) for v in vectors]
    for row in rows:
        if len(row) != ambient_rank:
            raise AmbientRankMismatchError(
                f"Vector of length {len(row)} does not live in k^{ambient_rank}"
            )
    rows = [row for row in rows if any(row)]
    if not rows:
        field_domain(characteristic)
        return FieldSubspace(characteristic=characteristic, ambient_rank=ambient_rank)
    R, pivots = _field_rows(rows, ambient_rank, characteristic).rref()
    basis = tuple(matrix_rows(R, characteristic)[: len(pivots)])
    return FieldSubspace(
        characteristic=characteristic,
        ambient_rank=ambient_rank,
        basis=basis,
        pivots=tuple(pivots),
    )


def reduce_mod_p(A: Sublattice, p: int) -> FieldSubspace:
    """Image of A in F_p^n."""
    return field_span(A.ambient_rank, A.basis, check_prime(p))


def tensor(A: Sublattice, characteristic: int) -> FieldSubspace:
    """A tensor k for k = Q or F_p, as a subspace of k^n."""
    return field_span(A.ambient_rank, A.basis, characteristic)


def subspace_annihilator(U: FieldSubspace) -> list[tuple[Fraction, ...]]:
    n = U.ambient_rank
    if U.dimension == 0:
        return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    if U.dimension == n:
        return []
    null = _field_rows(U.basis, n, U.characteristic).nullspace()
    return matrix_rows(null, U.characteristic)


def intersect_subspaces(U: FieldSubspace, W: FieldSubspace) -> FieldSubspace:
    n = _check_ambient(U, W)
    if U.characteristic != W.characteristic:
        raise AmbientRankMismatchError(
            f"Characteristics {U.characteristic} and {W.characteristic} differ"
        )
    forms = subspace_annihilator(U) + subspace_annihilator(W)
    if not forms:
        return U
    null = _field_rows(forms, n, U.characteristic).nullspace()
    return field_span(n, matrix_rows(null, U.characteristic), U.characteristic)


def intersect_all_subspaces(
    spaces: Sequence[FieldSubspace], ambient_rank: int, characteristic: int
) -> FieldSubspace:
    if not spaces:
        return field_span(
            ambient_rank,
            [tuple(int(i == j) for j in range(ambient_rank)) for i in range(ambient_rank)],
            characteristic,
        )
    return reduce(intersect_subspaces, spaces)


def intersect_mod_p(A: Sublattice, B: Sublattice, p: int) -> FieldSubspace:
    _check_ambient(A, B)
    return intersect_subspaces(reduce_mod_p(A, p), reduce_mod_p(B, p))


def subspace_coordinates(U: FieldSubspace, v: Sequence) -> list[Fraction]:
    """Coordinates of v in the echelon basis of U; raises when v is not in U."""
    char = U.characteristic
    v = tuple(normalize(x, char) for x in v)
    if len(v) != U.ambient_rank:
        raise AmbientRankMismatchError(
            f"Vector of length {len(v)} does not live in k^{U.ambient_rank}"
        )
    coeffs = [v[pivot] for pivot in U.pivots]
    rebuilt = vec_mat(coeffs, U.basis) if coeffs else (Fraction(0),) * len(v)
    if tuple(normalize(x, char) for x in rebuilt) != v:
        raise NotInSpaceError(f"Vector {v} is not in the subspace")
    return coeffs


def subspace_contains(U: FieldSubspace, v: Sequence) -> bool:
    try:
        subspace_coordinates(U, v)
    except NotInSpaceError:
        return False
    return True


# ---------------------------------------------------------------------------
# obstruction primes
# ---------------------------------------------------------------------------


def _prime_factors(numbers: Iterable[int]) -> set[int]:
    primes: set[int] = set()
    for d in numbers:
        if abs(d) > 1:
            primes |= set(factorint(abs(d)))
    return primes


def obstruction_primes(*lattices: Sublattice) -> list[int]:
    """
    Primes p at which the intersection of the reductions mod p is larger
    than the reduction of the intersection.

    Candidates come from the elementary divisors of each lattice, of their
    sum, and of the stacked annihilators of the saturations; each candidate
    is then confirmed by a direct computation over F_p.
    """
    if not lattices:
        return []
    n = _check_ambient(*lattices)
    candidates: set[int] = set()
    for A in lattices:
        candidates |= _prime_factors(invariant_factors(A.basis, n))
    stacked = [b for A in lattices for b in A.basis]
    candidates |= _prime_factors(invariant_factors(stacked, n))
    forms = [c for A in lattices for c in annihilator(A)]
    candidates |= _prime_factors(invariant_factors(forms, n))

    integral_rank = intersect_all(list(lattices), n).rank
    primes = []
    for p in sorted(candidates):
        reduced = intersect_all_subspaces([reduce_mod_p(A, p) for A in lattices], n, p)
        if reduced.dimension > integral_rank:
            primes.append(p)
    logger.debug(f"Obstruction candidates {sorted(candidates)} confirmed {primes}")
    return primes


# ---------------------------------------------------------------------------
# exterior powers
# ---------------------------------------------------------------------------


def determinant(rows: Sequence[Sequence[int]]) -> int:
    size = len(rows)
    if size == 0:
        return 1
    if size == 1:
        return int(rows[0][0])
    if size == 2:
        return int(rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0])
    return int(to_domain_matrix(rows, size).det())


def wedge_vectors(vectors: Sequence[Sequence[int]], ambient_rank: int) -> Vector:
    """Coordinates of v_1 ^ ... ^ v_m in the basis e_I of the m-th wedge power."""
    m = len(vectors)
    return tuple(
        determinant([[v[i] for i in I] for v in vectors])
        for I in subsets(ambient_rank, m)
    )


def compound_matrix(rows: Sequence[Sequence[int]], m: int, ncols: int) -> list[Vector]:
    """
    m-th compound of the matrix M (given by rows, v -> v*M): the matrix of
    the induced map on m-th wedge powers.
    """
    nrows = len(rows)
    return [
        tuple(
            determinant([[rows[i][j] for j in J] for i in I])
            for J in subsets(ncols, m)
        )
        for I in subsets(nrows, m)
    ]


def _integral_rows(U: FieldSubspace) -> list[Vector]:
    rows = []
    for row in U.basis:
        common = lcm(*(x.denominator for x in row))
        rows.append(tuple(int(x * common) for x in row))
    return rows


@lru_cache(maxsize=4096)
def _wedge_lattice(A: Sublattice, m: int) -> Sublattice:
    n = A.ambient_rank
    if m == 0:
        return sublattice(1, [(1,)])
    return sublattice(
        comb(n, m),
        [
            wedge_vectors([A.basis[i] for i in idx], n)
            for idx in combinations(range(A.rank), m)
        ],
    )


def _wedge_subspace(U: FieldSubspace, m: int) -> FieldSubspace:
    n = U.ambient_rank
    if m == 0:
        return field_span(1, [(1,)], U.characteristic)
    rows = _integral_rows(U)
    return field_span(
        comb(n, m),
        [wedge_vectors([rows[i] for i in idx], n) for idx in combinations(range(len(rows)), m)],
        U.characteristic,
    )


def wedge_power(base: Sublattice | FieldSubspace, m: int) -> WedgeSpace:
    if isinstance(base, Sublattice):
        value = _wedge_lattice(base, m)
    else:
        value = _wedge_subspace(base, m)
    return WedgeSpace(base=base, degree=m, value=value)


def wedge_matrix(vector: Sequence, dimension: int, m: int) -> list[list]:
    """
    Matrix of l -> v ^ l from the m-th to the (m+1)-th wedge power of
    k^dimension, rows indexed by source basis elements.
    """
    targets = {J: j for j, J in enumerate(subsets(dimension, m + 1))}
    matrix = []
    for I in subsets(dimension, m):
        row = [0] * len(targets)
        for j in range(dimension):
            if j in I or not vector[j]:
                continue
            sign = -1 if sum(1 for i in I if i < j) % 2 else 1
            row[targets[tuple(sorted(I + (j,)))]] += sign * vector[j]
        matrix.append(row)
    return matrix


def contraction_matrix(form: Sequence, dimension: int, m: int) -> list[list]:
    """Matrix of the contraction with a linear form, from degree m to m - 1."""
    targets = {J: j for j, J in enumerate(subsets(dimension, m - 1))}
    matrix = []
    for I in subsets(dimension, m):
        row = [0] * len(targets)
        for position, i in enumerate(I):
            if form[i]:
                rest = I[:position] + I[position + 1 :]
                row[targets[rest]] += (-1) ** position * form[i]
        matrix.append(row)
    return matrix


def koszul_dimensions(vector: Sequence, dimension: int, characteristic: int = 0) -> list[int]:
    """dim H^m of (wedge^* k^dimension, v ^ -) for m = 0..dimension."""
    ranks = []
    for m in range(dimension):
        rows = wedge_matrix(vector, dimension, m)
        ranks.append(field_rank(rows, comb(dimension, m + 1), characteristic))
    ranks.append(0)
    return [
        comb(dimension, m) - ranks[m] - (ranks[m - 1] if m > 0 else 0)
        for m in range(dimension + 1)
    ]


def koszul_cohomology(V: FieldSubspace, v: Sequence, m: int) -> int:
    """dim H^m of the complex (wedge^* V, v ^ -); v must lie in V."""
    coeffs = subspace_coordinates(V, v)
    if m < 0 or m > V.dimension:
        return 0
    return koszul_dimensions(coeffs, V.dimension, V.characteristic)[m]
