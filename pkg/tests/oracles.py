"""
Brute force references for the graded pieces of W^m, written against plain
sympy matrices so they share no code with toroidal.services.lattice.

A degree-m monomial form at p is an element of wedge^m Z^n; it extends over
the chart of every unused facet H containing p exactly when its contraction
with the facet normal u_H vanishes.
"""

from itertools import combinations
from math import comb, gcd

from sympy import Matrix


def _subsets(n, m):
    return list(combinations(range(n), m))


def _minor(rows, I, J):
    return Matrix([[rows[i][j] for j in J] for i in I]).det() if I else 1


def contraction(form, n, m):
    """Matrix of omega -> iota_form(omega) from wedge^m to wedge^(m-1), by rows."""
    targets = {J: j for j, J in enumerate(_subsets(n, m - 1))}
    rows = []
    for I in _subsets(n, m):
        row = [0] * len(targets)
        for position, i in enumerate(I):
            rest = I[:position] + I[position + 1 :]
            row[targets[rest]] += (-1) ** position * form[i]
        rows.append(row)
    return rows


def rational_kernel(blocks, size):
    """Rational basis of {x : x * B = 0 for every block B}."""
    if not blocks or size == 0:
        return [Matrix.eye(size).row(i) for i in range(size)]
    stacked = Matrix.hstack(*[Matrix(b) for b in blocks])
    return [v.T for v in stacked.T.nullspace()]


def absolute_forms_span(normals, n, m):
    """
    Rational span of the monomial m-forms at a degree lying on the facets
    with the given normals; P^gp is assumed to be all of Z^n.
    """
    size = comb(n, m)
    if m == 0:
        return [Matrix([[1]])]
    blocks = [contraction(u, n, m) for u in normals]
    return rational_kernel(blocks, size)


def relative_forms_span(normals, projection, n, d, m):
    """Image of the absolute span under wedge^m of the projection to Z^d."""
    absolute = absolute_forms_span(normals, n, m)
    if m == 0:
        return absolute
    compound = Matrix(
        [
            [_minor(projection, I, J) for J in _subsets(d, m)]
            for I in _subsets(n, m)
        ]
    )
    images = [v * compound for v in absolute]
    if not images:
        return []
    return list(Matrix.vstack(*images).rowspace())


def same_rational_span(basis, span):
    """basis (integer rows) and span (sympy rows) span the same Q-space."""
    if not basis and not span:
        return True
    if not basis or not span:
        return False
    A = Matrix([list(b) for b in basis])
    B = Matrix.vstack(*span)
    return A.rank() == B.rank() == Matrix.vstack(A, B).rank()


def is_saturated(basis, ambient_rank):
    """Z^n / span(basis) is torsion free: the maximal minors have gcd 1."""
    if not basis:
        return True
    A = Matrix([list(b) for b in basis])
    r = A.rows
    g = 0
    for J in _subsets(ambient_rank, r):
        g = gcd(g, int(A.extract(list(range(r)), list(J)).det()))
    return g == 1
