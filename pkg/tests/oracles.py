"""Slow reference computations used to cross-check the package.

Everything here works on plain lists and fractions.Fraction and shares no
code with bigtor.intlinalg, so a bug in the package's linear algebra cannot
hide by infecting both sides of a comparison.
"""

from fractions import Fraction
from itertools import combinations
from math import comb


def rational_rank(rows):
    """Rank over Q by Gaussian elimination with exact fractions."""
    a = [[Fraction(x) for x in r] for r in rows]
    if not a:
        return 0
    ncols = len(a[0])
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(a)) if a[i][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = Fraction(1) / a[rank][col]
        a[rank] = [x * inv for x in a[rank]]
        for i in range(len(a)):
            if i != rank and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def det_fraction(rows):
    """Determinant over Q by elimination; rows must form a square matrix."""
    n = len(rows)
    a = [[Fraction(x) for x in r] for r in rows]
    sign = 1
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col]), None)
        if piv is None:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        for i in range(col + 1, n):
            f = a[i][col] / a[col][col]
            a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    value = Fraction(sign)
    for i in range(n):
        value *= a[i][i]
    assert value.denominator == 1
    return int(value)


def smith_diagonal(rows):
    """Nonzero diagonal of the Smith normal form, textbook gcd chasing.

    Returns the invariant factors d_1 | d_2 | ... as positive integers.
    """
    a = [list(r) for r in rows]
    if not a or not a[0]:
        return []
    nr, nc = len(a), len(a[0])
    diag = []
    t = 0
    while t < min(nr, nc):
        pivot = None
        for i in range(t, nr):
            for j in range(t, nc):
                if a[i][j]:
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            break
        i, j = pivot
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]
        while True:
            again = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        a[t], a[i] = a[i], a[t]
                        again = True
            for j in range(t + 1, nc):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    for r in a:
                        r[j] -= q * r[t]
                    if a[t][j]:
                        for r in a:
                            r[t], r[j] = r[j], r[t]
                        again = True
            if not again:
                break
        d = abs(a[t][t])
        bad = None
        for i in range(t + 1, nr):
            if any(x % d for x in a[i][t + 1:]):
                bad = i
                break
        if bad is not None:
            a[t] = [x + y for x, y in zip(a[t], a[bad])]
            continue
        diag.append(d)
        t += 1
    return diag


def cokernel_invariants(rows, ambient):
    """(rank, torsion) of Z^ambient modulo the column span of the matrix."""
    torsion = [d for d in smith_diagonal(rows) if d > 1]
    rank = ambient - rational_rank(rows)
    return rank, torsion


def homology_structure(d_out_rows, d_in_rows, mid_dim):
    """(rank, torsion) of ker(d_out) / im(d_in) for integer matrices.

    Relies on im(d_in) being contained in ker(d_out): the quotient then
    embeds in coker(d_in), so its torsion equals the torsion of coker(d_in)
    while its rank is mid_dim minus the two matrix ranks.
    """
    rank = mid_dim - rational_rank(d_out_rows) - rational_rank(d_in_rows)
    torsion = [d for d in smith_diagonal(d_in_rows) if d > 1]
    return rank, torsion


def downward_closure(maximal):
    """All faces of the complex generated by the given vertex tuples."""
    faces = {frozenset()}
    for face in maximal:
        verts = sorted(face)
        for k in range(1, len(verts) + 1):
            faces.update(frozenset(c) for c in combinations(verts, k))
    return faces


def hilbert_coefficient(maximal, j):
    """Rank of the degree-j piece of the face ring, by binomial counting.

    Monomials of x-degree j = 2d with support exactly a face F number
    comb(d - 1, |F| - 1), so the coefficient is a sum over all faces.
    """
    if j < 0 or j % 2:
        return 0
    d = j // 2
    if d == 0:
        return 1
    total = 0
    for face in downward_closure(maximal):
        s = len(face)
        if 1 <= s <= d:
            total += comb(d - 1, s - 1)
    return total


def euler_characteristic(maximal, n, j):
    """Alternating Tor rank sum predicted by the Koszul resolution."""
    return sum(
        (-1) ** k * comb(n, k) * hilbert_coefficient(maximal, j - 2 * k)
        for k in range(n + 1)
    )


def structure_pair(module):
    """(rank, torsion list) of a bigtor ZModule, for comparisons."""
    return module.rank, list(module.torsion)
