"""Pure-Python exact kernels.

These are the hot loops of exact mode: fraction-free elimination on integer
matrices and the determinant of a matrix whose entries are integer
polynomials.  The compiled module ``_ckernels`` implements the same
functions with the same signatures.
"""
from __future__ import annotations


def echelon(rows, ncols):
    """Fraction-free forward elimination of an integer matrix.

    ``rows`` is a list of lists of Python ints.  Returns ``(pivots, echelon)``
    where ``pivots`` lists the pivot columns in increasing order and
    ``echelon`` holds the ``len(pivots)`` nonzero echelon rows.  A column is a
    pivot exactly when it is not in the span of the columns before it.
    """
    a = [list(r) for r in rows]
    nrows = len(a)
    pivots = []
    r = 0
    prev = 1
    for c in range(ncols):
        if r == nrows:
            break
        piv = -1
        for i in range(r, nrows):
            if a[i][c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
        rowr = a[r]
        pv = rowr[c]
        for i in range(r + 1, nrows):
            rowi = a[i]
            f = rowi[c]
            if f == 0:
                if prev != 1 or pv != 1:
                    for j in range(c + 1, ncols):
                        rowi[j] = (pv * rowi[j]) // prev
            else:
                for j in range(c + 1, ncols):
                    rowi[j] = (pv * rowi[j] - f * rowr[j]) // prev
            rowi[c] = 0
        prev = pv
        pivots.append(c)
        r += 1
    return pivots, a[:r]


def _padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, v in enumerate(b):
        out[i] += v
    while out and out[-1] == 0:
        out.pop()
    return out


def _pneg(a):
    return [-v for v in a]


def _pmul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        if u == 0:
            continue
        for j, v in enumerate(b):
            out[i + j] += u * v
    return out


def _pdivexact(a, b):
    """Exact quotient of integer polynomials (low-to-high coefficients)."""
    if not a:
        return []
    if len(b) == 1:
        d = b[0]
        return [v // d for v in a]
    a = list(a)
    db = len(b) - 1
    lead = b[-1]
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        coef = a[k] // lead
        q[k - db] = coef
        if coef:
            for j in range(db + 1):
                a[k - db + j] -= coef * b[j]
    return q


def poly_det(mat):
    """Determinant of a square matrix of integer polynomials.

    Entries are lists of ints, lowest degree first, with no trailing zeros
    (the zero polynomial is ``[]``).  Uses fraction-free Bareiss elimination
    with exact polynomial division.
    """
    n = len(mat)
    if n == 0:
        return [1]
    a = [[list(e) for e in row] for row in mat]
    sign = 1
    prev = [1]
    for k in range(n - 1):
        piv = -1
        best = None
        for i in range(k, n):
            e = a[i][k]
            if e and (best is None or len(e) < best):
                piv = i
                best = len(e)
        if piv < 0:
            return []
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                num = _pmul(akk, a[i][j])
                if aik:
                    num = _padd(num, _pneg(_pmul(aik, a[k][j])))
                a[i][j] = _pdivexact(num, prev)
        prev = akk
    d = a[n - 1][n - 1]
    return [sign * v for v in d] if sign < 0 else list(d)
