# cython: boundscheck=False
"""Compiled exact kernels, mirroring ``_kernels_py``."""


def echelon(rows, Py_ssize_t ncols):
    cdef list a = [list(row) for row in rows]
    cdef Py_ssize_t nrows = len(a)
    cdef list pivots = []
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef list rowr, rowi
    cdef object prev = 1, pv, f
    for c in range(ncols):
        if r == nrows:
            break
        piv = -1
        for i in range(r, nrows):
            if (<list>a[i])[c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
        rowr = <list>a[r]
        pv = rowr[c]
        for i in range(r + 1, nrows):
            rowi = <list>a[i]
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


cdef list _padd(list a, list b):
    cdef Py_ssize_t i
    if len(a) < len(b):
        a, b = b, a
    cdef list out = list(a)
    for i in range(len(b)):
        out[i] = out[i] + b[i]
    while out and out[-1] == 0:
        out.pop()
    return out


cdef list _pmul(list a, list b):
    cdef Py_ssize_t i, j, la = len(a), lb = len(b)
    cdef object u
    if la == 0 or lb == 0:
        return []
    cdef list out = [0] * (la + lb - 1)
    for i in range(la):
        u = a[i]
        if u == 0:
            continue
        for j in range(lb):
            out[i + j] = out[i + j] + u * b[j]
    return out


cdef list _pdivexact(list a, list b):
    cdef Py_ssize_t k, j, db, la = len(a)
    cdef object d, lead, coef
    if la == 0:
        return []
    if len(b) == 1:
        d = b[0]
        return [v // d for v in a]
    a = list(a)
    db = len(b) - 1
    lead = b[db]
    cdef list q = [0] * (la - db)
    for k in range(la - 1, db - 1, -1):
        coef = a[k] // lead
        q[k - db] = coef
        if coef:
            for j in range(db + 1):
                a[k - db + j] = a[k - db + j] - coef * b[j]
    return q


def poly_det(mat):
    cdef Py_ssize_t n = len(mat), k, i, j, piv, best
    if n == 0:
        return [1]
    cdef list a = [[list(e) for e in row] for row in mat]
    cdef int sign = 1
    cdef list prev = [1], akk, aik, num, e
    for k in range(n - 1):
        piv = -1
        best = -1
        for i in range(k, n):
            e = (<list>a[i])[k]
            if e and (best < 0 or len(e) < best):
                piv = i
                best = len(e)
        if piv < 0:
            return []
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        akk = (<list>a[k])[k]
        for i in range(k + 1, n):
            aik = (<list>a[i])[k]
            for j in range(k + 1, n):
                num = _pmul(akk, (<list>a[i])[j])
                if aik:
                    num = _padd(num, [-v for v in _pmul(aik, (<list>a[k])[j])])
                (<list>a[i])[j] = _pdivexact(num, prev)
        prev = akk
    cdef list d = (<list>a[n - 1])[n - 1]
    return [-v for v in d] if sign < 0 else list(d)
