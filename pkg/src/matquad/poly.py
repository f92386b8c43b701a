"""Univariate polynomials over the rationals.

A polynomial is a list of coefficients, lowest degree first, with no
trailing zeros; the zero polynomial is ``[]``.  Coefficients are Fractions
in exact work, but most helpers also accept floats.
"""
from __future__ import annotations

import math
from fractions import Fraction
from math import comb
from typing import Sequence

from . import kernels

Poly = list


def trim(a: Sequence) -> Poly:
    out = list(a)
    while out and out[-1] == 0:
        out.pop()
    return out


def degree(a: Sequence) -> int:
    return len(trim(a)) - 1


def add(a: Sequence, b: Sequence) -> Poly:
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def sub(a: Sequence, b: Sequence) -> Poly:
    return add(a, [-v for v in b])


def scale(a: Sequence, c) -> Poly:
    return trim([c * v for v in a])


def mul(a: Sequence, b: Sequence) -> Poly:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        if u:
            for j, v in enumerate(b):
                out[i + j] += u * v
    return trim(out)


def power(a: Sequence, k: int) -> Poly:
    out: Poly = [Fraction(1)]
    for _ in range(k):
        out = mul(out, a)
    return out


def divmod_poly(a: Sequence, b: Sequence) -> tuple[Poly, Poly]:
    a = trim(a)
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return [], a
    r = list(a)
    db = len(b) - 1
    lead = b[-1]
    q = [Fraction(0)] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = r[k] / lead
        q[k - db] = c
        if c:
            for j in range(db + 1):
                r[k - db + j] -= c * b[j]
    return trim(q), trim(r[:db])


def monic(a: Sequence) -> Poly:
    a = trim(a)
    if not a:
        return []
    lead = a[-1]
    return [v / lead for v in a]


def gcd(a: Sequence, b: Sequence) -> Poly:
    a, b = trim(a), trim(b)
    while b:
        a, b = b, divmod_poly(a, b)[1]
    return monic(a)


def derivative(a: Sequence) -> Poly:
    return trim([i * a[i] for i in range(1, len(a))])


def evaluate(a: Sequence, x):
    acc = 0 * x
    for c in reversed(a):
        acc = acc * x + c
    return acc


def from_roots(roots: Sequence) -> Poly:
    out: Poly = [Fraction(1)]
    for r in roots:
        out = mul(out, [-r, 1])
    return out


def shift(a: Sequence, t) -> Poly:
    """Coefficients of ``a(x + t)``."""
    n = len(a)
    out = [0 * t] * n
    for i, c in enumerate(a):
        if not c:
            continue
        for k in range(i + 1):
            out[k] += c * comb(i, k) * t ** (i - k)
    return trim(out)


def divide_linear(a: Sequence, t) -> tuple[Poly, object]:
    """Synthetic division by ``x - t``: returns quotient and remainder."""
    a = trim(a)
    if not a:
        return [], 0
    q = [0] * (len(a) - 1)
    acc = a[-1]
    for k in range(len(a) - 2, -1, -1):
        q[k] = acc
        acc = a[k] + acc * t
    return trim(q), acc


def order_at(a: Sequence, t) -> tuple[int, Poly]:
    """Exact multiplicity of ``t`` as a root of ``a`` and the cofactor."""
    a = trim(a)
    if not a:
        raise ValueError("zero polynomial has infinite order")
    k = 0
    while True:
        q, r = divide_linear(a, t)
        if r != 0:
            return k, a
        a = q
        k += 1


def square_free_decomposition(a: Sequence) -> list[tuple[Poly, int]]:
    """Yun's algorithm: ``a = lc * prod f_i^i`` with square-free, coprime ``f_i``.

    Returns the list of ``(f_i, i)`` with ``deg f_i > 0``.
    """
    a = monic(a)
    if len(a) <= 1:
        return []
    out = []
    da = derivative(a)
    g = gcd(a, da)
    c = divmod_poly(a, g)[0]
    d = sub(divmod_poly(da, g)[0], derivative(c))
    i = 1
    while len(c) > 1:
        f = gcd(c, d)
        if len(f) > 1:
            out.append((f, i))
        c = divmod_poly(c, f)[0]
        d = sub(divmod_poly(d, f)[0], derivative(c))
        i += 1
    return out


def to_integer(a: Sequence[Fraction]) -> tuple[list[int], int]:
    """Scale to integer coefficients: returns ``(ints, den)`` with ``a = ints / den``."""
    den = 1
    for v in a:
        den = math.lcm(den, Fraction(v).denominator)
    return [int(Fraction(v) * den) for v in a], den


def matrix_det(entries: list[list[Poly]]) -> Poly:
    """Exact determinant of a square matrix of rational polynomials."""
    n = len(entries)
    if n == 0:
        return [Fraction(1)]
    int_rows = []
    total_den = 1
    for row in entries:
        den = 1
        for e in row:
            for v in e:
                den = math.lcm(den, Fraction(v).denominator)
        int_rows.append([[int(Fraction(v) * den) for v in trim(e)] for e in row])
        total_den *= den
    d = kernels.poly_det(int_rows)
    return trim([Fraction(v, total_den) for v in d])


def interpolate(xs: Sequence[Fraction], ys: Sequence[Fraction]) -> Poly:
    """Exact Lagrange interpolation through the points ``(xs[i], ys[i])``."""
    n = len(xs)
    coef = [Fraction(v) for v in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    out: Poly = []
    for i in range(n - 1, -1, -1):
        out = add(mul(out, [-xs[i], 1]), [coef[i]])
    return out


def format_poly(a: Sequence, var: str = "x") -> str:
    terms = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if not c:
            continue
        mon = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        cs = str(c)
        if mon and c == 1:
            cs = ""
        elif mon and c == -1:
            cs = "-"
        terms.append(f"{cs}{'*' if cs not in ('', '-') and mon else ''}{mon}")
    return " + ".join(terms).replace("+ -", "- ") if terms else "0"
