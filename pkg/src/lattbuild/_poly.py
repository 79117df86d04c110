"""Polynomials in t over F_q, stored as trimmed coefficient tuples (low degree first)."""

from __future__ import annotations

from .gfq import FieldTable

Poly = tuple

ZERO: Poly = ()
ONE: Poly = (1,)


def trim(a) -> Poly:
    a = tuple(a)
    end = len(a)
    while end and not a[end - 1]:
        end -= 1
    return a[:end]


def monomial(k: int, c: int = 1) -> Poly:
    return (0,) * k + (c,) if c else ZERO


def val(a: Poly) -> int | None:
    """t-adic valuation; ``None`` for the zero polynomial."""
    for i, x in enumerate(a):
        if x:
            return i
    return None


def add(F: FieldTable, a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    ad = F.add
    out = list(a)
    for i, y in enumerate(b):
        if y:
            out[i] = ad[out[i]][y]
    return trim(out)


def sub(F: FieldTable, a: Poly, b: Poly) -> Poly:
    sb = F.sub
    n = max(len(a), len(b))
    out = list(a) + [0] * (n - len(a))
    for i, y in enumerate(b):
        if y:
            out[i] = sb[out[i]][y]
    return trim(out)


def neg(F: FieldTable, a: Poly) -> Poly:
    return tuple(F.neg[x] for x in a)


def scale(F: FieldTable, c: int, a: Poly) -> Poly:
    if not c:
        return ZERO
    mc = F.mul[c]
    return tuple(mc[x] for x in a)


def mul(F: FieldTable, a: Poly, b: Poly, P: int | None = None) -> Poly:
    """Product, truncated mod t^P when ``P`` is given."""
    if not a or not b:
        return ZERO
    n = len(a) + len(b) - 1
    if P is not None:
        n = min(n, P)
    if n <= 0:
        return ZERO
    ad, ml = F.add, F.mul
    out = [0] * n
    for i, x in enumerate(a):
        if not x or i >= n:
            continue
        mx = ml[x]
        for j in range(min(len(b), n - i)):
            y = b[j]
            if y:
                out[i + j] = ad[out[i + j]][mx[y]]
    return trim(out)


def trunc(a: Poly, P: int) -> Poly:
    return trim(a[:P]) if len(a) > P else a


def shift(a: Poly, k: int) -> Poly:
    """Multiply by t^k; for negative k the dropped low coefficients must vanish."""
    if not a:
        return ZERO
    if k >= 0:
        return (0,) * k + a
    if any(a[: -k]):
        raise ArithmeticError("division by t^k is not exact")
    return a[-k:]


def split(a: Poly, k: int) -> tuple[Poly, Poly]:
    """(a mod t^k, a div t^k)."""
    return trim(a[:k]), trim(a[k:])


def inv_unit(F: FieldTable, a: Poly, P: int) -> Poly:
    """Inverse of a unit power series mod t^P."""
    if not a or not a[0]:
        raise ZeroDivisionError("not a unit")
    ad, ml, sb = F.add, F.mul, F.sub
    c0 = F.inv[a[0]]
    out = [0] * P
    out[0] = c0
    for k in range(1, P):
        acc = 0
        for i in range(1, min(k, len(a) - 1) + 1):
            if a[i] and out[k - i]:
                acc = ad[acc][ml[a[i]][out[k - i]]]
        out[k] = ml[sb[0][acc]][c0]
    return trim(out)


def evaluate_const(a: Poly) -> int:
    return a[0] if a else 0
