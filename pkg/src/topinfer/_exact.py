"""Exact integer linear algebra and polynomial helpers (Python ints only)."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def bareiss_det(m: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    a = [list(map(int, row)) for row in m]
    n = len(a)
    if n == 0:
        return 1
    if any(len(row) != n for row in a):
        raise ValueError("matrix must be square")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, n):
                # exact division is guaranteed by Sylvester's identity
                ri[j] = (ri[j] * akk - aik * rk[j]) // prev
            ri[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def interpolation_nodes(count: int) -> list[int]:
    """0, 1, -1, 2, -2, ... (``count`` distinct integers)."""
    out = [0]
    k = 1
    while len(out) < count:
        out.append(k)
        if len(out) < count:
            out.append(-k)
        k += 1
    return out


def interpolate(nodes: Sequence[int], values: Sequence[int]) -> list[Fraction]:
    """Monomial coefficients of the unique polynomial through the points (Newton form)."""
    n = len(nodes)
    dd = [Fraction(v) for v in values]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - j])
    coeffs = [Fraction(0)] * n
    # Horner expansion of the Newton form, innermost first
    for i in range(n - 1, -1, -1):
        # coeffs <- coeffs * (u - nodes[i]) + dd[i]
        new = [Fraction(0)] * n
        for k in range(n - 1):
            new[k + 1] += coeffs[k]
            new[k] -= coeffs[k] * nodes[i]
        new[0] += dd[i]
        coeffs = new
    return coeffs


def poly_mul(a: Sequence[int], b: Sequence[int], trunc: int | None = None) -> list[int]:
    n = len(a) + len(b) - 1
    if trunc is not None:
        n = min(n, trunc + 1)
    out = [0] * max(n, 0)
    for i, x in enumerate(a):
        if x == 0 or i >= n:
            continue
        for j, y in enumerate(b):
            if i + j >= n:
                break
            out[i + j] += x * y
    return out


def poly_pow(a: Sequence[int], e: int, trunc: int | None = None) -> list[int]:
    out = [1]
    base = list(a)
    while e:
        if e & 1:
            out = poly_mul(out, base, trunc)
        e >>= 1
        if e:
            base = poly_mul(base, base, trunc)
    return out


def series_inverse(a: Sequence[int], order: int) -> list[int]:
    """Power series 1/a mod u^(order+1); requires a[0] = +-1 for integrality."""
    if a[0] not in (1, -1):
        raise ValueError("series inverse needs a unit constant term")
    inv = [0] * (order + 1)
    inv[0] = a[0]
    for k in range(1, order + 1):
        s = 0
        for j in range(1, min(k, len(a) - 1) + 1):
            s += a[j] * inv[k - j]
        inv[k] = -s * a[0]
    return inv


def poly_eval(coeffs: Sequence[int], x) -> object:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_derivative(coeffs: Sequence[int], k: int = 1) -> list[int]:
    out = list(coeffs)
    for _ in range(k):
        out = [i * c for i, c in enumerate(out)][1:] or [0]
    return out
