"""Hyper-dual numbers: exact first and mixed second derivatives by operator overloading.

A hyper-dual number a + b e1 + c e2 + d e1e2 with e1^2 = e2^2 = 0 carries
f, df/dx_i, df/dx_j and d2f/dx_i dx_j when x_i is seeded along e1 and x_j along e2.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence


class HyperDual:
    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: float, b: float = 0.0, c: float = 0.0, d: float = 0.0):
        self.a, self.b, self.c, self.d = float(a), float(b), float(c), float(d)

    def __repr__(self) -> str:
        return f"HyperDual({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"

    def _chain(self, f0: float, f1: float, f2: float) -> HyperDual:
        # g(x) for a hyper-dual x given g, g', g'' at the real part
        return HyperDual(f0, f1 * self.b, f1 * self.c, f1 * self.d + f2 * self.b * self.c)

    def __add__(self, o):
        if isinstance(o, HyperDual):
            return HyperDual(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
        return HyperDual(self.a + o, self.b, self.c, self.d)

    __radd__ = __add__

    def __neg__(self):
        return HyperDual(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, HyperDual):
            return HyperDual(
                self.a * o.a,
                self.a * o.b + self.b * o.a,
                self.a * o.c + self.c * o.a,
                self.a * o.d + self.b * o.c + self.c * o.b + self.d * o.a,
            )
        return HyperDual(self.a * o, self.b * o, self.c * o, self.d * o)

    __rmul__ = __mul__

    def reciprocal(self) -> HyperDual:
        a = self.a
        if a == 0:
            raise ZeroDivisionError("hyper-dual reciprocal at zero")
        return self._chain(1 / a, -1 / a**2, 2 / a**3)

    def __truediv__(self, o):
        if isinstance(o, HyperDual):
            return self * o.reciprocal()
        return HyperDual(self.a / o, self.b / o, self.c / o, self.d / o)

    def __rtruediv__(self, o):
        return self.reciprocal() * o

    def __pow__(self, k):
        if isinstance(k, int) and k >= 0:
            out = HyperDual(1.0)
            base = self
            while k:
                if k & 1:
                    out = out * base
                base = base * base
                k >>= 1
            return out
        a = self.a
        return self._chain(a**k, k * a ** (k - 1), k * (k - 1) * a ** (k - 2))


def hd_log_abs(x):
    if isinstance(x, HyperDual):
        if x.a == 0:
            raise ZeroDivisionError("log at singular point")
        return x._chain(math.log(abs(x.a)), 1 / x.a, -1 / x.a**2)
    return math.log(abs(x))


def hd_exp(x):
    if isinstance(x, HyperDual):
        e = math.exp(x.a)
        return x._chain(e, e, e)
    return math.exp(x)


def real(x) -> float:
    return x.a if isinstance(x, HyperDual) else float(x)


def seed(x: Sequence[float], i: int, j: int) -> list[HyperDual]:
    out = [HyperDual(v) for v in x]
    out[i].b = 1.0
    out[j].c = 1.0
    return out


def hyperdual_second_partials(f: Callable, x: Sequence[float], i: int, j: int) -> tuple[float, float, float, float]:
    """(f, d_i f, d_j f, d_i d_j f) at x."""
    y = f(seed(x, i, j))
    if not isinstance(y, HyperDual):
        return float(y), 0.0, 0.0, 0.0
    return y.a, y.b, y.c, y.d


def gradient_and_laplacian(f: Callable, x: Sequence[float]) -> tuple[float, list[float], float]:
    """Value, gradient and Laplacian from one hyper-dual pass per coordinate."""
    grad, lap, val = [], 0.0, 0.0
    for i in range(len(x)):
        val, di, _, dii = hyperdual_second_partials(f, x, i, i)
        grad.append(di)
        lap += dii
    return val, grad, lap
