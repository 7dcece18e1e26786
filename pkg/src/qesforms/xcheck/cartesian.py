"""Cartesian Hamiltonians, ground states and invariant maps of the rational models."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

from ..models import ModelDescriptor
from .hyperdual import hd_log_abs

PHI_P = (1 + math.sqrt(5)) / 2
PHI_M = (1 - math.sqrt(5)) / 2


def _dot(alpha: Sequence[float], x):
    total = 0.0
    for a, xi in zip(alpha, x):
        if a:
            total = total + a * xi
    return total


def elementary(values, k_max: int) -> list:
    """e_0 .. e_{k_max} of ``values`` (works for floats and hyper-duals)."""
    e = [1.0] + [0.0] * k_max
    for v in values:
        for k in range(k_max, 0, -1):
            e[k] = e[k] + v * e[k - 1]
    return e


@dataclass
class CartesianModel:
    """H = -1/2 Laplacian + omega^2 x^2 / 2 + sum_alpha nu_a (nu_a - 1) |alpha|^2 / (2 (alpha.x)^2) + extra.

    ``roots`` pairs each singular linear form with its coupling; the ground state is
    prod |alpha.x|^nu_a exp(-omega x^2 / 2) times ``radial_power`` factors of r.
    """

    name: str
    dim: int
    omega: float
    roots: list[tuple[tuple[float, ...], float]]
    invariants: Callable
    E0: Fraction
    radial_power: float = 0.0
    centre_of_mass: bool = False
    meta: dict = field(default_factory=dict)

    def log_psi0(self, x):
        r2 = sum((xi * xi for xi in x), 0.0)
        out = r2 * (-self.omega / 2)
        for alpha, nu in self.roots:
            if nu:
                out = out + nu * hd_log_abs(_dot(alpha, x))
        if self.radial_power:
            out = out + (self.radial_power / 2) * hd_log_abs(r2)
        return out

    def potential(self, x: Sequence[float]) -> float:
        r2 = sum(xi * xi for xi in x)
        v = 0.5 * self.omega**2 * r2
        for alpha, nu in self.roots:
            if nu:
                norm2 = sum(a * a for a in alpha)
                v += 0.5 * nu * (nu - 1) * norm2 / _dot(alpha, x) ** 2
        if self.radial_power:
            l, n = self.radial_power, self.dim
            v += l * (l + n - 2) / (2 * r2)
        return v

    def singular_distance(self, x: Sequence[float]) -> float:
        dists = [abs(_dot(a, x)) / math.sqrt(sum(c * c for c in a)) for a, _ in self.roots]
        if self.radial_power or not dists:
            dists.append(math.sqrt(sum(xi * xi for xi in x)))
        return min(dists)


def _e0(omega, dim, nus) -> Fraction:
    return Fraction(omega) * (Fraction(dim, 2) + sum((Fraction(n) for n in nus), Fraction(0)))


def cartesian_on(N: int, omega, l_tilde) -> CartesianModel:
    """O(N) oscillator with the centrifugal coupling written through l_tilde."""
    return CartesianModel(
        "on", N, float(omega), [], lambda x: [sum((xi * xi for xi in x), 0.0)],
        Fraction(omega) * (Fraction(N, 2) + Fraction(l_tilde)), radial_power=float(l_tilde),
    )


def cartesian_z2n(nus: Sequence, omega) -> CartesianModel:
    N = len(nus)
    roots = [(tuple(1.0 if k == i else 0.0 for k in range(N)), float(nus[i])) for i in range(N)]
    return CartesianModel("z2n", N, float(omega), roots, lambda x: [xi * xi for xi in x], _e0(omega, N, nus))


def _centred(x):
    N = len(x)
    Y = sum(x, 0.0) * (1.0 / N)
    return [xi - Y for xi in x]


def calogero_invariants(x) -> list:
    N = len(x)
    e = elementary(_centred(x), N)
    return e[2:]


def cartesian_calogero(N: int, omega, nu) -> CartesianModel:
    roots = []
    for i, j in combinations(range(N), 2):
        a = [0.0] * N
        a[i], a[j] = 1.0, -1.0
        roots.append((tuple(a), float(nu)))
    nus = [nu] * len(roots)
    return CartesianModel("calogero", N, float(omega), roots, calogero_invariants, _e0(omega, N, nus))


def bcn_invariants(x) -> list:
    return elementary([xi * xi for xi in x], len(x))[1:]


def cartesian_bcn(N: int, omega, nu, nu2) -> CartesianModel:
    roots = []
    for i, j in combinations(range(N), 2):
        for s in (1.0, -1.0):
            a = [0.0] * N
            a[i], a[j] = 1.0, s
            roots.append((tuple(a), float(nu)))
    for i in range(N):
        roots.append((tuple(1.0 if k == i else 0.0 for k in range(N)), float(nu2)))
    nus = [nu] * (N * (N - 1)) + [nu2] * N
    return CartesianModel("bcn", N, float(omega), roots, bcn_invariants, _e0(omega, N, nus))


def g2_invariants(x) -> list:
    y = _centred(x)
    lam1 = -(y[0] * y[0]) - y[1] * y[1] - y[0] * y[1]
    s3 = y[0] * y[1] * (y[0] + y[1])
    return [lam1, s3 * s3]


def cartesian_g2(omega, nu, mu) -> CartesianModel:
    roots = []
    for i, j in combinations(range(3), 2):
        a = [0.0] * 3
        a[i], a[j] = 1.0, -1.0
        roots.append((tuple(a), float(nu)))
    for m in range(3):
        a = [1.0] * 3
        a[m] = -2.0
        roots.append((tuple(a), float(mu)))
    return CartesianModel(
        "g2", 3, float(omega), roots, g2_invariants, _e0(omega, 3, [nu] * 3 + [mu] * 3), centre_of_mass=True
    )


H3_CYCLES = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


def h3_roots() -> list[tuple[float, ...]]:
    roots = [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)]
    for i, j, k in H3_CYCLES:
        for s1 in (1.0, -1.0):
            for s2 in (1.0, -1.0):
                r = [0.0, 0.0, 0.0]
                r[i], r[j], r[k] = 1.0, s1 * PHI_P, s2 * PHI_M
                roots.append(tuple(r))
    return roots


def _cyc(x, p: int, q: int, swap: bool = False):
    """sum over cyclic (i, j, k) of x_i^p x_j^q (x_i^p x_k^q when ``swap``)."""
    total = 0.0
    for i, j, k in H3_CYCLES:
        total = total + x[i] ** p * x[k if swap else j] ** q
    return total


def h3_invariants(homogeneous: bool = False) -> Callable:
    """tau_1, tau_2, tau_3; the degree-6 invariant carries the constant -39/5 unless ``homogeneous``."""

    def taus(x):
        x1, x2, x3 = x
        tau1 = x1 * x1 + x2 * x2 + x3 * x3
        p2 = x1 * x1 * x2 * x2 * x3 * x3
        tau2 = (
            (x1**6 + x2**6 + x3**6) * (-0.3)
            + _cyc(x, 2, 4) * (0.3 * (2 - 5 * PHI_P))
            + _cyc(x, 2, 4, swap=True) * (0.3 * (2 - 5 * PHI_M))
            + (p2 * (-39 / 5) if homogeneous else -39 / 5)
        )
        tau3 = (
            (x1**10 + x2**10 + x3**10) * (2 / 125)
            + _cyc(x, 8, 2) * (2 / 25 * (1 + 5 * PHI_M))
            + _cyc(x, 8, 2, swap=True) * (2 / 25 * (1 + 5 * PHI_P))
            + _cyc(x, 6, 4) * (4 / 25 * (1 - 5 * PHI_M))
            + _cyc(x, 6, 4, swap=True) * (4 / 25 * (1 - 5 * PHI_P))
            + (x1**6 * x2 * x2 * x3 * x3 + x2**6 * x3 * x3 * x1 * x1 + x3**6 * x1 * x1 * x2 * x2) * (-112 / 25)
            + (x1 * x1 * x2**4 * x3**4 + x2 * x2 * x3**4 * x1**4 + x3 * x3 * x1**4 * x2**4) * (212 / 25)
        )
        return [tau1, tau2, tau3]

    return taus


def cartesian_h3(omega, nu, tau2_homogeneous: bool = False) -> CartesianModel:
    roots = [(r, float(nu)) for r in h3_roots()]
    return CartesianModel(
        "h3", 3, float(omega), roots, h3_invariants(tau2_homogeneous), _e0(omega, 3, [nu] * 15),
        meta={"tau2_interpretation": "homogeneous" if tau2_homogeneous else "literal"},
    )


def cartesian_for(model: ModelDescriptor, tau2_homogeneous: bool = False) -> CartesianModel:
    p = model.params
    if model.name == "on":
        return cartesian_on(p.N, p.omega, model.extra["l_tilde"])
    if model.name == "z2n":
        return cartesian_z2n(model.extra["nus"], p.omega)
    if model.name == "calogero":
        return cartesian_calogero(p.N, p.omega, p.nu)
    if model.name == "bcn":
        return cartesian_bcn(p.N, p.omega, p.nu, p.nu2)
    if model.name == "g2":
        return cartesian_g2(p.omega, p.nu, p.mu)
    if model.name == "h3":
        return cartesian_h3(p.omega, p.nu, tau2_homogeneous)
    raise ValueError(f"no Cartesian counterpart for model {model.name!r}")
