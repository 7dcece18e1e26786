"""Numeric cross-checks of the algebraic operators against their Cartesian Hamiltonians."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Sequence

from ..exactpoly import DiffOp, Polynomial, diffop_apply
from ..flags import enumerate_basis
from ..models import ModelDescriptor, QesParams
from .cartesian import CartesianModel
from .hyperdual import gradient_and_laplacian, hd_log_abs

E0_TOL = 1e-8
GAUGE_TOL = 1e-9
QES_TOL = 1e-7


def sample_points(model: CartesianModel, count: int, seed: int, box: float = 1.5, floor: float = 1e-2) -> list[list[float]]:
    """Uniform draws from [-box, box]^dim, rejected within ``floor`` of a singular hyperplane.

    Models with a centre-of-mass coordinate are projected onto sum(x) = 0.
    """
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        x = [rng.uniform(-box, box) for _ in range(model.dim)]
        if model.centre_of_mass:
            m = sum(x) / len(x)
            x = [xi - m for xi in x]
        if model.singular_distance(x) >= floor:
            out.append(x)
    return out


def invariants_eval(model: CartesianModel, x: Sequence[float]) -> list[float]:
    return [float(v) for v in model.invariants(list(x))]


def local_energy(model: CartesianModel, x: Sequence[float]) -> tuple[float, float]:
    """(H Psi0)/Psi0 at x and the magnitude scale of its contributing terms."""
    _, grad, lap = gradient_and_laplacian(model.log_psi0, x)
    g2 = sum(g * g for g in grad)
    V = model.potential(x)
    value = -0.5 * (lap + g2) + V
    return value, abs(0.5 * lap) + abs(0.5 * g2) + abs(V)


def e0_probe(model: CartesianModel, points: Sequence[Sequence[float]]) -> dict:
    if len(points) < 3:
        raise ValueError("need at least 3 sample points")
    values = [local_energy(model, x)[0] for x in points]
    mean = math.fsum(values) / len(values)
    spread = max(abs(v - mean) for v in values) / max(abs(mean), 1e-300)
    return {
        "values": values,
        "mean": mean,
        "spread": spread,
        "expected": float(model.E0),
        "expected_exact": str(model.E0),
        "deviation_from_expected": abs(mean - float(model.E0)) / max(abs(float(model.E0)), 1e-300),
        "ok": spread <= E0_TOL,
    }


def _composite(P: Polynomial, model: CartesianModel):
    return lambda x: P.evaluate(model.invariants(x))


def gauge_residual_at(model: CartesianModel, P: Polynomial, x, h_image: Polynomial, c, E0=None) -> float:
    """Relative mismatch of H(Psi0 P(t)) and Psi0 (E0 P(t) + h_image(t) / c) at one point."""
    E0 = float(model.E0 if E0 is None else E0)
    phi, dphi, lap_phi = gradient_and_laplacian(_composite(P, model), x)
    _, dlog, _ = gradient_and_laplacian(model.log_psi0, x)
    e_loc, e_scale = local_energy(model, x)
    cross = sum(a * b for a, b in zip(dlog, dphi))
    lhs = -0.5 * lap_phi - cross + e_loc * phi
    img = float(h_image.evaluate(invariants_eval(model, x))) / float(c)
    rhs = E0 * phi + img
    scale = abs(0.5 * lap_phi) + abs(cross) + e_scale * abs(phi) + abs(E0 * phi) + abs(img)
    return abs(lhs - rhs) / scale if scale else 0.0


def gauge_residual(model: CartesianModel, P: Polynomial, points, h_image: Polynomial, c, E0=None) -> dict:
    per_point = [gauge_residual_at(model, P, x, h_image, c, E0) for x in points]
    worst = max(per_point)
    return {"per_point": per_point, "max": worst, "ok": worst <= GAUGE_TOL}


def gauge_sweep(descriptor: ModelDescriptor, model: CartesianModel, points, max_degree: int) -> dict:
    """Gauge residual for every basis monomial of weighted degree <= max_degree."""
    h = descriptor.operator
    basis = enumerate_basis(descriptor.d, descriptor.f, max_degree)
    rows = []
    for m in basis.monomials:
        P = Polynomial.monomial(m)
        res = gauge_residual(model, P, points, diffop_apply(h, P), descriptor.gauge_scale)
        rows.append({"monomial": list(m), "per_point": res["per_point"], "max": res["max"]})
    worst = max(r["max"] for r in rows)
    return {"monomials": rows, "max": worst, "ok": worst <= GAUGE_TOL}


# ---------------------------------------------------------------------------
# QES end-to-end


def radial_restriction(h: DiffOp, var: int) -> tuple[Fraction, Fraction, Fraction]:
    """(alpha1, b0, b1) with h acting on functions of v as alpha1 v d^2 + (b0 + b1 v) d."""
    dim = h.dim
    two = [0] * dim
    two[var] = 2
    one = [0] * dim
    one[var] = 1
    A = h.coefficient(two)
    B = h.coefficient(one)
    v1 = tuple(one)
    zero = (0,) * dim
    if set(A.terms) - {v1} or set(B.terms) - {zero, v1}:
        raise ValueError("operator does not restrict to the radial variable in the expected form")
    return A.coefficient(v1), B.coefficient(zero), B.coefficient(v1)


def qes_potential(descriptor: ModelDescriptor, q: QesParams) -> dict:
    """Extra potential U(v) and energy offset turning H + U into the QES Hamiltonian of h + delta h.

    With Psi = Psi0 exp(g(v)) P(v) and g' = 2 (a v^2 - gamma) / (alpha1 v), conjugation by
    exp(g) produces delta h up to multiplication by Z = alpha1 v (g'' + g'^2) + (b0 + b1 v) g'.
    Then U = -[(Z - Z_0) + 4 a k v] / c and E = E0 + (lambda + Z_0 - 2 omega k) / c.
    """
    al, b0, b1 = radial_restriction(descriptor.operator, q.var_index)
    a, gam, k = q.a, q.gamma, q.k
    w = descriptor.params.omega
    c = descriptor.gauge_scale
    # g' = p v + m / v
    p, m = 2 * a / al, -2 * gam / al
    Z: dict[int, Fraction] = {}

    def add(power: int, value: Fraction) -> None:
        Z[power] = Z.get(power, Fraction(0)) + value

    # alpha1 v (g'' + g'^2), g'' = p - m / v^2, g'^2 = p^2 v^2 + 2 p m + m^2 / v^2
    add(1, al * p)
    add(-1, -al * m)
    add(3, al * p * p)
    add(1, al * 2 * p * m)
    add(-1, al * m * m)
    # (b0 + b1 v) g'
    add(1, b0 * p)
    add(-1, b0 * m)
    add(2, b1 * p)
    add(0, b1 * m)
    Z0 = Z.pop(0, Fraction(0))
    U = {pw: -val / c for pw, val in Z.items() if val}
    U[1] = U.get(1, Fraction(0)) - 4 * a * k / c
    U = {pw: v for pw, v in sorted(U.items()) if v}
    return {"U": U, "Z0": Z0, "g": (a / al, -2 * gam / al), "energy_offset": (Z0 - 2 * w * k) / c}


def float_eigenvector(matrix: Sequence[Sequence[Fraction]], lam: float) -> list[float]:
    """Null vector of (M - lam I) for a simple eigenvalue, scaled so its last entry is 1."""
    n = len(matrix)
    A = [[float(matrix[i][j]) - (lam if i == j else 0.0) for j in range(n)] for i in range(n)]
    # drop the row least needed: solve the first n-1 columns against the last one
    rows = sorted(range(n), key=lambda i: -max(abs(v) for v in A[i]))[: n - 1]
    M = [[A[i][j] for j in range(n - 1)] + [-A[i][n - 1]] for i in rows]
    size = n - 1
    for col in range(size):
        piv = max(range(col, size), key=lambda r: abs(M[r][col]))
        M[col], M[piv] = M[piv], M[col]
        for r in range(size):
            if r != col and M[r][col]:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [M[i][size] / M[i][i] for i in range(size)] + [1.0]


def qes_local_residual(
    model: CartesianModel,
    var: int,
    pot: dict,
    coeffs: Sequence[float],
    energy: float,
    x: Sequence[float],
    u_scale: dict[int, float] | None = None,
) -> float:
    gp, gl = (float(v) for v in pot["g"])
    U = {pw: float(v) * (u_scale or {}).get(pw, 1.0) for pw, v in pot["U"].items()}

    def log_psi(y):
        v = model.invariants(y)[var]
        P = 0.0
        for c in reversed(coeffs):
            P = P * v + c
        return model.log_psi0(y) + gp * v * v + gl * hd_log_abs(v) + hd_log_abs(P)

    _, grad, lap = gradient_and_laplacian(log_psi, x)
    g2 = sum(g * g for g in grad)
    V = model.potential(x)
    v = float(model.invariants(list(x))[var])
    Uv = sum(c * v**pw for pw, c in U.items())
    value = -0.5 * (lap + g2) + V + Uv - energy
    scale = abs(0.5 * lap) + abs(0.5 * g2) + abs(V) + abs(Uv) + abs(energy)
    return abs(value) / scale


def qes_residual(
    descriptor: ModelDescriptor,
    model: CartesianModel,
    q: QesParams,
    block,
    points,
    root: int = 0,
    u_scale: dict[int, float] | None = None,
) -> dict:
    """Check one QES eigenpair of h + delta h against the Cartesian QES Hamiltonian."""
    lo, hi = block.brackets[root]
    lam = float((lo + hi) / 2)
    coeffs = float_eigenvector(block.matrix, lam)
    pot = qes_potential(descriptor, q)
    energy = float(model.E0) + lam / float(descriptor.gauge_scale) + float(pot["energy_offset"])
    per_point = [qes_local_residual(model, q.var_index, pot, coeffs, energy, x, u_scale) for x in points]
    worst = max(per_point)
    return {
        "lambda": lam,
        "energy": energy,
        "eigenvector": coeffs,
        "potential": {str(pw): str(v) for pw, v in pot["U"].items()},
        "per_point": per_point,
        "max": worst,
        "ok": worst <= QES_TOL,
    }


def printed_calogero_qes_spread(N: int, omega, nu, a, gamma, points, n: int | None = None) -> dict:
    """Local-energy spread of the tabulated Calogero QES Hamiltonian with its tabulated k = 0 state.

    Uses r^2 = sum_{i<j} (x_i - x_j)^2 and n = N unless given.
    """
    n = N if n is None else n
    k = 0
    w, nu, a, g = float(omega), float(nu), float(a), float(gamma)

    def r2(x):
        total = 0.0
        for i in range(N):
            for j in range(i + 1, N):
                total = total + (x[i] - x[j]) ** 2
        return total

    def log_psi(x):
        out = sum((xi * xi for xi in x), 0.0) * (-w / 2)
        for i in range(N):
            for j in range(i + 1, N):
                out = out + nu * hd_log_abs(x[i] - x[j])
        R = r2(x)
        return out + g * hd_log_abs(R) - (a / 4) * R * R

    values = []
    for x in points:
        _, grad, lap = gradient_and_laplacian(log_psi, x)
        R = r2(x)
        V = 0.5 * w * w * sum(xi * xi for xi in x)
        V += nu * (nu - 1) * sum(1 / (x[i] - x[j]) ** 2 for i in range(N) for j in range(i + 1, N))
        V += 2 * g * (g - 2 * n * (1 + nu + nu * n) + 3) / R
        V += a * a * R**3 + 2 * a * w * R**2 - a * (2 * k + 2 * n * (1 + nu + nu * n) - g - 1) * R
        values.append(-0.5 * (lap + sum(d * d for d in grad)) + V)
    mean = math.fsum(values) / len(values)
    return {"values": values, "spread": max(abs(v - mean) for v in values) / max(abs(mean), 1e-300)}
