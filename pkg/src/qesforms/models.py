"""Algebraic (gauge-rotated) Hamiltonians of the rational models and their registry.

Every builder returns a :class:`DiffOp` in the model's invariant coordinates. The
default forms are the ones that agree with the Cartesian Hamiltonians. Builders
with a widely tabulated variant that does not (a wrong coefficient) accept
``printed=True`` to reproduce that variant.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Sequence

from .exactpoly import DiffOp, Polynomial

F = Fraction


@dataclass(frozen=True)
class ModelParams:
    omega: Fraction = F(1)
    nu: Fraction = F(0)
    nu2: Fraction = F(0)
    mu: Fraction = F(0)
    N: int | None = None

    def __post_init__(self):
        for name in ("omega", "nu", "nu2", "mu"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))


@dataclass(frozen=True)
class QesParams:
    a: Fraction
    gamma: Fraction
    k: int
    var_index: int = 0

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be >= 0")
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "gamma", Fraction(self.gamma))


@dataclass(frozen=True)
class ModelDescriptor:
    """Metadata for one model instance.

    ``gauge_scale`` is c in h = c * Psi0^-1 (H - E0) Psi0, so a physical energy is
    E = E0 + (operator eigenvalue) / c. ``eps_factor`` converts the model's
    level epsilon to the operator eigenvalue; ``frequencies`` give epsilon = 2 omega sum freq_i p_i.
    ``degrees`` are the homogeneous degrees of the invariant coordinates in x.
    """

    name: str
    d: int
    f: tuple[int, ...]
    gauge_scale: Fraction
    eps_factor: Fraction
    frequencies: tuple[int, ...]
    params: ModelParams
    operator: DiffOp
    variables: tuple[str, ...]
    radial_index: int | None = 0
    printed: bool = False
    degrees: tuple[int, ...] = ()
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def spectrum_form(self) -> tuple[Fraction, ...]:
        """Operator-convention eigenvalue per unit of each quantum number."""
        w = self.params.omega
        return tuple(self.eps_factor * 2 * w * k for k in self.frequencies)


def _first_order(dim: int, i: int) -> tuple[int, ...]:
    a = [0] * dim
    a[i] = 1
    return tuple(a)


def _second_order(dim: int, i: int, j: int) -> tuple[int, ...]:
    a = [0] * dim
    a[i] += 1
    a[j] += 1
    return tuple(a)


def assemble(dim: int, second: dict[tuple[int, int], Polynomial], first: Sequence[Polynomial]) -> DiffOp:
    """Operator with coefficient ``second[i, j]`` in front of d_i d_j (i <= j, installed once)."""
    terms = [(c, _second_order(dim, i, j)) for (i, j), c in second.items()]
    terms += [(c, _first_order(dim, i)) for i, c in enumerate(first)]
    return DiffOp(dim, terms)


def from_ordered_sum(dim: int, A: Callable[[int, int], Polynomial], first: Sequence[Polynomial]) -> DiffOp:
    """sum over all ordered pairs (i, j) of A(i, j) d_i d_j plus first-order part."""
    second = {}
    for i in range(dim):
        for j in range(i, dim):
            second[i, j] = A(i, j) if i == j else A(i, j) + A(j, i)
    return assemble(dim, second, first)


def from_upper_triangle(dim: int, A: dict[tuple[int, int], Polynomial], first: Sequence[Polynomial]) -> DiffOp:
    """Symmetric extension: A_ij for i < j appears twice in sum_{i,j} A_ij d_i d_j."""
    second = {(i, j): (c if i == j else c * 2) for (i, j), c in A.items()}
    return assemble(dim, second, first)


# ---------------------------------------------------------------------------
# one-variable and separable models


def build_on(params: ModelParams, l_tilde=0, N: int | None = None) -> DiffOp:
    """Radial O(N) operator in t = r^2: -2t d^2 + (2 omega t - N - 2 l_tilde) d."""
    N = N if N is not None else (params.N or 1)
    t = Polynomial.variable(1, 0)
    w = params.omega
    return assemble(1, {(0, 0): t * -2}, [t * (2 * w) - (N + 2 * Fraction(l_tilde))])


def build_z2n(N: int, nus: Sequence, omega) -> DiffOp:
    """Sum of one-coordinate operators in t_i = x_i^2: -2 t_i d_i^2 + (2 omega t_i - 1 - 2 nu_i) d_i."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if len(nus) != N:
        raise ValueError(f"need {N} couplings, got {len(nus)}")
    w = Fraction(omega)
    t = Polynomial.gens(N)
    second = {(i, i): t[i] * -2 for i in range(N)}
    first = [t[i] * (2 * w) - (1 + 2 * Fraction(nus[i])) for i in range(N)]
    return assemble(N, second, first)


# ---------------------------------------------------------------------------
# Calogero (A_{N-1})


def _indexed(gens: Sequence[Polynomial], dim: int, lo: int, hi: int, fixed: dict[int, int]):
    """Map a subscript k to t_k with the boundary conventions given by ``fixed``."""

    def t(k: int) -> Polynomial:
        if k in fixed:
            return Polynomial.constant(dim, fixed[k])
        if k < lo or k > hi:
            return Polynomial.zero(dim)
        return gens[k - lo]

    return t


def build_calogero(N: int, params: ModelParams, printed: bool = False) -> DiffOp:
    """Calogero operator in t_2..t_N, elementary symmetric functions of the centred coordinates.

    Variable index 0 is t_2. The omega term of B_i is 2 omega i t_i; ``printed=True``
    uses 2 omega (i-1) t_i instead.
    """
    if N < 2:
        raise ValueError("Calogero model needs N >= 2")
    d = N - 1
    t = _indexed(Polynomial.gens(d), d, 2, N, {0: 1, 1: 0})
    w, nu = params.omega, params.nu

    def A(a: int, b: int) -> Polynomial:
        i, j = a + 2, b + 2
        out = t(i - 1) * t(j - 1) * Fraction((N - i + 1) * (1 - j), N)
        for l in range(max(1, j - i), N + j + 2):
            out = out + t(i + l - 1) * t(j - l - 1) * (2 * l - j + i)
        return out

    first = []
    for a in range(d):
        i = a + 2
        omega_weight = i - 1 if printed else i
        first.append(
            t(i - 2) * (Fraction(1, N) * (1 + nu * N) * (N - i + 2) * (N - i + 1))
            + t(i) * (2 * w * omega_weight)
        )
    return from_ordered_sum(d, A, first)


# ---------------------------------------------------------------------------
# BC_N


def build_bcn(N: int, params: ModelParams, printed: bool = False) -> DiffOp:
    """BC_N operator in sigma_k = e_k(x_1^2, ..., x_N^2).

    The first-order constant term is -[1 + 2 nu2 + 2 nu (N-i)](N-i+1) sigma_{i-1};
    ``printed=True`` uses +[1 + nu2 + 2 nu (N-i)](N-i+1) sigma_{i-1}.
    """
    if N < 1:
        raise ValueError("BC_N model needs N >= 1")
    s = _indexed(Polynomial.gens(N), N, 1, N, {0: 1})
    w, nu, nu2 = params.omega, params.nu, params.nu2

    def A(a: int, b: int) -> Polynomial:
        i, j = a + 1, b + 1
        out = Polynomial.zero(N)
        for l in range(0, N + 1):
            out = out + s(i - l - 1) * s(j + l) * (2 * l + 1 + j - i)
        return out * -2

    first = []
    for a in range(N):
        i = a + 1
        if printed:
            const = (1 + nu2 + 2 * nu * (N - i)) * (N - i + 1)
        else:
            const = -(1 + 2 * nu2 + 2 * nu * (N - i)) * (N - i + 1)
        first.append(s(i - 1) * const + s(i) * (2 * w * i))
    return from_ordered_sum(N, A, first)


# ---------------------------------------------------------------------------
# G2


def build_g2(params: ModelParams, printed: bool = False) -> DiffOp:
    """G2 (Wolfes) operator in lambda_1 = sigma_2(y), lambda_2 = sigma_3(y)^2 of centred coordinates."""
    l1, l2 = Polynomial.gens(2)
    w, nu, mu = params.omega, params.nu, params.mu
    scale = 2 if printed else 1
    second = {(0, 0): l1, (0, 1): l2 * 6, (1, 1): l1 * l1 * l2 * Fraction(-4, 3)}
    first = [
        l1 * (2 * w) + scale * (1 + 3 * (mu + nu)),
        l2 * (6 * w) - l1 * l1 * (scale * Fraction(2, 3) * (1 + 2 * mu)),
    ]
    return assemble(2, second, first)


# ---------------------------------------------------------------------------
# H3, H4


def build_h3(params: ModelParams) -> DiffOp:
    t1, t2, t3 = Polynomial.gens(3)
    w, nu = params.omega, params.nu
    A = {
        (0, 0): t1 * 4,
        (0, 1): t2 * 12,
        (0, 2): t3 * 20,
        (1, 1): t1**2 * t2 * F(-48, 5) + t3 * F(45, 2),
        (1, 2): t1 * t2**2 * F(16, 15) - t1**2 * t3 * 24,
        (2, 2): t1 * t2 * t3 * F(-64, 3) + t2**3 * F(128, 45),
    }
    B = [
        6 + 60 * nu - t1 * (4 * w),
        t1**2 * (F(-48, 5) * (1 + 5 * nu)) - t2 * (12 * w),
        t1 * t2 * (F(-64, 15) * (2 + 5 * nu)) - t3 * (20 * w),
    ]
    return from_upper_triangle(3, A, B)


def build_h4(params: ModelParams) -> DiffOp:
    t1, t2, t3, t4 = Polynomial.gens(4)
    w, nu = params.omega, params.nu
    A = {
        (0, 0): t1 * 4,
        (0, 1): t2 * 24,
        (0, 2): t3 * 40,
        (0, 3): t4 * 60,
        (1, 1): t1 * t3 * 88 + t1**5 * t2 * 8,
        (1, 2): t1**3 * t2**2 * -4 + t1**5 * t3 * 24 - t4 * 8,
        (1, 3): t1**2 * t2**3 * 10 + t1**4 * t2 * t3 * 60 + t1**5 * t4 * 40 - t3**2 * 600,
        (2, 2): t1 * t2**3 * F(-38, 3) + t1**3 * t2 * t3 * 28 - t1**4 * t4 * F(8, 3),
        (2, 3): t1**2 * t2**2 * t3 * 210 + t1**3 * t2 * t4 * 60 - t1**4 * t3**2 * 180 + t2**4 * 30,
        (3, 3): t1 * t2**3 * t3 * -2175
        - t1**2 * t2**2 * t4 * 450
        - t1**3 * t2 * t3**2 * 1350
        - t1**4 * t3 * t4 * 600,
    }
    B = [
        8 * (1 + 30 * nu) - t1 * (4 * w),
        t1**5 * (12 * (1 + 10 * nu)) - t2 * (24 * w),
        t1**3 * t2 * (20 * (1 + 6 * nu)) - t3 * (40 * w),
        t1**2 * t2**2 * (15 * (1 - 30 * nu)) - t1**4 * t3 * (450 * (1 + 2 * nu)) - t4 * (60 * w),
    ]
    return from_upper_triangle(4, A, B)


# ---------------------------------------------------------------------------
# QES deformations


def _radial(model: ModelDescriptor, var_index: int | None = None) -> int:
    if model.radial_index is None:
        raise ValueError(f"model {model.name!r} has no radial variable")
    if var_index is not None and var_index != model.radial_index:
        raise ValueError(
            f"var_index {var_index} is not the radial variable {model.radial_index} of {model.name!r}"
        )
    return model.radial_index


def qes_delta_1d(a, gamma, k: int, omega) -> DiffOp:
    """4(a v^2 - gamma) d_v - 4 a k v + 2 omega k in one variable."""
    a, gamma, omega = F(a), F(gamma), F(omega)
    v = Polynomial.variable(1, 0)
    return DiffOp(1, [((v * v) * (4 * a) - 4 * gamma, (1,)), (v * (-4 * a * k) + 2 * omega * k, (0,))])


def build_qes_delta(model: ModelDescriptor, q: QesParams) -> DiffOp:
    idx = _radial(model, q.var_index)
    return qes_delta_1d(q.a, q.gamma, q.k, model.params.omega).embed(model.d, [idx])


def build_gamma_shift(model: ModelDescriptor, gamma) -> DiffOp:
    idx = _radial(model)
    return DiffOp.partial(model.d, idx).scale(4 * F(gamma))


# ---------------------------------------------------------------------------
# registry


MODEL_NAMES = ("on", "z2n", "calogero", "bcn", "g2", "h3", "h4")


def get_model(name: str, params: ModelParams, printed: bool = False, l_tilde=0, nus=None) -> ModelDescriptor:
    """Build the operator and metadata for a registered model name."""
    name = name.lower()
    N = params.N
    if name == "on":
        dim_n = N if N is not None else 1
        op = build_on(params, l_tilde, dim_n)
        return ModelDescriptor(
            "on", 1, (1,), F(1), F(1), (1,), replace(params, N=dim_n), op, ("t",), degrees=(2,),
            extra={"l_tilde": F(l_tilde)},
        )
    if name == "z2n":
        N = N if N is not None else 1
        nus = [F(x) for x in nus] if nus is not None else [params.nu2] * N
        op = build_z2n(N, nus, params.omega)
        return ModelDescriptor(
            "z2n", N, (1,) * N, F(1), F(1), (1,) * N, replace(params, N=N), op,
            tuple(f"t{i + 1}" for i in range(N)), radial_index=0 if N == 1 else None,
            degrees=(2,) * N, extra={"nus": tuple(nus)},
        )
    if name == "calogero":
        if N is None:
            raise ValueError("calogero needs N (number of bodies)")
        op = build_calogero(N, params, printed)
        freqs = tuple(range(1, N)) if printed else tuple(range(2, N + 1))
        return ModelDescriptor(
            "calogero", N - 1, (1,) * (N - 1), F(2), F(1), freqs, params, op,
            tuple(f"t{i}" for i in range(2, N + 1)), printed=printed, degrees=tuple(range(2, N + 1)),
        )
    if name == "bcn":
        if N is None:
            raise ValueError("bcn needs N")
        op = build_bcn(N, params, printed)
        return ModelDescriptor(
            "bcn", N, (1,) * N, F(1), F(1), tuple(range(1, N + 1)), params, op,
            tuple(f"s{i}" for i in range(1, N + 1)), printed=printed,
            degrees=tuple(range(2, 2 * N + 1, 2)),
        )
    if name == "g2":
        op = build_g2(params, printed)
        return ModelDescriptor(
            "g2", 2, (1, 2), F(1), F(1), (1, 3), replace(params, N=3), op, ("l1", "l2"), printed=printed,
            degrees=(2, 6),
        )
    if name == "h3":
        return ModelDescriptor(
            "h3", 3, (1, 2, 3), F(-2), F(-2), (1, 3, 5), replace(params, N=3), build_h3(params),
            ("tau1", "tau2", "tau3"), degrees=(2, 6, 10),
        )
    if name == "h4":
        return ModelDescriptor(
            "h4", 4, (1, 5, 8, 12), F(-2), F(-2), (1, 6, 10, 15), replace(params, N=4), build_h4(params),
            ("tau1", "tau2", "tau3", "tau4"), degrees=(2, 12, 20, 30),
        )
    raise ValueError(f"unknown model {name!r}; expected one of {', '.join(MODEL_NAMES)}")


def spectrum_formula(model: ModelDescriptor, p: Sequence[int]) -> Fraction:
    """The level epsilon = 2 omega sum_i freq_i p_i."""
    if len(p) != model.d:
        raise ValueError(f"need {model.d} quantum numbers, got {len(p)}")
    return 2 * model.params.omega * sum(k * int(x) for k, x in zip(model.frequencies, p))


def operator_eigenvalue(model: ModelDescriptor, p: Sequence[int]) -> Fraction:
    """Eigenvalue of the algebraic operator on the level labelled by p."""
    return model.eps_factor * spectrum_formula(model, p)


def energy_above_ground(model: ModelDescriptor, p: Sequence[int]) -> Fraction:
    """Physical E - E0 for the Cartesian Hamiltonian."""
    return operator_eigenvalue(model, p) / model.gauge_scale
