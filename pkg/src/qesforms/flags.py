"""Weighted monomial bases, flag membership checks and exact operator matrices."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exactpoly import DiffOp, Exponents, Polynomial, _format_monomial, diffop_apply


def _check_weights(f: Sequence[int]) -> tuple[int, ...]:
    f = tuple(int(x) for x in f)
    if not f or any(x < 1 for x in f):
        raise ValueError(f"characteristic vector must have positive entries, got {f}")
    return f


def weighted_degree(m: Sequence[int], f: Sequence[int]) -> int:
    """Dot product f . m."""
    if len(m) != len(f):
        raise ValueError(f"length mismatch: monomial {tuple(m)} vs weights {tuple(f)}")
    return sum(a * b for a, b in zip(m, f))


def _lattice_points(f: tuple[int, ...], n: int) -> list[Exponents]:
    out: list[Exponents] = []

    def rec(i: int, budget: int, prefix: list[int]) -> None:
        if i == len(f):
            out.append(tuple(prefix))
            return
        for p in range(budget // f[i] + 1):
            prefix.append(p)
            rec(i + 1, budget - p * f[i], prefix)
            prefix.pop()

    rec(0, n, [])
    return out


def basis_order_key(m: Exponents, f: Sequence[int]) -> tuple:
    """Weighted degree first, then lexicographic on the reversed exponent vector."""
    return (weighted_degree(m, f), tuple(reversed(m)))


@dataclass(frozen=True)
class WeightedBasis:
    """All monomials t^p with f.p <= n, ordered by weighted degree then reversed-lex."""

    d: int
    f: tuple[int, ...]
    n: int
    monomials: tuple[Exponents, ...]
    _index: dict = field(repr=False, compare=False, hash=False, default_factory=dict)

    def __len__(self) -> int:
        return len(self.monomials)

    def __iter__(self):
        return iter(self.monomials)

    def index_of(self, m: Sequence[int]) -> int:
        return self._index[tuple(m)]

    def monomial_at(self, i: int) -> Exponents:
        return self.monomials[i]

    def __contains__(self, m) -> bool:
        return tuple(m) in self._index

    def degree_of(self, i: int) -> int:
        return weighted_degree(self.monomials[i], self.f)

    def grades(self) -> list[tuple[int, int, int]]:
        """(weighted degree, start, stop) slices of the basis, one per degree present."""
        out = []
        start = 0
        for i in range(1, len(self.monomials) + 1):
            if i == len(self.monomials) or self.degree_of(i) != self.degree_of(start):
                out.append((self.degree_of(start), start, i))
                start = i
        return out

    def polynomial(self, i: int) -> Polynomial:
        return Polynomial.monomial(self.monomials[i])


def enumerate_basis(d: int, f: Sequence[int], n: int) -> WeightedBasis:
    if d < 1:
        raise ValueError("d must be >= 1")
    if n < 0:
        raise ValueError("n must be >= 0")
    f = _check_weights(f)
    if len(f) != d:
        raise ValueError(f"characteristic vector {f} does not have length {d}")
    mons = sorted(_lattice_points(f, n), key=lambda m: basis_order_key(m, f))
    basis = WeightedBasis(d, f, n, tuple(mons))
    basis._index.update((m, i) for i, m in enumerate(mons))
    return basis


def basis_dimension(d: int, f: Sequence[int], n: int) -> int:
    """Number of lattice points of the Newton polytope f.p <= n, counted without listing them."""
    if d < 1 or n < 0:
        raise ValueError("need d >= 1 and n >= 0")
    f = _check_weights(f)
    if len(f) != d:
        raise ValueError(f"characteristic vector {f} does not have length {d}")
    # counts[k] = number of exponent vectors over the processed variables with f.p == k
    counts = [1] + [0] * n
    for w in f:
        for k in range(w, n + 1):
            counts[k] += counts[k - w]
    return sum(counts)


@dataclass
class OpMatrix:
    """Column j holds the coordinates of L(m_j); anything outside the span goes to ``remainder``."""

    basis: WeightedBasis
    columns: list[dict[int, Fraction]]
    remainder: dict[int, Polynomial]

    @property
    def size(self) -> int:
        return len(self.basis)

    def entry(self, i: int, j: int) -> Fraction:
        return self.columns[j].get(i, Fraction(0))

    def dense(self) -> list[list[Fraction]]:
        n = self.size
        rows = [[Fraction(0)] * n for _ in range(n)]
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                rows[i][j] = v
        return rows

    def block(self, start: int, stop: int) -> list[list[Fraction]]:
        """Dense square sub-block on basis indices [start, stop)."""
        size = stop - start
        rows = [[Fraction(0)] * size for _ in range(size)]
        for j in range(start, stop):
            for i, v in self.columns[j].items():
                if start <= i < stop:
                    rows[i - start][j - start] = v
        return rows

    def is_closed(self) -> bool:
        return not self.remainder

    def is_block_triangular(self) -> bool:
        """True iff no entry maps a basis element to a strictly higher weighted degree."""
        for j, col in enumerate(self.columns):
            dj = self.basis.degree_of(j)
            if any(self.basis.degree_of(i) > dj for i in col):
                return False
        return True

    def nonzeros(self) -> int:
        return sum(len(c) for c in self.columns)


def matrix_of(L: DiffOp, basis: WeightedBasis) -> OpMatrix:
    if L.dim != basis.d:
        raise ValueError(f"operator dimension {L.dim} does not match basis dimension {basis.d}")
    columns: list[dict[int, Fraction]] = []
    remainder: dict[int, Polynomial] = {}
    for j, m in enumerate(basis.monomials):
        image = diffop_apply(L, Polynomial.monomial(m))
        col: dict[int, Fraction] = {}
        outside: dict[Exponents, Fraction] = {}
        for e, c in image.terms.items():
            i = basis._index.get(e)
            if i is None:
                outside[e] = c
            else:
                col[i] = c
        columns.append(col)
        if outside:
            remainder[j] = Polynomial(basis.d, outside)
    return OpMatrix(basis, columns, remainder)


def format_monomial(m: Sequence[int]) -> str:
    return _format_monomial(tuple(m)) or "1"


def format_term(m: Sequence[int], c: Fraction) -> str:
    mono = _format_monomial(tuple(m))
    if not mono:
        return str(c)
    return mono if c == 1 else f"{c}*{mono}"


@dataclass
class FlagReport:
    preserved: bool
    n_max: int
    witness: tuple[Exponents, Exponents, Fraction] | None = None

    def to_json(self) -> dict:
        out = {"preserved": self.preserved, "n_max": self.n_max}
        if self.witness is not None:
            m, e, c = self.witness
            out["witness"] = {"monomial": format_monomial(m), "image_term": format_term(e, c)}
        return out


def flag_preserved(L: DiffOp, f: Sequence[int], n_max: int) -> FlagReport:
    """Check that L never raises weighted degree on monomials of degree <= n_max.

    The first offending pair in basis order is returned as the witness.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    f = _check_weights(f)
    basis = enumerate_basis(L.dim, f, n_max)
    for m in basis.monomials:
        dm = weighted_degree(m, f)
        image = diffop_apply(L, Polynomial.monomial(m))
        worst = None
        for e, c in image.sorted_terms():
            de = weighted_degree(e, f)
            if de > dm and (worst is None or basis_order_key(e, f) > basis_order_key(worst[0], f)):
                worst = (e, c)
        if worst is not None:
            return FlagReport(False, n_max, (m, worst[0], worst[1]))
    return FlagReport(True, n_max)
