"""Exact spectra on weighted flags, QES blocks and commuting-operator search."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .exactpoly import DiffOp, Polynomial, diffop_apply, diffop_commutator
from .flags import FlagReport, enumerate_basis, flag_preserved, matrix_of, weighted_degree
from .linalg import (
    charpoly,
    format_upoly,
    is_lower_triangular,
    is_upper_triangular,
    isolate_real_roots,
    nullspace,
    refine_root,
    split_rational,
)
from .models import ModelDescriptor, QesParams, operator_eigenvalue, qes_delta_1d


class FlagViolation(ValueError):
    """The operator does not preserve the requested flag."""

    def __init__(self, report: FlagReport):
        self.report = report
        super().__init__(f"flag not preserved: {report.to_json()}")


class QesInvarianceError(ValueError):
    def __init__(self, witness: dict):
        self.witness = witness
        super().__init__(f"block not invariant: {witness}")


@dataclass
class EigenResult:
    eigenvalues: dict[Fraction, int]
    irrational_blocks: list[tuple[int, list[Fraction]]] = field(default_factory=list)
    eigenfunctions: dict[Fraction, list[Polynomial]] | None = None
    dimension: int = 0

    def multiset(self) -> Counter:
        return Counter(self.eigenvalues)

    def to_json(self) -> dict:
        out = {
            "dimension": self.dimension,
            "eigenvalues": [{"value": str(v), "multiplicity": m} for v, m in sorted(self.eigenvalues.items())],
            "irrational_blocks": [
                {"weighted_degree": deg, "charpoly": [str(c) for c in cp]} for deg, cp in self.irrational_blocks
            ],
        }
        if self.eigenfunctions is not None:
            out["eigenfunctions"] = {
                str(v): [str(p) for p in polys] for v, polys in sorted(self.eigenfunctions.items())
            }
        return out


def block_eigenvalues(block: list[list[Fraction]]) -> tuple[list[tuple[Fraction, int]], list[Fraction]]:
    """Rational eigenvalues with multiplicities, and the leftover monic factor (empty list if none)."""
    if is_upper_triangular(block) or is_lower_triangular(block):
        counts = Counter(block[i][i] for i in range(len(block)))
        return sorted(counts.items()), []
    found, rest = split_rational(charpoly(block))
    return found, rest if len(rest) > 1 else []


def exact_eigenvalues(L: DiffOp, f: Sequence[int], n: int, want_eigenfunctions: bool = False) -> EigenResult:
    """Spectrum of L on P_n from the diagonal blocks P_m / P_{m-1}, m = 0..n."""
    report = flag_preserved(L, f, n)
    if not report.preserved:
        raise FlagViolation(report)
    basis = enumerate_basis(L.dim, f, n)
    M = matrix_of(L, basis)
    eigen: Counter = Counter()
    irrational = []
    for deg, start, stop in basis.grades():
        found, rest = block_eigenvalues(M.block(start, stop))
        for value, mult in found:
            eigen[value] += mult
        if rest:
            irrational.append((deg, rest))
    result = EigenResult(dict(sorted(eigen.items())), irrational, None, len(basis))
    if want_eigenfunctions:
        result.eigenfunctions = eigenfunctions(M, list(result.eigenvalues))
    return result


def eigenfunctions(M, values: Sequence[Fraction]) -> dict[Fraction, list[Polynomial]]:
    """Exact eigenvectors of the full matrix, first nonzero coordinate scaled to 1."""
    basis = M.basis
    dense = M.dense()
    size = len(dense)
    out = {}
    for lam in values:
        shifted = [[dense[i][j] - (lam if i == j else 0) for j in range(size)] for i in range(size)]
        polys = []
        for vec in nullspace(shifted, size):
            lead = next(x for x in vec if x)
            terms = {basis.monomials[i]: x / lead for i, x in enumerate(vec) if x}
            polys.append(Polynomial(basis.d, terms))
        out[lam] = polys
    return out


def degeneracy_table(L: DiffOp, f: Sequence[int], n: int) -> dict[Fraction, int]:
    return exact_eigenvalues(L, f, n).eigenvalues


def formula_spectrum(model: ModelDescriptor, n: int) -> Counter:
    """Operator-convention eigenvalues predicted for every quantum-number vector with f.p <= n."""
    basis = enumerate_basis(model.d, model.f, n)
    return Counter(operator_eigenvalue(model, p) for p in basis.monomials)


def quantum_numbers_at(model: ModelDescriptor, n: int, value: Fraction) -> list[tuple[int, ...]]:
    basis = enumerate_basis(model.d, model.f, n)
    return [p for p in basis.monomials if operator_eigenvalue(model, p) == value]


# ---------------------------------------------------------------------------
# QES


@dataclass
class QesBlock:
    k: int
    matrix: list[list[Fraction]]
    charpoly: list[Fraction]
    rational_roots: list[tuple[Fraction, int]]
    brackets: list[tuple[Fraction, Fraction]]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "matrix": [[str(x) for x in row] for row in self.matrix],
            "charpoly": [str(c) for c in self.charpoly],
            "charpoly_text": format_upoly(self.charpoly, "lambda"),
            "rational_roots": [{"value": str(r), "multiplicity": m} for r, m in self.rational_roots],
            "root_brackets": [
                {"lo": str(lo), "hi": str(hi), "approx": float((lo + hi) / 2)} for lo, hi in self.brackets
            ],
        }


def _radial_monomial(dim: int, var: int, p: int) -> Polynomial:
    e = [0] * dim
    e[var] = p
    return Polynomial.monomial(e)


def qes_operator(h: DiffOp, q: QesParams, omega) -> DiffOp:
    return h + qes_delta_1d(q.a, q.gamma, q.k, omega).embed(h.dim, [q.var_index])


def qes_block(h: DiffOp, q: QesParams, omega, width: Fraction = Fraction(1, 10**15)) -> QesBlock:
    """Matrix of h + delta h on <v^0, ..., v^k> and its characteristic polynomial.

    Real roots are bracketed by exact Sturm bisection to intervals narrower than ``width``.
    """
    H = qes_operator(h, q, omega)
    k, var = q.k, q.var_index
    size = k + 1
    matrix = [[Fraction(0)] * size for _ in range(size)]
    for p in range(size):
        image = diffop_apply(H, _radial_monomial(h.dim, var, p))
        for e, c in image.sorted_terms():
            deg = e[var]
            if any(x for i, x in enumerate(e) if i != var) or deg > k:
                raise QesInvarianceError({"monomial": p, "image_exponents": list(e), "coefficient": str(c)})
            matrix[deg][p] = c
    cp = charpoly(matrix)
    found, _ = split_rational(cp)
    brackets = [refine_root(cp, lo, hi, width) for lo, hi in isolate_real_roots(cp)]
    return QesBlock(k, matrix, cp, found, brackets)


def qes_escape_witness(h: DiffOp, q: QesParams, omega) -> dict | None:
    """First term of (h + delta h) v^(k+1) that leaves P_{k+1}, or None."""
    H = qes_operator(h, q, omega)
    image = diffop_apply(H, _radial_monomial(h.dim, q.var_index, q.k + 1))
    for e, c in image.sorted_terms():
        if e[q.var_index] > q.k + 1 or any(x for i, x in enumerate(e) if i != q.var_index):
            return {"degree": q.k + 1, "image_exponents": list(e), "coefficient": str(c)}
    return None


# ---------------------------------------------------------------------------
# commutant search


def _monomials_up_to(dim: int, bound, weights: Sequence[int] | None) -> list[tuple[int, ...]]:
    w = tuple(weights) if weights is not None else (1,) * dim
    out = []
    ranges = [range(bound // wi + 1) for wi in w]
    for e in product(*ranges):
        if weighted_degree(e, w) <= bound:
            out.append(e)
    return sorted(out, key=lambda e: (weighted_degree(e, w), tuple(reversed(e))))


def coefficient_label(alpha: tuple[int, ...], labels: Sequence[str] | None = None) -> str:
    """'f12' for d_1 d_2, 'f11' for d_1^2, 'g2' for d_2 (1-based variable positions)."""
    idx = []
    for i, a in enumerate(alpha):
        idx += [labels[i] if labels else str(i + 1)] * a
    return ("f" if sum(alpha) == 2 else "g") + "".join(idx)


def cartesian_degree_bounds(degrees: Sequence[int], coefficient_degree: int = 2) -> dict[str, int]:
    """Per-coefficient weighted bounds for the pull-back of an x-space second-order operator.

    An operator sum L_ij(x) d_i d_j + ... whose coefficients have x-degree <= D becomes,
    in invariants of x-degrees ``degrees``, f_ab of degree <= deg_a + deg_b + D - 2 and
    g_a of degree <= deg_a + D - 2.
    """
    extra = coefficient_degree - 2
    d = len(degrees)
    out = {}
    for i in range(d):
        for j in range(i, d):
            alpha = [0] * d
            alpha[i] += 1
            alpha[j] += 1
            out[coefficient_label(tuple(alpha))] = degrees[i] + degrees[j] + extra
        alpha = [0] * d
        alpha[i] = 1
        out[coefficient_label(tuple(alpha))] = degrees[i] + extra
    return out


@dataclass
class CommutantResult:
    unknowns: int
    solutions: list[DiffOp]
    ansatz: dict[str, list[tuple[int, ...]]]

    def to_json(self) -> dict:
        return {
            "unknowns": self.unknowns,
            "dimension": len(self.solutions),
            "ansatz": {k: len(v) for k, v in self.ansatz.items()},
            "solutions": [str(s) for s in self.solutions],
        }


def commutant_search(
    h: DiffOp,
    bounds: int | Mapping[str, int],
    structural_zeros: Sequence[str] = (),
    weights: Sequence[int] | None = None,
    labels: Sequence[str] | None = None,
) -> CommutantResult:
    """Second-order operators f = sum f_ij d_i d_j + sum g_i d_i with [h, f] = 0.

    ``bounds`` is a single degree bound for every coefficient or a map from coefficient
    labels (``f11``, ``f12``, ``g1``, ...; keys ``f`` and ``g`` act as defaults) to
    bounds. Degrees are weighted by ``weights`` when given. Coefficients named in
    ``structural_zeros`` are fixed to zero.
    """
    d = h.dim
    zeros = set(structural_zeros)
    alphas = []
    for i in range(d):
        for j in range(i, d):
            a = [0] * d
            a[i] += 1
            a[j] += 1
            alphas.append(tuple(a))
    for i in range(d):
        a = [0] * d
        a[i] = 1
        alphas.append(tuple(a))

    def bound_for(label: str) -> int:
        if isinstance(bounds, int):
            return bounds
        if label in bounds:
            return bounds[label]
        return bounds[label[0]]

    ansatz: dict[str, list[tuple[int, ...]]] = {}
    unknowns: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    for alpha in alphas:
        label = coefficient_label(alpha, labels)
        if label in zeros:
            continue
        mons = _monomials_up_to(d, bound_for(label), weights)
        ansatz[label] = mons
        unknowns += [(alpha, m) for m in mons]

    columns = []
    for alpha, m in unknowns:
        columns.append(diffop_commutator(h, DiffOp.term(Polynomial.monomial(m), alpha)))
    keys = sorted({(a, e) for op in columns for a, c in op.terms.items() for e in c.terms})
    kidx = {k: i for i, k in enumerate(keys)}
    rows = [[Fraction(0)] * len(unknowns) for _ in keys]
    for j, op in enumerate(columns):
        for a, c in op.terms.items():
            for e, v in c.terms.items():
                rows[kidx[(a, e)]][j] = v
    sols = []
    for vec in nullspace(rows, len(unknowns)):
        lead = next(x for x in vec if x)
        terms = [(Polynomial.monomial(m, x / lead), alpha) for (alpha, m), x in zip(unknowns, vec) if x]
        sols.append(DiffOp(d, terms))
    return CommutantResult(len(unknowns), sols, ansatz)
