"""Hidden-algebra generator sets and decomposition of operators into their quadratic polynomials."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exactpoly import DiffOp, Polynomial, diffop_commutator, diffop_compose
from .flags import enumerate_basis, format_monomial, format_term, matrix_of
from .linalg import rref


@dataclass
class GeneratorSet:
    name: str
    dim: int
    n: Fraction
    members: dict[str, DiffOp]
    raising: frozenset[str] = frozenset()
    groups: dict[str, list[str]] = field(default_factory=dict)

    def names(self) -> list[str]:
        return list(self.members)

    def non_raising(self) -> list[str]:
        return [k for k in self.members if k not in self.raising]

    def __getitem__(self, key: str) -> DiffOp:
        return self.members[key]

    def __len__(self) -> int:
        return len(self.members)


def _euler_minus(dim: int, weights: Sequence[int], n) -> DiffOp:
    t = Polynomial.gens(dim)
    op = DiffOp.zero(dim)
    for i, w in enumerate(weights):
        op = op + DiffOp.partial(dim, i).left_multiply(t[i]).scale(w)
    return op - Fraction(n)


def gl_generators(d: int, n=0) -> GeneratorSet:
    """The (d+1)^2 first-order operators realizing gl(d+1) on polynomials of degree <= n.

    Names: ``Jm{i}`` = d_i, ``J0_{i}{j}`` = t_i d_j, ``J0`` = sum t_i d_i - n,
    ``Jp{i}`` = t_i J0 (raising).
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    n = Fraction(n)
    t = Polynomial.gens(d)
    members: dict[str, DiffOp] = {}
    for i in range(d):
        members[f"Jm{i + 1}"] = DiffOp.partial(d, i)
    for i in range(d):
        for j in range(d):
            members[f"J0_{i + 1}{j + 1}"] = DiffOp.partial(d, j).left_multiply(t[i])
    J0 = _euler_minus(d, [1] * d, n)
    members["J0"] = J0
    raising = []
    for i in range(d):
        members[f"Jp{i + 1}"] = J0.left_multiply(t[i])
        raising.append(f"Jp{i + 1}")
    return GeneratorSet(f"gl({d + 1})", d, n, members, frozenset(raising))


def g2_first_order(n=0) -> dict[str, DiffOp]:
    n = Fraction(n)
    t, u = Polynomial.gens(2)
    dt, du = DiffOp.partial(2, 0), DiffOp.partial(2, 1)
    J0 = _euler_minus(2, [1, 2], n)
    return {
        "J1": dt,
        "J2": dt.left_multiply(t) - n / 3,
        "J3": du.left_multiply(u * 2) - n / 3,
        "J4": J0.left_multiply(t),
        "R0": du,
        "R1": du.left_multiply(t),
        "R2": du.left_multiply(t * t),
        "J0": J0,
    }


def t_iterated(n=0, depth: int = 3) -> list[DiffOp]:
    """T_0 = u d_t^2 and T_{i+1} = [J4, T_i] for i < depth."""
    gens = g2_first_order(n)
    t, u = Polynomial.gens(2)
    T = [DiffOp.partial(2, 0, 2).left_multiply(u)]
    for _ in range(depth):
        T.append(diffop_commutator(gens["J4"], T[-1]))
    return T


def t_closed_form(i: int, n=0) -> DiffOp:
    """u d_t^{2-i} J0 (J0 + 1) ... (J0 + i - 1) for 0 <= i <= 2."""
    if not 0 <= i <= 2:
        raise ValueError("closed form defined for 0 <= i <= 2")
    J0 = g2_first_order(n)["J0"]
    u = Polynomial.variable(2, 1)
    op = DiffOp.partial(2, 0, 2 - i).left_multiply(u)
    for k in range(i):
        op = diffop_compose(op, J0 + k)
    return op


def proportionality(L: DiffOp, M: DiffOp) -> Fraction | None:
    """The scalar kappa with L = kappa * M, or None if there is none."""
    if M.is_zero():
        return Fraction(0) if L.is_zero() else None
    alpha, coeff = M.sorted_terms()[0]
    mono, c = coeff.sorted_terms()[0]
    kappa = L.coefficient(alpha).coefficient(mono) / c
    return kappa if L == M.scale(kappa) else None


def g2_generators(n=0) -> GeneratorSet:
    """First-order g^(2) members plus the second-order T0, T1, T2 from iterated commutators."""
    members = g2_first_order(n)
    T = t_iterated(n, 2)
    for i, op in enumerate(T):
        members[f"T{i}"] = op
    groups = {
        "first_order": ["J1", "J2", "J3", "J4", "R0", "R1", "R2", "J0"],
        "second_order": ["T0", "T1", "T2"],
    }
    return GeneratorSet("g(2)", 2, Fraction(n), members, frozenset({"J4"}), groups)


def subset(G: GeneratorSet, names: Sequence[str], raising: Sequence[str] = ()) -> GeneratorSet:
    return GeneratorSet(
        f"{G.name}[{','.join(names)}]", G.dim, G.n, {k: G.members[k] for k in names},
        frozenset(raising) & frozenset(names),
    )


# ---------------------------------------------------------------------------
# checks


def check_invariance(G: GeneratorSet, f: Sequence[int], n: int) -> dict:
    """Does every member map P_n (weights f) into itself?"""
    mark_ok = G.n == n
    basis = enumerate_basis(G.dim, f, n)
    escapes = []
    for name, op in G.members.items():
        mat = matrix_of(op, basis)
        if mat.remainder:
            j = min(mat.remainder)
            e, c = mat.remainder[j].sorted_terms()[0]
            escapes.append(
                {"generator": name, "monomial": format_monomial(basis.monomials[j]), "image_term": format_term(e, c)}
            )
    report = {
        "generators": G.name,
        "f": list(f),
        "n": n,
        "mark": str(G.n),
        "mark_matches": mark_ok,
        "invariant": not escapes,
        "escapes": escapes,
    }
    if not mark_ok:
        report["misuse"] = f"generator mark {G.n} differs from flag degree {n}"
    return report


def _coords(L: DiffOp) -> dict[tuple, Fraction]:
    out = {}
    for alpha, c in L.terms.items():
        for mono, v in c.terms.items():
            out[(alpha, mono)] = v
    return out


class SpanReducer:
    """Reduce operators modulo the linear span of a list of candidate operators."""

    def __init__(self, dim: int, candidates: Sequence[DiffOp]):
        self.dim = dim
        self.m = len(candidates)
        vecs = [_coords(c) for c in candidates]
        keys = sorted({k for v in vecs for k in v})
        self.keys = keys
        kidx = {k: i for i, k in enumerate(keys)}
        self.kidx = kidx
        K = len(keys)
        rows = []
        for i, v in enumerate(vecs):
            row = [Fraction(0)] * (K + self.m)
            for k, x in v.items():
                row[kidx[k]] = x
            row[K + i] = Fraction(1)
            rows.append(row)
        R, pivots = rref(rows) if rows else ([], [])
        self.rows = [(p, R[r]) for r, p in enumerate(pivots) if p < K]
        self.rank = len(self.rows)
        self.K = K

    @property
    def nullity(self) -> int:
        return self.m - self.rank

    def reduce(self, L: DiffOp) -> tuple[list[Fraction], DiffOp]:
        """Coefficients c and residual r with L = sum c_i candidate_i + r; r is zero iff L is in the span."""
        target = _coords(L)
        outside = {k: v for k, v in target.items() if k not in self.kidx}
        vec = [Fraction(0)] * self.K
        for k, v in target.items():
            if k in self.kidx:
                vec[self.kidx[k]] = v
        coeffs = [Fraction(0)] * self.m
        for p, row in self.rows:
            beta = vec[p]
            if not beta:
                continue
            for c in range(self.K):
                if row[c]:
                    vec[c] -= beta * row[c]
            for i in range(self.m):
                if row[self.K + i]:
                    coeffs[i] += beta * row[self.K + i]
        resid_terms: dict = {}
        for idx, v in enumerate(vec):
            if v:
                alpha, mono = self.keys[idx]
                resid_terms.setdefault(alpha, {})[mono] = v
        for (alpha, mono), v in outside.items():
            resid_terms.setdefault(alpha, {})[mono] = v
        residual = DiffOp(self.dim, [(Polynomial(self.dim, t), a) for a, t in resid_terms.items()])
        return coeffs, residual


def commutation_table(G: GeneratorSet, names: Sequence[str] | None = None) -> dict:
    """All pairwise commutators and whether each lies in the span of the members."""
    names = list(names) if names is not None else G.names()
    ops = [G.members[k] for k in names]
    reducer = SpanReducer(G.dim, ops)
    entries = []
    closed = True
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            comm = diffop_commutator(ops[a], ops[b])
            coeffs, resid = reducer.reduce(comm)
            in_span = resid.is_zero()
            closed &= in_span
            entries.append(
                {
                    "pair": [names[a], names[b]],
                    "commutator": str(comm),
                    "in_span": in_span,
                    "expansion": {names[i]: str(c) for i, c in enumerate(coeffs) if c} if in_span else None,
                }
            )
    return {"generators": G.name, "members": names, "closed": closed, "entries": entries}


@dataclass
class DecompositionResult:
    generators: list[str]
    quadratic: dict[tuple[str, str], Fraction]
    linear: dict[str, Fraction]
    constant: Fraction
    residual: DiffOp
    solution_space_dim: int
    candidates: int

    @property
    def exact(self) -> bool:
        return self.residual.is_zero()

    def to_json(self) -> dict:
        return {
            "generators": self.generators,
            "quadratic": [{"pair": list(k), "coeff": str(v)} for k, v in self.quadratic.items()],
            "linear": {k: str(v) for k, v in self.linear.items()},
            "constant": str(self.constant),
            "residual": str(self.residual),
            "residual_zero": self.exact,
            "solution_space_dim": self.solution_space_dim,
            "candidates": self.candidates,
        }


def pol2_candidates(G: GeneratorSet, names: Sequence[str]) -> list[tuple[tuple, DiffOp]]:
    out = []
    for a in names:
        for b in names:
            out.append(((a, b), diffop_compose(G.members[a], G.members[b])))
    for a in names:
        out.append(((a,), G.members[a]))
    out.append(((), DiffOp.identity(G.dim)))
    return out


def decompose_pol2(L: DiffOp, G: GeneratorSet, names: Sequence[str] | None = None) -> DecompositionResult:
    """Write L as a quadratic polynomial in the non-raising members of G.

    Products run over ordered pairs; because they are linearly dependent, the returned
    coefficients are one particular solution and ``solution_space_dim`` is the
    dimension of the affine family of solutions.
    """
    if L.dim != G.dim:
        raise ValueError("operator and generators have different dimensions")
    names = list(names) if names is not None else G.non_raising()
    bad = [k for k in names if k in G.raising]
    if bad:
        raise ValueError(f"raising generators are not allowed in the decomposition: {bad}")
    cands = pol2_candidates(G, names)
    reducer = SpanReducer(G.dim, [op for _, op in cands])
    coeffs, residual = reducer.reduce(L)
    quad, lin, const = {}, {}, Fraction(0)
    for (label, _), c in zip(cands, coeffs):
        if not c:
            continue
        if len(label) == 2:
            quad[label] = c
        elif len(label) == 1:
            lin[label[0]] = c
        else:
            const = c
    return DecompositionResult(names, quad, lin, const, residual, reducer.nullity, len(cands))


def rebuild(G: GeneratorSet, res: DecompositionResult) -> DiffOp:
    op = DiffOp.identity(G.dim).scale(res.constant)
    for (a, b), c in res.quadratic.items():
        op = op + diffop_compose(G.members[a], G.members[b]).scale(c)
    for a, c in res.linear.items():
        op = op + G.members[a].scale(c)
    return op


def combination(G: GeneratorSet, quadratic: dict, linear: dict, constant=0) -> DiffOp:
    """Evaluate an explicit quadratic polynomial in the members of G."""
    res = DecompositionResult(
        [], {k: Fraction(v) for k, v in quadratic.items()}, {k: Fraction(v) for k, v in linear.items()},
        Fraction(constant), DiffOp.zero(G.dim), 0, 0,
    )
    return rebuild(G, res)


def g2_printed_pattern(omega, c1, c2) -> dict:
    """(J2 + 3 J3) J1 - (2/3) J3 R2 + c1 J1 + 2 omega J2 + 3 omega J3 + c2 R2, as coefficient maps."""
    omega = Fraction(omega)
    return {
        "quadratic": {("J2", "J1"): 1, ("J3", "J1"): 3, ("J3", "R2"): Fraction(-2, 3)},
        "linear": {"J1": Fraction(c1), "J2": 2 * omega, "J3": 3 * omega, "R2": Fraction(c2)},
    }
