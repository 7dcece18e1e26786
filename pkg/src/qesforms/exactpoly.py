"""Exact multivariate polynomials and polynomial-coefficient differential operators.

Polynomials are sparse maps ``exponent tuple -> Fraction``; a :class:`DiffOp` is a
sum of ``coefficient * d^alpha`` terms kept in normal order (all derivatives to the
right), with at most one coefficient polynomial per derivative multi-index.

Text form (round-trips exactly)::

    3/2*t1^2*t2 + -1
    (2*t1) d1^2 + (-4*t2 + 1) d2
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import comb
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

Exponents = tuple[int, ...]
Scalar = Union[int, Fraction]


class DimensionError(ValueError):
    """Operands live in different numbers of variables."""


def _check_dims(a: int, b: int) -> None:
    if a != b:
        raise DimensionError(f"dimension mismatch: {a} vs {b}")


def _falling(m: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= m - i
    return out


def grlex_key(exps: Exponents) -> tuple:
    """Sort key for graded lexicographic order on raw exponents."""
    return (sum(exps), exps)


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or an integer/decimal literal into an exact Fraction."""
    return Fraction(text.strip())


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


class Polynomial:
    """Sparse polynomial in ``dim`` variables with exact rational coefficients."""

    __slots__ = ("dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[Exponents, Scalar] | Iterable | None = None):
        if dim < 0:
            raise ValueError("dimension must be non-negative")
        self.dim = dim
        self._hash = None
        acc: dict[Exponents, Fraction] = {}
        if terms is not None:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for exps, coeff in items:
                exps = tuple(int(e) for e in exps)
                if len(exps) != dim:
                    raise DimensionError(f"exponent {exps} does not have length {dim}")
                if any(e < 0 for e in exps):
                    raise ValueError(f"negative exponent in {exps}")
                c = acc.get(exps, Fraction(0)) + Fraction(coeff)
                if c:
                    acc[exps] = c
                else:
                    acc.pop(exps, None)
        self._terms = acc

    @classmethod
    def _raw(cls, dim: int, terms: dict[Exponents, Fraction]) -> Polynomial:
        # caller guarantees no zero coefficients and correct key lengths
        p = object.__new__(cls)
        p.dim = dim
        p._terms = terms
        p._hash = None
        return p

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> Polynomial:
        return cls._raw(dim, {})

    @classmethod
    def constant(cls, dim: int, value: Scalar) -> Polynomial:
        value = Fraction(value)
        return cls._raw(dim, {(0,) * dim: value} if value else {})

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff: Scalar = 1) -> Polynomial:
        return cls(len(exps), {tuple(exps): coeff})

    @classmethod
    def variable(cls, dim: int, index: int) -> Polynomial:
        exps = [0] * dim
        exps[index] = 1
        return cls._raw(dim, {tuple(exps): Fraction(1)})

    @classmethod
    def gens(cls, dim: int) -> list[Polynomial]:
        return [cls.variable(dim, i) for i in range(dim)]

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> Mapping[Exponents, Fraction]:
        return MappingProxyType(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def weighted_degree(self, weights: Sequence[int]) -> int:
        return max((sum(w * e for w, e in zip(weights, exps)) for exps in self._terms), default=-1)

    def sorted_terms(self) -> list[tuple[Exponents, Fraction]]:
        """Terms in descending graded lexicographic order."""
        return sorted(self._terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)

    def variables_used(self) -> set[int]:
        return {i for exps in self._terms for i, e in enumerate(exps) if e}

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            _check_dims(self.dim, other.dim)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.dim, other)
        return NotImplemented

    def __add__(self, other) -> Polynomial:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for exps, c in other._terms.items():
            v = out.get(exps, 0) + c
            if v:
                out[exps] = v
            else:
                out.pop(exps, None)
        return Polynomial._raw(self.dim, out)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial._raw(self.dim, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> Polynomial:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> Polynomial:
        return (-self) + other

    def scale(self, factor: Scalar) -> Polynomial:
        factor = Fraction(factor)
        if not factor:
            return Polynomial.zero(self.dim)
        return Polynomial._raw(self.dim, {e: c * factor for e, c in self._terms.items()})

    def __mul__(self, other) -> Polynomial:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        _check_dims(self.dim, other.dim)
        out: dict[Exponents, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Polynomial._raw(self.dim, out)

    def __rmul__(self, other) -> Polynomial:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int) -> Polynomial:
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.dim, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def diff(self, orders: Sequence[int]) -> Polynomial:
        """Apply the partial derivative d^orders."""
        orders = tuple(orders)
        _check_dims(self.dim, len(orders))
        out: dict[Exponents, Fraction] = {}
        for exps, c in self._terms.items():
            factor = 1
            for m, k in zip(exps, orders):
                factor *= _falling(m, k)
                if not factor:
                    break
            if factor:
                e = tuple(m - k for m, k in zip(exps, orders))
                out[e] = out.get(e, 0) + c * factor
        return Polynomial(self.dim, out)

    def evaluate(self, point: Sequence):
        """Evaluate at ``point``; works for any numeric type supporting + * and **."""
        _check_dims(self.dim, len(point))
        total = 0
        for exps, c in self._terms.items():
            term = c if isinstance(point[0], Fraction) or not point else float(c)
            for x, e in zip(point, exps):
                if e:
                    term = term * x**e
            total = total + term
        return total

    def substitute(self, images: Sequence[Polynomial]) -> Polynomial:
        """Compose with polynomial maps: variable i is replaced by ``images[i]``."""
        _check_dims(self.dim, len(images))
        out_dim = images[0].dim if images else 0
        total = Polynomial.zero(out_dim)
        powers: dict[tuple[int, int], Polynomial] = {}
        for exps, c in self._terms.items():
            term = Polynomial.constant(out_dim, c)
            for i, e in enumerate(exps):
                if e:
                    key = (i, e)
                    if key not in powers:
                        powers[key] = images[i] ** e
                    term = term * powers[key]
            total = total + term
        return total

    def embed(self, dim: int, positions: Sequence[int]) -> Polynomial:
        """Re-home this polynomial into ``dim`` variables; variable i goes to ``positions[i]``."""
        out = {}
        for exps, c in self._terms.items():
            e = [0] * dim
            for i, k in enumerate(exps):
                e[positions[i]] += k
            out[tuple(e)] = c
        return Polynomial(dim, out)

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.dim, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.dim == other.dim and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._terms.items())))
        return self._hash

    # -- text ---------------------------------------------------------------

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({self.dim}, {format_polynomial(self)!r})"

    @classmethod
    def parse(cls, text: str, dim: int) -> Polynomial:
        return parse_polynomial(text, dim)


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    """Exact product of two polynomials in the same number of variables."""
    _check_dims(p.dim, q.dim)
    return p * q


def _format_monomial(exps: Exponents, names: Sequence[str] | None = None) -> str:
    parts = []
    for i, e in enumerate(exps):
        if e:
            name = names[i] if names else f"t{i + 1}"
            parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def format_polynomial(p: Polynomial, names: Sequence[str] | None = None) -> str:
    if not p._terms:
        return "0"
    out = []
    for exps, c in p.sorted_terms():
        mono = _format_monomial(exps, names)
        if not mono:
            out.append(str(c))
        elif c == 1:
            out.append(mono)
        else:
            out.append(f"{c}*{mono}")
    return " + ".join(out)


_VAR = re.compile(r"^t(\d+)(?:\^(\d+))?$")


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, start, i = [], 0, 0, 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and text.startswith(sep, i):
            parts.append(text[start:i])
            i += len(sep)
            start = i
            continue
        i += 1
    parts.append(text[start:])
    return parts


def parse_polynomial(text: str, dim: int) -> Polynomial:
    """Inverse of :func:`format_polynomial` (also accepts `` - `` between terms)."""
    text = text.strip()
    if text in ("", "0"):
        return Polynomial.zero(dim)
    text = re.sub(r"\s+-\s+", " + -", text)
    total: dict[Exponents, Fraction] = {}
    for raw in _split_top(text, " + "):
        raw = raw.strip()
        sign = 1
        if raw.startswith("-") and not re.match(r"^-\d", raw):
            sign, raw = -1, raw[1:]
        coeff = Fraction(sign)
        exps = [0] * dim
        for factor in raw.split("*"):
            factor = factor.strip()
            m = _VAR.match(factor)
            if m:
                idx = int(m.group(1)) - 1
                if not 0 <= idx < dim:
                    raise DimensionError(f"variable t{idx + 1} outside dimension {dim}")
                exps[idx] += int(m.group(2) or 1)
            else:
                coeff *= Fraction(factor)
        e = tuple(exps)
        total[e] = total.get(e, 0) + coeff
    return Polynomial(dim, total)


# ---------------------------------------------------------------------------
# differential operators


def _deriv_key(alpha: Exponents) -> tuple:
    return (sum(alpha), alpha)


class DiffOp:
    """Normal-ordered differential operator ``sum_alpha c_alpha(t) d^alpha``."""

    __slots__ = ("dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Iterable[tuple[Polynomial, Sequence[int]]] = ()):
        self.dim = dim
        self._hash = None
        acc: dict[Exponents, Polynomial] = {}
        for coeff, alpha in terms:
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != dim or any(a < 0 for a in alpha):
                raise DimensionError(f"bad derivative index {alpha} for dimension {dim}")
            if not isinstance(coeff, Polynomial):
                coeff = Polynomial.constant(dim, coeff)
            _check_dims(dim, coeff.dim)
            _accumulate(acc, alpha, coeff)
        self._terms = acc

    @classmethod
    def _raw(cls, dim: int, terms: dict[Exponents, Polynomial]) -> DiffOp:
        op = object.__new__(cls)
        op.dim = dim
        op._terms = terms
        op._hash = None
        return op

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> DiffOp:
        return cls._raw(dim, {})

    @classmethod
    def identity(cls, dim: int) -> DiffOp:
        return cls.multiplication(Polynomial.constant(dim, 1))

    @classmethod
    def multiplication(cls, p: Polynomial) -> DiffOp:
        return cls._raw(p.dim, {(0,) * p.dim: p} if p else {})

    @classmethod
    def partial(cls, dim: int, index: int, order: int = 1) -> DiffOp:
        alpha = [0] * dim
        alpha[index] = order
        return cls._raw(dim, {tuple(alpha): Polynomial.constant(dim, 1)})

    @classmethod
    def term(cls, coeff: Polynomial, alpha: Sequence[int]) -> DiffOp:
        return cls(coeff.dim, [(coeff, alpha)])

    @classmethod
    def euler(cls, dim: int) -> DiffOp:
        """sum_i t_i d_i"""
        t = Polynomial.gens(dim)
        return cls(dim, [(t[i], _unit(dim, i)) for i in range(dim)])

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> Mapping[Exponents, Polynomial]:
        return MappingProxyType(self._terms)

    def coefficient(self, alpha: Sequence[int]) -> Polynomial:
        return self._terms.get(tuple(alpha), Polynomial.zero(self.dim))

    def order(self) -> int:
        return max((sum(a) for a in self._terms), default=-1)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def sorted_terms(self) -> list[tuple[Exponents, Polynomial]]:
        return sorted(self._terms.items(), key=lambda kv: _deriv_key(kv[0]), reverse=True)

    # -- algebra ------------------------------------------------------------

    def __add__(self, other) -> DiffOp:
        if isinstance(other, (int, Fraction, Polynomial)):
            other = DiffOp.multiplication(
                other if isinstance(other, Polynomial) else Polynomial.constant(self.dim, other)
            )
        if not isinstance(other, DiffOp):
            return NotImplemented
        _check_dims(self.dim, other.dim)
        out = dict(self._terms)
        for alpha, c in other._terms.items():
            _accumulate(out, alpha, c)
        return DiffOp._raw(self.dim, out)

    __radd__ = __add__

    def __neg__(self) -> DiffOp:
        return DiffOp._raw(self.dim, {a: -c for a, c in self._terms.items()})

    def __sub__(self, other) -> DiffOp:
        if isinstance(other, (int, Fraction, Polynomial, DiffOp)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other) -> DiffOp:
        return (-self) + other

    def scale(self, factor: Scalar) -> DiffOp:
        factor = Fraction(factor)
        if not factor:
            return DiffOp.zero(self.dim)
        return DiffOp._raw(self.dim, {a: c.scale(factor) for a, c in self._terms.items()})

    def left_multiply(self, p: Polynomial) -> DiffOp:
        """p * L (multiplication operator applied after L)."""
        _check_dims(self.dim, p.dim)
        out: dict[Exponents, Polynomial] = {}
        for a, c in self._terms.items():
            _accumulate(out, a, p * c)
        return DiffOp._raw(self.dim, out)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, DiffOp):
            return diffop_compose(self, other)
        if isinstance(other, Polynomial):
            return diffop_compose(self, DiffOp.multiplication(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, Polynomial):
            return self.left_multiply(other)
        return NotImplemented

    def __pow__(self, k: int) -> DiffOp:
        result = DiffOp.identity(self.dim)
        for _ in range(k):
            result = result * self
        return result

    def __call__(self, p: Polynomial) -> Polynomial:
        return diffop_apply(self, p)

    def apply(self, p: Polynomial) -> Polynomial:
        return diffop_apply(self, p)

    def embed(self, dim: int, positions: Sequence[int]) -> DiffOp:
        out = {}
        for a, c in self._terms.items():
            alpha = [0] * dim
            for i, k in enumerate(a):
                alpha[positions[i]] += k
            _accumulate(out, tuple(alpha), c.embed(dim, positions))
        return DiffOp._raw(dim, out)

    # -- comparison / text --------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.dim == other.dim and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._terms.items())))
        return self._hash

    def __str__(self) -> str:
        return format_diffop(self)

    def __repr__(self) -> str:
        return f"DiffOp({self.dim}, {format_diffop(self)!r})"

    @classmethod
    def parse(cls, text: str, dim: int) -> DiffOp:
        return parse_diffop(text, dim)


def _unit(dim: int, i: int) -> Exponents:
    e = [0] * dim
    e[i] = 1
    return tuple(e)


def _accumulate(acc: dict[Exponents, Polynomial], alpha: Exponents, coeff: Polynomial) -> None:
    if not coeff:
        return
    prev = acc.get(alpha)
    new = coeff if prev is None else prev + coeff
    if new:
        acc[alpha] = new
    else:
        acc.pop(alpha, None)


def diffop_apply(L: DiffOp, p: Polynomial) -> Polynomial:
    """Apply ``L`` to ``p`` exactly."""
    _check_dims(L.dim, p.dim)
    out: dict[Exponents, Fraction] = {}
    for alpha, coeff in L._terms.items():
        dp = p.diff(alpha) if any(alpha) else p
        for e2, c2 in dp._terms.items():
            for e1, c1 in coeff._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
    return Polynomial._raw(L.dim, out)


def _sub_indices(alpha: Exponents):
    """All gamma <= alpha componentwise, with the multi-binomial C(alpha, gamma)."""
    ranges = [range(a + 1) for a in alpha]

    def rec(i, prefix, weight):
        if i == len(alpha):
            yield tuple(prefix), weight
            return
        for g in ranges[i]:
            prefix.append(g)
            yield from rec(i + 1, prefix, weight * comb(alpha[i], g))
            prefix.pop()

    yield from rec(0, [], 1)


def diffop_compose(L: DiffOp, M: DiffOp) -> DiffOp:
    """Normal-ordered form of ``L o M`` via the multi-index Leibniz rule."""
    _check_dims(L.dim, M.dim)
    out: dict[Exponents, Polynomial] = {}
    for alpha, a in L._terms.items():
        subs = list(_sub_indices(alpha))
        for beta, b in M._terms.items():
            for gamma, weight in subs:
                db = b.diff(gamma) if any(gamma) else b
                if not db:
                    continue
                new_alpha = tuple(x - g + y for x, g, y in zip(alpha, gamma, beta))
                _accumulate(out, new_alpha, (a * db).scale(weight))
    return DiffOp._raw(L.dim, out)


def diffop_commutator(L: DiffOp, M: DiffOp) -> DiffOp:
    """``[L, M] = L o M - M o L``."""
    _check_dims(L.dim, M.dim)
    return diffop_compose(L, M) - diffop_compose(M, L)


def normal_order(factors: Sequence[DiffOp | Polynomial]) -> DiffOp:
    """Canonical form of a raw product of factors (multiplication operators and/or DiffOps)."""
    if not factors:
        raise ValueError("empty product")
    ops = [DiffOp.multiplication(f) if isinstance(f, Polynomial) else f for f in factors]
    result = ops[0]
    for op in ops[1:]:
        result = diffop_compose(result, op)
    return result


def diffop_equal(L, M) -> bool:
    """Compare canonical forms; raw factor sequences are normal-ordered first."""
    if isinstance(L, (list, tuple)):
        L = normal_order(L)
    if isinstance(M, (list, tuple)):
        M = normal_order(M)
    return L.dim == M.dim and L._terms == M._terms


def format_derivative(alpha: Exponents) -> str:
    parts = [f"d{i + 1}" if k == 1 else f"d{i + 1}^{k}" for i, k in enumerate(alpha) if k]
    return " ".join(parts)


def format_diffop(L: DiffOp, names: Sequence[str] | None = None) -> str:
    if not L._terms:
        return "0"
    out = []
    for alpha, c in L.sorted_terms():
        d = format_derivative(alpha)
        body = f"({format_polynomial(c, names)})"
        out.append(f"{body} {d}" if d else body)
    return " + ".join(out)


_DER = re.compile(r"^d(\d+)(?:\^(\d+))?$")


def parse_diffop(text: str, dim: int) -> DiffOp:
    text = text.strip()
    if text in ("", "0"):
        return DiffOp.zero(dim)
    terms = []
    for raw in _split_top(text, " + "):
        raw = raw.strip()
        if not raw.startswith("("):
            raise ValueError(f"operator term must start with '(': {raw!r}")
        depth = 0
        for i, ch in enumerate(raw):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0:
                break
        coeff = parse_polynomial(raw[1:i], dim)
        alpha = [0] * dim
        for tok in raw[i + 1 :].split():
            m = _DER.match(tok)
            if not m:
                raise ValueError(f"bad derivative token {tok!r}")
            idx = int(m.group(1)) - 1
            if not 0 <= idx < dim:
                raise DimensionError(f"derivative d{idx + 1} outside dimension {dim}")
            alpha[idx] += int(m.group(2) or 1)
        terms.append((coeff, alpha))
    return DiffOp(dim, terms)
