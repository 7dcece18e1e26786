"""Exact linear algebra and univariate root finding over the rationals.

Univariate polynomials are plain lists of Fractions, lowest degree first.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, floor, gcd, lcm
from typing import Sequence

Matrix = list[list[Fraction]]
UPoly = list[Fraction]


# ---------------------------------------------------------------------------
# matrices


def to_fraction_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the pivot columns."""
    M = [list(r) for r in rows]
    if not M:
        return M, []
    ncols = len(M[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        pivot_row = M[r]
        nz = [k for k in range(c, ncols) if pivot_row[k]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                factor = M[i][c]
                row = M[i]
                for k in nz:
                    row[k] -= factor * pivot_row[k]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M, pivots


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {x : A x = 0}; each vector has a 1 at its free column."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    R, pivots = rref(rows)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -R[r][free]
        basis.append(v)
    return basis


def solve(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
    """One exact solution of A x = b plus the nullspace, or None if inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [Fraction(b)] for r, b in zip(rows, rhs)]
    R, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = R[r][ncols]
    return x, nullspace(rows, ncols)


def mat_vec(rows: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> list[Fraction]:
    return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in rows]


def is_upper_triangular(M: Matrix) -> bool:
    return all(not M[i][j] for i in range(len(M)) for j in range(i))


def is_lower_triangular(M: Matrix) -> bool:
    return all(not M[i][j] for i in range(len(M)) for j in range(i + 1, len(M)))


def charpoly(M: Matrix) -> UPoly:
    """det(x I - M) by similarity reduction to upper Hessenberg form, then the Hessenberg recurrence."""
    n = len(M)
    H = [list(map(Fraction, r)) for r in M]
    for m in range(1, n - 1):
        i = next((r for r in range(m, n) if H[r][m - 1]), None)
        if i is None:
            continue
        if i != m:
            H[i], H[m] = H[m], H[i]
            for row in H:
                row[i], row[m] = row[m], row[i]
        piv = H[m][m - 1]
        for j in range(m + 1, n):
            u = H[j][m - 1] / piv
            if not u:
                continue
            rj, rm = H[j], H[m]
            for k in range(n):
                if rm[k]:
                    rj[k] -= u * rm[k]
            for row in H:
                if row[j]:
                    row[m] += u * row[j]
    polys: list[UPoly] = [[Fraction(1)]]
    for k in range(n):
        p = poly_sub(poly_mul([-H[k][k], Fraction(1)], polys[k]), [])
        prod = Fraction(1)
        for i in range(k - 1, -1, -1):
            prod *= H[i + 1][i]
            if not prod:
                break
            if H[i][k]:
                p = poly_sub(p, poly_scale(polys[i], prod * H[i][k]))
        polys.append(p)
    return polys[n]


# ---------------------------------------------------------------------------
# univariate polynomials


def poly_trim(p: Sequence[Fraction]) -> UPoly:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def poly_degree(p: Sequence[Fraction]) -> int:
    return len(poly_trim(p)) - 1


def poly_add(p: Sequence[Fraction], q: Sequence[Fraction]) -> UPoly:
    n = max(len(p), len(q))
    return poly_trim(
        [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]
    )


def poly_scale(p: Sequence[Fraction], c) -> UPoly:
    return poly_trim([x * c for x in p])


def poly_sub(p: Sequence[Fraction], q: Sequence[Fraction]) -> UPoly:
    return poly_add(p, poly_scale(q, -1))


def poly_mul(p: Sequence[Fraction], q: Sequence[Fraction]) -> UPoly:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return poly_trim(out)


def poly_divmod(p: Sequence[Fraction], q: Sequence[Fraction]) -> tuple[UPoly, UPoly]:
    q = poly_trim(q)
    if not q:
        raise ZeroDivisionError("division by zero polynomial")
    r = poly_trim(p)
    quot = [Fraction(0)] * max(len(r) - len(q) + 1, 1)
    lead = q[-1]
    while len(r) >= len(q):
        shift = len(r) - len(q)
        c = r[-1] / lead
        quot[shift] = c
        for i, b in enumerate(q):
            r[i + shift] -= c * b
        r = poly_trim(r)
    return poly_trim(quot), r


def poly_monic(p: Sequence[Fraction]) -> UPoly:
    p = poly_trim(p)
    return [x / p[-1] for x in p] if p else []


def poly_gcd(p: Sequence[Fraction], q: Sequence[Fraction]) -> UPoly:
    a, b = poly_trim(p), poly_trim(q)
    while b:
        a, b = b, poly_divmod(a, b)[1]
    return poly_monic(a)


def poly_deriv(p: Sequence[Fraction]) -> UPoly:
    return poly_trim([i * p[i] for i in range(1, len(p))])


def poly_eval(p: Sequence[Fraction], x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_from_roots(roots: Sequence[Fraction]) -> UPoly:
    out: UPoly = [Fraction(1)]
    for r in roots:
        out = poly_mul(out, [-Fraction(r), Fraction(1)])
    return out


def squarefree_part(p: Sequence[Fraction]) -> UPoly:
    p = poly_trim(p)
    if len(p) <= 2:
        return poly_monic(p)
    g = poly_gcd(p, poly_deriv(p))
    return poly_monic(poly_divmod(p, g)[0])


def primitive_integer(p: Sequence[Fraction]) -> list[int]:
    """Scale to integer coefficients with content 1 and positive leading coefficient."""
    p = poly_trim(p)
    den = lcm(*(x.denominator for x in p)) if p else 1
    ints = [int(x * den) for x in p]
    g = 0
    for v in ints:
        g = gcd(g, v)
    ints = [v // g for v in ints] if g else ints
    if ints and ints[-1] < 0:
        ints = [-v for v in ints]
    return ints


def sturm_sequence(p: Sequence[Fraction]) -> list[UPoly]:
    seq = [poly_trim(p), poly_deriv(p)]
    while seq[-1]:
        r = poly_divmod(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append(poly_scale(r, -1))
    return seq


def _sign_changes(seq: list[UPoly], x: Fraction) -> int:
    signs = [v for v in (poly_eval(s, x) for s in seq) if v]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def root_bound(p: Sequence[Fraction]) -> Fraction:
    """Cauchy bound: every real root lies strictly inside (-B, B)."""
    p = poly_trim(p)
    lead = abs(p[-1])
    return 1 + max((abs(c) / lead for c in p[:-1]), default=Fraction(0))


def count_roots(seq: list[UPoly], lo: Fraction, hi: Fraction) -> int:
    """Distinct real roots in (lo, hi] for a squarefree polynomial's Sturm sequence."""
    return _sign_changes(seq, lo) - _sign_changes(seq, hi)


def isolate_real_roots(p: Sequence[Fraction], width: Fraction = Fraction(1)) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals (lo, hi], each of length < ``width``, one per distinct real root, ascending."""
    sf = squarefree_part(p)
    if len(sf) <= 1:
        return []
    seq = sturm_sequence(sf)
    B = root_bound(sf)
    out: list[tuple[Fraction, Fraction]] = []
    stack = [(-B, B, count_roots(seq, -B, B))]
    while stack:
        lo, hi, k = stack.pop()
        if k == 0:
            continue
        if k == 1 and hi - lo < width:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        left = count_roots(seq, lo, mid)
        stack.append((mid, hi, k - left))
        stack.append((lo, mid, left))
    return sorted(out)


def refine_root(p: Sequence[Fraction], lo: Fraction, hi: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    """Shrink an isolating interval (lo, hi] of a squarefree polynomial below ``width``."""
    seq = sturm_sequence(squarefree_part(p))
    while hi - lo >= width:
        mid = (lo + hi) / 2
        if count_roots(seq, lo, mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def rational_roots(p: Sequence[Fraction]) -> list[Fraction]:
    """All distinct rational roots, ascending.

    With a_n the leading coefficient of the primitive integer form P, the substitution
    y = a_n x turns P into a monic integer polynomial whose rational roots are integers,
    so it suffices to isolate its real roots to unit width and test the integers inside.
    """
    sf = squarefree_part(p)
    if len(sf) <= 1:
        return []
    P = primitive_integer(sf)
    n = len(P) - 1
    an = P[-1]
    Q = [Fraction(P[i] * an ** (n - 1 - i)) for i in range(n)] + [Fraction(1)]
    roots = []
    for lo, hi in isolate_real_roots(Q, Fraction(1)):
        for y in range(ceil(lo), floor(hi) + 1):
            if y > lo and not poly_eval(Q, y):
                roots.append(Fraction(y, an))
    return sorted(roots)


def root_multiplicity(p: Sequence[Fraction], r: Fraction) -> int:
    p = poly_trim(p)
    k = 0
    lin = [-Fraction(r), Fraction(1)]
    while p:
        q, rem = poly_divmod(p, lin)
        if rem:
            break
        p, k = q, k + 1
    return k


def split_rational(p: Sequence[Fraction]) -> tuple[list[tuple[Fraction, int]], UPoly]:
    """Rational roots with multiplicity and the monic cofactor with no rational roots."""
    rest = poly_monic(p)
    found = []
    for r in rational_roots(rest):
        m = root_multiplicity(rest, r)
        for _ in range(m):
            rest = poly_divmod(rest, [-r, Fraction(1)])[0]
        found.append((r, m))
    return found, rest


def format_upoly(p: Sequence[Fraction], var: str = "x") -> str:
    p = poly_trim(p)
    if not p:
        return "0"
    parts = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if not c:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if not mono:
            parts.append(str(c))
        elif c == 1:
            parts.append(mono)
        else:
            parts.append(f"{c}*{mono}")
    return " + ".join(parts)
