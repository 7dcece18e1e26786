"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` (lines are printed even without ``-s``)
or directly with ``python tests/test_acceptance.py``.
"""

import io
import time
from contextlib import redirect_stdout
from fractions import Fraction
from math import comb

import pytest

from qesforms import cli
from qesforms.algebra import (
    check_invariance,
    combination,
    commutation_table,
    decompose_pol2,
    g2_generators,
    g2_printed_pattern,
    gl_generators,
    proportionality,
    rebuild,
    t_closed_form,
    t_iterated,
)
from qesforms.exactpoly import DiffOp, Polynomial, diffop_commutator
from qesforms.flags import basis_dimension, flag_preserved
from qesforms.models import MODEL_NAMES, ModelParams, QesParams, get_model
from qesforms.spectra import (
    cartesian_degree_bounds,
    commutant_search,
    exact_eigenvalues,
    formula_spectrum,
    qes_block,
    qes_escape_witness,
    qes_operator,
)
from qesforms.xcheck import cartesian, checks

F = Fraction
PARAMS = dict(omega=F(1), nu=F(1, 3), nu2=F(2, 5), mu=F(1, 5))
SEED = 20240601


def model(name, N=None, **kw):
    return get_model(name, ModelParams(**{**PARAMS, **kw, "N": N}))


def emit(number, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  AC{number} {title}: {detail}"
    print(line)
    return line


@pytest.fixture
def say(capsys):
    def _say(*args):
        with capsys.disabled():
            print()
            emit(*args)

    return _say


# ---------------------------------------------------------------------------


def criterion_1():
    configs = [("calogero", 3, 6), ("calogero", 4, 6), ("calogero", 5, 6), ("bcn", 2, 6), ("bcn", 3, 6),
               ("g2", None, 8), ("h3", None, 10), ("h4", None, 24)]
    bad, slowest = [], 0.0
    for name, N, n_max in configs:
        m = model(name, N)
        start = time.perf_counter()
        for n in range(n_max + 1):
            res = exact_eigenvalues(m.operator, m.f, n)
            if res.irrational_blocks or res.multiset() != formula_spectrum(m, n):
                bad.append(f"{name}{N or ''}@n={n}")
        slowest = max(slowest, time.perf_counter() - start)
    ok = not bad and slowest < 120
    detail = f"{len(configs)} configs, every n <= n_max, exact multiset equality, slowest {slowest:.1f}s"
    return ok, detail + (f"; mismatches {bad}" if bad else "")


def criterion_2():
    bad = [(d, n) for d in range(1, 6) for n in range(11) if basis_dimension(d, (1,) * d, n) != comb(n + d, d)]
    return not bad, f"basis_dimension = C(n+d, d) for d <= 5, n <= 10 ({'exact' if not bad else bad})"


N_MAX = {"on": 8, "z2n": 8, "calogero": 6, "bcn": 6, "g2": 8, "h3": 10, "h4": 24}


def criterion_3():
    preserved = {}
    flips = {}
    raised = {}
    for name in MODEL_NAMES:
        m = model(name, 3)
        preserved[name] = flag_preserved(m.operator, m.f, N_MAX[name]).preserved
        alpha, coeff = next((a, c) for a, c in m.operator.sorted_terms() if sum(a) == 2)
        flipped = m.operator - DiffOp.term(coeff, alpha).scale(2)
        flips[name] = flag_preserved(flipped, m.f, N_MAX[name])
        # a weight-raising change of the same entry: multiply it by a power of the first invariant
        bumped = m.operator + DiffOp.term(coeff * Polynomial.variable(m.d, 0) ** (max(m.f) + 1), alpha)
        raised[name] = flag_preserved(bumped, m.f, N_MAX[name])
    all_preserved = all(preserved.values())
    flips_detected = [k for k, r in flips.items() if not r.preserved]
    raised_detected = all(not r.preserved and r.witness for r in raised.values())
    ok = all_preserved and len(flips_detected) == len(MODEL_NAMES)
    detail = (
        f"registered operators preserved: {sum(preserved.values())}/7; "
        f"sign flip of one A entry detected: {len(flips_detected)}/7 "
        f"(preservation is term-wise in weighted degree, so no sign change can break it); "
        f"weight-raising perturbation detected with witness: {'7/7' if raised_detected else 'no'}"
    )
    return ok, detail


def criterion_4():
    problems = []
    for d in (1, 2, 3):
        G = gl_generators(d, 3)
        if not commutation_table(G)["closed"]:
            problems.append(f"gl({d + 1}) not closed")
        for i in range(1, d + 1):
            for j in range(1, d + 1):
                want = G[f"J0_{j}{i}"] + (G["J0"] if i == j else DiffOp.zero(d))
                if diffop_commutator(G[f"Jm{i}"], G[f"Jp{j}"]) != want:
                    problems.append(f"[J-{i}, J+{j}]")
    kappas = {}
    for n in (0, 3, 5):
        T = t_iterated(n, 3)
        kappas[n] = [proportionality(T[i], t_closed_form(i, n)) for i in range(3)]
        # normalization of the iterated commutator: kappa_i = (-1)^i 2!/(2-i)!
        if kappas[n] != [1, -2, 2]:
            problems.append(f"T closed form at n={n}: {kappas[n]}")
        if not T[3].is_zero():
            problems.append("T3 != 0")
        if any(not diffop_commutator(T[i], T[j]).is_zero() for i in range(3) for j in range(3)):
            problems.append("[Ti, Tj] != 0")
    for n in (3, 5):
        for d in (1, 2, 3):
            if not check_invariance(gl_generators(d, n), (1,) * d, n)["invariant"]:
                problems.append(f"gl({d + 1}) invariance n={n}")
        if not check_invariance(g2_generators(n), (1, 2), n)["invariant"]:
            problems.append(f"g(2) invariance n={n}")
    detail = ("gl(d+1) closure d<=3, [J-,J+] identity, T nilpotent and commuting, "
              f"T_i = kappa_i * closed form with kappa = ({', '.join(map(str, kappas[0]))}), P_3/P_5 invariant")
    return not problems, detail + (f"; problems {problems}" if problems else "")


def criterion_5():
    results = []
    for name, N in (("calogero", 3), ("calogero", 4), ("bcn", 2), ("bcn", 3)):
        m = model(name, N)
        G = gl_generators(m.d, 0)
        res = decompose_pol2(m.operator, G)
        results.append((f"{name}{N}", res.exact and rebuild(G, res) == m.operator))
    m = model("g2")
    G = g2_generators(0)
    res = decompose_pol2(m.operator, G, ["J1", "J2", "J3", "R2"])
    c1 = 1 + 3 * (m.params.mu + m.params.nu)
    c2 = -F(2, 3) * (1 + 2 * m.params.mu)
    pat = g2_printed_pattern(m.params.omega, c1, c2)
    results.append(("g2", res.exact and combination(G, pat["quadratic"], pat["linear"]) == m.operator))
    ok = all(r for _, r in results)
    return ok, "zero residual: " + ", ".join(f"{k}={'yes' if r else 'NO'}" for k, r in results) + \
        "; G2 equals (J2+3J3)J1 - 2/3 J3R2 + c1J1 + 2wJ2 + 3wJ3 + c2R2"


def criterion_6():
    a, gamma = F(1, 4), F(1, 2)
    problems = []
    for name, N in (("calogero", 3), ("bcn", 2), ("g2", None), ("h3", None), ("h4", None)):
        m = model(name, N)
        w = m.params.omega
        for k in (1, 2):
            q = QesParams(a, gamma, k, m.radial_index)
            try:
                qes_block(m.operator, q, w)
            except ValueError:
                problems.append(f"{name} k={k} not invariant")
            if qes_escape_witness(m.operator, q, w) is None:
                problems.append(f"{name} k={k} no escape")
            H = qes_operator(m.operator, QesParams(0, gamma, k, m.radial_index), w)
            if not flag_preserved(H, m.f, 8).preserved:
                problems.append(f"{name} k={k} a=0 flag")
    for w in (F(1), F(3, 2)):
        cp = qes_block(DiffOp.zero(1), QesParams(a, gamma, 1), w).charpoly
        if cp != [(2 * w) ** 2 - 16 * a * gamma, -4 * w, F(1)]:
            problems.append(f"pure delta charpoly {cp}")
    detail = "P_k invariant, P_{k+1} escape witness, a=0 flag preserved (5 models, k=1,2); pure delta charpoly (l-2w)^2-16a*gamma"
    return not problems, detail + (f"; problems {problems}" if problems else "")


def criterion_7():
    out = []
    ok = True
    for name, N, zeros in (("calogero", 3, ["f11", "f12", "g1"]), ("g2", None, [])):
        m = model(name, N)
        start = time.perf_counter()
        res = commutant_search(m.operator, cartesian_degree_bounds(m.degrees, 2), zeros, weights=m.degrees)
        elapsed = time.perf_counter() - start
        commute = all(diffop_commutator(m.operator, s).is_zero() for s in res.solutions)
        nontrivial = [s for s in res.solutions if proportionality(s, m.operator) is None]
        ok &= bool(nontrivial) and commute and elapsed < 60
        out.append(f"{name}{N or ''}: dim {len(res.solutions)}, exact [h,f]=0 {commute}, {elapsed:.2f}s")
    return ok, "; ".join(out) + " (coefficient x-degree <= 2)"


def criterion_8():
    problems = []
    spreads = {}
    for name, N in (("calogero", 2), ("calogero", 3), ("calogero", 4), ("bcn", 2), ("bcn", 3), ("g2", None), ("h3", None)):
        m = model(name, N)
        cm = cartesian.cartesian_for(m, tau2_homogeneous=True)
        pts = checks.sample_points(cm, 5, SEED)
        probe = checks.e0_probe(cm, pts)
        spreads[f"{name}{N or ''}"] = probe["spread"]
        if probe["spread"] > 1e-8:
            problems.append(f"{name} spread {probe['spread']:.1e}")
        if name == "h3":
            w, nu = m.params.omega, m.params.nu
            if cm.E0 != F(3, 2) * w * (1 + 10 * nu) or abs(probe["mean"] - float(cm.E0)) > 1e-8 * float(cm.E0):
                problems.append("H3 E0 formula")
        sweep = checks.gauge_sweep(m, cm, pts, 2 if name == "h3" else 3)
        if sweep["max"] > 1e-9:
            problems.append(f"{name} gauge {sweep['max']:.1e}")
    try:
        cartesian.cartesian_for(model("h4"))
        problems.append("H4 not excluded")
    except ValueError:
        pass
    h3 = model("h3")
    verdict = []
    for homogeneous in (False, True):
        cm = cartesian.cartesian_h3(h3.params.omega, h3.params.nu, homogeneous)
        pts = checks.sample_points(cm, 5, SEED)
        if checks.gauge_sweep(h3, cm, pts, 2)["ok"]:
            verdict.append("homogeneous" if homogeneous else "literal")
    if verdict != ["homogeneous"]:
        problems.append(f"tau2 verdict {verdict}")
    m = model("calogero", 3)
    cm = cartesian.cartesian_for(m)
    pts = checks.sample_points(cm, 5, SEED)
    q = QesParams(F(1, 4), F(1, 2), 1, 0)
    block = qes_block(m.operator, q, m.params.omega)
    qes = max(checks.qes_residual(m, cm, q, block, pts, root=r)["max"] for r in range(2))
    if qes > 1e-7:
        problems.append(f"QES residual {qes:.1e}")
    detail = (f"max E0 spread {max(spreads.values()):.1e} (tol 1e-8); gauge residual <= 1e-9; "
              f"H3 E0 = 3/2 w(1+10nu); H4 excluded; tau2 verdict {verdict}; QES residual {qes:.1e} (tol 1e-7)")
    return not problems, detail + (f"; problems {problems}" if problems else "")


def criterion_9():
    jobs = [
        ["spectrum", "--model", "h3", "--nu", "1/3", "--degree", "6"],
        ["xcheck", "--model", "calogero", "--n-bodies", "3", "--nu", "1/3", "--seed", "7"],
        ["xcheck", "--model", "g2", "--nu", "1/3", "--mu", "1/5", "--seed", "7", "--format", "csv"],
        ["qes", "--model", "bcn", "--n-bodies", "2", "--nu", "1/3", "--k", "2"],
        ["commutant", "--model", "g2", "--nu", "1/3"],
    ]
    same = 0
    for args in jobs:
        outputs = []
        for _ in range(2):
            buf = io.StringIO()
            with redirect_stdout(buf):
                cli.run(args)
            outputs.append(buf.getvalue().encode())
        same += outputs[0] == outputs[1]
    return same == len(jobs), f"{same}/{len(jobs)} reports byte-identical across repeated runs"


CRITERIA = [
    (1, "spectrum equivalence", criterion_1),
    (2, "dimension law", criterion_2),
    (3, "flag preservation", criterion_3),
    (4, "hidden algebra", criterion_4),
    (5, "Pol2 decomposition", criterion_5),
    (6, "QES blocks", criterion_6),
    (7, "commutant discovery", criterion_7),
    (8, "Cartesian cross-check", criterion_8),
    (9, "determinism", criterion_9),
]


@pytest.mark.parametrize("number, title, check", CRITERIA, ids=[f"AC{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, check, say):
    ok, detail = check()
    say(number, title, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for number, title, check in CRITERIA:
        ok, detail = check()
        emit(number, title, ok, detail)
        failed += not ok
    raise SystemExit(1 if failed else 0)
