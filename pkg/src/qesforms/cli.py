"""Command-line front end.

    python -m qesforms.cli spectrum --model h3 --omega 1 --nu 1/3 --degree 6
    python -m qesforms.cli flag-check --model h4 --degree 24
    python -m qesforms.cli xcheck --model calogero --n-bodies 3 --k 1 --a 1/4 --gamma 1/2

Exit status: 0 pass (or informational), 1 verification failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass, fields
from fractions import Fraction

from . import algebra, flags, spectra
from .exactpoly import diffop_commutator
from .models import MODEL_NAMES, ModelParams, QesParams, get_model, operator_eigenvalue
from .xcheck import cartesian, checks

SCHEMA_VERSION = 1
SUBCOMMANDS = ("spectrum", "flag-check", "qes", "algebra", "decompose", "commutant", "xcheck")


class BadInput(ValueError):
    pass


@dataclass
class JobSpec:
    subcommand: str | None = None
    model: str | None = None
    n_bodies: int | None = None
    omega: str = "1"
    nu: str = "0"
    nu2: str = "0"
    mu: str = "0"
    gamma: str = "1/2"
    a: str = "1/4"
    k: int = 1
    degree: int | None = None
    seed: int = 20240601
    points: int = 5
    format: str = "json"
    out: str | None = None
    tau2_homogeneous: bool = False
    printed: bool = False
    l_tilde: str = "0"
    zeros: str = "none"
    degree_unit: str = "cartesian"
    timing: bool = False


JOB_FIELDS = {f.name for f in fields(JobSpec)}


def _rational(text, name: str) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise BadInput(f"--{name.replace('_', '-')}: malformed rational {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qesforms", description="Exact algebraic forms of rational (quasi)-exactly-solvable models.")
    p.add_argument("subcommand", nargs="?", choices=SUBCOMMANDS)
    p.add_argument("--model", choices=MODEL_NAMES)
    p.add_argument("--n-bodies", type=int, dest="n_bodies")
    for name in ("omega", "nu", "nu2", "mu", "gamma", "a"):
        p.add_argument(f"--{name}")
    p.add_argument("--l-tilde", dest="l_tilde", help="centrifugal exponent of the O(N) ground state")
    p.add_argument("--k", type=int, help="QES block degree")
    p.add_argument("--degree", type=int, help="flag degree n (commutant: coefficient degree bound)")
    p.add_argument("--seed", type=int)
    p.add_argument("--points", type=int, help="number of xcheck sample points")
    p.add_argument("--format", choices=("json", "csv", "text"))
    p.add_argument("--out")
    p.add_argument("--job", help="JSON job file; explicit flags override its fields")
    p.add_argument("--tau2-homogeneous", action="store_true", default=None, dest="tau2_homogeneous")
    p.add_argument("--printed", action="store_true", default=None, help="use the tabulated coefficient variant that disagrees with the Cartesian Hamiltonian")
    p.add_argument("--zeros", help="commutant structural zeros: 'none', 'radial' or a comma list like f11,f12,g1")
    p.add_argument("--degree-unit", choices=("cartesian", "total"), dest="degree_unit",
                   help="commutant degree bound: x-space coefficient degree or total degree in the invariants")
    p.add_argument("--timing", action="store_true", default=None, help="include wall-clock timing in the report")
    return p


def parse_job(argv) -> JobSpec:
    parser = build_parser()
    args = parser.parse_args(argv)
    job = JobSpec()
    if args.job:
        try:
            with open(args.job) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise BadInput(f"cannot read job file: {exc}") from exc
        if not isinstance(data, dict):
            raise BadInput("job file must hold a JSON object")
        unknown = sorted(set(data) - JOB_FIELDS)
        if unknown:
            raise BadInput(f"unknown job fields: {', '.join(unknown)}")
        for key, value in data.items():
            setattr(job, key, value)
    for key in JOB_FIELDS:
        value = getattr(args, key, None)
        if value is not None:
            setattr(job, key, value)
    validate(job)
    return job


def validate(job: JobSpec) -> None:
    if job.subcommand not in SUBCOMMANDS:
        raise BadInput(f"subcommand must be one of {', '.join(SUBCOMMANDS)}")
    if job.model not in MODEL_NAMES:
        raise BadInput(f"--model must be one of {', '.join(MODEL_NAMES)}")
    if job.model in ("calogero", "bcn") and job.n_bodies is None:
        raise BadInput(f"--n-bodies is required for {job.model}")
    if job.n_bodies is not None and job.n_bodies < (2 if job.model == "calogero" else 1):
        raise BadInput("--n-bodies out of range")
    if job.degree is not None and job.degree < 0:
        raise BadInput("--degree must be >= 0")
    if job.k < 0:
        raise BadInput("--k must be >= 0")
    if job.points < 3:
        raise BadInput("--points must be >= 3")
    if job.format not in ("json", "csv", "text"):
        raise BadInput("--format must be json, csv or text")
    for name in ("omega", "nu", "nu2", "mu", "gamma", "a", "l_tilde"):
        _rational(getattr(job, name), name)


def model_from_job(job: JobSpec):
    params = ModelParams(
        omega=_rational(job.omega, "omega"),
        nu=_rational(job.nu, "nu"),
        nu2=_rational(job.nu2, "nu2"),
        mu=_rational(job.mu, "mu"),
        N=job.n_bodies,
    )
    return get_model(job.model, params, printed=job.printed, l_tilde=_rational(job.l_tilde, "l_tilde"))


def _frac(x: Fraction) -> str:
    return str(x)


# ---------------------------------------------------------------------------
# subcommands; each returns (verdict, results)


def cmd_spectrum(job: JobSpec, model):
    n = 4 if job.degree is None else job.degree
    try:
        res = spectra.exact_eigenvalues(model.operator, model.f, n)
    except spectra.FlagViolation as exc:
        return "fail", {"error": "flag not preserved", "flag": exc.report.to_json()}
    predicted = spectra.formula_spectrum(model, n)
    basis = flags.enumerate_basis(model.d, model.f, n)
    labels: dict[Fraction, list] = {}
    for p in basis.monomials:
        labels.setdefault(operator_eigenvalue(model, p), []).append(list(p))
    table = []
    for value in sorted(set(res.eigenvalues) | set(predicted)):
        table.append(
            {
                "operator_eigenvalue": _frac(value),
                "epsilon": _frac(value / model.eps_factor),
                "energy_above_ground": _frac(value / model.gauge_scale),
                "multiplicity": res.eigenvalues.get(value, 0),
                "predicted_multiplicity": predicted.get(value, 0),
                "quantum_numbers": labels.get(value, []),
            }
        )
    ok = res.multiset() == predicted and not res.irrational_blocks
    results = {
        "degree": n,
        "f": list(model.f),
        "dimension": res.dimension,
        "frequencies": list(model.frequencies),
        "table": table,
        "irrational_blocks": res.to_json()["irrational_blocks"],
        "matches_formula": ok,
    }
    return ("pass" if ok else "fail"), results


def cmd_flag_check(job: JobSpec, model):
    n = 8 if job.degree is None else job.degree
    rep = flags.flag_preserved(model.operator, model.f, n)
    out = rep.to_json()
    out["f"] = list(model.f)
    return ("pass" if rep.preserved else "fail"), out


def _qes_params(job: JobSpec, model) -> QesParams:
    if model.radial_index is None:
        raise BadInput(f"model {model.name} has no radial variable for a QES deformation")
    return QesParams(_rational(job.a, "a"), _rational(job.gamma, "gamma"), job.k, model.radial_index)


def cmd_qes(job: JobSpec, model):
    q = _qes_params(job, model)
    w = model.params.omega
    try:
        block = spectra.qes_block(model.operator, q, w)
    except spectra.QesInvarianceError as exc:
        return "fail", {"error": "P_k not invariant", "witness": exc.witness}
    witness = spectra.qes_escape_witness(model.operator, q, w)
    results = {"block": block.to_json(), "escape_witness": witness, "a": _frac(q.a), "gamma": _frac(q.gamma)}
    ok = True
    if q.a:
        ok = witness is not None
    else:
        n = 8 if job.degree is None else job.degree
        H = spectra.qes_operator(model.operator, q, w)
        rep = flags.flag_preserved(H, model.f, n)
        results["full_flag"] = rep.to_json()
        ok = rep.preserved
    return ("pass" if ok else "fail"), results


def _generators(model, n):
    if model.name == "g2":
        return algebra.g2_generators(n), (1, 2)
    return algebra.gl_generators(model.d, n), (1,) * model.d


def cmd_algebra(job: JobSpec, model):
    n = 3 if job.degree is None else job.degree
    G, f = _generators(model, n)
    names = G.groups.get("first_order") if model.name == "g2" else None
    table = algebra.commutation_table(G, names)
    inv = algebra.check_invariance(G, f, n)
    results = {"closure": table, "invariance": inv}
    ok = table["closed"] and inv["invariant"]
    if model.name == "g2":
        T = algebra.t_iterated(n, 3)
        kappas = [algebra.proportionality(T[i], algebra.t_closed_form(i, n)) for i in range(3)]
        commute = all(diffop_commutator(T[i], T[j]).is_zero() for i in range(3) for j in range(3))
        results["t_generators"] = {
            "closed_form_factors": [None if k is None else _frac(k) for k in kappas],
            "third_commutator_zero": T[3].is_zero(),
            "mutually_commuting": commute,
            "max_order": max(t.order() for t in T[:3]),
        }
        ok = ok and T[3].is_zero() and commute and all(k for k in kappas)
    else:
        above = algebra.check_invariance(G, f, n + 1)
        results["escape_above"] = {"invariant": above["invariant"], "escapes": above["escapes"][:1]}
        ok = ok and not above["invariant"]
    return ("pass" if ok else "fail"), results


def cmd_decompose(job: JobSpec, model):
    if model.name == "g2":
        G = algebra.g2_generators(0)
        names = ["J1", "J2", "J3", "R2"]
    elif model.name in ("h3", "h4"):
        raise BadInput("no generator set is registered for h3/h4 decompositions")
    else:
        G = algebra.gl_generators(model.d, 0)
        names = None
    res = algebra.decompose_pol2(model.operator, G, names)
    results = res.to_json()
    ok = res.exact
    if model.name == "g2":
        B1 = model.operator.coefficient((1, 0)).coefficient((0, 0))
        B2 = model.operator.coefficient((0, 1)).coefficient((2, 0))
        pat = algebra.g2_printed_pattern(model.params.omega, B1, B2)
        match = algebra.combination(G, pat["quadratic"], pat["linear"]) == model.operator
        results["printed_pattern"] = {"c1": _frac(B1), "c2": _frac(B2), "reproduces_operator": match}
        ok = ok and match
    return ("pass" if ok else "fail"), results


def commutant_setup(model, degree: int, unit: str, zeros: str):
    if unit == "cartesian":
        bounds = spectra.cartesian_degree_bounds(model.degrees, degree)
        weights = model.degrees
    else:
        bounds = {"f": degree, "g": degree}
        weights = None
    if zeros == "none":
        zero_list: list[str] = []
    elif zeros == "radial":
        r = model.radial_index
        if r is None:
            raise BadInput("model has no radial variable")
        zero_list = [f"f{min(r, j) + 1}{max(r, j) + 1}" for j in range(model.d)] + [f"g{r + 1}"]
    else:
        zero_list = [z.strip() for z in zeros.split(",") if z.strip()]
    return bounds, zero_list, weights


def cmd_commutant(job: JobSpec, model):
    degree = 2 if job.degree is None else job.degree
    if degree < 1:
        raise BadInput("commutant degree bound must be >= 1")
    bounds, zeros, weights = commutant_setup(model, degree, job.degree_unit, job.zeros)
    res = spectra.commutant_search(model.operator, bounds, zeros, weights)
    verified = all(diffop_commutator(model.operator, s).is_zero() for s in res.solutions)
    out = res.to_json()
    out.update({"bounds": bounds, "weights": list(weights) if weights else None, "structural_zeros": zeros, "verified": verified})
    return ("pass" if res.solutions and verified else "fail"), out


def cmd_xcheck(job: JobSpec, model):
    if model.name == "h4":
        raise BadInput("no Cartesian counterpart is registered for h4")
    cm = cartesian.cartesian_for(model, job.tau2_homogeneous)
    pts = checks.sample_points(cm, job.points, job.seed)
    probe = checks.e0_probe(cm, pts)
    max_deg = job.degree if job.degree is not None else (2 if model.name == "h3" else 3)
    sweep = checks.gauge_sweep(model, cm, pts, max_deg)
    per_point = [max(r["per_point"][i] for r in sweep["monomials"]) for i in range(len(pts))]
    results = {
        "model": model.name,
        "params": _params_json(model),
        "seed": job.seed,
        "points": pts,
        "e0_probe": probe,
        "gauge": sweep,
        "per_point_residuals": per_point,
        "max_residual": sweep["max"],
    }
    ok = probe["ok"] and sweep["ok"]
    if model.name == "h3":
        other = cartesian.cartesian_h3(model.params.omega, model.params.nu, not job.tau2_homogeneous)
        other_sweep = checks.gauge_sweep(model, other, pts, max_deg)
        lit, hom = (sweep, other_sweep) if not job.tau2_homogeneous else (other_sweep, sweep)
        verdict = [name for name, s in (("literal", lit), ("homogeneous", hom)) if s["ok"]]
        results["tau2_interpretation"] = {
            "selected": cm.meta["tau2_interpretation"],
            "literal_max_residual": lit["max"],
            "homogeneous_max_residual": hom["max"],
            "satisfies_identity": verdict,
        }
    if model.name == "calogero":
        q = _qes_params(job, model)
        block = spectra.qes_block(model.operator, q, model.params.omega)
        if block.brackets and len(block.brackets) == len(block.charpoly) - 1:
            qes = checks.qes_residual(model, cm, q, block, pts)
            perturbed = checks.qes_residual(model, cm, q, block, pts, u_scale={2: 1.1})
            results["qes"] = {
                "k": q.k,
                "a": _frac(q.a),
                "gamma": _frac(q.gamma),
                "residual": qes,
                "perturbed_max": perturbed["max"],
                "perturbation_detected": perturbed["max"] > 1e-3,
            }
            ok = ok and qes["ok"] and perturbed["max"] > 1e-3
    return ("pass" if ok else "fail"), results


def _params_json(model) -> dict:
    d = asdict(model.params)
    return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in d.items()}


COMMANDS = {
    "spectrum": cmd_spectrum,
    "flag-check": cmd_flag_check,
    "qes": cmd_qes,
    "algebra": cmd_algebra,
    "decompose": cmd_decompose,
    "commutant": cmd_commutant,
    "xcheck": cmd_xcheck,
}


# ---------------------------------------------------------------------------
# output


def _flatten(prefix: str, value, rows: list) -> None:
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else str(k), value[k], rows)
    elif isinstance(value, list) and value and all(isinstance(v, (dict, list)) for v in value):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, json.dumps(value) if isinstance(value, list) else value))


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    table = report["results"].get("table") if isinstance(report["results"], dict) else None
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        if table:
            cols = list(table[0])
            writer.writerow(cols)
            for row in table:
                writer.writerow([json.dumps(row[c]) if isinstance(row[c], list) else row[c] for c in cols])
        else:
            rows: list = []
            _flatten("", report, rows)
            writer.writerow(["key", "value"])
            writer.writerows(rows)
        return buf.getvalue()
    rows = []
    _flatten("", report, rows)
    width = max(len(k) for k, _ in rows)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


def run(argv=None) -> int:
    try:
        job = parse_job(argv)
        model = model_from_job(job)
        start = time.perf_counter()
        verdict, results = COMMANDS[job.subcommand](job, model)
        elapsed = time.perf_counter() - start
    except SystemExit as exc:
        return 2 if exc.code else 0
    except (BadInput, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = {
        "schema_version": SCHEMA_VERSION,
        "job": {k: v for k, v in asdict(job).items() if k not in ("out", "timing")},
        "results": results,
        "timing": {"seconds": round(elapsed, 6)} if job.timing else None,
        "verdict": verdict,
    }
    text = render(report, job.format)
    if job.out:
        with open(job.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 1 if verdict == "fail" else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
