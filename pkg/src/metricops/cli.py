"""Command-line front end: scenario JSON in, report JSON and CSV tables out.

Exit status is 0 when every verdict passes, 1 when some verdict fails and
2 on input errors (unreadable or malformed scenario, unknown recipe,
invalid operator).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
import warnings
from pathlib import Path

import numpy as np

from metricops import __version__, kernels, recipes
from metricops.errors import MetricOpsError, NotIntertwined, ScenarioError, TNotInvertible
from metricops.grids import (
    Grid,
    RefinementFamily,
    bump,
    default_phi,
    derivative_pair,
    projector_resolvent,
)
from metricops.lattice import identity_metric, inverse, join, meet, r_of, seven_lattice, lattice_growth
from metricops.linalg import general_eigenvalues, operator_norm
from metricops.pipspace import (
    jay_scan,
    klmn_applicability,
    klmn_restrict,
    representative_norm,
)
from metricops.pseudo import physical_hamiltonian, pt_oscillator
from metricops.scale import (
    DEFAULT_EXPONENTS,
    ScaleModeWarning,
    build_scale,
    duality_pair,
    end_space_diagnostic,
)
from metricops.similarity import (
    KAPPA_MAX,
    adjoint_case,
    check_intertwining,
    classify,
    cond_growth,
    make_case,
    real_spectrum_check,
    spectral_inclusion,
    spectrum_report,
)

COMMANDS = ("lattice", "scale", "similarity", "spectrum", "jay", "klmn", "pseudo")


class Verdicts:
    """Collects named pass/fail verdicts, each with the tolerance it used."""

    def __init__(self):
        self.items = {}

    def add(self, name, passed, tol, value=None, **extra):
        self.items[name] = {"verdict": "pass" if passed else "fail", "tol": tol, "value": value, **extra}

    @property
    def all_pass(self):
        return all(v["verdict"] == "pass" for v in self.items.values())


# ---------------------------------------------------------------- helpers


def _family(sc) -> RefinementFamily:
    if "family" in sc:
        try:
            return RefinementFamily.from_pairs(sc["family"])
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"bad family: {exc}") from exc
    return RefinementFamily.default(int(sc.get("levels", 3)))


def _grid(sc, default=(10.0, 401)) -> Grid:
    g = sc.get("grid", {})
    try:
        return Grid(float(g.get("L", default[0])), int(g.get("N", default[1])))
    except (TypeError, ValueError, AttributeError) as exc:
        raise ScenarioError(f"bad grid: {exc}") from exc


def _cz(z) -> list:
    return [float(np.real(z)), float(np.imag(z))]


# ---------------------------------------------------------------- commands


def run_lattice(sc, v: Verdicts, tables):
    ref = sc.get("metric", "x2")
    extremes = bool(sc.get("extremes", False))
    tol = float(sc.get("tol", 1e-10))
    if recipes.is_inline(ref):
        levels = [recipes.metric(ref)]
    else:
        levels = [recipes.metric(ref, g) for g in _family(sc)]
    lattices, worst_dual, bitwise = [], 0.0, True
    for k, g in enumerate(levels):
        lat = seven_lattice(g, extremes=extremes)
        lattices.append(lat)
        eye = identity_metric(g.dim)
        bitwise &= bool(np.array_equal(meet(eye, g).matrix, r_of(g).matrix))
        lhs = join(inverse(eye), inverse(g)).matrix
        rhs = inverse(meet(eye, g)).matrix
        worst_dual = max(worst_dual, operator_norm(lhs - rhs) / operator_norm(rhs))
    v.add("meet_equals_r_of", bitwise, 0.0)
    v.add("join_meet_duality", worst_dual <= tol, tol, worst_dual)
    results = {"levels": [lat.to_json() for lat in lattices]}
    if len(lattices) >= 3:
        growth = lattice_growth(lattices)
        results["growth"] = growth
        fwd_ok = all(row["forward"]["verdict"] == "bounded" for row in growth)
        v.add("forward_arrows_bounded", fwd_ok, growth[0]["forward"]["threshold"])
    return results


def run_scale(sc, v: Verdicts, tables):
    ref = sc.get("metric", "x2")
    vec = recipes.vector(sc.get("vector", "gaussian"))
    exps = tuple(float(a) for a in sc.get("exponents", DEFAULT_EXPONENTS))
    mode = sc.get("mode", "auto")
    family = _family(sc)
    diag = end_space_diagnostic(family, recipes.metric_builder(ref), vec, exps, mode=mode)
    tables["growth.csv"] = diag.to_csv()
    # pairing and monotonicity checks on the coarsest level
    grid = family.levels[0]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ScaleModeWarning)
        scale = build_scale(recipes.metric(ref, grid), exps, mode=mode)
    dual = duality_pair(scale, 1.0, samples=int(sc.get("samples", 100)), rng=0)
    v.add("duality_pairing", dual.passed, 0.0, dual.min_slack)
    xi = grid.sample(vec)
    norms = [scale.norm(a, xi) for a in scale.exponents]
    monotone = all(b >= a * (1 - 1e-12) for a, b in zip(norms, norms[1:]))
    v.add("scale_monotone", monotone, 1e-12)
    return {"mode": scale.mode, "diagnostic": diag.to_json(), "duality": dual.to_json()}


def _similarity_inline(sc, v: Verdicts, tables):
    c = sc["case"]

    def load(obj):
        return recipes.operator(obj if recipes.is_inline(obj) else {"matrix": obj})

    if not {"A", "B", "T"} <= set(c):
        raise ScenarioError("inline case needs A, B and T")
    mats = {k: load(c[k]) for k in ("A", "B", "T")}
    S = load(c["S"]) if "S" in c else None
    case = make_case(mats["A"], mats["B"], mats["T"], S)
    tol = float(sc.get("tol", 1e-10))
    kappa = float(sc.get("kappa_max", KAPPA_MAX))
    results = {"case": case.to_json()}
    try:
        verdict = classify(case, kappa_max=kappa, tol=tol)
        results["classification"] = verdict.to_json()
        v.add("intertwined", True, tol, case.semi_residual if S is not None else case.intertwine_residual)
    except (NotIntertwined, TNotInvertible) as exc:
        results["classification"] = {"class": "not-intertwined", "reason": str(exc)}
        v.add("intertwined", False, tol, case.intertwine_residual)
        return results
    if S is None:
        adj = adjoint_case(case)
        results["adjoint_residual"] = adj.intertwine_residual
        if case.A.shape == case.B.shape:
            ra, rb = spectrum_report(case.A), spectrum_report(case.B)
            inc = spectral_inclusion(ra, rb, tol=float(sc.get("spectral_tol", 1e-6)))
            results["spectrum_A"] = ra.to_json()
            results["spectrum_B"] = rb.to_json()
            results["inclusion"] = inc.to_json()
            v.add("point_spectrum_inclusion", inc.holds, inc.tol, inc.max_distance)
    return results


def _similarity_projector(sc, v: Verdicts, tables):
    grid = _grid(sc)
    phi = default_phi(grid)
    P, A_phi, T = recipes.case(sc.get("case", "projector_pair"), grid)
    tol = float(sc.get("tol", 1e-12))
    case = make_case(P, A_phi, T)
    v.add("intertwining", case.intertwine_residual <= tol, tol, case.intertwine_residual)
    verdict = classify(case, kappa_max=float(sc.get("kappa_max", KAPPA_MAX)), tol=tol)
    spec_tol = float(sc.get("spectral_tol", 1e-8))
    rp = spectrum_report(P, cluster_tol=spec_tol)
    ra = spectrum_report(A_phi, cluster_tol=spec_tol)
    tables["spectrum_A_phi.csv"] = ra.to_csv()
    ev = ra.eigenvalues
    near_one = int(np.sum(np.abs(ev - 1.0) <= spec_tol))
    near_zero = int(np.sum(np.abs(ev) <= spec_tol))
    v.add("spectrum_zero_one", near_one == 1 and near_zero == grid.N - 1, spec_tol,
          {"near_one": near_one, "near_zero": near_zero})
    rng = np.random.default_rng(int(sc.get("seed", 0)))
    g = rng.standard_normal(grid.N)
    lam = complex(sc.get("lambda", 2.0))
    f = np.linalg.solve(A_phi - lam * np.eye(grid.N), g)
    closed = projector_resolvent(grid, phi, g, lam)
    err = float(np.max(np.abs(f - closed)))
    res_tol = float(sc.get("resolvent_tol", 1e-10))
    v.add("resolvent_closed_form", err <= res_tol, res_tol, err)
    return {
        "grid": grid.to_json(),
        "case": case.to_json(),
        "classification": verdict.to_json(),
        "spectrum_P": rp.to_json(),
        "spectrum_A_phi": ra.to_json(),
        "inclusion_P_in_A": spectral_inclusion(rp, ra, tol=spec_tol).to_json(),
        "resolvent": {"lambda": _cz(lam), "max_abs_error": err},
    }


def _similarity_derivative(sc, v: Verdicts, tables):
    family = _family(sc)
    ref = sc.get("case", "derivative_pair")
    residuals, dxs, cases = [], [], []
    for grid in family:
        A, B, T = recipes.case(ref, grid)
        probe = grid.sample(lambda x: np.exp(-0.5 * x**2))
        chk = check_intertwining(A, B, T, probe=probe, weights=grid.weights, rows=grid.interior)
        residuals.append(chk.residual)
        dxs.append(grid.dx)
        cases.append(make_case(A, B, T))
    orders = [math.log(r0 / r1) / math.log(d0 / d1)
              for r0, r1, d0, d1 in zip(residuals, residuals[1:], dxs, dxs[1:])]
    lo, hi = sc.get("order_window", [1.7, 2.3])
    v.add("intertwining_order", all(lo <= o <= hi for o in orders), [lo, hi], orders)
    growth = cond_growth(cases)
    v.add("cond_T_growing", not growth.bounded, growth.threshold, growth.exponent)
    # spectral checks on the coarsest level
    grid = family.levels[0]
    A, B, T = recipes.case(ref, grid)
    eb = general_eigenvalues(B)
    re_max = float(np.max(np.abs(eb.real)))
    v.add("B_spectrum_imaginary", re_max <= 1e-10, 1e-10, re_max)
    A_s, _, _ = derivative_pair(grid, "spectral")
    h = 1.0 / (1.0 + grid.x**2)
    shadows = [abs(grid.inner(A_s @ grid.sample(bump(c, 1.5)), h)) for c in np.linspace(-6, 6, 20)]
    sh_tol = float(sc.get("shadow_tol", 1e-6))
    v.add("range_orthogonal_to_h", max(shadows) <= sh_tol, sh_tol, max(shadows))
    return {
        "family": family.to_json(),
        "probe_residuals": residuals,
        "observed_orders": orders,
        "cond_T": growth.to_json(),
        "B_max_abs_real": re_max,
        "range_shadow_max": max(shadows),
    }


def run_similarity(sc, v: Verdicts, tables):
    ref = sc.get("case", "projector_pair")
    if isinstance(ref, dict) and "A" in ref:
        return _similarity_inline(sc, v, tables)
    name = ref if isinstance(ref, str) else ref.get("name")
    recipes.get(name)
    if name == "projector_pair":
        return _similarity_projector(sc, v, tables)
    if name == "derivative_pair":
        return _similarity_derivative(sc, v, tables)
    raise ScenarioError(f"recipe {name!r} is not an operator triple")


def run_spectrum(sc, v: Verdicts, tables):
    ref = sc.get("matrix")
    if ref is None:
        raise ScenarioError("spectrum needs 'matrix'")
    M = recipes.operator(ref, None if recipes.is_inline(ref) else _grid(sc))
    rep = spectrum_report(M, cluster_tol=sc.get("cluster_tol"))
    tables["spectrum.csv"] = rep.to_csv()
    total = sum(m for _, m in rep.clusters)
    v.add("multiplicities_sum_to_dim", total == rep.dim, 0, total)
    return {"spectrum": rep.to_json()}


def run_jay(sc, v: Verdicts, tables):
    a_ref = sc.get("A", "rank_one")
    g_ref = sc.get("G", "one_plus_x2")
    family = _family(sc)
    grid_a = tuple(float(a) for a in sc.get("alpha_grid", DEFAULT_EXPONENTS))
    pairs = [(a, a) for a in grid_a] if sc.get("diagonal_only", True) else None
    jm = jay_scan(recipes.operator_builder(a_ref), recipes.metric_builder(g_ref), family, grid_a, pairs)
    tables["jay.csv"] = jm.to_csv()
    grid = family.levels[0]
    A = recipes.operator(a_ref, grid)
    G = recipes.metric(g_ref, grid)
    worst = 0.0
    for a in grid_a:
        for b in grid_a:
            n1 = representative_norm(A.conj().T, G, a, b)
            n2 = representative_norm(A, G, -b, -a)
            worst = max(worst, abs(n1 - n2) / max(n1, n2, np.finfo(float).tiny))
    tol = float(sc.get("tol", 1e-12))
    v.add("adjoint_norm_identity", worst <= tol, tol, worst)
    if np.allclose(A, A.conj().T, rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(A)))):
        v.add("s_set_symmetric", jm.s_symmetric(), 0, list(jm.s_set()))
    return {"jay": jm.to_json()}


def run_klmn(sc, v: Verdicts, tables):
    a_ref = sc.get("A", "one_plus_x2")
    g_ref = sc.get("G", "inv_one_plus_x2")
    lam = float(sc.get("lambda", -1.0))
    floor = float(sc.get("sv_floor", 0.5))
    family = _family(sc)
    cert = klmn_restrict(recipes.operator_builder(a_ref), recipes.metric_builder(g_ref), lam, family,
                         sv_floor=floor)
    v.add("certificate", cert.passed, floor, cert.min_singular_value)
    results = {"certificate": cert.to_json()}
    app = sc.get("applicability")
    if app is not None:
        f1 = [recipes.metric(app["G1"], g) for g in family]
        f2 = [recipes.metric(app["G2"], g) for g in family]
        res = klmn_applicability(f1, f2)
        results["applicability"] = res.to_json()
        if "expect" in app:
            v.add("applicability_expected", res.verdict == app["expect"], 0, res.verdict)
    return results


def run_pseudo(sc, v: Verdicts, tables):
    alpha = float(sc.get("alpha", 1.0))
    omega = float(sc.get("omega", 1.0))
    grid = _grid(sc, default=(10.0, 400))
    pair = pt_oscillator(alpha, omega, grid, scheme=sc.get("scheme", "central4"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        system = physical_hamiltonian(pair)
    tables["eigenvalues.csv"] = system.to_csv()
    v.add("quasi_hermitian", pair.valid, pair.tol, pair.dieudonne_residual)
    tol = float(sc.get("tol", 1e-8))
    v.add("real_spectrum", system.max_imag <= tol, tol, system.max_imag)
    k = grid.N // 3
    eh = general_eigenvalues(pair.H)
    d = float(np.max(np.abs(np.sort(eh.real)[:k] - system.lowest(k))))
    im_h = real_spectrum_check(pair.H, tol=tol, eigenvalues=eh)
    match_tol = float(sc.get("match_tol", 1e-6))
    v.add("spectra_H_h_match", d <= match_tol, match_tol, d)
    exact = omega * (np.arange(3) + 0.5)
    level_err = float(np.max(np.abs(system.lowest(3) - exact)))
    level_tol = float(sc.get("level_tol", 1e-3))
    v.add("oscillator_levels", level_err <= level_tol, level_tol, level_err)
    n_show = int(sc.get("show", 10))
    return {
        "alpha": alpha,
        "omega": omega,
        "grid": grid.to_json(),
        "system": system.to_json(max_eigenvalues=n_show),
        "lowest": [float(e) for e in system.lowest(n_show)],
        "H_max_abs_imag": im_h.max_imag,
    }


RUNNERS = {
    "lattice": run_lattice,
    "scale": run_scale,
    "similarity": run_similarity,
    "spectrum": run_spectrum,
    "jay": run_jay,
    "klmn": run_klmn,
    "pseudo": run_pseudo,
}

DEMOS = {
    "derivative_pair": ("D - 2x/(1+x^2) against D: second-order intertwining, imaginary spectrum of D",
                        {"command": "similarity", "case": "derivative_pair"}),
    "exp_ax": ("KLMN with G1 = exp(x) against G2 = (1+x^2)^-1: applies without restriction",
               {"command": "klmn", "applicability": {"G1": {"name": "exp_ax", "params": {"a": 1.0}},
                                                     "G2": "inv_one_plus_x2",
                                                     "expect": "applies-unconditionally"}}),
    "projector_pair": ("rank-one projector against A_phi: both spectra equal {0, 1}",
                       {"command": "similarity", "case": "projector_pair"}),
    "pt_oscillator": ("PT-symmetric oscillator: real spectrum 1/2, 3/2, 5/2, ...",
                      {"command": "pseudo", "alpha": 1.0, "omega": 1.0}),
    "sobolev": ("scale generated by (I - D2)^(1/2): Gaussian norms converge",
                {"command": "scale", "metric": "sobolev", "vector": "gaussian",
                 "family": [[5, 101], [7, 201], [10, 401]]}),
    "x2": ("seven-space lattice of G = x^2: weights and growing reversed arrows",
           {"command": "lattice", "metric": "x2"}),
}


def list_demos() -> list[str]:
    return [f"{name}\t{DEMOS[name][0]}" for name in sorted(DEMOS)]


# ---------------------------------------------------------------- output


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(x) for k, x in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isfinite(f):
            return f
        return "inf" if f > 0 else ("-inf" if f < 0 else "nan")
    if isinstance(obj, (complex, np.complexfloating)):
        return _jsonable([obj.real, obj.imag])
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def atomic_write(path: Path, text: str):
    """Write through a temporary file in the same directory, then rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_report(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _check_tolerances(scenario: dict) -> None:
    for key, value in scenario.items():
        if key == "tol" or key.endswith("_tol"):
            if value is None and key == "cluster_tol":
                continue
            try:
                ok = float(value) > 0
            except (TypeError, ValueError):
                ok = False
            if not ok:
                raise ScenarioError(f"{key} must be a positive number, got {value!r}")


def execute(scenario: dict, out: Path) -> int:
    """Run one scenario, write the report and tables, return the exit code."""
    start = time.perf_counter()
    command = scenario.get("command")
    tables: dict[str, str] = {}
    verdicts = Verdicts()
    error = None
    try:
        if command not in RUNNERS:
            raise ScenarioError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
        _check_tolerances(scenario)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ScaleModeWarning)
            results = RUNNERS[command](scenario, verdicts, tables)
        code = 0 if verdicts.all_pass else 1
    except (MetricOpsError, KeyError, TypeError, ValueError) as exc:
        results = None
        error = f"{type(exc).__name__}: {exc}"
        code = 2
    report = {
        "command": command,
        "scenario": scenario,
        "results": results,
        "verdicts": verdicts.items,
        "status": {0: "pass", 1: "fail", 2: "error"}[code],
        "error": error,
        "provenance": {
            "tool": "metricops",
            "version": __version__,
            "kernel_backend": kernels.BACKEND,
            "tolerances": {k: x["tol"] for k, x in verdicts.items.items()},
            "wall_time_s": time.perf_counter() - start,
        },
    }
    atomic_write(out / "report.json", dump_report(report))
    for name, text in sorted(tables.items()):
        atomic_write(out / name, text)
    if error:
        print(f"error: {error}", file=sys.stderr)
    return code


def _load_scenario(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed scenario JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    return data


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario JSON file")
    common.add_argument("--out", default="metricops-out", help="output directory (default: %(default)s)")
    common.add_argument("--tol", type=float, help="override the command's main tolerance")
    common.add_argument("--levels", type=int, help="number of refinement levels")

    parser = argparse.ArgumentParser(prog="metricops", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=f"run a {name} scenario")
        if name == "pseudo":
            p.add_argument("--alpha", type=float)
            p.add_argument("--omega", type=float)
    demo = sub.add_parser("demo", parents=[common], help="run a built-in example")
    demo.add_argument("name")
    sub.add_parser("list-demos", help="list built-in examples")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "list-demos":
        print("\n".join(list_demos()))
        return 0
    try:
        if args.command == "demo":
            if args.name not in DEMOS:
                raise ScenarioError(f"unknown demo {args.name!r}; try list-demos")
            scenario = json.loads(json.dumps(DEMOS[args.name][1]))
            if args.scenario:
                scenario.update(_load_scenario(args.scenario))
        else:
            scenario = _load_scenario(args.scenario) if args.scenario else {}
            scenario.setdefault("command", args.command)
            if scenario["command"] != args.command:
                raise ScenarioError(f"scenario is for {scenario['command']!r}, not {args.command!r}")
        if args.tol is not None:
            if not args.tol > 0:
                raise ScenarioError("--tol must be positive")
            scenario["tol"] = args.tol
        if args.levels is not None:
            scenario["levels"] = args.levels
        for key in ("alpha", "omega"):
            if getattr(args, key, None) is not None:
                scenario[key] = getattr(args, key)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return execute(scenario, Path(args.out))


if __name__ == "__main__":
    sys.exit(main())
