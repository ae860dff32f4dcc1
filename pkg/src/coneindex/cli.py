"""Command-line front end.

Exit status: 0 on success, 1 when an internal validator fails, 2 on bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Callable

from . import constants
from .fredholm import (
    MSIModel,
    admissible_tau_range,
    classify_generic,
    cone_model,
    dual_weight,
    duality_check,
    effective_morse_index,
    fredholm_index,
    simons_validators,
    sweep,
)
from .geometry import (
    area_thresholds,
    density_bound,
    is_strongly_isolated_compatible,
    minimality_study,
    sphere_area,
)
from .growth import (
    GrowthField,
    GrowthParams,
    check_gap,
    estimate_asymptotic_rate,
    find_K0,
    k0_certificate,
    radial_ode_solve,
    three_circle_residual,
    three_circle_terms,
)
from .indicial import index_contribution_test, indicial_roots
from .serialize import (
    dumps,
    gamma_report,
    index_report,
    load_json,
    load_msi,
    load_spectrum,
    spectrum_to_dict,
    to_plain,
)
from .spectra import clifford_torus_spectrum, morse_index

COMMANDS = ("spectrum", "indicial", "index", "sweep", "three-circle", "k0", "ode", "rate",
            "thresholds", "veronese", "football")
FORMATS = ("json", "csv", "table")
VERONESE_RESIDUAL_TOL = 1e-3


@dataclass
class RunConfig:
    command: str
    input_path: str | None = None
    output_format: str = "json"
    tolerances: dict[str, float] = field(default_factory=lambda: dict(constants.TOLERANCES))

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.output_format not in FORMATS:
            raise ValueError(f"unknown output format {self.output_format!r}")


def load_config(path: str | None) -> dict[str, float]:
    """Tolerance overrides from a JSON file ``{"tolerances": {...}}``."""
    if path is None:
        return constants.merged_tolerances()
    data = load_json(path)
    if not isinstance(data, dict):
        raise ValueError("config must be a JSON object")
    unknown = set(data) - {"tolerances"}
    if unknown:
        raise ValueError(f"unknown config keys {sorted(unknown)}")
    try:
        return constants.merged_tolerances(data.get("tolerances", {}))
    except KeyError as exc:
        raise ValueError(exc.args[0]) from None


# --------------------------------------------------------------------------
# pipelines

FOOTBALL_CUTOFF = 10
FOOTBALL_INTERVALS = ((-2, -1), (-1, -0.5), (-0.5, 0), (0, 1), (1, 2))


def run_football(tolerances: dict[str, float] | None = None) -> dict:
    """Reproduce the Clifford-football index computation end to end."""
    tol = constants.merged_tolerances(tolerances)
    link = clifford_torus_spectrum(FOOTBALL_CUTOFF)
    cone = cone_model(link, link_area=2 * math.pi**2, label="clifford",
                      log_tol=tol["log_case"], merge_tol=tol["root_merge"])
    msi = MSIModel(N=4, n=3, cones=(cone, cone))
    roots = indicial_roots(link, log_tol=tol["log_case"])
    asym = cone.indicial
    lo, hi = asym.gamma_star_low, asym.gamma_star_high
    gamma_list = [[v, m] for v, m in asym.entries if lo <= v <= hi]

    def index_at(t):
        return fredholm_index(msi, t, root_tol=tol["tau_on_root"])

    intervals = []
    for a, b in FOOTBALL_INTERVALS:
        rep = index_at((a + b) / 2)
        intervals.append({"interval": [a, b], "tau": (a + b) / 2, "index": rep.index,
                          "hat_index": rep.hat_index, "provenance": rep.provenance})
    jumps = [x["index"] - y["index"] for x, y in zip(intervals, intervals[1:])]
    duality = []
    for t in (0.5, 0.9, 1.5, -0.25):
        duality.append({"tau": t, "dual_tau": dual_weight(t, msi.n),
                        "ok": duality_check(msi, t, root_tol=tol["tau_on_root"])})
    anchored = index_at(0.5)
    upper = index_at(1.5)
    rng = admissible_tau_range(msi)
    simons = simons_validators(cone)
    density = density_bound(2 * math.pi**2, 3)
    thresholds = area_thresholds()

    contributions = [index_contribution_test(r) for r in roots]
    validators = {
        "spectrum_head": [(e.value, e.multiplicity) for e in link.eigenvalues[:3]]
        == [(-4, 1), (-2, 4), (0, 4)],
        "morse_index_5": morse_index(link) == 5,
        "gamma_minus_zero": asym.gamma_minus_of_cone == 0,
        "admissible_range": (rng.lo, rng.hi) == (0, 1),
        "index_minus_10": anchored.index == -10,
        "index_minus_18_above_1": upper.index == -18,
        "hat_index_minus_2": anchored.hat_index == -2,
        "interval_sequence": [x["index"] for x in intervals] == [10, 2, -2, -10, -18],
        "duality": all(d["ok"] for d in duality),
        "simons": all(ok for _, ok in simons),
        "index_contribution_count": sum(r.eigen_multiplicity for r, c in zip(roots, contributions) if c) == 5,
        "density_pi_over_2": math.isclose(density, math.pi / 2, rel_tol=1e-12),
        "football_area_below_threshold": thresholds.football_area < thresholds.threshold,
    }
    report = {
        "N": msi.N,
        "n": msi.n,
        "Q": msi.Q,
        "spectrum": spectrum_to_dict(link),
        "morse_index": morse_index(link),
        "effective_morse_index": effective_morse_index(cone),
        "roots": [
            {"lambda": r.lam, "multiplicity": r.eigen_multiplicity, "mu": r.mu,
             "gamma_plus": [r.re_plus, r.imag], "gamma_minus": [r.re_minus, -r.imag],
             "case": r.case_tag.value, "index_contribution": c}
            for r, c in zip(roots, contributions)
        ],
        "gamma_list": gamma_list,
        "asymptotic_spectrum": gamma_report(asym),
        "admissible_tau": [rng.lo, rng.hi],
        "index": anchored.index,
        "hat_index": anchored.hat_index,
        "per_cone_I": list(anchored.per_cone_I),
        "index_on_1_2": upper.index,
        "intervals": intervals,
        "jumps": jumps,
        "duality": duality,
        "classification": classify_generic(msi).value,
        "simons": [[name, ok] for name, ok in simons],
        "density": density,
        "strongly_isolated_compatible": is_strongly_isolated_compatible(density),
        "validators": validators,
        "ok": all(validators.values()),
    }
    return report


def run_sweep(msi_path: str, tau_lo: float, tau_hi: float, steps: int,
              tolerances: dict[str, float] | None = None) -> str:
    """CSV of ``tau, index, hat_index, interval_id, flag`` over a weight grid."""
    tol = constants.merged_tolerances(tolerances)
    msi = load_msi(msi_path, tol)
    rows = sweep(msi, tau_lo, tau_hi, steps, root_tol=tol["tau_on_root"],
                 nudge=tol["sweep_nudge"])
    return rows_to_csv(rows, ["tau", "index", "hat_index", "interval_id", "flag"])


def rows_to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        out = []
        for c in columns:
            v = row.get(c)
            if v is None:
                out.append("")
            elif isinstance(v, float):
                out.append(format(v, ".17g"))
            else:
                out.append(str(v))
        w.writerow(out)
    return buf.getvalue()


# --------------------------------------------------------------------------
# rendering


def _flatten(obj: Any, prefix: str = "") -> list[tuple[str, Any]]:
    obj = to_plain(obj)
    if isinstance(obj, dict):
        out = []
        for k in sorted(obj):
            out += _flatten(obj[k], f"{prefix}.{k}" if prefix else k)
        return out
    if isinstance(obj, list) and any(isinstance(x, (dict, list)) for x in obj):
        out = []
        for i, x in enumerate(obj):
            out += _flatten(x, f"{prefix}[{i}]")
        return out
    return [(prefix, obj)]


def render(payload: Any, fmt: str) -> str:
    if fmt == "json":
        return dumps(payload)
    pairs = _flatten(payload)
    if fmt == "csv":
        return rows_to_csv([{"key": k, "value": json.dumps(v) if isinstance(v, list) else v}
                            for k, v in pairs], ["key", "value"])
    width = max((len(k) for k, _ in pairs), default=0)
    return "".join(f"{k:<{width}}  {v}\n" for k, v in pairs)


# --------------------------------------------------------------------------
# command handlers; each returns (payload, ok, preformatted-or-None)


def _spectrum_from_args(args):
    if args.input:
        return load_spectrum(args.input)
    return clifford_torus_spectrum(args.cutoff)


def cmd_spectrum(args, tol):
    spec = _spectrum_from_args(args)
    payload = spectrum_to_dict(spec)
    payload["link_dim"] = spec.link_dim
    payload["ambient_sphere_dim"] = spec.ambient_sphere_dim
    payload["morse_index"] = morse_index(spec) if spec.cutoff >= 0 else None
    if args.output == "csv":
        rows = [{"value": float(e.value), "multiplicity": e.multiplicity} for e in spec.eigenvalues]
        return payload, True, rows_to_csv(rows, ["value", "multiplicity"])
    return payload, True, None


def cmd_indicial(args, tol):
    spec = _spectrum_from_args(args)
    cone = cone_model(spec, log_tol=tol["log_case"], merge_tol=tol["root_merge"])
    roots = indicial_roots(spec, log_tol=tol["log_case"])
    payload = gamma_report(cone.indicial)
    payload["roots"] = [
        {"lambda": r.lam, "multiplicity": r.eigen_multiplicity, "mu": r.mu,
         "gamma_plus": [r.re_plus, r.imag], "gamma_minus": [r.re_minus, -r.imag],
         "case": r.case_tag.value, "near_log": r.near_log}
        for r in roots
    ]
    return payload, True, None


def cmd_index(args, tol):
    msi = load_msi(args.input, tol)
    tau = args.tau if args.tau is not None else msi.tau
    if tau is None:
        raise ValueError("no weight given: pass --tau or set \"tau\" in the model file")
    rep = fredholm_index(msi, tau, root_tol=tol["tau_on_root"])
    payload = index_report(rep)
    rng = admissible_tau_range(msi)
    payload["admissible_range"] = [rng.lo, rng.hi]
    payload["classification"] = classify_generic(msi).value
    payload["Q"] = msi.Q
    payload["augmentation_dim"] = msi.augmentation_dim
    ok = True
    try:
        payload["duality"] = duality_check(msi, tau, root_tol=tol["tau_on_root"])
        ok = payload["duality"]
    except ValueError as exc:
        payload["duality"] = None
        payload["duality_skipped"] = str(exc)
    payload["simons"] = [[name for name, good in simons_validators(c) if not good]
                         for c in msi.cones]
    if args.sweep:
        lo, hi, steps = args.sweep
        rows = sweep(msi, lo, hi, int(steps), root_tol=tol["tau_on_root"],
                     nudge=tol["sweep_nudge"])
        text = rows_to_csv(rows, ["tau", "index", "hat_index", "interval_id", "flag"])
        if args.csv:
            with open(args.csv, "w") as fh:
                fh.write(text)
        else:
            payload["sweep"] = rows
    return payload, ok, None


def cmd_sweep(args, tol):
    text = run_sweep(args.input, args.lo, args.hi, args.steps, tol)
    if args.output == "json":
        rows = list(csv.DictReader(io.StringIO(text)))
        return {"rows": rows}, True, None
    return None, True, text


def _parse_mode(text: str) -> tuple[float, complex, complex]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"mode must be MU:C_PLUS:C_MINUS, got {text!r}")
    mu = float(parts[0])
    cp, cm = (complex(p.replace("i", "j")) for p in parts[1:])
    if cp.imag == 0 and cm.imag == 0:
        return mu, cp.real, cm.real
    return mu, cp, cm


def cmd_three_circle(args, tol):
    field_ = GrowthField(args.n, [_parse_mode(m) for m in args.mode])
    K0 = find_K0(args.sigma)
    K = args.K if args.K is not None else K0
    params = GrowthParams(args.gamma, K, args.sigma)
    gap = check_gap(field_, params)
    res = three_circle_residual(field_, params)
    terms = three_circle_terms(field_, params)
    scale = terms[0] + 2 * terms[1] + terms[2]
    payload = {"residual": res, "terms": list(terms), "scale": scale, "K": K, "K0": K0,
               "gap": gap, "nonnegative": res >= -1e-12 * scale}
    return payload, payload["nonnegative"], None


def cmd_k0(args, tol):
    rows = []
    for s in args.sigma:
        rows.append({"sigma": s, "K0": find_K0(s), "certificate": k0_certificate(s)})
    ks = [r["K0"] for r in rows]
    ok = all(k > 2 for k in ks)
    return {"results": rows}, ok, None


def cmd_ode(args, tol):
    start = args.r_hi if args.start == "hi" else args.r_lo
    tr = radial_ode_solve(args.mu, args.n, (args.r_lo, args.r_hi), (args.f0, args.df0),
                          start=start, steps=args.steps)
    if args.output == "json":
        return {"r": tr.r, "f": tr.f, "df_dr": tr.df}, True, None
    return None, True, tr.to_csv()


def cmd_rate(args, tol):
    data = load_json(args.input)
    if not isinstance(data, dict):
        raise ValueError("rate input must be a JSON object")
    missing = {"n", "samples"} - set(data)
    if missing:
        raise ValueError(f"rate input is missing {sorted(missing)}")
    unknown = set(data) - {"n", "samples", "density_weighted"}
    if unknown:
        raise ValueError(f"unknown rate-input keys {sorted(unknown)}")
    rate = estimate_asymptotic_rate([tuple(x) for x in data["samples"]], int(data["n"]),
                                    density_weighted=bool(data.get("density_weighted", True)))
    return {"asymptotic_rate": rate, "samples": len(data["samples"])}, True, None


def cmd_thresholds(args, tol):
    t = area_thresholds()
    payload = {
        "A_3": sphere_area(3),
        "football_area": t.football_area,
        "football_area_printed": t.printed_football_area,
        "football_print_discrepancy": t.football_print_discrepancy,
        "football_print_mismatch": t.football_print_mismatch,
        "threshold": t.threshold,
        "threshold_printed": t.printed_threshold,
        "threshold_print_mismatch": t.threshold_print_mismatch,
        "two_A3": t.two_A3,
        "football_density": t.football_area / sphere_area(3),
        "irregular_density_floor": 2.0,
    }
    return payload, True, None


def cmd_veronese(args, tol):
    st = minimality_study(args.field, args.grid, perturbation=args.perturbation)
    payload = {"field": args.field, "grid": args.grid, "residual": st.residual,
               "residual_coarse": st.residual_coarse, "residual_fine": st.residual_fine,
               "order": st.order, "norm_max_dev": st.norm_max_dev,
               "perturbation": args.perturbation}
    # an unperturbed image must look minimal; a perturbed one must not
    detected = st.residual < VERONESE_RESIDUAL_TOL
    if args.perturbation:
        detected = not detected
    payload["validators"] = {"on_sphere": st.norm_max_dev < 1e-12, "residual": detected}
    return payload, all(payload["validators"].values()), None


def cmd_football(args, tol):
    report = run_football(tol)
    return report, report["ok"], None


HANDLERS: dict[str, Callable] = {
    "spectrum": cmd_spectrum,
    "indicial": cmd_indicial,
    "index": cmd_index,
    "sweep": cmd_sweep,
    "three-circle": cmd_three_circle,
    "k0": cmd_k0,
    "ode": cmd_ode,
    "rate": cmd_rate,
    "thresholds": cmd_thresholds,
    "veronese": cmd_veronese,
    "football": cmd_football,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=FORMATS, default="json")
    common.add_argument("--config", help="JSON file with tolerance overrides")

    p = argparse.ArgumentParser(prog="coneindex", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def spectrum_source(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--input", help="spectrum JSON file")
        g.add_argument("--catalog", choices=["clifford"], default="clifford")
        sp.add_argument("--cutoff", type=float, default=FOOTBALL_CUTOFF,
                        help="catalog cutoff (eigenvalues strictly below are listed)")

    sp = sub.add_parser("spectrum", parents=[common], help="print a link spectrum")
    spectrum_source(sp)
    sp = sub.add_parser("indicial", parents=[common], help="indicial roots and Gamma(C)")
    spectrum_source(sp)

    sp = sub.add_parser("index", parents=[common], help="Fredholm index of an MSI model")
    sp.add_argument("--input", required=True)
    sp.add_argument("--tau", type=float)
    sp.add_argument("--sweep", nargs=3, type=float, metavar=("LO", "HI", "STEPS"))
    sp.add_argument("--csv", help="write the sweep CSV here instead of embedding it")

    sp = sub.add_parser("sweep", parents=[common], help="index over a weight grid (CSV)")
    sp.add_argument("--input", required=True)
    sp.add_argument("--lo", type=float, required=True)
    sp.add_argument("--hi", type=float, required=True)
    sp.add_argument("--steps", type=int, required=True)

    sp = sub.add_parser("three-circle", parents=[common], help="three-circle residual")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--K", type=float, help="defaults to K0(sigma)")
    sp.add_argument("--mode", action="append", required=True, metavar="MU:C_PLUS:C_MINUS")

    sp = sub.add_parser("k0", parents=[common], help="empirical K0(sigma)")
    sp.add_argument("--sigma", type=float, action="append", required=True)

    sp = sub.add_parser("ode", parents=[common], help="radial Euler ODE trajectory")
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r-lo", type=float, required=True)
    sp.add_argument("--r-hi", type=float, required=True)
    sp.add_argument("--f0", type=float, required=True)
    sp.add_argument("--df0", type=float, required=True)
    sp.add_argument("--start", choices=["lo", "hi"], default="lo")
    sp.add_argument("--steps", type=int)

    sp = sub.add_parser("rate", parents=[common], help="asymptotic-rate estimate")
    sp.add_argument("--input", required=True)

    sub.add_parser("thresholds", parents=[common], help="area and density thresholds")

    sp = sub.add_parser("veronese", parents=[common], help="Veronese minimality check")
    sp.add_argument("--field", choices=["R", "C", "H"], default="R")
    sp.add_argument("--grid", type=int, default=64)
    sp.add_argument("--perturbation", type=float, default=0.0)

    sub.add_parser("football", parents=[common], help="Clifford football report")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = load_config(args.config)
        RunConfig(args.command, getattr(args, "input", None), args.output, tol)
        payload, ok, text = HANDLERS[args.command](args, tol)
    except (ValueError, OSError, OverflowError, ArithmeticError) as exc:
        print(f"coneindex: error: {exc}", file=sys.stderr)
        return 2
    if text is None:
        text = render(payload, args.output)
    sys.stdout.write(text)
    if not ok:
        print("coneindex: validator failure", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
