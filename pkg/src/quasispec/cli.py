"""Command-line front end.

    quasispec <command> --config run.json --out results/ [--threads N] [--override k=v ...]

Exit codes: 0 on success, 2 for configuration errors, 3 for numerical failures.
"""

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .config import COMMANDS, PRESETS, PROBLEM_DEFAULTS, build_config, load_config
from .contfrac import RationalApproximant, cf_elements, convergents
from .errors import ConfigError, NotEnoughElements, QuasispecError
from .interface import (
    InterfaceProblem,
    certification_gaps,
    compare_decay,
    find_interface_modes,
)
from .io import (
    write_band_diagram,
    write_csv,
    write_gaps,
    write_gnuplot_bands,
    write_gnuplot_xy,
    write_json,
    write_spectrum,
)
from .potentials import field_from_config, parse_theta, quasiperiodic_slice, reflect
from .supercell import band_diagram, convergence_study, extract_gaps
from .superspace import (
    LiftedProblem,
    PlaneWaveProblem,
    check_weight,
    default_alphas,
    fd_alpha_sweep,
    fd_mode,
    pollution_counts_pwe,
    superspace_spectrum_fd,
)
from .tiling import (
    SubstitutionRule,
    TilingWord,
    count_vector,
    generations_with_parity,
    is_primitive,
    perron_frobenius,
    substitute,
    substitution_matrix,
)
from .transfermap import decay_rate_estimate, scan_super_band_gaps

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
MAX_LISTED_WORD = 89


def make_field(problem):
    theta = parse_theta(problem["theta"])
    return field_from_config(problem["field"], theta, tuple(problem["offset"]))


def approximants(theta, indices):
    """Convergents of `theta` at the given indices."""
    if isinstance(theta, RationalApproximant):
        theta = Fraction(theta.p, theta.q)
    count = max(indices) + 1
    try:
        conv = convergents(cf_elements(theta, count + 1), count)
    except NotEnoughElements as exc:
        raise ConfigError(f"theta {theta} has fewer than {count} convergents") from exc
    return [conv[i] for i in indices]


def tiles_of(problem):
    return {k: (float(v[0]), float(v[1])) for k, v in problem["tiles"].items()}


def _meta(cfg, extra=None):
    meta = cfg.meta()
    meta["version"] = __version__
    meta.update(extra or {})
    return meta


def run_bands(cfg, out, threads):
    p, d = cfg.problem, cfg.discretization
    field_ = make_field(p)
    theta = parse_theta(p["theta"])
    approx = theta if isinstance(theta, RationalApproximant) else approximants(
        theta, [d["level"]])[0]
    bd = band_diagram(field_, approx, d["alpha_count"], d["n_bands"], d["points_per_unit"],
                      p["generalized"], threads)
    gaps = extract_gaps(bd, tuple(d["window"]))
    write_band_diagram(out / "bands.csv", bd)
    write_gaps(out / "gaps.json", gaps)
    write_gnuplot_bands(out / "bands.gp", "bands.csv", bd.n_bands, f"theta = {approx}")
    return {"approximant": str(approx), "period": bd.period, "h": bd.h}


def run_superspace(cfg, out, threads):
    p, d = cfg.problem, cfg.discretization
    field_ = make_field(p)
    base = LiftedProblem(field_, d["alpha"], d["beta"], d["h"], p["generalized"])
    alphas = default_alphas(d["alpha_count"])
    sweep = fd_alpha_sweep(field_, alphas, d["beta"], d["h"], p["generalized"], d["n_bands"],
                           threads)
    header = ["alpha"] + [f"band_{b}" for b in range(sweep.shape[1])]
    write_csv(out / "superspace_bands.csv", header,
              ([a] + list(r) for a, r in zip(alphas, sweep)))
    write_gnuplot_bands(out / "superspace_bands.gp", "superspace_bands.csv", sweep.shape[1],
                        "lifted finite differences")
    write_spectrum(out / "spectrum.csv", superspace_spectrum_fd(base, d["n_bands"]))
    if d["mode_target"] is not None:
        mode = fd_mode(base, float(d["mode_target"]))
        rows = ((mode.x[i], mode.y[j], mode.u[i, j].real, mode.u[i, j].imag)
                for i in range(mode.u.shape[0]) for j in range(mode.u.shape[1]))
        write_csv(out / "mode.csv", ["x", "y", "re_u", "im_u"], rows)
    return {"theta_mesh": base.theta_mesh, "theta_target": base.theta_target,
            "mesh": [base.n, base.m]}


def _certified_gaps(field_, theta, d, generalized):
    levels = approximants(theta, d["levels"])
    return certification_gaps(field_, levels, tuple(d["window"]), generalized,
                              d["points_per_unit"]), levels


def run_pwe(cfg, out, threads):
    p, d = cfg.problem, cfg.discretization
    field_ = make_field(p)
    gaps, levels = _certified_gaps(field_, parse_theta(p["theta"]), d, p["generalized"])
    alphas = default_alphas(d["alpha_count"])
    check_weight(PlaneWaveProblem(field_, 0.0, d["beta"], d["N_pw"], p["generalized"]))
    sweep = fd_alpha_sweep(field_, alphas, d["beta"], d["h"], p["generalized"], None, threads)
    margin = d["margin"]
    per_alpha = []
    for a, fd in zip(alphas, sweep):
        pw = pollution_counts_pwe(
            PlaneWaveProblem(field_, a, d["beta"], d["N_pw"], p["generalized"]), gaps, margin)
        fdc = [int(np.count_nonzero((fd > lo + margin) & (fd < hi - margin)))
               for lo, hi in gaps]
        per_alpha.append({"alpha": a, "fd_counts": fdc, "pwe_counts": pw})
    report = []
    for g, (lo, hi) in enumerate(gaps):
        report.append({"lo": lo, "hi": hi,
                       "fd_count": max(r["fd_counts"][g] for r in per_alpha),
                       "pwe_count": max(r["pwe_counts"][g] for r in per_alpha)})
    write_json(out / "pollution.json", {"gaps": report, "per_alpha": per_alpha,
                                        "margin": margin})
    write_gaps(out / "gaps.json", gaps)
    return {"certification_levels": [str(a) for a in levels],
            "theta_mesh": LiftedProblem(field_, h=d["h"]).theta_mesh}


def run_trace_scan(cfg, out, threads):
    p, d = cfg.problem, cfg.discretization
    tiles = tiles_of(p)
    scan = scan_super_band_gaps(tiles, tuple(d["omega_window"]), d["resolution"], d["eps"],
                                d["n_max"])
    header = ["omega"] + [f"x{n}" for n in range(1, d["n_max"] + 1)] + ["certified", "N"]
    rows = ([w] + list(x) + [bool(c), int(n)] for w, x, c, n in
            zip(scan.omegas, scan.traces, scan.certified, scan.indices))
    write_csv(out / "scan.csv", header, rows)
    write_json(out / "gaps.json", [{"lo": g.lo, "hi": g.hi, "N": g.N,
                                    "criterion": g.criterion} for g in scan.gaps])
    write_gnuplot_xy(out / "scan.gp", "scan.csv", "certified frequencies",
                     1, d["n_max"] + 2, "omega", "certified")
    speeds = {v[1] for v in tiles.values()}
    return {"homogeneous": len(speeds) == 1,
            "tiles_are_defaults": p["tiles"] == PROBLEM_DEFAULTS["tiles"]}


def run_interface(cfg, out, threads):
    p, d = cfg.problem, cfg.discretization
    field_ = make_field(p)
    theta = parse_theta(p["theta"])
    gaps, levels = _certified_gaps(field_, theta, d, p["generalized"])
    coef = reflect(quasiperiodic_slice(field_))
    prob = InterfaceProblem(coef, d["L"], d["h"], p["boundary"], p["generalized"])
    modes = find_interface_modes(prob, gaps)
    decay_levels = approximants(theta, d["decay_levels"])
    summary = []
    for k, m in enumerate(modes):
        est = decay_rate_estimate(field_, m.eigenvalue, decay_levels, p["generalized"], d["h"])
        summary.append({"eigenvalue": m.eigenvalue, "gap": list(m.gap), "margin": m.margin,
                        "fitted_rate": m.rate, "rate_left": m.rate_left,
                        "rate_right": m.rate_right, "estimated_rate": est,
                        "deviation": compare_decay(m, est), "parity": m.parity,
                        "file": f"mode_{k}.csv"})
        write_csv(out / f"mode_{k}.csv", ["x", "u"], zip(m.x, m.u))
        write_gnuplot_xy(out / f"mode_{k}.gp", f"mode_{k}.csv", f"lambda = {m.eigenvalue:.4f}")
    write_json(out / "summary.json", summary)
    write_gaps(out / "gaps.json", gaps)
    return {"certification_levels": [str(a) for a in levels],
            "decay_levels": [str(a) for a in decay_levels]}


def run_convergence(cfg, out, threads):
    p, d = cfg.problem, cfg.discretization
    field_ = make_field(p)
    levels = approximants(parse_theta(p["theta"]), d["levels"])
    table = convergence_study(field_, levels, tuple(d["window"]), d["alpha_count"],
                              d["points_per_unit"], p["generalized"], threads)
    write_csv(out / "convergence.csv", ["q", "distance"],
              zip(table.denominators, table.distances))
    write_json(out / "convergence.json", {"constant": table.constant, "slope": table.slope,
                                          "levels": [str(a) for a in levels]})
    write_gnuplot_xy(out / "convergence.gp", "convergence.csv", "Hausdorff distance",
                     xlabel="q", ylabel="d_H")
    return {}


def run_tiling_info(cfg, out, threads):
    p, d = cfg.problem, cfg.discretization
    rule = SubstitutionRule.from_config(p["rule"])
    m = substitution_matrix(rule)
    seed = TilingWord(rule.alphabet[0])
    info = {"alphabet": list(rule.alphabet), "matrix": m.tolist(),
            "primitive": is_primitive(m)}
    if info["primitive"]:
        pf, pisot = perron_frobenius(m)
        info.update({"perron_frobenius": pf, "pisot": pisot})
    gens = []
    for n in generations_with_parity(d["generations"], d["generation_parity"]):
        counts = count_vector(rule, seed, n)
        entry = {"generation": n, "counts": counts.tolist(), "length": int(counts.sum())}
        if entry["length"] <= MAX_LISTED_WORD:
            entry["word"] = substitute(rule, seed, n).letters
        gens.append(entry)
    info["generations"] = gens
    info["generation_parity"] = d["generation_parity"]
    write_json(out / "tiling.json", info)
    return {}


RUNNERS = {
    "bands": run_bands,
    "superspace": run_superspace,
    "pwe": run_pwe,
    "trace-scan": run_trace_scan,
    "interface": run_interface,
    "convergence": run_convergence,
    "tiling-info": run_tiling_info,
}


def run(cfg, threads=1):
    """Execute a validated RunConfig; returns the exit code."""
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    extra = RUNNERS[cfg.command](cfg, out, threads)
    write_json(out / "meta.json", _meta(cfg, extra))
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="quasispec", description=__doc__.splitlines()[0])
    ap.add_argument("command", nargs="?", choices=COMMANDS,
                    help="overrides the command stored in the config")
    ap.add_argument("--config", help="JSON run configuration")
    ap.add_argument("--preset", choices=sorted(PRESETS), help="start from a built-in problem")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                    help="dotted config key, JSON value; may repeat")
    ap.add_argument("--version", action="version", version=__version__)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = list(args.override)
    if args.command:
        overrides.insert(0, f"command={args.command}")
    if args.preset:
        overrides.insert(0, f"preset={args.preset}")
    if args.threads < 1:
        print("error: ConfigError: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.config:
            cfg = load_config(args.config, overrides, args.out)
        else:
            cfg = build_config({}, overrides, args.out)
        return run(cfg, args.threads)
    except ConfigError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuasispecError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
