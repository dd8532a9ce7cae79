"""Command-line driver: ``maggaps <command> [config] [options]``.

Exit codes: 0 all enabled checks pass, 2 some check failed, 1 configuration
or numerical error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import gap_analysis as ga
from .config import ExperimentConfig, load_config
from .errors import MagGapsError
from .experiment import Experiment
from .grid import SupercellGrid
from .group_cocycle import GaugeData, identity_defects
from .model_operator import build_wells, enumerate_spectrum
from .reference_models import comtet_houston, harper_gap_table, harper_spectrum
from .spectral_engine import DENSE_MAX

DEFAULT_SEED = 42
IDENTITY_TOL = 1e-12


class _Out:
    def __init__(self, quiet: bool):
        self.quiet = quiet

    def __call__(self, *args):
        if not self.quiet:
            print(*args)


def _tag(mu: float) -> str:
    return f"{mu:g}"


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _csv(rows, header) -> str:
    import io
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _experiment(cfg: ExperimentConfig, jobs: int) -> Experiment:
    return Experiment(cfg.potential, cfg.gauge, cfg.grid, cfg.cutoff, cfg.theta_points, cfg.count,
                      cfg.delta, jobs, cfg.dense_max or DENSE_MAX, cfg.flux)


def _check(name, criterion, passed, **detail):
    return {"name": name, "criterion": criterion, "passed": bool(passed), "detail": detail}


# -- pipeline pieces -----------------------------------------------------------


def model_table(cfg: ExperimentConfig, ex: Experiment):
    return enumerate_spectrum(ex.oscillators(), cfg.cutoff)


def run_sweeps(cfg, ex, out_dir: Path | None, say, mus=None):
    runs = {}
    for mu in cfg.mus if mus is None else mus:
        res, rep = ex.report(mu)
        runs[mu] = (res, rep)
        say(f"mu={mu:g}: {len(rep.bands)} bands, {len(rep.gaps_below(cfg.cutoff))} gaps below R={cfg.cutoff:g}")
        if out_dir is not None:
            _write(out_dir / f"bands_{_tag(mu)}.json", rep.to_json() + "\n")
            _write(out_dir / f"ids_{_tag(mu)}.csv", rep.ids_csv())
    return runs


def quasimode_table(cfg, ex):
    a = cfg.analysis
    well = ex.oscillators()[0]
    grid = SupercellGrid(cfg.dimension, (a["quasimode_supercell"],) * cfg.dimension, a["quasimode_m"])
    gauge = GaugeData(cfg.dimension, 0.0) if cfg.dimension == 1 else cfg.gauge
    idx = (a["quasimode_level"],) * cfg.dimension
    rows = []
    for mu in a["quasimode_mu"]:
        q = ga.quasimode_check(well, idx, mu, a["quasimode_kappa"], gauge, cfg.potential, grid)
        rows.append((mu, q.rayleigh, q.level, q.residual))
    return rows


def analyse(cfg: ExperimentConfig, ex: Experiment, runs: dict, model, say) -> tuple:
    """(checks, tables, fitted C)."""
    a = cfg.analysis
    R = cfg.cutoff
    lams = np.linspace(0.0, R, a["ids_points"])
    checks, tables = [], {}
    C = None
    mus = sorted(runs, reverse=True)
    if a["cluster"] or a["sandwich"]:
        res0, rep0 = runs[a["fit_mu"]]
        ids0 = ex.ids_function(res0) if a["sandwich"] else None
        C = ga.fit_cluster_constant(rep0, model, a["fit_mu"], ids0, lams, a["ids_tol"])
        say(f"fitted C = {C:.6g} at mu = {a['fit_mu']:g}")
        smaller = [mu for mu in mus if mu < a["fit_mu"]]
        if a["cluster"]:
            inc = {_tag(mu): ga.cluster_check(runs[mu][1], model, mu, C).inclusion for mu in smaller}
            checks.append(_check("cluster_inclusion", 3, all(inc.values()), C=C, per_mu=inc))
            uniq = {}
            for mu in mus:
                if mu <= a["assign_mu"]:
                    ca = ga.cluster_check(runs[mu][1], model, mu, C)
                    uniq[_tag(mu)] = ca.unique()
            checks.append(_check("band_assignment", 3, all(uniq.values()), per_mu=uniq))
            widths = []
            for mu in mus:
                rep = runs[mu][1]
                ca = ga.cluster_check(rep, model, mu, C)
                cw = ca.cluster_widths(rep.bands)
                widths.append((mu, max(cw.values()) if cw else 0.0))
            tables["width_vs_mu"] = widths
            decreasing = all(w2 < w1 for (_, w1), (_, w2) in zip(widths, widths[1:]))
            try:
                fit = ga.width_scaling_fit(widths, a["width_slope"])
                checks.append(_check("width_scaling", 3, decreasing and fit.passed, slope=fit.slope,
                                     residual=fit.residual, strictly_decreasing=decreasing))
            except MagGapsError as exc:
                checks.append(_check("width_scaling", 3, False, error=str(exc)))
            counts = [(mu, len(runs[mu][1].gaps_below(R))) for mu in mus]
            tables["gaps_vs_mu"] = counts
            checks.append(_check("gap_count", 3, counts[-1][1] >= a["min_gaps"], counts=counts,
                                 monotone=ga.gap_count_monotone(counts), required=a["min_gaps"]))
        if a["sandwich"]:
            viol = {_tag(mu): ga.sandwich_check(ex.ids_function(runs[mu][0]), model, mu, C, lams)
                    for mu in smaller}
            checks.append(_check("sandwich", 3, all(v <= a["ids_tol"] for v in viol.values()),
                                 C=C, violation=viol, tolerance=a["ids_tol"]))
    if a["multiplicity"]:
        mu = a["multiplicity_mu"]
        if mu not in runs:
            runs.update(run_sweeps(cfg, ex, None, say, [mu]))
        Cm = a["multiplicity_c"] if a["multiplicity_c"] is not None else C
        if Cm is None:
            raise MagGapsError("analysis.multiplicity_c: required when cluster fitting is disabled", "cli")
        rows = ga.multiplicity_check(ex.ids_function(runs[mu][0]), model, mu, Cm,
                                     a["multiplicity_levels"], a["multiplicity_tol"])
        tables["multiplicity"] = [(r.alpha, r.mult, r.jump) for r in rows]
        checks.append(_check("multiplicity", 4, all(r.passed for r in rows), mu=mu, C=Cm,
                             jumps=[{"alpha": r.alpha, "mult": r.mult, "jump": r.jump} for r in rows]))
    if a["quasimode"]:
        rows = quasimode_table(cfg, ex)
        tables["quasimode"] = rows
        slope = ga.power_slope([r[0] for r in rows], [r[3] for r in rows])
        e = 3 * a["quasimode_kappa"] - 1
        Cq = max(r[3] / r[0] ** e for r in rows)
        checks.append(_check("quasimode_scaling", 7, slope >= a["quasimode_slope"], slope=slope,
                             nominal=e, fitted_Cq=Cq))
    if a["harper"]:
        table = harper_gap_table(a["harper_q_max"], a["harper_coupling"], a["harper_k_points"], ex.jobs)
        tables["harper_gaps"] = table
        worst = 0.0
        bound = 2 * abs(a["harper_coupling"]) + 2
        inside = True
        for p, q, _ in table:
            h1 = harper_spectrum(p, q, a["harper_coupling"], a["harper_k_points"])
            inside &= all(-bound - 1e-12 <= lo and hi <= bound + 1e-12 for lo, hi in h1.bands)
            if q > 1:
                h2 = harper_spectrum(q - p, q, a["harper_coupling"], a["harper_k_points"])
                worst = max(worst, float(np.max(np.abs(np.array(h1.bands) - np.array(h2.bands)))))
        checks.append(_check("harper_reference", 8, worst <= 1e-10 and inside, reflection_defect=worst,
                             gershgorin=inside))
    return checks, tables, C


def cmd_run(cfg, args, say) -> int:
    out = Path(args.out_dir or cfg.out_dir)
    ex = _experiment(cfg, args.jobs)
    model = ex.model()
    _write(out / "model_spectrum.json", model.to_json() + "\n")
    runs = run_sweeps(cfg, ex, out, say)
    checks, tables, C = analyse(cfg, ex, runs, model, say)
    if "gaps_vs_mu" not in tables:
        tables["gaps_vs_mu"] = [(mu, len(runs[mu][1].gaps_below(cfg.cutoff))) for mu in sorted(runs, reverse=True)]
    _write(out / "gaps_vs_mu.csv", _csv(tables["gaps_vs_mu"], ["mu", "gap_count"]))
    if "width_vs_mu" in tables:
        _write(out / "width_vs_mu.csv", _csv(tables["width_vs_mu"], ["mu", "max_cluster_width"]))
    verdict = {
        "config": cfg.name,
        "seed": args.seed,
        "fitted_C": C,
        "checks": checks,
        "tables": {k: [list(r) for r in v] for k, v in tables.items()},
        "passed": all(c["passed"] for c in checks),
    }
    _write(out / "verdict.json", json.dumps(verdict, indent=2, sort_keys=True, default=float) + "\n")
    for c in checks:
        say(f"[{'PASS' if c['passed'] else 'FAIL'}] {c['name']} (criterion {c['criterion']})")
    return 0 if verdict["passed"] else 2


def cmd_model(cfg, args, say) -> int:
    ex = _experiment(cfg, args.jobs)
    spec = model_table(cfg, ex)
    print(f"{'p':>3} {'alpha':>14} {'alpha/pi':>10} {'mult':>5}")
    for i, (a, r) in enumerate(spec, 1):
        print(f"{i:>3} {a:>14.10f} {a / math.pi:>10.6f} {r:>5d}")
    if args.out_dir:
        _write(Path(args.out_dir) / "model_spectrum.json", spec.to_json() + "\n")
    return 0


def cmd_spectrum(cfg, args, say) -> int:
    mu = args.mu if args.mu is not None else cfg.mus[0]
    ex = _experiment(cfg, args.jobs)
    _, rep = ex.report(mu)
    print(f"mu={mu:g} bands below R={cfg.cutoff:g}:")
    for a, b in rep.bands:
        print(f"  [{a:.10f}, {b:.10f}]")
    if args.out_dir:
        _write(Path(args.out_dir) / f"bands_{_tag(mu)}.json", rep.to_json() + "\n")
        _write(Path(args.out_dir) / f"ids_{_tag(mu)}.csv", rep.ids_csv())
    return 0


def cmd_sweep(cfg, args, say) -> int:
    out = Path(args.out_dir or cfg.out_dir)
    run_sweeps(cfg, _experiment(cfg, args.jobs), out, print if not args.quiet else say)
    return 0


def cmd_gaps(cfg, args, say) -> int:
    ex = _experiment(cfg, args.jobs)
    table = ga.gap_count_vs_mu(ex, cfg.mus, cfg.cutoff)
    print("mu,gap_count")
    for mu, c in table:
        print(f"{mu:g},{c}")
    if args.out_dir:
        _write(Path(args.out_dir) / "gaps_vs_mu.csv", _csv(table, ["mu", "gap_count"]))
    return 0


def cmd_quasimode(cfg, args, say) -> int:
    ex = _experiment(cfg, args.jobs)
    rows = quasimode_table(cfg, ex)
    print("mu,rayleigh,level,residual")
    for mu, r, lv, res in rows:
        print(f"{mu:g},{r:.12g},{lv:.12g},{res:.6e}")
    slope = ga.power_slope([r[0] for r in rows], [r[3] for r in rows])
    print(f"log-log slope {slope:.4f} (nominal {3 * cfg.analysis['quasimode_kappa'] - 1:.2f})")
    return 0 if slope >= cfg.analysis["quasimode_slope"] else 2


def cmd_harper(cfg, args, say) -> int:
    coupling = args.coupling if args.coupling is not None else (cfg.analysis["harper_coupling"] if cfg else 2.0)
    if args.p is not None or args.q is not None:
        h = harper_spectrum(args.p or 0, args.q or 1, coupling, args.k_points, args.jobs)
        sys.stdout.write(h.to_csv())
        print(f"# {len(h.bands)} bands, {h.gap_count} open gaps")
        return 0
    q_max = cfg.analysis["harper_q_max"] if cfg else 7
    print("flux_p,flux_q,gaps")
    for p, q, g in harper_gap_table(q_max, coupling, args.k_points, args.jobs):
        print(f"{p},{q},{g}")
    return 0


def cmd_reference(cfg, args, say) -> int:
    from fractions import Fraction
    t = float(args.theta)
    theta = int(t) if t.is_integer() else Fraction(args.theta)
    print(comtet_houston(theta).format())
    return 0


def cmd_cocycle(cfg, args, say) -> int:
    rng = np.random.default_rng(args.seed)
    gauge = cfg.gauge if cfg else GaugeData.from_flux(2, 1, 3)
    grid = None
    if cfg is not None:
        grid = SupercellGrid(cfg.dimension, cfg.grid.supercell, min(cfg.grid.m, 4))
    d = identity_defects(gauge, rng, args.instances, grid)
    print(f"seed {args.seed}, {args.instances} instances")
    for k, v in d.items():
        print(f"{k:>22}: {v:.3e}")
    worst = max(d.values())
    print(f"max defect {worst:.3e} ({'<' if worst < IDENTITY_TOL else '>='} {IDENTITY_TOL:g})")
    return 0 if worst < IDENTITY_TOL else 2


COMMANDS = {
    "run": cmd_run, "model": cmd_model, "spectrum": cmd_spectrum, "sweep": cmd_sweep,
    "gaps": cmd_gaps, "quasimode": cmd_quasimode, "harper": cmd_harper,
    "reference": cmd_reference, "cocycle-check": cmd_cocycle,
}
NEEDS_CONFIG = {"run", "model", "spectrum", "sweep", "gaps", "quasimode"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config_path", nargs="?", help="experiment config (INI)")
    common.add_argument("--config", dest="config_opt", help="experiment config (INI)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized checks")
    common.add_argument("--out-dir", help="output directory (overrides [output] dir)")
    common.add_argument("--quiet", action="store_true", help="suppress progress output")
    ap = argparse.ArgumentParser(prog="maggaps", description="Semiclassical spectral gaps of periodic "
                                 "magnetic Schroedinger operators.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="command")
    sub.add_parser("run", parents=[common], help="full pipeline with verdict")
    sub.add_parser("model", parents=[common], help="print the model spectrum")
    sp = sub.add_parser("spectrum", parents=[common], help="bands at one mu")
    sp.add_argument("--mu", type=float)
    sub.add_parser("sweep", parents=[common], help="bands and ids for every mu")
    sub.add_parser("gaps", parents=[common], help="gap count against mu")
    sub.add_parser("quasimode", parents=[common], help="quasimode residual table")
    hp = sub.add_parser("harper", parents=[common], help="Harper bands or gap table")
    hp.add_argument("--p", type=int)
    hp.add_argument("--q", type=int)
    hp.add_argument("--coupling", type=float)
    hp.add_argument("--k-points", type=int, default=32)
    rp = sub.add_parser("reference", parents=[common], help="hyperbolic Landau levels")
    rp.add_argument("--theta", required=True)
    cp = sub.add_parser("cocycle-check", parents=[common], help="randomized identity checks")
    cp.add_argument("--instances", type=int, default=1000)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    say = _Out(args.quiet)
    path = args.config_opt or args.config_path
    try:
        if args.jobs < 1:
            raise MagGapsError(f"--jobs must be >= 1, got {args.jobs}", "cli")
        if args.command in NEEDS_CONFIG and path is None:
            raise MagGapsError(f"command {args.command!r} needs a config", "cli")
        cfg = load_config(resolve_config(path)) if path else None
        return COMMANDS[args.command](cfg, args, say)
    except MagGapsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def resolve_config(path) -> Path:
    """A path, or the name of a bundled config."""
    p = Path(path)
    if p.exists():
        return p
    bundled = Path(__file__).parent / "configs" / p.name
    return bundled if bundled.exists() else p


if __name__ == "__main__":
    sys.exit(main())
