"""Batch experiment runner.

Subcommands wire schemes through the correction constant into coupled
simulations and the diagnostic estimators, with plain-text outputs:

    lambda    correction constant of a scheme (JSON)
    converge  coupled ensemble error tables + summary (CSV + JSON)
    chaos     tensor-expectation and negative-Sobolev slope study (CSV)
    qv        quadratic-variation report (JSON)

Every run writes a manifest listing each output file with its SHA-256
digest; identical configs and seeds reproduce identical digests whatever
the worker count, since replicate tasks are self-contained and outputs are
ordered canonically.

Exit codes: 0 ok, 2 validation failure, 3 blow-up quota exceeded,
4 quadrature non-convergence.
"""

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .correction import (
    DEFAULT_CHI,
    DEFAULT_GAMMA,
    QuadratureError,
    lambda_closed_form_for_scheme,
    lambda_eps,
    lambda_eps_y,
    lambda_quadrature,
)
from .estimators import (
    expected_qv,
    negative_sobolev_distance,
    quadratic_variation,
    rate_fit,
    xi_eps,
    xi_eps_y,
)
from .integrator import resolve_lambda, run_coupled
from .noise import derive_stream, discrete_sigmas, sample_stationary_pair, stationary_sigmas, ModeGaussianDraw
from .runconfig import load_run_config
from .schemes import SchemeValidationError, load_scheme_file
from .spectral import band_project, sup_norm

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BLOWUP = 3
EXIT_QUADRATURE = 4


def _fmt(x):
    return f"{x:.17g}"


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def _digest(path):
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


class Manifest:
    """Provenance record: config echo, seed, versions, digests, timings."""

    def __init__(self, command, seed, config_echo="", extra=None):
        self.data = {
            "command": command,
            "tool_version": __version__,
            "seed": seed,
            "config_echo": config_echo,
            "config_sha256": hashlib.sha256(config_echo.encode()).hexdigest(),
            "outputs": {},
            "wall_clock_seconds": {},
        }
        if extra:
            self.data.update(extra)
        self._t0 = time.perf_counter()
        self._stage_start = self._t0

    def stage(self, name):
        now = time.perf_counter()
        self.data["wall_clock_seconds"][name] = round(now - self._stage_start, 6)
        self._stage_start = now

    def add_output(self, path):
        self.data["outputs"][Path(path).name] = _digest(path)

    def write(self, path):
        self.data["wall_clock_seconds"]["total"] = round(
            time.perf_counter() - self._t0, 6
        )
        Path(path).write_text(json.dumps(self.data, indent=2, sort_keys=True) + "\n")


def _load_and_validate_scheme(path):
    scheme = load_scheme_file(path)
    report = scheme.validate()
    return scheme, report


# -- lambda ---------------------------------------------------------------------


def cmd_lambda(args):
    scheme, report = _load_and_validate_scheme(args.scheme)
    if not report.ok:
        print(report.summary(), file=sys.stderr)
        return EXIT_VALIDATION
    if args.dry_run:
        print(json.dumps({"scheme": scheme.name, "valid": True, "dry_run": True}))
        return EXIT_OK
    try:
        res = lambda_quadrature(scheme, args.nu, args.tol)
    except QuadratureError as err:
        print(f"quadrature did not converge: {err}", file=sys.stderr)
        if err.partial is not None:
            print(json.dumps(err.partial.to_dict(), sort_keys=True), file=sys.stderr)
        return EXIT_QUADRATURE
    payload = res.to_dict()
    if args.closed_form:
        oracle = lambda_closed_form_for_scheme(scheme, args.nu)
        payload["closed_form"] = oracle.value
        payload["difference"] = res.value - oracle.value
    print(json.dumps(payload, sort_keys=True))
    return EXIT_OK


# -- converge ---------------------------------------------------------------------


def _gnuplot_script(prefix, eps_list):
    lines = [
        "# gnuplot script for the coupled-error tables",
        "set logscale y",
        "set xlabel 't'",
        "set ylabel 'ensemble mean sup error'",
        "set key left top",
        "plot \\",
    ]
    parts = []
    for eps in eps_list:
        stem = f"{prefix}_eps{eps:g}.csv"
        parts.append(
            f"  '{stem}' using 1:2 with lines title 'corrected eps={eps:g}', \\\n"
            f"  '{stem}' using 1:3 with lines dashtype 2 title 'uncorrected eps={eps:g}'"
        )
    lines.append(", \\\n".join(parts))
    return "\n".join(lines) + "\n"


def cmd_converge(args):
    spec = load_run_config(args.config)
    report = spec.scheme.validate()
    if not report.ok:
        print(report.summary(), file=sys.stderr)
        return EXIT_VALIDATION
    eps_list = tuple(float(e) for e in args.eps.split(",")) if args.eps else spec.eps_list
    replicates = args.replicates if args.replicates else spec.replicates
    cfg = spec.sim_config(seed=args.seed)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    prefix = out / spec.output_prefix

    if args.dry_run:
        lam, _ = resolve_lambda(cfg)
        plan = {
            "dry_run": True,
            "scheme": spec.scheme.name,
            "eps": list(eps_list),
            "replicates": replicates,
            "steps": cfg.n_steps,
            "lambda": lam,
            "config_sha256": spec.content_hash(),
        }
        print(json.dumps(plan, sort_keys=True))
        return EXIT_OK

    manifest = Manifest("converge", args.seed, spec.echo)
    try:
        result = run_coupled(cfg, eps_list, replicates, workers=args.workers)
    except QuadratureError as err:
        print(f"quadrature did not converge: {err}", file=sys.stderr)
        return EXIT_QUADRATURE
    manifest.stage("simulation")

    outputs = []
    for eps in eps_list:
        if not result.records_for(eps):
            print(f"eps={eps:g}: every replicate blew up; no table written", file=sys.stderr)
            continue
        curves = result.mean_curves(eps)
        path = f"{prefix}_eps{eps:g}.csv"
        rows = list(
            zip(
                curves["t"].tolist(),
                curves["sup_err_corrected"].tolist(),
                curves["sup_err_uncorrected"].tolist(),
                curves["halpha_err_corrected"].tolist(),
                curves["halpha_err_uncorrected"].tolist(),
            )
        )
        _write_csv(
            path,
            [
                "t",
                "sup_err_corrected",
                "sup_err_uncorrected",
                "halpha_err_corrected",
                "halpha_err_uncorrected",
            ],
            rows,
        )
        outputs.append(path)

    # initial-coupling scaling table: E||psi_tilde(0) - psi(0)||_sup per eps
    scaling_rows = []
    for eps in eps_list:
        vals = []
        for rep in range(replicates):
            draw = ModeGaussianDraw.sample(
                cfg.K, cfg.n, derive_stream(args.seed, rep, "ic")
            )
            psi = draw.field(stationary_sigmas(cfg.K, cfg.nu))
            psit = draw.field(discrete_sigmas(cfg.scheme, eps, cfg.nu, cfg.K))
            vals.append(sup_norm(psit - psi))
        scaling_rows.append(
            (eps, float(np.mean(vals)), float(np.std(vals, ddof=1) / np.sqrt(len(vals))), len(vals))
        )
    scaling_path = f"{prefix}_scaling.csv"
    _write_csv(scaling_path, ["eps", "mean", "stderr", "n_samples"], scaling_rows)
    outputs.append(scaling_path)
    manifest.stage("scaling_table")

    summary_rows = result.summary()
    slopes = {}
    if len(eps_list) >= 3 and all(r["n_ok"] > 0 for r in summary_rows):
        corr_means = [r["mean_sup_corrected"] for r in summary_rows]
        if all(v > 0 for v in corr_means):
            slopes["sup_corrected"] = rate_fit(eps_list, corr_means)[0]
        coupling_means = [row[1] for row in scaling_rows]
        if all(v > 0 for v in coupling_means):
            slopes["initial_coupling"] = rate_fit(eps_list, coupling_means)[0]
    summary = {
        "config_sha256": spec.content_hash(),
        "seed": args.seed,
        "lambda": result.lam,
        "eps": list(eps_list),
        "replicates": replicates,
        "blowup_fraction": result.blowup_fraction,
        "per_eps": summary_rows,
        "fitted_slopes": slopes,
    }
    summary_path = f"{prefix}_summary.json"
    Path(summary_path).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    outputs.append(summary_path)

    plot_path = f"{prefix}_plot.gp"
    Path(plot_path).write_text(_gnuplot_script(prefix.name, eps_list))
    outputs.append(plot_path)
    manifest.stage("reports")

    for path in outputs:
        manifest.add_output(path)
    manifest.write(f"{prefix}_manifest.json")

    for row in summary_rows:
        if row["n_ok"]:
            print(
                f"eps={row['eps']:g}: sup corrected {row['mean_sup_corrected']:.4g} "
                f"(se {row['se_sup_corrected']:.2g}), uncorrected {row['mean_sup_uncorrected']:.4g} "
                f"(se {row['se_sup_uncorrected']:.2g}), blowups {row['n_blowup']}"
            )
        else:
            print(f"eps={row['eps']:g}: no surviving replicates ({row['n_blowup']} blowups)")
    if result.blowup_fraction > 0.2:
        print(
            f"blow-up fraction {result.blowup_fraction:.1%} exceeds the 20% quota",
            file=sys.stderr,
        )
        return EXIT_BLOWUP
    return EXIT_OK


# -- chaos ---------------------------------------------------------------------


def cmd_chaos(args):
    scheme, report = _load_and_validate_scheme(args.scheme)
    if not report.ok:
        print(report.summary(), file=sys.stderr)
        return EXIT_VALIDATION
    eps_list = tuple(float(e) for e in args.eps.split(","))
    if args.dry_run:
        print(json.dumps({"scheme": scheme.name, "eps": list(eps_list), "dry_run": True}))
        return EXIT_OK
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = Manifest("chaos", args.seed, extra={"scheme": scheme.name})

    nu, gamma, chi, alpha = args.nu, DEFAULT_GAMMA, DEFAULT_CHI, 0.75
    atom_rows, dist_rows = [], []
    for i, eps in enumerate(sorted(eps_list, reverse=True)):
        K = int(np.ceil(eps**-chi))
        lam_eps = lambda_eps(scheme, eps, gamma, chi, nu)
        rng = derive_stream(args.seed, i, "chaos")
        atom_means = {y: [] for y, w in scheme.mu if w != 0.0 and y != 0.0}
        dists = []
        for _ in range(args.samples):
            psit = sample_stationary_pair(scheme, eps, nu, K, rng).psi_tilde
            band = band_project(psit, eps**-gamma, eps**-chi)
            for y in atom_means:
                atom_means[y].append(xi_eps_y(band, y, eps).spatial_mean()[0, 0])
            dists.append(
                negative_sobolev_distance(xi_eps(band, scheme, eps), lam_eps, alpha)
            )
        for y, vals in sorted(atom_means.items()):
            vals = np.asarray(vals)
            atom_rows.append(
                (
                    eps,
                    y,
                    float(np.mean(vals)),
                    float(np.std(vals, ddof=1) / np.sqrt(vals.size)),
                    vals.size,
                    lambda_eps_y(scheme, eps, gamma, chi, nu, y),
                )
            )
        dists = np.asarray(dists)
        dist_rows.append(
            (
                eps,
                float(np.mean(dists)),
                float(np.std(dists, ddof=1) / np.sqrt(dists.size)),
                dists.size,
            )
        )
    manifest.stage("sampling")

    atom_path = out / "chaos_atoms.csv"
    _write_csv(
        atom_path,
        ["eps", "y", "mean", "stderr", "n_samples", "lambda_eps_y"],
        atom_rows,
    )
    dist_path = out / "chaos_distance.csv"
    _write_csv(dist_path, ["eps", "mean", "stderr", "n_samples"], dist_rows)

    summary = {"eps": sorted(eps_list, reverse=True)}
    if len(dist_rows) >= 3:
        slope, intercept, residual = rate_fit(
            [r[0] for r in dist_rows], [r[1] for r in dist_rows]
        )
        summary["distance_slope"] = slope
        summary["distance_residual"] = residual
    print(json.dumps(summary, sort_keys=True))
    manifest.stage("reports")
    for path in (atom_path, dist_path):
        manifest.add_output(path)
    manifest.write(out / "chaos_manifest.json")
    return EXIT_OK


# -- qv ---------------------------------------------------------------------


def cmd_qv(args):
    if args.dry_run:
        print(json.dumps({"K": args.K, "M": args.M, "samples": args.samples, "dry_run": True}))
        return EXIT_OK
    from .schemes import identity_scheme

    scheme = identity_scheme(1, 0)
    scheme.validate()
    rng = derive_stream(args.seed, 0, "qv")
    vals = np.empty(args.samples)
    for i in range(args.samples):
        psi = sample_stationary_pair(scheme, 0.1, args.nu, args.K, rng).psi
        vals[i] = quadratic_variation(psi, args.M)[0]
    exact = expected_qv(args.nu, args.K, args.M)
    payload = {
        "nu": args.nu,
        "K": args.K,
        "M": args.M,
        "n_samples": args.samples,
        "mc_mean": float(np.mean(vals)),
        "mc_stderr": float(np.std(vals, ddof=1) / np.sqrt(args.samples)),
        "exact_sum": exact,
        "circle_total": float(np.pi / args.nu),
    }
    print(json.dumps(payload, sort_keys=True))
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(
        prog="burgerslab",
        description="coupled simulations of discretized Burgers-type equations "
        "and the drift correction they acquire",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0, help="base seed (u64)")
        sp.add_argument("--workers", type=int, default=1, help="parallel worker count")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--tol", type=float, default=1e-8, help="quadrature tolerance")
        sp.add_argument("--dry-run", action="store_true", help="validate configs without computing")

    sp = sub.add_parser("lambda", help="correction constant of a scheme")
    sp.add_argument("--scheme", required=True, help="scheme description file")
    sp.add_argument("--nu", type=float, default=1.0)
    sp.add_argument("--closed-form", action="store_true", help="also print the closed-form oracle")
    common(sp)
    sp.set_defaults(func=cmd_lambda)

    sp = sub.add_parser("converge", help="coupled ensemble error study")
    sp.add_argument("--config", required=True, help="run config file")
    sp.add_argument("--eps", default=None, help="comma list overriding the config")
    sp.add_argument("--replicates", type=int, default=None)
    common(sp)
    sp.set_defaults(func=cmd_converge)

    sp = sub.add_parser("chaos", help="tensor expectation and distance slopes")
    sp.add_argument("--scheme", required=True, help="scheme description file")
    sp.add_argument("--eps", default="0.04,0.02,0.01", help="comma list of scales")
    sp.add_argument("--nu", type=float, default=1.0)
    sp.add_argument("--samples", type=int, default=200)
    common(sp)
    sp.set_defaults(func=cmd_chaos)

    sp = sub.add_parser("qv", help="quadratic variation report")
    sp.add_argument("--nu", type=float, default=1.0)
    sp.add_argument("--K", type=int, default=8192)
    sp.add_argument("--M", type=int, default=2048)
    sp.add_argument("--samples", type=int, default=200)
    common(sp)
    sp.set_defaults(func=cmd_qv)

    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemeValidationError as err:
        print(str(err), file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
