"""Command-line surface: estimate, simulate, diagnose, compare."""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, diagnostics, estimate, ingest, rmt, simulate
from .errors import ParseError, ShapeError, SpikecovError
from .psd import PointMass, TruncatedGamma

EXIT_INPUT_ERROR = 2
EXIT_ESTIMATION_ERROR = 3


def _dump_json(obj, path):
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _write_manifest(out_dir, command, config):
    manifest = {
        "command": command,
        "config": config,
        "version": __version__,
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    _dump_json(manifest, out_dir / "manifest.json")


def _load_spectrum(args):
    em = ingest.load_matrix(
        args.input, fmt=args.format, has_header=args.has_header,
        has_rownames=args.rownames, transpose=args.transpose,
    )
    return em, ingest.transform_and_spectrum(em)


def _add_input_flags(p):
    p.add_argument("--input", required=True, help="count matrix (CSV/TSV)")
    p.add_argument("--format", choices=["csv", "tsv"], default="csv")
    p.add_argument("--has-header", action="store_true", dest="has_header")
    p.add_argument("--rownames", action="store_true")
    p.add_argument("--transpose", action="store_true",
                   help="input is samples x positions")


def _add_common_flags(p):
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--B", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", type=Path, default=Path("."))


def _psd_model(name):
    return {"point-mass": "point_mass", "truncated-gamma": "truncated_gamma"}[name]


def cmd_estimate(args):
    out_dir = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    em, spectrum = _load_spectrum(args)
    result = estimate.estimate_spikes_cm(
        spectrum, model=_psd_model(args.psd), alpha=args.alpha, B=args.B,
        seed=args.seed, m_max=args.m_max, trunc_q=args.trunc_q,
    )
    payload = result.to_json_dict()
    payload["gene_id"] = em.gene_id
    payload["d"] = spectrum.d
    payload["n"] = spectrum.n
    _dump_json(payload, out_dir / "estimate.json")
    _write_manifest(out_dir, "estimate", _config_dict(args))
    print(json.dumps(payload, sort_keys=True))

    if result.error is not None:
        print(f"estimation stopped early: {result.error}", file=sys.stderr)
        return EXIT_ESTIMATION_ERROR
    if not args.skip_psd_check and result.psd_final is not None:
        drop = result.k_hat
        if drop < len(spectrum.values_desc) - 2:
            bundle = diagnostics.psi_envelope(
                _tail_spectrum(spectrum, drop), result.psd_final, Q=20,
                seed=args.seed,
            )
            if bundle.coverage_fraction < diagnostics.COVERAGE_PASS_FRACTION:
                model_name = result.psd_final.model.replace("_", "-")
                print(
                    f"warning: {model_name} PSD rejected by diagnostics "
                    f"(envelope coverage {bundle.coverage_fraction:.2f} < "
                    f"{diagnostics.COVERAGE_PASS_FRACTION})",
                    file=sys.stderr,
                )
    return 0


def _tail_spectrum(spectrum, drop):
    """Spectrum of the noise block: the top `drop` eigenvalues removed."""
    from .spectrum import EigenSpectrum
    vals = spectrum.values_desc[drop:]
    d_eff = spectrum.d - drop
    n = spectrum.n
    target = min(d_eff, n)
    if len(vals) > target:
        vals = vals[:target]
    elif len(vals) < target:
        # Dropped dimensions free up slots that are structural zeros of the
        # retained noise block.
        vals = np.concatenate([vals, np.zeros(target - len(vals))])
    return EigenSpectrum(vals, d=d_eff, n=n, centered=spectrum.centered,
                         gene_id=spectrum.gene_id)


def cmd_simulate(args):
    out_dir = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.psd == "point-mass":
        H = PointMass(args.sigma2)
    else:
        H = TruncatedGamma(args.tau, args.nu, args.trunc_q)
    est = simulate.threshold(H, args.d, args.n, args.alpha, args.B, args.seed,
                             keep_samples=args.emit_samples)
    _dump_json(est.to_json_dict(), out_dir / "threshold.json")
    if args.emit_samples:
        with open(out_dir / "lambda1_samples.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["replication", "lambda1"])
            for b, val in enumerate(est.samples):
                writer.writerow([b, repr(float(val))])
    _write_manifest(out_dir, "simulate", _config_dict(args))
    print(json.dumps(est.to_json_dict(), sort_keys=True))
    return 0


def cmd_diagnose(args):
    out_dir = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    em, spectrum = _load_spectrum(args)
    drops = [int(v) for v in args.drop_top.split(",")] if args.drop_top else [0]
    model = _psd_model(args.psd)
    for drop in drops:
        tail = _tail_spectrum(spectrum, drop)
        y_eff = tail.d / tail.n
        H = estimate.estimate_psd_params(spectrum, drop + 1, model, y_eff,
                                         trunc_q=args.trunc_q)
        bundle = diagnostics.psi_envelope(tail, H, Q=args.Q, seed=args.seed)
        _dump_json(bundle.to_json_dict(), out_dir / f"envelope_drop{drop}.json")

        support = diagnostics.support_comparison(
            spectrum, H, drop_top=drop, alpha_tw=args.alpha, B=args.B,
            seed=args.seed,
        )
        _dump_json(support.to_json_dict(), out_dir / f"support_drop{drop}.json")

        hist = diagnostics.esd_histogram(spectrum, drop_top=drop, bins=args.bins)
        hist["gene_id"] = em.gene_id
        if isinstance(H, PointMass):
            edges = np.asarray(hist["bin_edges"])
            xs = np.linspace(edges[0], edges[-1], 256)
            hist["mp_overlay"] = {
                "sigma2": H.sigma2,
                "y": y_eff,
                "x": xs.tolist(),
                "density": np.asarray(rmt.mp_density(H.sigma2, y_eff, xs)).tolist(),
            }
        _dump_json(hist, out_dir / f"histogram_drop{drop}.json")

        curve = rmt.build_psi_curve(H, y_eff, bundle.alpha_grid)
        payload = curve.to_json_dict()
        payload["support"] = rmt.lsd_support(H, y_eff).to_json_dict()
        payload["psd"] = H.to_json_dict()
        _dump_json(payload, out_dir / f"psi_curve_drop{drop}.json")

    if args.emit_overlay:
        overlay = {
            "gene_id": em.gene_id,
            "d": em.d,
            "n": em.n,
            "series": em.transformed.T.tolist(),
        }
        _dump_json(overlay, out_dir / "overlay.json")
    _write_manifest(out_dir, "diagnose", _config_dict(args))
    return 0


_NA = "NA"


def _compare_one(path, args):
    em = ingest.load_matrix(path, fmt=args.format, has_header=args.has_header,
                            has_rownames=args.rownames, transpose=args.transpose)
    spectrum = ingest.transform_and_spectrum(em)
    row = {"gene": em.gene_id, "d": spectrum.d}

    cm = estimate.estimate_spikes_cm(
        spectrum, model=_psd_model(args.psd), alpha=args.alpha, B=args.B,
        seed=args.seed, trunc_q=args.trunc_q,
    )
    row["cm_k"] = cm.k_hat
    if isinstance(cm.psd_final, TruncatedGamma):
        row["cm_tau"] = repr(cm.psd_final.shape)
        row["cm_nu"] = repr(cm.psd_final.rate)
    else:
        row["cm_tau"] = row["cm_nu"] = _NA

    kn = estimate.estimate_spikes_kn(spectrum, alpha=args.alpha)
    row["kn_k"] = kn.k_hat
    row["kn_sigma2"] = repr(kn.psd_final.sigma2) if kn.psd_final else _NA

    py = estimate.estimate_spikes_py(spectrum)
    row["py_k"] = py.k_hat
    row["py_sigma2"] = repr(py.psd_final.sigma2) if py.psd_final else _NA
    return row


def cmd_compare(args):
    out_dir = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = simulate.default_threads()
    if workers > 1 and len(args.inputs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda p: _compare_one(p, args), args.inputs))
    else:
        rows = [_compare_one(p, args) for p in args.inputs]

    columns = ["gene", "d", "cm_k", "cm_tau", "cm_nu", "kn_k", "kn_sigma2",
               "py_k", "py_sigma2"]
    out_path = out_dir / "compare.csv"
    with open(out_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    _write_manifest(out_dir, "compare", _config_dict(args))
    print(str(out_path))
    return 0


def _config_dict(args):
    config = {}
    for key, val in sorted(vars(args).items()):
        if key == "func":
            continue
        config[key] = str(val) if isinstance(val, Path) else val
    return config


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spikecov",
        description="Spike-count estimation for high-dimensional covariance spectra",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="sequential Monte-Carlo spike test")
    _add_input_flags(p)
    _add_common_flags(p)
    p.add_argument("--psd", choices=["point-mass", "truncated-gamma"],
                   default="truncated-gamma")
    p.add_argument("--trunc-q", type=float, default=0.995)
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--skip-psd-check", action="store_true")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="largest-noise-eigenvalue threshold")
    _add_common_flags(p)
    p.add_argument("--psd", choices=["point-mass", "truncated-gamma"],
                   required=True)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--trunc-q", type=float, default=0.995)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--emit-samples", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("diagnose", help="PSD goodness-of-fit artifacts")
    _add_input_flags(p)
    _add_common_flags(p)
    p.add_argument("--psd", choices=["point-mass", "truncated-gamma"],
                   default="truncated-gamma")
    p.add_argument("--trunc-q", type=float, default=0.995)
    p.add_argument("--drop-top", default="",
                   help="comma-separated drop levels, e.g. 10,50,100")
    p.add_argument("--Q", type=int, default=100)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--emit-overlay", action="store_true")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("compare", help="CM/KN/PY comparison table")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--format", choices=["csv", "tsv"], default="csv")
    p.add_argument("--has-header", action="store_true", dest="has_header")
    p.add_argument("--rownames", action="store_true")
    p.add_argument("--transpose", action="store_true")
    _add_common_flags(p)
    p.add_argument("--psd", choices=["point-mass", "truncated-gamma"],
                   default="truncated-gamma")
    p.add_argument("--trunc-q", type=float, default=0.995)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, ParseError, ShapeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except SpikecovError as exc:
        print(f"estimation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION_ERROR


if __name__ == "__main__":
    sys.exit(main())
