"""Command-line front end: sample hypergraphs, build and solve matrices,
evaluate and convolve laws, compare distributions, and run experiment suites.

Exit codes: 0 ok, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import experiments, laws, metrics
from .combinatorics import (
    ModelParams,
    SamplingBudgetError,
    average_degree,
    load_hypergraph_json,
    sample_hypergraph,
    save_hypergraph_json,
)
from .gham import (
    adjacency_from_hypergraph,
    gham_from_adjacency,
    laplacian,
    laplacian_tilde,
    sample_surrogate,
)
from .spectra import Scaling, esd, load_spectrum_csv, save_spectrum_csv, symmetric_eigenvalues
from .svgplot import render_histogram_svg

_SCALING_FLAGS = {
    "raw": Scaling.RAW,
    "sqrt-n": Scaling.BY_SQRT_N,
    "n": Scaling.BY_N,
    "sqrt-nr": Scaling.BY_SQRT_NR,
}


def _parse_law(text: str) -> laws.Law:
    """Law descriptor: inline JSON, a path to a JSON file, or the shorthand
    kind:sigma2 (e.g. 'semicircle:0.64')."""
    text = text.strip()
    if text.startswith("{"):
        return laws.law_from_descriptor(json.loads(text))
    path = Path(text)
    if path.suffix == ".json" and path.exists():
        return laws.law_from_descriptor(json.loads(path.read_text()))
    kind, _, arg = text.partition(":")
    if kind in ("semicircle", "gaussian"):
        return laws.law_from_descriptor({"kind": kind, "sigma2": float(arg or 1.0)})
    raise ValueError(f"cannot parse law descriptor {text!r}")


def _parse_compare_input(text: str):
    """Comparison operand: an eigenvalue CSV path or a law descriptor."""
    path = Path(text)
    if path.exists() and path.suffix == ".csv":
        return esd(load_spectrum_csv(path))
    return _parse_law(text)


def cmd_sample(args) -> int:
    params = ModelParams(n=args.n, r=args.r, p=args.p)
    sample = sample_hypergraph(params, args.seed)
    out = Path(args.out or Path(args.out_dir) / f"hypergraph_n{args.n}_r{args.r}.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    save_hypergraph_json(sample, out)
    print(f"edges: {len(sample.edges)}")
    print(f"average degree: {average_degree(params):.6g}")
    print(f"wrote {out}")
    return 0


def _build_matrix(args) -> tuple[np.ndarray, ModelParams, str, int]:
    if args.input:
        sample = load_hypergraph_json(args.input)
        params = sample.params
        h = gham_from_adjacency(adjacency_from_hypergraph(sample), params)
        ensemble, seed = "bernoulli_hypergraph", sample.seed
    elif args.surrogate:
        if args.n is None or args.r is None:
            raise ValueError("surrogate mode needs -n and -r")
        params = ModelParams(n=args.n, r=args.r, p=args.p)
        _, h = sample_surrogate(params, args.seed)
        ensemble, seed = "gaussian_surrogate", args.seed
    else:
        raise ValueError("spectrum needs --input FILE or --surrogate")
    if args.matrix == "laplacian":
        h = laplacian(h)
    elif args.matrix == "laplacian-tilde":
        h = laplacian_tilde(h, params.r)
    return h, params, ensemble, seed


def cmd_spectrum(args) -> int:
    matrix, params, ensemble, seed = _build_matrix(args)
    scaling = _SCALING_FLAGS[args.scaling]
    sample = symmetric_eigenvalues(
        matrix, scaling=scaling, r=params.r, ensemble=ensemble, seed=seed
    )
    out = Path(args.out or Path(args.out_dir) / "spectrum.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    save_spectrum_csv(sample, out)
    print(f"wrote {out} ({len(sample)} eigenvalues)")
    if args.svg:
        overlays = []
        for desc in args.overlay or []:
            law = _parse_law(desc)
            lo, hi = law.support()
            lo = min(lo, float(sample.eigenvalues.min()))
            hi = max(hi, float(sample.eigenvalues.max()))
            xs = np.linspace(lo, hi, 400)
            overlays.append((desc, xs, np.asarray(law.density(xs))))
        render_histogram_svg(
            sample.eigenvalues,
            args.svg,
            bins=args.bins,
            overlays=overlays,
            title=args.title or f"ESD ({ensemble}, n={params.n}, r={params.r})",
        )
        print(f"wrote {args.svg}")
    return 0


def cmd_experiment(args) -> int:
    overrides = {
        key: value
        for key, value in (
            ("kind", args.kind),
            ("n", args.n),
            ("r", args.r),
            ("p", args.p),
            ("trials", args.trials),
            ("regime", args.regime),
            ("ensemble", args.ensemble),
            ("matrix", args.matrix_kind),
            ("scaling", _SCALING_FLAGS[args.scaling].value if args.scaling else None),
            ("k", args.k),
            ("tolerance", args.tolerance),
        )
        if value is not None
    }
    if args.config:
        payload = json.loads(Path(args.config).read_text())
        payload.pop("schema_version", None)
        payload.update(overrides)
        payload.setdefault("master_seed", args.seed)
        payload["threads"] = args.threads
        cfg = experiments.ExperimentConfig(**payload)
    else:
        if args.kind is None or args.n is None or args.r is None:
            raise ValueError("experiment needs --kind, -n and -r (or --config)")
        payload = {
            "master_seed": args.seed,
            "threads": args.threads,
            **overrides,
        }
        cfg = experiments.ExperimentConfig(**payload)
    record = experiments.run_experiment(cfg)
    run_dir = experiments.persist_record(record, args.out_dir, timestamp=args.timestamp)
    print(f"record: {run_dir}")
    if args.format == "json":
        print(json.dumps(record.aggregate, indent=2))
    else:
        print(f"{'key':<28}{'value'}")
        for key, value in record.aggregate.items():
            if isinstance(value, float):
                print(f"{key:<28}{value:.6g}")
            else:
                print(f"{key:<28}{value}")
    if "passed" in record.aggregate:
        print("PASS" if record.aggregate["passed"] else "FAIL")
    return 0


def cmd_laws(args) -> int:
    if args.action == "evaluate":
        law = _parse_law(args.law)
        lo, hi = law.support()
        xs = np.linspace(args.lo if args.lo is not None else lo,
                         args.hi if args.hi is not None else hi, args.points)
        fs = np.asarray(law.density(xs))
        if args.format == "json":
            out = Path(args.out or Path(args.out_dir) / "law.json")
            out.write_text(json.dumps({"x": xs.tolist(), "f": fs.tolist()}))
        else:
            out = Path(args.out or Path(args.out_dir) / "law.csv")
            np.savetxt(out, np.column_stack([xs, fs]), delimiter=",", header="x,f")
        print(f"wrote {out}")
        return 0
    # convolve
    law1, law2 = _parse_law(args.law), _parse_law(args.law2)
    spec = laws.GridSpec(lo=args.lo, hi=args.hi, points=args.points)
    grid = laws.free_additive_convolution(law1, law2, spec)
    out = Path(args.out or Path(args.out_dir) / "convolution.csv")
    grid.save_csv(out)
    print(f"wrote {out} (mass {grid.mass():.6f}, variance {grid.variance():.6f})")
    return 0


def cmd_metrics(args) -> int:
    a = _parse_compare_input(args.a)
    b = _parse_compare_input(args.b)
    report = metrics.metric_report(a, b, notes=f"a={args.a} b={args.b}")
    print(report.to_json())
    if args.out:
        Path(args.out).write_text(report.to_json() + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hgspec",
        description="Spectral Monte-Carlo laboratory for random r-uniform hypergraphs",
    )
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--out-dir", default=".", help="output directory")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--format", choices=["csv", "json"], default="csv")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sample = sub.add_parser("sample", help="sample a random hypergraph to JSON")
    p_sample.add_argument("-n", type=int, required=True)
    p_sample.add_argument("-r", type=int, required=True)
    p_sample.add_argument("-p", type=float, required=True)
    p_sample.add_argument("--out")
    p_sample.set_defaults(func=cmd_sample)

    p_spec = sub.add_parser("spectrum", help="build a matrix, solve, export CSV/SVG")
    p_spec.add_argument("--input", help="hypergraph JSON (Bernoulli ensemble)")
    p_spec.add_argument("--surrogate", action="store_true", help="Gaussian surrogate")
    p_spec.add_argument("-n", type=int)
    p_spec.add_argument("-r", type=int)
    p_spec.add_argument("-p", type=float, default=0.5)
    p_spec.add_argument(
        "--matrix", choices=["gham", "laplacian", "laplacian-tilde"], default="gham"
    )
    p_spec.add_argument("--scaling", choices=list(_SCALING_FLAGS), default="sqrt-n")
    p_spec.add_argument("--out")
    p_spec.add_argument("--svg")
    p_spec.add_argument("--overlay", action="append", help="law descriptor to overlay")
    p_spec.add_argument("--bins", type=int, default=60)
    p_spec.add_argument("--title")
    p_spec.set_defaults(func=cmd_spectrum)

    p_exp = sub.add_parser("experiment", help="run a Monte-Carlo experiment suite")
    p_exp.add_argument("--kind", choices=list(experiments.EXPERIMENT_KINDS))
    p_exp.add_argument("--config", help="JSON config file (flags override)")
    p_exp.add_argument("-n", type=int)
    p_exp.add_argument("-r", type=int)
    p_exp.add_argument("-p", type=float)
    p_exp.add_argument("--trials", type=int)
    p_exp.add_argument("--ensemble", choices=[experiments.BERNOULLI, experiments.SURROGATE])
    p_exp.add_argument(
        "--matrix-kind", choices=["gham", "laplacian", "laplacian_tilde"], dest="matrix_kind"
    )
    p_exp.add_argument("--scaling", choices=list(_SCALING_FLAGS))
    p_exp.add_argument("--regime")
    p_exp.add_argument("--k", type=int)
    p_exp.add_argument("--tolerance", type=float)
    p_exp.add_argument("--timestamp", help="override run-directory timestamp")
    p_exp.set_defaults(func=cmd_experiment)

    p_laws = sub.add_parser("laws", help="evaluate or convolve analytic laws")
    p_laws.add_argument("action", choices=["evaluate", "convolve"])
    p_laws.add_argument("--law", required=True)
    p_laws.add_argument("--law2")
    p_laws.add_argument("--lo", type=float)
    p_laws.add_argument("--hi", type=float)
    p_laws.add_argument("--points", type=int, default=2001)
    p_laws.add_argument("--out")
    p_laws.set_defaults(func=cmd_laws)

    p_met = sub.add_parser("metrics", help="compare two spectra or laws")
    p_met.add_argument("--a", required=True, help="eigenvalue CSV or law descriptor")
    p_met.add_argument("--b", required=True, help="eigenvalue CSV or law descriptor")
    p_met.add_argument("--out")
    p_met.set_defaults(func=cmd_metrics)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "laws" and args.action == "convolve" and not args.law2:
        parser.error("convolve needs --law2")
    try:
        return args.func(args)
    except (SamplingBudgetError, laws.ConvergenceError, experiments.RegimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
