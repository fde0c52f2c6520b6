"""Command-line front end producing reproducible CSV/JSON reports.

Exit codes: 0 success, 1 theorem violation (some guaranteed inequality came
back false), 2 validation or hypothesis error, 3 numeric failure, 4 resource
budget exceeded.  Every report embeds its fully resolved configuration, and
all randomness flows from explicit seeds, so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import clt, decomp, dist, spectral, walks
from .errors import (
    ExpwalkError,
    GenerationFailureError,
    InvalidParameterError,
    NumericFailureError,
    OutOfHypothesisError,
    ResourceBudgetError,
    TheoremViolationError,
)
from .graph import (
    Labelling,
    RegularGraph,
    build_complete,
    build_cycle,
    build_random_regular,
    load_graph,
    load_labelling,
    random_balanced_labelling,
)

EXIT_OK = 0
EXIT_THEOREM = 1
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_RESOURCE = 4


def _parse_kv(token: str, key: str) -> int:
    if not token.startswith(key + "="):
        raise InvalidParameterError(f"expected '{key}=<int>', got {token!r}")
    try:
        return int(token[len(key) + 1 :])
    except ValueError:
        raise InvalidParameterError(f"expected an integer in {token!r}")


def _parse_int(token: str, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise InvalidParameterError(f"expected an integer {what}, got {token!r}")


def parse_graph_spec(spec: str) -> tuple[RegularGraph, str]:
    """Graph sources: complete:N | cycle:N | random:N:D:seed=S | file:PATH."""
    parts = spec.split(":")
    kind = parts[0]
    if kind == "complete" and len(parts) == 2:
        return build_complete(_parse_int(parts[1], "vertex count")), spec
    if kind == "cycle" and len(parts) == 2:
        return build_cycle(_parse_int(parts[1], "vertex count")), spec
    if kind == "random" and len(parts) == 4:
        n = _parse_int(parts[1], "vertex count")
        d = _parse_int(parts[2], "degree")
        seed = _parse_kv(parts[3], "seed")
        return build_random_regular(n, d, seed), spec
    if kind == "file" and len(parts) >= 2:
        return load_graph(spec[len("file:") :]), spec
    raise InvalidParameterError(f"cannot parse graph source {spec!r}")


def parse_labels_spec(spec: str, g: RegularGraph) -> tuple[Labelling, str]:
    """Label sources: balanced:seed=S | bits:0101... | file:PATH."""
    parts = spec.split(":", 1)
    kind = parts[0]
    if kind == "balanced" and len(parts) == 2:
        seed = _parse_kv(parts[1], "seed")
        return random_balanced_labelling(g, seed), spec
    if kind == "bits" and len(parts) == 2:
        bits = parts[1]
        if set(bits) - {"0", "1"}:
            raise InvalidParameterError("bits must be 0/1 characters")
        lab = Labelling.from_bits([int(c) for c in bits])
        if lab.n != g.n:
            raise InvalidParameterError(f"got {lab.n} bits for a {g.n}-vertex graph")
        return lab, spec
    if kind == "file" and len(parts) == 2:
        lab = load_labelling(parts[1])
        if lab.n != g.n:
            raise InvalidParameterError("labelling file length does not match the graph")
        return lab, spec
    raise InvalidParameterError(f"cannot parse label source {spec!r}")


def parse_tgrid(spec: str) -> list[int]:
    """Geometric grid 'a:b:xF' (factor F) or an explicit comma list."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3 or not parts[2].startswith("x"):
            raise InvalidParameterError(f"t grid must look like 'a:b:x2', got {spec!r}")
        start = _parse_int(parts[0], "grid start")
        stop = _parse_int(parts[1], "grid stop")
        factor = _parse_int(parts[2][1:], "grid factor")
        if start < 1 or stop < start or factor < 2:
            raise InvalidParameterError(f"bad t grid bounds in {spec!r}")
        grid = []
        t = start
        while t <= stop:
            grid.append(t)
            t *= factor
        return grid
    grid = [_parse_int(tok, "grid point") for tok in spec.split(",")]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidParameterError("t grid must be strictly increasing")
    return grid


def _dump_json(payload: dict, out_dir: str | None, name: str) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2)
    print(text)
    if out_dir:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / name).write_text(text + "\n")


def _write_csv(rows: list[str], header: str, out_dir: str | None, name: str) -> None:
    if out_dir is None:
        return
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    (path / name).write_text("\n".join([header] + rows) + "\n")


def cmd_spectrum(args) -> int:
    g, gspec = parse_graph_spec(args.graph)
    s = spectral.spectrum(g)
    payload = {
        "command": "spectrum",
        "config": {"graph": gspec},
        "eigenvalues": [float(v) for v in s.eigenvalues],
        "lambda_star": s.lambda_star,
        "expander": bool(s.lambda_star < 1.0 - 1e-9),
    }
    _dump_json(payload, args.out, "spectrum.json")
    return EXIT_OK


def _curve_payload(command: str, config: dict, grid, values, bound) -> dict:
    points = list(zip(grid, values))
    if min(values) > 0.0:
        slope, stderr = clt.loglog_fit(grid, values)
    else:
        slope = stderr = None  # a zero value has no log-log representation
    return {
        "command": command,
        "config": config,
        "points": [{"t": t, "value": v} for t, v in points],
        "slope": slope,
        "stderr": stderr,
        "bound_satisfied": bool(all(v <= bound(t) for t, v in points)),
    }


def _curve_command(args, command: str) -> int:
    g, gspec = parse_graph_spec(args.graph)
    lab, lspec = parse_labels_spec(args.labels, g)
    grid = parse_tgrid(args.tgrid)
    if command != "lclt-curve" and grid[0] < 2:
        raise OutOfHypothesisError("TV comparisons are stated for t >= 2")
    s = spectral.spectrum(g)
    if s.lambda_star >= 1.0 - 1e-12:
        raise OutOfHypothesisError("graph is not an expander (lambda* = 1)")
    sigma2 = clt.asymptotic_sigma2(g, lab, s)
    alpha = float(lab.alpha)
    consts = clt.explicit_constants(s.lambda_star, g.d, alpha)
    chain = walks.walk_chain(g, lab)
    config = {
        "graph": gspec,
        "labels": lspec,
        "tgrid": args.tgrid,
        "lambda_star": s.lambda_star,
        "sigma2": sigma2,
        "alpha": alpha,
    }

    if command == "lclt-curve":
        laws = walks.exact_weight_laws(chain, grid)
        values = [clt.lclt_error_from_law(laws[t], t * alpha, t * sigma2) for t in grid]
        c = consts.c1 if lab.balanced else consts.c5
        bound = lambda t: c / t
    elif command == "tv-curve":
        laws = walks.exact_weight_laws(chain, grid)
        values = [
            clt.tv_to_discretized_normal_from_law(laws[t], t * alpha, t * sigma2)
            for t in grid
        ]
        c = consts.c2 if lab.balanced else consts.c6
        bound = lambda t: c * math.log(t) ** 0.25 / math.sqrt(t)
    else:  # sticky-compare
        if not lab.balanced:
            raise OutOfHypothesisError("sticky comparison is stated for balanced labellings")
        p = clt.matching_sticky_p(sigma2)
        config["sticky_p"] = p
        walk_laws = walks.exact_weight_laws(chain, grid)
        sticky_laws = walks.exact_weight_laws(walks.sticky_chain(p), grid)
        values = [dist.tv_distance(walk_laws[t], sticky_laws[t]) for t in grid]
        bound = lambda t: consts.c3 * math.sqrt(math.log(t)) / math.sqrt(t)

    payload = _curve_payload(command, config, grid, values, bound)
    stem = command.replace("-", "_")
    _dump_json(payload, args.out, f"{stem}.json")
    _write_csv(
        [f"{t},{v:.17g}" for t, v in zip(grid, values)], "t,value", args.out, f"{stem}.csv"
    )
    return EXIT_OK


def cmd_law(args) -> int:
    if (args.sticky is None) == (args.graph is None):
        raise InvalidParameterError("law needs exactly one of --graph or --sticky")
    if args.sticky is not None:
        chain = walks.sticky_chain(args.sticky)
        config = {"sticky": args.sticky, "t": args.t}
    else:
        if args.labels is None:
            raise InvalidParameterError("law --graph also needs --labels")
        g, gspec = parse_graph_spec(args.graph)
        lab, lspec = parse_labels_spec(args.labels, g)
        chain = walks.walk_chain(g, lab)
        config = {"graph": gspec, "labels": lspec, "t": args.t}
    law = walks.exact_weight_law(chain, args.t)
    mean, var = dist.moments(law)
    payload = {
        "command": "law",
        "config": config,
        "support": [law.lo, law.hi],
        "mean": mean,
        "variance": var,
    }
    _dump_json(payload, args.out, "law.json")
    _write_csv(dist.to_csv_rows(law), "k,probability", args.out, "law.csv")
    return EXIT_OK


def cmd_decomp_check(args) -> int:
    g, gspec = parse_graph_spec(args.graph)
    lab, lspec = parse_labels_spec(args.labels, g)
    s = spectral.spectrum(g)
    ks = decomp.find_kstar(g, lab, s=s)
    t, samples, seed = args.t, args.samples, args.seed
    reports = {
        "concentration": decomp.concentration_check(g, lab, ks, t, samples, seed, s=s),
        "defect": decomp.defect_estimate(g, lab, ks, t, samples, seed, s=s),
    }
    chi, corr = decomp.sfull_distribution_check(g, lab, ks, t, samples, seed)
    reports["sfull_chi_square"] = chi
    reports["sfull_independence"] = corr
    payload = {
        "command": "decomp-check",
        "config": {
            "graph": gspec,
            "labels": lspec,
            "t": t,
            "samples": samples,
            "seed": seed,
        },
        "k_star": {
            "k": ks.k_star,
            "side": ks.side,
            "class_size": ks.class_size,
            "threshold": ks.threshold,
            "delta": ks.delta,
            "cycle_success_probability": decomp.cycle_success_probability(g, ks),
        },
        "reports": {name: r.as_dict() for name, r in reports.items()},
    }
    _dump_json(payload, args.out, "decomp_check.json")
    if args.trace_csv:
        batch = decomp.decomposition_batch(g, lab, ks, t, samples, seed)
        _write_csv(
            decomp.traces_csv_rows(batch),
            "seed_index,n_t,n_tilde,b_t,s_prime,s_full,y,z",
            args.out or ".",
            "traces.csv",
        )
    if not all(r.holds for r in reports.values()):
        return EXIT_THEOREM
    return EXIT_OK


def cmd_bounds(args) -> int:
    g, gspec = parse_graph_spec(args.graph)
    s = spectral.spectrum(g)
    rng = np.random.Generator(np.random.Philox(args.seed))
    reports = []

    for _ in range(args.pairs):
        f1 = np.flatnonzero(rng.random(g.n) < 0.5)
        f2 = np.flatnonzero(rng.random(g.n) < 0.5)
        reports.append(spectral.mixing_lemma_check(g, f1, f2, s=s))
        reports.append(spectral.mixing_corollary_check(g, f1, s=s))
    for _ in range(args.chernoff):
        size = int(rng.integers(1, g.n))
        subset = rng.permutation(g.n)[:size]
        gamma = float(rng.integers(1, args.t + 1))
        reports.append(clt.walk_chernoff_check(g, subset, args.t, gamma, s=s))
    for _ in range(args.binomial):
        n = int(rng.integers(10, 200))
        p = float(rng.uniform(0.05, 0.95))
        x = float(rng.uniform(0.1, 1.0)) * n * p
        reports.append(clt.binomial_tail_check(n, p, x))
    for mu in np.linspace(0.0, 4.5, 10):
        for sigma2 in np.linspace(1.0, 100.0, 10):
            reports.append(dist.normalizer_bound_check(float(mu), float(sigma2)))

    payload = {
        "command": "bounds",
        "config": {
            "graph": gspec,
            "pairs": args.pairs,
            "chernoff": args.chernoff,
            "binomial": args.binomial,
            "t": args.t,
            "seed": args.seed,
        },
        "checked": len(reports),
        "violations": [r.as_dict() for r in reports if not r.holds],
        "all_hold": bool(all(r.holds for r in reports)),
    }
    _dump_json(payload, args.out, "bounds.json")
    return EXIT_OK if payload["all_hold"] else EXIT_THEOREM


def cmd_examples(args) -> int:
    if args.which == "k4":
        g = build_complete(4)
        lab = Labelling.from_bits([1, 1, 0, 0])
        s = spectral.spectrum(g)
        t = args.t
        _, var = dist.moments(walks.exact_weight_law(walks.walk_chain(g, lab), t))
        var_dev = abs(var - t / 8.0 - 3.0 / 32.0)
        cov_dev = max(
            abs(clt.spectral_autocovariance(g, lab, k, s=s) - 1.0 / (4.0 * (-3.0) ** k))
            for k in range(1, 21)
        )
        passed = var_dev <= 1e-6 and cov_dev <= 1e-12
        payload = {
            "command": "examples",
            "config": {"which": "k4", "t": t},
            "variance": var,
            "variance_deviation": var_dev,
            "max_covariance_deviation": cov_dev,
            "passed": bool(passed),
        }
        _dump_json(payload, args.out, "examples_k4.json")
        return EXIT_OK if passed else EXIT_THEOREM

    if args.which == "uniform":
        g, gspec = parse_graph_spec(args.graph)
        t = args.t
        total = 0.0
        for i in range(args.samples):
            lab = random_balanced_labelling(g, seed=args.seed + i)
            _, var = dist.moments(walks.exact_weight_law(walks.walk_chain(g, lab), t))
            total += var
        average = total / args.samples
        threshold = t / 4.0 + 0.5 * (1.0 / g.d - 3.0 / (g.n - 1)) * t - args.slack
        passed = average >= threshold
        payload = {
            "command": "examples",
            "config": {
                "which": "uniform",
                "graph": gspec,
                "t": t,
                "samples": args.samples,
                "seed": args.seed,
                "slack": args.slack,
            },
            "average_variance": average,
            "threshold": threshold,
            "passed": bool(passed),
        }
        _dump_json(payload, args.out, "examples_uniform.json")
        return EXIT_OK if passed else EXIT_THEOREM

    raise InvalidParameterError(f"unknown example {args.which!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expwalk",
        description="Exact and simulated statistics of labelled walks on regular expanders",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="eigenvalues and expansion certificate")
    p.add_argument("--graph", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectrum)

    for name, help_text in (
        ("lclt-curve", "pointwise normal-approximation error over a t grid"),
        ("tv-curve", "TV distance to the discretized normal over a t grid"),
        ("sticky-compare", "TV distance to the variance-matched sticky weight"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--graph", required=True)
        p.add_argument("--labels", required=True)
        p.add_argument("--tgrid", default="64:4096:x2")
        p.add_argument("--out")
        p.set_defaults(func=lambda a, _n=name: _curve_command(a, _n))

    p = sub.add_parser("law", help="exact law of the weight after t steps as CSV")
    p.add_argument("--graph")
    p.add_argument("--labels")
    p.add_argument("--sticky", type=float)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_law)

    p = sub.add_parser("decomp-check", help="2-cycle decomposition Monte Carlo checks")
    p.add_argument("--graph", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--t", type=int, default=200)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trace-csv", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decomp_check)

    p = sub.add_parser("bounds", help="sweep the inequality checkers")
    p.add_argument("--graph", default="random:8:3:seed=1")
    p.add_argument("--pairs", type=int, default=50)
    p.add_argument("--chernoff", type=int, default=25)
    p.add_argument("--binomial", type=int, default=25)
    p.add_argument("--t", type=int, default=128)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("examples", help="reproduce the two worked examples")
    p.add_argument("--which", choices=["k4", "uniform"], required=True)
    p.add_argument("--graph", default="random:32:3:seed=5")
    p.add_argument("--t", type=int, default=512)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=1000)
    p.add_argument("--slack", type=float, default=5.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_examples)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidParameterError, OutOfHypothesisError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericFailureError, GenerationFailureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ResourceBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except TheoremViolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_THEOREM
    except ExpwalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
