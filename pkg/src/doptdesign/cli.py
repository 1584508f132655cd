"""Command-line entry point: ``doptdesign {sample,fit,bench,lebesgue,domains}``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .basis import build_index_set, index_set_for_terms
from .design import DOMAINS, ExperimentalDesign, assemble_model_matrix, get_domain, unit_box
from .experiments import (
    ExperimentConfig,
    child_seed,
    design_size,
    lebesgue_csvs,
    make_sampler_spec,
    run_accuracy_experiment,
    run_domain_demo,
    run_lebesgue_sweep,
    write_atomic,
    write_experiment,
)
from .models import MODELS, get_model
from .samplers import SAMPLER_KINDS, sample, sample_gd
from .surrogate import fit, rel_error_inf, uniform_test_set

# flag name -> ExperimentConfig field
CONFIG_FLAGS = {
    "model": "model",
    "dim": "dim",
    "degree": "degree",
    "qnorm": "qnorm",
    "terms": "terms",
    "n": "n",
    "oversample": "oversample",
    "reps": "repetitions",
    "ntest": "n_test",
    "seed": "seed",
    "out": "out",
    "mode": "descent_mode",
    "workers": "workers",
    "timings": "timings",
}


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if "-" in part.strip()[1:]:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def _common(p: argparse.ArgumentParser, model=True):
    if model:
        p.add_argument("--model", choices=sorted(MODELS))
    p.add_argument("--dim", type=int)
    p.add_argument("--degree", type=int, help="total polynomial degree p")
    p.add_argument("--qnorm", type=float, help="q-norm of the index set, in (0, 1]")
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=["full", "block_coordinate"], help="descent mode for gd")
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="doptdesign", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="emit one experimental design")
    _common(p)
    p.add_argument("--sampler", choices=SAMPLER_KINDS, default="gd")
    p.add_argument("--terms", type=int, help="number of basis terms l")
    p.add_argument("--n", type=int)
    p.add_argument("--oversample", type=float, default=1.0)
    p.add_argument("--domain", default="box", choices=["box", *sorted(DOMAINS)])
    p.add_argument("--skip", type=int, default=1, help="leading Sobol points to drop")
    p.add_argument("--trace", help="write the descent trace CSV here (gd only)")

    p = sub.add_parser("fit", help="fit a surrogate to a design CSV")
    _common(p)
    p.add_argument("--design", required=True, help="design CSV on [-1, 1]^d")
    p.add_argument("--terms", type=int)
    p.add_argument("--ntest", type=int, help="also report the relative max error")

    p = sub.add_parser("bench", help="repeated accuracy experiment")
    _common(p)
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--sampler", help="comma-separated arms, e.g. gd,lhs,sobol")
    p.add_argument("--terms", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--oversample", type=float)
    p.add_argument("--reps", type=int)
    p.add_argument("--ntest", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--timings", action="store_true", default=None,
                   help="add a wall_time column (breaks byte-identical reruns)")

    p = sub.add_parser("lebesgue", help="Lebesgue-constant sweep over basis sizes")
    _common(p, model=False)
    p.add_argument("--sampler", default="gd", help="comma-separated arms")
    p.add_argument("--terms", required=True, type=_int_list,
                   help="basis sizes l, e.g. 2-10 or 10,20,30")
    p.add_argument("--oversample", type=float, default=1.0)
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--ntest", type=int, default=1_000_000)

    p = sub.add_parser("domains", help="descent design in a non-rectangular domain")
    p.add_argument("--domain", required=True, choices=sorted(DOMAINS))
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--degree", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["full", "block_coordinate"], default="full")
    p.add_argument("--out", required=True)
    return parser


def _index_set(args, dim):
    q = args.qnorm if args.qnorm is not None else 1.0
    if getattr(args, "terms", None) is not None:
        return index_set_for_terms(dim, args.terms, q)
    if args.degree is None:
        raise SystemExit("give --degree or --terms")
    return build_index_set(dim, args.degree, q)


def _dim(args):
    if args.model is not None:
        dim = get_model(args.model).dimension
        if args.dim is not None and args.dim != dim:
            raise SystemExit(f"model {args.model} has dimension {dim}")
        return dim
    if args.dim is None:
        raise SystemExit("give --dim or --model")
    return args.dim


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        write_atomic(out, text)


def cmd_sample(args) -> int:
    if args.domain != "box":
        domain = get_domain(args.domain)
        dim = domain.dimension
    else:
        dim = _dim(args)
        domain = unit_box(dim)
    index_set = _index_set(args, dim)
    n = design_size(len(index_set), args.oversample, args.n)
    seed = args.seed if args.seed is not None else 0
    spec = dataclasses.replace(make_sampler_spec(args.sampler, seed, args.mode or "full"),
                               skip=args.skip)
    if args.sampler == "gd" and args.trace:
        X, trace = sample_gd(index_set, n, domain, seed, spec.descent, return_trace=True)
        write_atomic(args.trace, trace.to_csv())
    else:
        X = sample(spec, index_set, n, domain)
    text = X.to_json() + "\n" if str(args.out).endswith(".json") else X.to_csv()
    _emit(text, args.out)
    return 0


def cmd_fit(args) -> int:
    text = Path(args.design).read_text()
    X = ExperimentalDesign.from_csv(text)
    if args.model is None:
        raise SystemExit("fit needs --model")
    model = get_model(args.model)
    if X.dimension != model.dimension:
        raise SystemExit("design dimension does not match the model")
    index_set = _index_set(args, X.dimension)
    surrogate = fit(assemble_model_matrix(X, index_set), model.on_unit_box(X.points))
    _emit(surrogate.to_json() + "\n", args.out)
    if args.ntest:
        seed = args.seed if args.seed is not None else 0
        testset = uniform_test_set(args.ntest, unit_box(X.dimension),
                                   child_seed(seed, 0, "testset"))
        err = rel_error_inf(model.on_unit_box, surrogate, testset)
        print(f"delta_inf {err:.6e}", file=sys.stderr)
    return 0


def _bench_configs(args) -> list[ExperimentConfig]:
    data = {}
    if args.config:
        data = json.loads(Path(args.config).read_text())
    for flag, name in CONFIG_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            data[name] = value
    arms = data.pop("sampler", "gd")
    if args.sampler is not None:
        arms = args.sampler
    if isinstance(arms, str):
        arms = arms.split(",")
    return [ExperimentConfig.from_dict({**data, "sampler": arm.strip()}) for arm in arms]


def cmd_bench(args) -> int:
    configs = _bench_configs(args)
    results = [run_accuracy_experiment(c) for c in configs]
    for res in results:
        agg = res.aggregates
        print(f"{res.config.sampler:8s} l={res.records[0]['l']} n={res.records[0]['n']} "
              f"median={agg.get('median', float('nan')):.4e} failures={agg['failures']}",
              file=sys.stderr)
    out = configs[0].out
    if out is None:
        raise SystemExit("bench needs --out (directory) or 'out' in the config file")
    write_experiment(results, out)
    return 0


def cmd_lebesgue(args) -> int:
    dim = args.dim if args.dim is not None else 1
    out = Path(args.out) if args.out else None
    if out is None:
        raise SystemExit("lebesgue needs --out (directory)")
    records, aggregates = [], []
    arms = args.sampler.split(",")
    for k, arm in enumerate(arms):
        sweep = run_lebesgue_sweep(
            args.terms, sampler=arm.strip(), dim=dim,
            qnorm=args.qnorm if args.qnorm is not None else 1.0,
            repetitions=args.reps, n_test=args.ntest,
            seed=args.seed if args.seed is not None else 0,
            oversample=args.oversample, descent_mode=args.mode or "full",
            reference=(dim == 1 and k == 0),
        )
        records += sweep["records"]
        aggregates += sweep["aggregates"]
    rec_csv, agg_csv = lebesgue_csvs({"records": records, "aggregates": aggregates})
    write_atomic(out / "lebesgue_records.csv", rec_csv)
    write_atomic(out / "lebesgue_summary.csv", agg_csv)
    return 0


def cmd_domains(args) -> int:
    run_domain_demo(args.domain, args.n, args.degree, args.seed, args.out, args.mode)
    return 0


COMMANDS = {
    "sample": cmd_sample,
    "fit": cmd_fit,
    "bench": cmd_bench,
    "lebesgue": cmd_lebesgue,
    "domains": cmd_domains,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
