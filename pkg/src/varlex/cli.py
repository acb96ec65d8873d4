"""``varlex`` command line.

Exit codes: 0 success, 1 input error (bad flags, files, hypotheses),
2 verification failure.  Results are JSON on stdout or in ``--out``;
errors are a JSON object ``{"error": ..., "message": ...}`` on stdout.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .domain_grid import GridFunction, domain_from_spec, read_function_csv, write_function_csv
from .errors import ConvergenceError, VarlexError
from .exponent_field import (
    decay_log_holder_constant,
    derive_q,
    exponent_from_spec,
    local_log_holder_constant,
)
from .generators import sweep_family
from .inequality_lab import bound_sweep, verify_lemma, verify_prop1, verify_prop2
from .maximal_ops import CubeFamily, benchmark, fractional_maximal, naive_maximal
from .variable_norm import DEFAULT_TOL, luxemburg_norm

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_domain(path):
    if path is None:
        return None
    try:
        spec = json.loads(Path(path).read_text())
    except OSError as exc:
        raise VarlexError(f"cannot read domain {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise VarlexError(f"{path}: malformed JSON ({exc.msg})") from None
    return domain_from_spec(spec.get("domain", spec), Path(path).parent)


def _config_or_default(args) -> RunConfig:
    return load_config(args.config) if getattr(args, "config", None) else RunConfig()


# -- subcommands --------------------------------------------------------------


def cmd_validate_exponent(args) -> int:
    cfg = _config_or_default(args)
    domain = _load_domain(args.domain) or cfg.build_domain()
    p = exponent_from_spec(args.exponent or cfg.exponent, domain, cfg.base_dir)
    report = {
        "exponent": p.family,
        "p_min": p.p_min,
        "p_max": p.p_max,
        "local_log_holder_C": local_log_holder_constant(p) if domain.active_count > 1 else 0.0,
        "decay_log_holder_C": decay_log_holder_constant(p) if domain.active_count > 1 else 0.0,
    }
    alpha = args.alpha if args.alpha is not None else (cfg.alpha if args.config else None)
    if alpha is not None:
        pair = derive_q(p, alpha)
        report.update(alpha=pair.alpha, q_min=pair.q.p_min, q_max=pair.q.p_max,
                      holder_identity_residual=pair.holder_identity_residual())
    max_c = args.max_c if args.max_c is not None else cfg.max_c
    code = EXIT_OK
    if max_c is not None:
        ok = report["local_log_holder_C"] <= max_c and report["decay_log_holder_C"] <= max_c
        report.update(max_c=max_c, **{"pass": ok})
        code = EXIT_OK if ok else EXIT_VERIFY
    _emit(_dump(report), args.out)
    return code


def cmd_norm(args) -> int:
    domain = _load_domain(args.domain)
    f = read_function_csv(args.function, domain)
    p = exponent_from_spec(args.exponent, f.domain)
    res = luxemburg_norm(f, p, args.tol)
    _emit(_dump({"norm": res.norm, "iterations": res.iterations, "residual": res.residual,
                 "bracket": list(res.bracket)}), args.out)
    return EXIT_OK


def cmd_maximal(args) -> int:
    domain = _load_domain(args.domain)
    f = read_function_csv(args.function, domain)
    family = CubeFamily(args.max_side) if args.max_side else CubeFamily.default(f.domain)
    if args.bench:
        _emit(_dump(benchmark(f, args.alpha, family, repeats=args.repeats)), args.out)
        return EXIT_OK
    op = naive_maximal if args.oracle else fractional_maximal
    _emit(write_function_csv(op(f, args.alpha, family)), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    domain = cfg.build_domain()
    f = cfg.build_function(domain)
    pair = derive_q(cfg.build_exponent(domain), cfg.alpha)
    family = cfg.build_family(domain)
    if args.which == "lemma":
        rep = verify_lemma(f, pair, family, tol=cfg.lemma_tol, keep_fields=args.dump_fields)
    elif args.which == "prop1":
        rep = verify_prop1(f, pair, family, tol=cfg.tol, keep_fields=args.dump_fields)
    else:
        rep = verify_prop2(f, pair, family, tol=cfg.tol, keep_fields=args.dump_fields)
    rep.case_id = Path(args.config).stem + ":" + args.which
    rep.metadata["seed"] = cfg.seed
    _emit(_dump(rep.to_dict(dump_fields=args.dump_fields)), args.out or cfg.out)
    return EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_sweep(args) -> int:
    cfg = _config_or_default(args)
    seed = args.seed if args.seed is not None else cfg.seed
    cases = args.cases if args.cases is not None else cfg.cases
    domain = cfg.build_domain()
    pair = derive_q(cfg.build_exponent(domain), cfg.alpha)
    family = cfg.build_family(domain)
    items = [(cid, prof.sample(domain)) for cid, prof in sweep_family(domain, seed, cases)]
    rep = bound_sweep(items, pair, family, tol=cfg.tol)
    out = rep.to_dict()
    out["seed"] = seed
    out["ratios"] = [{"case_id": cid, "ratio": r} for cid, r in rep.ratios]
    csv_path = args.csv or cfg.csv
    if csv_path:
        Path(csv_path).write_text(rep.to_csv())
    _emit(_dump(out), args.out or cfg.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    shape = (args.m,) * args.n
    domain = domain_from_spec({"n": args.n, "box": [[0.0, 1.0]] * args.n, "resolution": list(shape)})
    rng = np.random.default_rng(args.seed)
    f = GridFunction(domain, rng.random(shape))
    report = benchmark(f, args.alpha, CubeFamily.default(domain), repeats=args.repeats,
                       include_naive=not args.skip_naive)
    _emit(_dump(report), args.out)
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="varlex", description="Variable exponent norms and fractional maximal operators.")
    parser.add_argument("--version", action="version", version=f"varlex {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("validate-exponent", help="exponent bounds and log-Hölder constants")
    p.add_argument("--config")
    p.add_argument("--domain", help="domain JSON")
    p.add_argument("--exponent", help="exponent JSON file or short form (const:2, log_decay:1.5,0.5, ...)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--max-c", type=float, help="fail (exit 2) when a log-Hölder constant exceeds this")
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate_exponent)

    p = sub.add_parser("norm", help="Luxemburg norm of a grid function")
    p.add_argument("--function", required=True, help="grid function CSV")
    p.add_argument("--exponent", required=True)
    p.add_argument("--domain")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--out")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("maximal", help="fractional maximal function (CSV out)")
    p.add_argument("--function", required=True)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--max-side", type=int)
    p.add_argument("--domain")
    p.add_argument("--oracle", action="store_true", help="use the naive enumeration")
    p.add_argument("--bench", action="store_true", help="print cells/second for fast vs naive")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_maximal)

    p = sub.add_parser("verify", help="check the lemma or measure a proposition constant")
    p.add_argument("which", choices=("lemma", "prop1", "prop2"))
    p.add_argument("--config", required=True)
    p.add_argument("--dump-fields", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="norm ratio ||M_a f||_q / ||f||_p over a seeded family")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--cases", type=int)
    p.add_argument("--csv", help="write per-case ratios here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="throughput of the fast path vs the naive oracle")
    p.add_argument("--n", type=int, choices=(1, 2), default=2)
    p.add_argument("--m", type=int, default=32)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--skip-naive", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        if args.command is None:
            raise _UsageError("a subcommand is required (see --help)")
        return args.func(args)
    except _UsageError as exc:
        sys.stdout.write(_dump({"error": "UsageError", "message": str(exc)}))
        return EXIT_INPUT
    except (VarlexError, ConvergenceError) as exc:
        sys.stdout.write(_dump({"error": type(exc).__name__, "message": str(exc)}))
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
