#!/usr/bin/env python3
"""
reduct-atlas command line.

Subcommands: catalog, classify, enumerate, verify, acl, akset, labelling.
Reports go to stdout (or --out) as canonical JSON; logs go to stderr.

Exit codes: 0 ok, 2 usage/bounds, 3 internal check, 4 precondition,
5 property violation.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

from algebra.errors import ParseError, ReductAtlasError
from algebra.perm_engine import (
    PermGroup,
    generate,
    gl_group,
    read_generator_file,
    sym_fixing_zero,
    sym_group,
    write_generator_file,
)
from reducts.classification import a_k_set, acl_pair, catalog, classify
from reducts.gamma_sigma import GammaSubgroup, gamma_subgroups, make_labelling, sim_classes
from reducts.geometry import agl_group
from reducts.interval_enum import cross_check, enumerate_overgroups
from tools.report import emit, emit_error
from tools.run_config import (
    DEFAULT_MAX_ORBIT,
    DEFAULT_SEED,
    RunConfig,
    default_log_level,
    default_workers,
)
from tools.verify_suites import SUITES, run_suite

logger = logging.getLogger(__name__)

NAMED_GROUPS: Dict[str, Callable[[int, int], PermGroup]] = {
    "gl": gl_group,
    "agl": agl_group,
    "sym": lambda p, n: sym_group(p ** n),
    "sym0": lambda p, n: sym_fixing_zero(p ** n),
}


def _parse_index_list(text: str) -> List[int]:
    try:
        return [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError:
        raise ParseError(f"expected comma-separated vector indices, got {text!r}")


def resolve_group(cfg: RunConfig, args: argparse.Namespace, default: str) -> PermGroup:
    if getattr(args, "generators", None):
        p, n, gens = read_generator_file(args.generators)
        if (p, n) != (cfg.p, cfg.n):
            raise ParseError(f"generator file is for p={p} n={n}, run is for p={cfg.p} n={cfg.n}")
        return generate(gens, degree=p ** n, seed=cfg.seed)
    name = getattr(args, "group", None) or default
    return NAMED_GROUPS[name](cfg.p, cfg.n)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_catalog(cfg: RunConfig, args: argparse.Namespace) -> int:
    entries = catalog(cfg.p, cfg.n, workers=cfg.workers, deadline=cfg.deadline,
                      max_points=cfg.effective_bound())
    body = {"count": len(entries), "entries": [e.to_json() for e in entries]}
    emit(cfg, body)
    if cfg.out is not None:
        gen_dir = cfg.out.with_name(cfg.out.stem + "_generators")
        gen_dir.mkdir(parents=True, exist_ok=True)
        for i, entry in enumerate(entries):
            write_generator_file(gen_dir / f"group_{i:03d}.txt", cfg.p, cfg.n, entry.group.generators)
        logger.info(f"Generator files written to {gen_dir}")
    return 0


def cmd_classify(cfg: RunConfig, args: argparse.Namespace) -> int:
    G = resolve_group(cfg, args, "gl")
    record = classify(G, cfg.space())
    emit(cfg, {"record": record.to_json()})
    return 0


def cmd_enumerate(cfg: RunConfig, args: argparse.Namespace) -> int:
    report = enumerate_overgroups(cfg.p, cfg.n, max_points=cfg.effective_bound(),
                                  workers=cfg.workers, deadline=cfg.deadline, seed=cfg.seed)
    if not args.no_cross_check:
        entries = catalog(cfg.p, cfg.n, workers=cfg.workers, deadline=cfg.deadline,
                          max_points=max(cfg.effective_bound(), cfg.p ** cfg.n))
        cross_check(report, entries)
    emit(cfg, report.to_json())
    return 0


def cmd_verify(cfg: RunConfig, args: argparse.Namespace) -> int:
    emit(cfg, run_suite(cfg, args.suite))
    return 0


def cmd_acl(cfg: RunConfig, args: argparse.Namespace) -> int:
    G = resolve_group(cfg, args, "agl")
    closure = acl_pair(G, args.v, args.w, cfg.space())
    emit(cfg, {"v": args.v, "w": args.w, "acl": sorted(closure), "size": len(closure)})
    return 0


def cmd_akset(cfg: RunConfig, args: argparse.Namespace) -> int:
    G = resolve_group(cfg, args, "gl")
    result = a_k_set(G, _parse_index_list(args.S), args.k, limit=cfg.max_orbit,
                     space=cfg.space(), deadline=cfg.deadline)
    body = result.to_json()
    body["group"] = str(args.generators) if args.generators else (args.group or "gl")
    emit(cfg, body)
    return 0


def cmd_labelling(cfg: RunConfig, args: argparse.Namespace) -> int:
    order = args.gamma_order or cfg.p - 1
    gamma: Optional[GammaSubgroup] = next((g for g in gamma_subgroups(cfg.p) if g.order == order), None)
    if gamma is None:
        raise ParseError(f"F_{cfg.p}^x has no subgroup of order {order}")
    part = sim_classes(cfg.p, cfg.n, gamma)
    f = make_labelling(part)
    emit(cfg, {"gamma": list(gamma.elements), "labels": f.to_json(), "classes": part.blocks()})
    return 0


COMMANDS: Dict[str, Callable[[RunConfig, argparse.Namespace], int]] = {
    "catalog": cmd_catalog,
    "classify": cmd_classify,
    "enumerate": cmd_enumerate,
    "verify": cmd_verify,
    "acl": cmd_acl,
    "akset": cmd_akset,
    "labelling": cmd_labelling,
}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="odd prime")
    common.add_argument("--n", type=int, help="dimension")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--workers", type=int, default=None,
                        help="worker processes (default: $REDUCT_ATLAS_WORKERS or 1)")
    common.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")
    common.add_argument("--allow-large", action="store_true", help="lift the per-command p^n bound")
    common.add_argument("--max-degree", type=int, default=None, help="override the per-command p^n bound")
    common.add_argument("--max-orbit", type=int, default=DEFAULT_MAX_ORBIT)
    common.add_argument("--time-limit", type=float, default=None, help="seconds")
    common.add_argument("--log-level", default=None, choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    group_args = argparse.ArgumentParser(add_help=False)
    group_args.add_argument("--group", choices=sorted(NAMED_GROUPS))
    group_args.add_argument("--generators", type=Path, help="generator file (`p n` header, one permutation per line)")

    parser = argparse.ArgumentParser(
        prog="reduct-atlas",
        description="Groups between Aut(F_p^n) and Sym(F_p^n): catalog, classification and checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("catalog", parents=[common],
                   help="build and classify every candidate group (|Gamma| <= 4, so p = 3 or 5)")
    sub.add_parser("classify", parents=[common, group_args], help="classify one group")
    enum = sub.add_parser("enumerate", parents=[common], help="enumerate all overgroups of GL(V)")
    enum.add_argument("--no-cross-check", action="store_true", help="skip matching against the catalog")

    verify = sub.add_parser("verify", parents=[common], help="run a property suite")
    verify.add_argument("--suite", required=True, choices=sorted(SUITES))
    verify.add_argument("--samples", type=int, default=1000)

    acl = sub.add_parser("acl", parents=[common, group_args], help="closure of a pair of vectors")
    acl.add_argument("--v", type=int, required=True)
    acl.add_argument("--w", type=int, required=True)

    akset = sub.add_parser("akset", parents=[common, group_args], help="A_k(S) and its shape")
    akset.add_argument("--S", required=True, help="comma-separated vector indices")
    akset.add_argument("--k", type=int, required=True)

    labelling = sub.add_parser("labelling", parents=[common], help="canonical Gamma-labelling")
    labelling.add_argument("--gamma-order", type=int, default=None, help="|Gamma| (default p - 1)")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    p, n = args.p, args.n
    generators = getattr(args, "generators", None)
    if generators is not None and (p is None or n is None):
        p, n, _ = read_generator_file(generators)
    if p is None or n is None:
        raise ParseError("--p and --n are required")
    cfg = RunConfig(
        command=args.command,
        p=p,
        n=n,
        seed=args.seed,
        workers=args.workers if args.workers is not None else default_workers(),
        inputs=[generators] if generators is not None else [],
        out=args.out,
        max_degree=args.max_degree,
        max_orbit=args.max_orbit,
        time_limit=args.time_limit,
        allow_large=args.allow_large,
        samples=getattr(args, "samples", 1000),
    )
    return cfg.validate()


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=args.log_level or default_log_level(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    logger.info(f"Starting {args.command}")
    try:
        cfg = config_from_args(args)
        return COMMANDS[args.command](cfg, args)
    except ReductAtlasError as e:
        logger.error(f"{type(e).__name__}: {e}")
        emit_error(e.to_dict())
        return e.exit_code
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        emit_error({"error": str(e), "type": type(e).__name__, "details": {}})
        return 2


if __name__ == "__main__":
    sys.exit(main())
