"""Command line: basis, cohomology, verify, predict, ladder."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Sequence

from . import oracle
from .cohomology import SCHEMA_VERSION, full_report, reports_to_csv
from .couplings import CouplingScheme, all_ones, parse_couplings
from .cut_paste import ladder_row
from .double_complex import PRESETS
from .linalg import prime_seed, set_prime_seed
from .state_space import ChainSpec, InvalidSpec, ResourceError, enumerate_basis
from .verification import SweepOptions, default_jobs, make_specs, run_sweep

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_range(text: str) -> list[int]:
    """'5' -> [5]; '1..4' -> [1, 2, 3, 4]; '1,3,7' -> [1, 3, 7]."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
            if lo > hi:
                raise ValueError
            return list(range(lo, hi + 1))
        return sorted({int(x) for x in text.split(",")})
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, a range a..b or a list, got {text!r}") from None


def parse_pair(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(",")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected c1,cN, got {text!r}") from None


def _add_spec_args(p: argparse.ArgumentParser, default_kind: str) -> None:
    p.add_argument("--ell", type=parse_range, required=True, help="cluster bound; integer or range a..b")
    p.add_argument("--sites", type=parse_range, required=True, help="chain length; integer or range a..b")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--periodic", action="store_true", help="closed chain")
    g.add_argument("--free", action="store_true", help="open chain, special(ell, ell)")
    g.add_argument("--special", type=parse_pair, metavar="C1,CN", help="open chain with capped end clusters")
    g.add_argument("--all-boundaries", action="store_true", help="periodic plus every (c1, cN) in [0, ell]^2")
    p.set_defaults(default_kind=default_kind)


def _add_coupling_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--couplings", help="primitive amplitudes lambda_{m,1}, comma-separated rationals p/q")


def specs_from_args(args) -> list[ChainSpec]:
    if args.special is not None:
        c1, cN = args.special
        specs = [ChainSpec.special(n, ell, c1, cN) for ell in args.ell for n in args.sites]
        return sorted(specs, key=lambda s: s.sort_key)
    if args.periodic:
        kinds = ["periodic"]
    elif args.free:
        kinds = ["free"]
    elif args.all_boundaries:
        kinds = ["periodic", "special"]
    else:
        kinds = args.default_kind
    return make_specs(args.ell, args.sites, kinds)


def scheme_for(args, ell: int) -> CouplingScheme:
    if not getattr(args, "couplings", None):
        return all_ones(ell)
    scheme = parse_couplings(args.couplings)
    if scheme.max_cluster != ell:
        raise UsageError(f"--couplings gives {scheme.max_cluster} amplitudes but ell={ell}")
    return scheme


def header(command: str, args) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "seed": args.seed, "prime_seed": prime_seed()}


def header_line(h: dict) -> str:
    return "# " + " ".join(f"{k}={v}" for k, v in h.items())


def emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# subcommands


def cmd_basis(args) -> int:
    out = []
    for spec in specs_from_args(args):
        out.append(enumerate_basis(spec).to_dict())
    if args.json or args.output:
        payload = out[0] if len(out) == 1 else {"schema_version": SCHEMA_VERSION, "bases": out}
        emit(json.dumps(payload, sort_keys=True), args.output)
    else:
        for spec, b in zip(specs_from_args(args), out):
            print(f"{spec.label():<28} dims {[g['dim'] for g in b['grades']]}")
    return EXIT_OK


def cmd_cohomology(args) -> int:
    reports = [
        full_report(spec, scheme_for(args, spec.max_cluster), check_hamiltonian=args.check_hamiltonian)
        for spec in specs_from_args(args)
    ]
    if args.json:
        emit(json.dumps({**header("cohomology", args), "reports": [r.to_dict() for r in reports]}, sort_keys=True), args.output)
    elif args.csv:
        emit(reports_to_csv(reports).rstrip("\n"), args.output)
    else:
        lines = [header_line(header("cohomology", args))]
        for r in reports:
            nz = ", ".join(f"f={f}: {b}" for f, b in r.nonzero.items()) or "trivial"
            line = f"{r.spec.label():<28} {nz:<18} witten={r.witten_index:+d} oracle={'ok' if r.oracle_ok else 'MISMATCH'}"
            if args.check_hamiltonian:
                line += f" kerH={'ok' if r.hamiltonian_ok else 'MISMATCH'}"
            lines.append(line)
        emit("\n".join(lines), args.output)
    bad = any(not r.oracle_ok or r.hamiltonian_ok is False for r in reports)
    return EXIT_MISMATCH if bad else EXIT_OK


def cmd_verify(args) -> int:
    specs = specs_from_args(args)
    if args.couplings:
        ells = {s.max_cluster for s in specs}
        if len(ells) != 1:
            raise UsageError("--couplings needs a single --ell value")
    options = SweepOptions(
        scheme=scheme_for(args, specs[0].max_cluster) if args.couplings else None,
        check_hamiltonian=args.check_hamiltonian,
        numeric=args.numeric,
        structural=args.structural,
        ladder=args.ladder,
        ttt=tuple(args.ttt or ()),
        random_couplings=args.random_couplings,
        seed=args.seed,
    )
    results = run_sweep(specs, options, jobs=args.jobs)
    n_bad = sum(not r.ok for r in results)
    if args.json:
        payload = {**header("verify", args), "results": [r.to_dict() for r in results], "mismatches": n_bad}
        emit(json.dumps(payload, sort_keys=True), args.output)
    else:
        lines = [header_line(header("verify", args))]
        for r in results:
            nz = ", ".join(f"f={f}: {b}" for f, b in r.report.nonzero.items()) or "trivial"
            extra = []
            if r.ladder is not None:
                extra.append(f"ladder N'={r.ladder.small.n_sites}")
            for t in r.ttt:
                extra.append(f"ttt {t.preset} row={t.row}")
            if r.trials:
                extra.append(f"{len(r.trials)} random schemes")
            status = "OK" if r.ok else "MISMATCH " + ",".join(r.failures)
            lines.append(f"{r.spec.label():<28} {nz:<18} {'; '.join(extra):<40} {status}".rstrip())
        lines.append(f"# {len(results)} specs, {n_bad} mismatches")
        emit("\n".join(lines), args.output)
    return EXIT_MISMATCH if n_bad else EXIT_OK


def cmd_predict(args) -> int:
    if args.grid:
        blocks = []
        for ell in args.ell:
            for n in args.sites:
                grid = oracle.region_table(ell, n)
                if args.csv:
                    blocks.append(f"# ell={ell} N={n}\n" + oracle.region_csv(grid).rstrip("\n"))
                else:
                    n_, p = oracle.decompose_length(n, ell)
                    blocks.append(f"ell={ell} N={n} (n={n_}, p={p})\n" + oracle.render_diagram(grid))
        emit("\n\n".join(blocks), args.output)
        return EXIT_OK
    rows = []
    for spec in specs_from_args(args):
        n, p = oracle.decompose_length(spec.n_sites, spec.max_cluster)
        rows.append({"spec": spec.to_dict(), "label": spec.label(), "n": n, "p": p, "prediction": oracle.predict(spec)})
    if args.json:
        payload = {"schema_version": SCHEMA_VERSION, "predictions": [{k: v for k, v in r.items() if k != "label"} for r in rows]}
        emit(json.dumps(payload, sort_keys=True), args.output)
    else:
        lines = []
        for r in rows:
            pred = ", ".join(f"f={f}: {m}" for f, m in r["prediction"]) or "trivial"
            lines.append(f"{r['label']:<28} n={r['n']} p={r['p']}  {pred}")
        emit("\n".join(lines), args.output)
    return EXIT_OK


def cmd_ladder(args) -> int:
    rows = []
    for spec in specs_from_args(args):
        if spec.n_sites > 2 * spec.max_cluster + 2:
            rows.append(ladder_row(spec, scheme_for(args, spec.max_cluster)))
    if not rows:
        raise UsageError("no spec with N > 2*ell + 2 in the requested range")
    bad = sum(not r.ok for r in rows)
    if args.json:
        payload = {**header("ladder", args), "rows": [r.to_dict() for r in rows], "mismatches": bad}
        emit(json.dumps(payload, sort_keys=True), args.output)
    else:
        lines = [header_line(header("ladder", args)), f"{'spec':<28} {'N':>3} {'N-l-2':>5}  per-grade match (f>=l)"]
        for r in rows:
            marks = " ".join(f"{f}:{'y' if m else 'N'}" for f, m in r.matches().items())
            lines.append(f"{r.spec.label():<28} {r.spec.n_sites:>3} {r.small.n_sites:>5}  {marks}  {'OK' if r.ok else 'MISMATCH'}")
        emit("\n".join(lines), args.output)
    return EXIT_MISMATCH if bad else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mell", description="Exact cohomology of the M_l lattice fermion chains.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--output", "-o", help="write to a file instead of stdout")
        p.add_argument("--seed", type=int, default=0, help="seed for random couplings and the modular prime")

    p = sub.add_parser("basis", help="enumerate the allowed configurations")
    _add_spec_args(p, ["free"])
    common(p)
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("cohomology", help="cohomology dimensions per fermion number")
    _add_spec_args(p, ["free"])
    _add_coupling_args(p)
    p.add_argument("--check-hamiltonian", action="store_true", help="compare with exact dim ker H_f")
    p.add_argument("--csv", action="store_true", help="one CSV row per (spec, f)")
    common(p)
    p.set_defaults(func=cmd_cohomology)

    p = sub.add_parser("verify", help="sweep specs and compare with the closed-form predictions")
    _add_spec_args(p, ["periodic", "special"])
    _add_coupling_args(p)
    p.add_argument("--check-hamiltonian", action="store_true", help="exact kernel of H, symmetry and [H,Q]=0")
    p.add_argument("--numeric", action="store_true", help="floating-point zero-mode counts of H (advisory)")
    p.add_argument("--structural", action="store_true", help="Q^2 = 0 and Euler characteristic checks")
    p.add_argument("--ladder", action="store_true", help="cut-and-paste dimension shift")
    p.add_argument("--ttt", action="append", choices=sorted(PRESETS), help="tic-tac-toe check with a split preset")
    p.add_argument("--random-couplings", type=int, default=0, metavar="K", help="K random schemes per spec")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default from MELL_JOBS, else 1)")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("predict", help="closed-form predictions")
    _add_spec_args(p, ["periodic", "special"])
    p.add_argument("--grid", action="store_true", help="(c1, cN) region diagram per length")
    p.add_argument("--csv", action="store_true", help="grid as CSV")
    common(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("ladder", help="compare cohomology of N and N-(ell+2) sites")
    _add_spec_args(p, ["periodic", "special"])
    _add_coupling_args(p)
    common(p)
    p.set_defaults(func=cmd_ladder)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    set_prime_seed(args.seed)
    try:
        return args.func(args)
    except (InvalidSpec, UsageError, ValueError) as exc:
        print(f"mell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"mell: resource limit: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
