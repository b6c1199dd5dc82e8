"""Command-line interface.

Subcommands: classify, construct, iso, tables, verify.  Exit codes: 0 for
success (for iso: isomorphic), 1 for validation or internal failures, 2 for
usage errors, 3 for a certified negative isomorphism answer.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .classify import (
    ClassificationError,
    ClassifyConfig,
    classify_p4,
    render_table1,
    render_table2,
)
from .extension import ExtensionType, build_group, validate_type
from .groups import FiniteGroup, fingerprint, isomorphic, order_census
from .residues import is_prime
from .verification import run_verification_suite

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_NOT_ISOMORPHIC = 3

CLASSIFY_GUARD = 7  # oracle-based dedup above 7^4 elements is not desk-scale


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _check_odd_prime(p: int) -> Optional[str]:
    if not is_prime(p):
        return f"p must be prime, got {p}"
    if p == 2:
        return "classification is specified for odd primes only"
    return None


def _load_type(path: str) -> ExtensionType:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return ExtensionType.from_json_dict(data)


def cmd_classify(args: argparse.Namespace) -> int:
    msg = _check_odd_prime(args.p)
    if msg:
        return _usage_error(msg)
    if args.p > CLASSIFY_GUARD and not args.force:
        return _usage_error(
            f"classification above p={CLASSIFY_GUARD} exceeds the runtime guard; "
            "pass --force to run anyway"
        )
    try:
        result = classify_p4(ClassifyConfig.for_prime(args.p))
    except ClassificationError as exc:
        print(f"classification failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE

    if args.format == "json":
        print(json.dumps(result.to_json_dict(), indent=2))
    elif args.format == "csv":
        fields = [
            "label", "group_order", "center_invariants", "census_le_p",
            "derived_order", "abelianization_invariants", "exponent",
            "power_quotient_abelian", "low_order_commute",
        ]
        print(",".join(fields))
        for cls in result.classes:
            fp = cls.fingerprint
            print(",".join([
                cls.label,
                str(fp.group_order),
                "|".join(map(str, fp.center_invariants)),
                str(fp.census_le_p),
                str(fp.derived_order),
                "|".join(map(str, fp.abelianization_invariants)),
                str(fp.exponent),
                str(fp.power_quotient_abelian).lower(),
                str(fp.low_order_commute).lower(),
            ]))
    else:
        print(f"groups of order {args.p}^4 = {args.p ** 4}")
        for cls in result.classes:
            fp = cls.fingerprint
            merged = f"  (merged: {', '.join(cls.merged_labels)})" if cls.merged_labels else ""
            center = "x".join(f"C{d}" for d in reversed(fp.center_invariants)) or "1"
            print(
                f"  {cls.label:24s} center={center:12s} "
                f"#order<=p={fp.census_le_p}{merged}"
            )
        print(
            f"total: {result.total} classes "
            f"({result.abelian_count} abelian, {result.nonabelian_count} nonabelian)"
        )
    counts_ok = (result.abelian_count, result.nonabelian_count, result.total) == (5, 10, 15)
    return EXIT_OK if counts_ok else EXIT_FAILURE


def cmd_construct(args: argparse.Namespace) -> int:
    try:
        ext = _load_type(args.type)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    diag = validate_type(ext)
    if diag is not None:
        print(f"invalid extension type: {diag}", file=sys.stderr)
        return EXIT_FAILURE
    if ext.group_order > CLASSIFY_GUARD ** 4 and not args.force:
        return _usage_error(
            f"materializing a group of order {ext.group_order} exceeds the "
            "runtime guard; pass --force to run anyway"
        )
    group = build_group(ext)

    out = sys.stdout
    if args.out:
        out = open(args.out, "w", encoding="utf-8")
    try:
        if args.emit == "cayley":
            print(group.size, file=out)
            for row in group.cayley_rows():
                print(",".join(map(str, row)), file=out)
        elif args.emit == "census":
            print(json.dumps({str(k): v for k, v in order_census(group).items()}), file=out)
        else:
            print(json.dumps(fingerprint(group).to_json_dict(), indent=2), file=out)
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def cmd_iso(args: argparse.Namespace) -> int:
    groups: list[FiniteGroup] = []
    for path in (args.file_a, args.file_b):
        try:
            ext = _load_type(path)
        except (OSError, ValueError, json.JSONDecodeError) as exc:
            print(f"error: {path}: {exc}", file=sys.stderr)
            return EXIT_FAILURE
        diag = validate_type(ext)
        if diag is not None:
            print(f"invalid extension type in {path}: {diag}", file=sys.stderr)
            return EXIT_FAILURE
        if ext.group_order > CLASSIFY_GUARD ** 4 and not args.force:
            return _usage_error(
                f"materializing a group of order {ext.group_order} exceeds the "
                "runtime guard; pass --force to run anyway"
            )
        groups.append(build_group(ext))
    ok, witness = isomorphic(groups[0], groups[1])
    print(json.dumps({"isomorphic": ok, "witness": witness}))
    return EXIT_OK if ok else EXIT_NOT_ISOMORPHIC


def cmd_tables(args: argparse.Namespace) -> int:
    msg = _check_odd_prime(args.p)
    if msg:
        return _usage_error(msg)
    if args.p > CLASSIFY_GUARD and not args.force:
        return _usage_error(
            f"table verification above p={CLASSIFY_GUARD} exceeds the runtime "
            "guard; pass --force to run anyway"
        )
    cfg = ClassifyConfig.for_prime(args.p)
    print(render_table1(cfg))
    print()
    print(render_table2(cfg))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    msg = _check_odd_prime(args.p)
    if msg:
        return _usage_error(msg)
    if args.p > CLASSIFY_GUARD and not args.force:
        return _usage_error(
            f"verification above p={CLASSIFY_GUARD} exceeds the runtime guard; "
            "pass --force to run anyway"
        )
    cfg = ClassifyConfig.for_prime(args.p)
    results = run_verification_suite(cfg, seed=args.seed)
    failed = 0
    for check in results:
        status = "ok" if check.ok else "FAIL"
        detail = f" — {check.detail}" if check.detail else ""
        print(f"[{status}] {check.name}{detail}")
        if not check.ok:
            failed += 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="p4groups",
        description="Construct, inspect, and classify the groups of order p^4.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_classify = sub.add_parser("classify", help="classify all groups of order p^4")
    p_classify.add_argument("--p", type=int, required=True, help="odd prime")
    p_classify.add_argument("--format", choices=("json", "table", "csv"), default="table")
    p_classify.add_argument("--force", action="store_true",
                            help="lift the p<=7 runtime guard")
    p_classify.set_defaults(func=cmd_classify)

    p_construct = sub.add_parser("construct", help="build one group from a type file")
    p_construct.add_argument("--type", required=True, help="path to an extension type JSON file")
    p_construct.add_argument("--emit", choices=("cayley", "fingerprint", "census"),
                             default="fingerprint")
    p_construct.add_argument("--out", help="output path (default: stdout)")
    p_construct.add_argument("--force", action="store_true",
                             help="lift the group size runtime guard")
    p_construct.set_defaults(func=cmd_construct)

    p_iso = sub.add_parser("iso", help="decide isomorphism of two constructed groups")
    p_iso.add_argument("file_a", help="extension type JSON file")
    p_iso.add_argument("file_b", help="extension type JSON file")
    p_iso.add_argument("--force", action="store_true",
                       help="lift the group size runtime guard")
    p_iso.set_defaults(func=cmd_iso)

    p_tables = sub.add_parser("tables", help="print the catalog and classification tables")
    p_tables.add_argument("--p", type=int, required=True, help="odd prime")
    p_tables.add_argument("--force", action="store_true",
                          help="lift the p<=7 runtime guard")
    p_tables.set_defaults(func=cmd_tables)

    p_verify = sub.add_parser("verify", help="run the full property suite")
    p_verify.add_argument("--p", type=int, required=True, help="odd prime (exhaustive tiers need p<=5)")
    p_verify.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    p_verify.add_argument("--force", action="store_true",
                          help="lift the p<=7 runtime guard")
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
