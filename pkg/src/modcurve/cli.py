"""``modcurve`` command line: invariants, tables, verification, comparison.

Exit codes: 0 ok, 1 usage error, 2 formula/brute-force mismatch,
3 disagreement with a reference file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass

from . import _kernels
from .families import FAMILIES, TWO_PARAMETER, FamilyError, SubgroupSpec
from .formulas import InconsistentInvariants, InvariantSet, invariants_formula
from .matgrp import CapExceeded, invariants_bruteforce
from .verify import admissible_specs, run_checks

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_DISAGREE = 0, 1, 2, 3

FIELDS = ("family", "level", "m", "psl2_index", "nu2", "nu3", "cusps", "genus", "method")
INT_FIELDS = FIELDS[1:-1]
METHODS = ("formula", "bruteforce")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class InvariantRecord:
    family: str
    level: int
    m: int
    psl2_index: int
    nu2: int
    nu3: int
    cusps: int
    genus: int
    method: str

    @classmethod
    def build(cls, spec: SubgroupSpec, inv: InvariantSet) -> "InvariantRecord":
        return cls(spec.family, spec.level, spec.m or 0, *inv.values, inv.method)

    @classmethod
    def from_mapping(cls, row) -> "InvariantRecord":
        """Parse one CSV/JSON row; raises ValueError on anything malformed."""
        missing = [k for k in FIELDS if k not in row]
        if missing:
            raise ValueError(f"missing fields {missing}")
        values = {}
        for k in INT_FIELDS:
            v = row[k]
            if isinstance(v, bool) or not isinstance(v, (int, str)):
                raise ValueError(f"{k} is not an integer: {v!r}")
            try:
                values[k] = int(v)
            except ValueError:
                raise ValueError(f"{k} is not an integer: {v!r}") from None
        return cls(family=str(row["family"]).strip(), method=str(row["method"]).strip(),
                   **values)

    def spec(self) -> SubgroupSpec:
        return SubgroupSpec(self.family, self.level,
                            self.m if self.family in TWO_PARAMETER else None)

    @property
    def counts(self) -> tuple[int, int, int, int, int]:
        return self.psl2_index, self.nu2, self.nu3, self.cusps, self.genus

    def row(self) -> list:
        return [getattr(self, k) for k in FIELDS]


def to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    w.writerows(r.row() for r in records)
    return buf.getvalue()


def to_json(records) -> str:
    return json.dumps([asdict(r) for r in records], indent=2) + "\n"


def from_csv(text: str) -> list[InvariantRecord]:
    return [InvariantRecord.from_mapping(r) for r in csv.DictReader(io.StringIO(text))]


def from_json(text: str) -> list[InvariantRecord]:
    return [InvariantRecord.from_mapping(r) for r in json.loads(text)]


# -- argument handling -------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _family_list(text: str) -> list[str]:
    if text.strip().lower() == "all":
        return list(FAMILIES)
    fams = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in fams if f not in FAMILIES]
    if bad:
        raise argparse.ArgumentTypeError(
            f"unknown family {', '.join(bad)}; choose from {', '.join(FAMILIES)}")
    return fams


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-sl2-elements", type=_positive, default=None, metavar="K",
                        help="refuse brute force when |SL2(Z/NZ)| exceeds K "
                             "(default $MODCURVE_MAX_SL2 or 10^7)")
    common.add_argument("--backend", choices=sorted(_kernels.BACKENDS), default=None,
                        help="engine kernels (default $MODCURVE_BACKEND, else numba if present)")

    p = _Parser(prog="modcurve", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    inv = sub.add_parser("invariants", parents=[common],
                         help="invariants of one curve")
    inv.add_argument("family_pos", nargs="?", metavar="FAMILY")
    inv.add_argument("level_pos", nargs="?", type=_positive, metavar="LEVEL")
    inv.add_argument("--family", choices=FAMILIES)
    inv.add_argument("--level", type=_positive)
    inv.add_argument("--m", type=_positive, help="M for arith1/arithpm1")
    inv.add_argument("--method", choices=(*METHODS, "both"), default="formula")
    inv.add_argument("--format", choices=("text", "csv", "json"), default="text")

    tab = sub.add_parser("table", parents=[common], help="emit a table of invariants")
    tab.add_argument("--families", type=_family_list, default=list(FAMILIES),
                     help="comma-separated tags or 'all' (default all)")
    tab.add_argument("--min-level", type=_positive, default=1)
    tab.add_argument("--max-level", type=_positive, default=12)
    tab.add_argument("--arith-max-modulus", type=_positive, default=None,
                     help="largest M*N for arith families (default: max level)")
    tab.add_argument("--method", choices=METHODS, default="formula")
    tab.add_argument("--format", choices=("csv", "json"), default="csv")
    tab.add_argument("--out", default="-", help="output file, '-' for stdout")

    ver = sub.add_parser("verify", parents=[common],
                         help="compare formulas with brute force over a range")
    ver.add_argument("--families", type=_family_list, default=list(FAMILIES))
    ver.add_argument("--max-level", type=_positive, default=20)
    ver.add_argument("--arith-max-modulus", type=_positive, default=None)
    ver.add_argument("--s4-max-prime", type=_positive, default=None)
    ver.add_argument("--workers", type=_positive, default=1)
    ver.add_argument("--json", dest="json_out", default=None,
                     help="write the full report as JSON to this path ('-' for stdout)")
    ver.add_argument("--timings", action="store_true",
                     help="include wall times in the JSON report")

    cmp_ = sub.add_parser("compare", parents=[common],
                          help="check a reference CSV against the formulas")
    cmp_.add_argument("reference", help="CSV file with the table header")
    return p


def _compute(spec: SubgroupSpec, method: str, args) -> InvariantSet:
    if method == "formula":
        return invariants_formula(spec)
    return invariants_bruteforce(spec, cap=args.max_sl2_elements, backend=args.backend)


def _write(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _format_text(rec: InvariantRecord) -> str:
    m = f" M={rec.m}" if rec.family in TWO_PARAMETER else ""
    return (f"{rec.family} N={rec.level}{m}: i={rec.psl2_index} nu2={rec.nu2} "
            f"nu3={rec.nu3} cusps={rec.cusps} genus={rec.genus} [{rec.method}]")


# -- commands ----------------------------------------------------------------


def cmd_invariants(args) -> int:
    family = args.family or args.family_pos
    level = args.level or args.level_pos
    if family is None or level is None:
        raise UsageError("need a family and a level")
    if args.family and args.family_pos and args.family != args.family_pos:
        raise UsageError("family given twice with different values")
    if family in TWO_PARAMETER and args.m is None:
        raise UsageError(f"{family} needs --m")
    spec = SubgroupSpec(family, level, args.m if family in TWO_PARAMETER else None)
    methods = METHODS if args.method == "both" else (args.method,)
    records = [InvariantRecord.build(spec, _compute(spec, m, args))
               for m in methods]
    if args.format == "csv":
        out = to_csv(records)
    elif args.format == "json":
        out = to_json(records)
    else:
        out = "".join(_format_text(r) + "\n" for r in records)
    sys.stdout.write(out)
    if len(records) == 2:
        same = records[0].counts == records[1].counts
        print("MATCH" if same else "MISMATCH")
        return EXIT_OK if same else EXIT_MISMATCH
    return EXIT_OK


def cmd_table(args) -> int:
    if args.min_level > args.max_level:
        raise UsageError(f"--min-level {args.min_level} exceeds --max-level {args.max_level}")
    specs = admissible_specs(args.families, args.max_level, min_level=args.min_level,
                             arith_max_modulus=args.arith_max_modulus)
    records = [InvariantRecord.build(s, _compute(s, args.method, args))
               for s in specs]
    _write((to_csv if args.format == "csv" else to_json)(records), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    specs = admissible_specs(args.families, args.max_level,
                             arith_max_modulus=args.arith_max_modulus,
                             s4_max_prime=args.s4_max_prime)
    report = run_checks(specs, cap=args.max_sl2_elements, backend=args.backend,
                        workers=args.workers)
    if args.json_out:
        _write(report.to_json(timings=args.timings), args.json_out)
    for e in report.failures:
        what = e.error or f"formula {e.formula.values} != bruteforce {e.bruteforce.values}"
        print(f"MISMATCH {e.spec.label}: {what}", file=sys.stderr)
    s = report.summary
    if args.json_out != "-":
        print(f"checked {s['total']}: {s['matched']} matched, "
              f"{s['mismatched']} mismatched, {s['errors']} errors")
    return EXIT_OK if report.ok else EXIT_MISMATCH


def cmd_compare(args) -> int:
    try:
        with open(args.reference, encoding="utf-8", newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.reference}: {exc.strerror}") from None
    lines = text.splitlines()
    if not any(line.strip() for line in lines):
        print("compared 0 rows: 0 agree, 0 disagree")
        return EXIT_OK
    header = next(csv.reader([lines[0]]))
    if tuple(h.strip() for h in header) != FIELDS:
        print(f"line 1: bad header, expected {','.join(FIELDS)}", file=sys.stderr)
        return EXIT_USAGE

    agree = disagree = malformed = 0
    for lineno, raw in enumerate(csv.reader(lines[1:]), start=2):
        if not raw or not any(c.strip() for c in raw):
            continue
        if len(raw) != len(FIELDS):
            print(f"line {lineno}: expected {len(FIELDS)} fields, got {len(raw)}",
                  file=sys.stderr)
            malformed += 1
            continue
        row = dict(zip(FIELDS, (c.strip() for c in raw)))
        if row["family"] not in FAMILIES:
            print(f"line {lineno}: warning: unknown family {row['family']!r}, skipped",
                  file=sys.stderr)
            continue
        try:
            ref = InvariantRecord.from_mapping(row)
            got = InvariantRecord.build(ref.spec(), invariants_formula(ref.spec()))
        except (ValueError, FamilyError) as exc:
            print(f"line {lineno}: {exc}", file=sys.stderr)
            malformed += 1
            continue
        if got.counts == ref.counts:
            agree += 1
        else:
            disagree += 1
            print(f"line {lineno}: DISAGREE {got.spec().label}: reference {ref.counts}, "
                  f"computed {got.counts}")
    print(f"compared {agree + disagree} rows: {agree} agree, {disagree} disagree"
          + (f", {malformed} malformed" if malformed else ""))
    if disagree:
        return EXIT_DISAGREE
    return EXIT_USAGE if malformed else EXIT_OK


COMMANDS = {
    "invariants": cmd_invariants,
    "table": cmd_table,
    "verify": cmd_verify,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, FamilyError, CapExceeded) as exc:
        print(f"modcurve {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InconsistentInvariants as exc:
        print(f"modcurve {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
