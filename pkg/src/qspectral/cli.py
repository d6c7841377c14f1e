"""Command-line surface: spectrum / classify / check.

Exit codes: 0 ok, 1 invariant violation, 2 parse error, 3 unsupported
request, 4 numerical failure.  QSPECTRAL_SEED overrides the corpus seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .checks import ClassifyFn, corpus, run_all
from .errors import NumericalError, SpecFileError
from .opmodel import Membership, StructuredOperator, classify
from .oracle import BOUNDARY_BAND, cross_check, agreement
from .quat import HalfPlanePoint
from .regions import boundary_distance, spectrum_regions
from .spec_fd import right_eigenspheres
from .specio import OperatorSpecDocument, load_document

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_PARSE = 2
EXIT_UNSUPPORTED = 3
EXIT_NUMERICAL = 4

DEFAULT_GRID_U = 121
GRID_RANGE_U = (Fraction(-3), Fraction(3))
GRID_RANGE_S = (Fraction(0), Fraction(3))

REGION_COLUMNS = ["set", "role", "kind", "u", "s", "radius", "closed",
                  "r_inner", "inner_closed", "r_outer", "outer_closed",
                  "ratio", "start", "limit_included"]


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecFileError(f"bad number {text!r}") from exc


def _parse_point(text: str) -> HalfPlanePoint:
    parts = text.split(",")
    if len(parts) != 2:
        raise SpecFileError("--point expects 'u,s'")
    u, s = (_parse_fraction(p.strip()) for p in parts)
    if s < 0:
        raise SpecFileError("s must be non-negative")
    return HalfPlanePoint(u, s)


def _out_stream(path: Optional[str], stdout) -> tuple:
    if path is None:
        return stdout, False
    return open(path, "w", newline="", encoding="utf-8"), True


def _grid_points(n_u: int):
    lo_u, hi_u = GRID_RANGE_U
    lo_s, hi_s = GRID_RANGE_S
    n_s = (n_u + 1) // 2
    du = (hi_u - lo_u) / (n_u - 1) if n_u > 1 else 0
    ds = (hi_s - lo_s) / (n_s - 1) if n_s > 1 else 0
    for i in range(n_u):
        for j in range(n_s):
            yield HalfPlanePoint(lo_u + du * i, lo_s + ds * j)


# ---------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------

def _emit_matrix_spectrum(doc: OperatorSpecDocument, out) -> None:
    spheres = sorted(right_eigenspheres(doc.matrix).spheres,
                     key=lambda pm: (float(pm[0].u), pm[0].s))
    w = csv.writer(out)
    w.writerow(["u", "s", "multiplicity"])
    for p, mult in spheres:
        w.writerow([float(p.u), p.s, mult])


def _region_csv(name: str, region, out) -> None:
    w = csv.DictWriter(out, fieldnames=REGION_COLUMNS, restval="")
    w.writeheader()
    for row in region.rows():
        row = dict(row)
        row["set"] = name
        w.writerow({k: row.get(k, "") for k in REGION_COLUMNS})


def _grid_csv(op: StructuredOperator, names: Sequence[str], n_u: int,
              out, classify_fn: ClassifyFn) -> None:
    w = csv.writer(out)
    w.writerow(["u", "s"] + list(names) + ["near_boundary"])
    for p in _grid_points(n_u):
        cls = classify_fn(op, p)
        flags = _set_flags(cls)
        row = [float(p.u), p.s]
        for name in names:
            v = flags.get(name, Membership.OUT)
            row.append({Membership.IN: 1, Membership.OUT: 0,
                        Membership.DELEGATED: "unknown-delegated"}[v])
        row.append(int(boundary_distance(op, p) < BOUNDARY_BAND))
        w.writerow(row)


def _set_flags(cls) -> dict:
    flags = {
        "sigma_s": cls.in_spectrum, "sigma_ps": cls.point_spectrum,
        "sigma_rs": cls.residual_spectrum, "sigma_cs": cls.continuous_spectrum,
        "sigma_el": cls.ess_left, "sigma_er": cls.ess_right,
        "sigma_e": cls.essential, "sigma_0": cls.sigma0,
        "ws": cls.weyl, "bs": cls.browder,
        "sigma_plus_inf": cls.sigma_plus_inf,
        "sigma_minus_inf": cls.sigma_minus_inf,
        "iso": cls.isolated, "acc": cls.accumulation, "pi_0": cls.pi0,
    }
    if cls.index_stratum is not None:
        flags[f"sigma_k:{cls.index_stratum}"] = Membership.IN
    return flags


def _oracle_grid_csv(op: StructuredOperator, name: str, n_u: int, out) -> None:
    w = csv.writer(out)
    w.writerow(["u", "s", "verdict", "near_boundary"])
    for p in _grid_points(n_u):
        rep = cross_check(op, p)
        w.writerow([float(p.u), p.s, rep.verdict,
                    int(boundary_distance(op, p) < BOUNDARY_BAND)])


def cmd_spectrum(args, stdout, classify_fn: ClassifyFn) -> int:
    doc = load_document(args.file)
    if doc.matrix is not None:
        out, close = _out_stream(args.out, stdout)
        try:
            _emit_matrix_spectrum(doc, out)
        finally:
            if close:
                out.close()
        return EXIT_OK

    op = doc.structured
    regs = spectrum_regions(op)
    names = list(args.set) if args.set else sorted(regs)
    delegated = [n for n in names if n not in regs]
    if delegated and not args.oracle:
        print(f"error: set(s) {delegated} are unknown-delegated for this "
              f"operator; re-run with --oracle for a numerical estimate",
              file=sys.stderr)
        return EXIT_UNSUPPORTED

    def emit(name: str, out) -> None:
        if name in regs:
            _region_csv(name, regs[name], out)
        else:
            _oracle_grid_csv(op, name, args.grid or 41, out)

    if args.out is None:
        for name in names:
            stdout.write(f"# set: {name}\n")
            emit(name, stdout)
        if args.grid:
            stdout.write("# grid\n")
            _grid_csv(op, names, args.grid, stdout, classify_fn)
        return EXIT_OK

    stem, dot, ext = args.out.rpartition(".")
    if not dot:
        stem, ext = args.out, "csv"
    for name in names:
        path = (args.out if len(names) == 1
                else f"{stem}_{name.replace(':', '')}.{ext}")
        with open(path, "w", newline="", encoding="utf-8") as fh:
            emit(name, fh)
    if args.grid:
        with open(f"{stem}_grid.{ext}", "w", newline="",
                  encoding="utf-8") as fh:
            _grid_csv(op, names, args.grid, fh, classify_fn)
    return EXIT_OK


# ---------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------

def _show(v) -> str:
    if isinstance(v, Membership):
        return {Membership.IN: "yes", Membership.OUT: "no",
                Membership.DELEGATED: "unknown-delegated"}[v]
    if v is None:
        return "unknown-delegated"
    return str(v)


def cmd_classify(args, stdout, classify_fn: ClassifyFn) -> int:
    doc = load_document(args.file)
    p = _parse_point(args.point)
    if doc.matrix is not None:
        from .spec_fd import MembershipTag, on_eigensphere, s_spectrum_membership
        from .quat import slice_representative
        tag = s_spectrum_membership(doc.matrix, slice_representative(p))
        stdout.write(f"point: ({float(p.u)}, {p.s})\n")
        if tag is MembershipTag.RESOLVENT:
            stdout.write("verdict: resolvent\n")
        else:
            dim = on_eigensphere(doc.matrix, p)
            stdout.write(f"verdict: sigma_pS; dim ker R_q = {dim}\n")
        return EXIT_OK

    op = doc.structured
    cls = classify_fn(op, p)
    stdout.write(f"point: ({float(p.u)}, {p.s})\n")
    stdout.write(f"verdict: {cls.partition_tag()}\n")
    stdout.write(f"in sigma_S: {_show(cls.in_spectrum)}\n")
    stdout.write(f"dim ker R_q: {_show(cls.ker_dim)}\n")
    stdout.write(f"essential (sigma_e): {_show(cls.essential)}; "
                 f"left: {_show(cls.ess_left)}; right: {_show(cls.ess_right)}\n")
    stdout.write(f"semi-Fredholm: {cls.semi_fredholm}; "
                 f"Fredholm: {cls.fredholm}; "
                 f"index: {cls.index if cls.semi_fredholm else 'undefined'}\n")
    stdout.write(f"sigma_k stratum: {_show(cls.index_stratum)}\n"
                 if cls.index_stratum is not None else "")
    stdout.write(f"sigma_plus_inf: {_show(cls.sigma_plus_inf)}; "
                 f"sigma_minus_inf: {_show(cls.sigma_minus_inf)}\n")
    stdout.write(f"sigma_0: {_show(cls.sigma0)}\n")
    stdout.write(f"in ws: {_show(cls.weyl)}; in Bs: {_show(cls.browder)}\n")
    stdout.write(f"asc(R_q): {_show(cls.ascent)}; "
                 f"dsc(R_q): {_show(cls.descent)}\n")
    stdout.write(f"isolated: {_show(cls.isolated)}; "
                 f"accumulation: {_show(cls.accumulation)}; "
                 f"pi_0: {_show(cls.pi0)}\n")
    if args.oracle:
        rep = cross_check(op, p)
        stdout.write("oracle truncation report (N, min_sv, ker, adj_ker):\n")
        for row in rep.rows():
            stdout.write(f"  {row['N']}, {row['min_singular_value']:.6e}, "
                         f"{row['ker_dim']}, {row['adj_ker_dim']}\n")
        stdout.write(f"oracle verdict: {rep.verdict}\n")
        ok = agreement(cls.in_spectrum, rep)
        stdout.write(f"oracle/classifier agreement: {'ok' if ok else 'DISAGREE'}\n")
        if not ok:
            return EXIT_VIOLATION
    return EXIT_OK


# ---------------------------------------------------------------------
# check
# ---------------------------------------------------------------------

def cmd_check(args, stdout, classify_fn: ClassifyFn) -> int:
    seed, count = 42, 50
    if args.corpus:
        parts = args.corpus.split(",")
        if len(parts) != 2:
            raise SpecFileError("--corpus expects 'seed,count'")
        try:
            seed, count = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise SpecFileError("--corpus expects integers") from exc
    env_seed = os.environ.get("QSPECTRAL_SEED")
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError as exc:
            raise SpecFileError("QSPECTRAL_SEED must be an integer") from exc

    if args.file:
        doc = load_document(args.file)
        ops = [doc.structured] if doc.structured is not None else []
    else:
        ops = corpus(seed, count)

    results = run_all(ops, seed, classify_fn=classify_fn,
                      require_witnesses=args.file is None)
    stdout.write("suite,cases,failures\n")
    failed = False
    for r in results:
        stdout.write(f"{r.name},{r.cases},{r.failures}\n")
        if r.failures:
            failed = True
    if failed:
        stdout.write("counterexamples:\n")
        for r in results:
            for ce in r.counterexamples:
                stdout.write(f"  [{r.name}] {ce}\n")
        return EXIT_VIOLATION
    return EXIT_OK


# ---------------------------------------------------------------------
# entry
# ---------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qspectral",
        description="Quaternionic S-spectrum classifier and oracle")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="emit eigensphere / region CSVs")
    sp.add_argument("file")
    sp.add_argument("--set", action="append", default=None,
                    metavar="NAME", help="set name (repeatable)")
    sp.add_argument("--grid", nargs="?", type=int, const=DEFAULT_GRID_U,
                    default=None, metavar="N",
                    help="also rasterize membership over [-3,3]x[0,3]")
    sp.add_argument("--out", default=None, metavar="CSV")
    sp.add_argument("--oracle", action="store_true")

    cp = sub.add_parser("classify", help="classify a single sphere")
    cp.add_argument("file")
    cp.add_argument("--point", required=True, metavar="U,S")
    cp.add_argument("--oracle", action="store_true")

    kp = sub.add_parser("check", help="run the invariant suites")
    kp.add_argument("file", nargs="?", default=None)
    kp.add_argument("--corpus", default=None, metavar="SEED,COUNT")
    return ap


def main(argv: Optional[Sequence[str]] = None, stdout=None,
         classify_fn: ClassifyFn = classify) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else EXIT_OK
    try:
        if args.command == "spectrum":
            return cmd_spectrum(args, stdout, classify_fn)
        if args.command == "classify":
            return cmd_classify(args, stdout, classify_fn)
        return cmd_check(args, stdout, classify_fn)
    except SpecFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
