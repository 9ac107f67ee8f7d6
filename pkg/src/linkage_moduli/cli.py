"""Command-line front end.  Every command prints JSON unless ``--pretty`` is given.

Exit codes: 0 ok, 1 other domain error, 2 parse error, 3 non-generic vector,
4 even d for the ring model, 5 enumeration guard exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import chambers, lenvec, ring, strat
from .errors import (EvenD, GuardExceeded, LengthMismatch, LinkageError, NotGeneric,
                     ParseError)
from .lenvec import LengthVector, indices_of
from .short_complex import first_difference, fingerprint, same_chamber_up_to_permutation, short_complex

EXIT_OTHER, EXIT_PARSE, EXIT_NOT_GENERIC, EXIT_EVEN_D, EXIT_GUARD = 1, 2, 3, 4, 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _vector(text: str) -> LengthVector:
    return LengthVector.parse(text)


def _d_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ParseError(f"bad d list {text!r}") from exc


def cmd_analyze(args) -> int:
    lv = _vector(args.vector)
    n = lv.n
    witness = lenvec.tight_witness(lv)
    if witness is not None:
        raise NotGeneric(witness)
    ordered, perm = lenvec.sort_with_permutation(lv)
    report = {
        "vector": str(lv),
        "n": n,
        "generic": True,
        "sorted": str(ordered),
        "permutation": perm,
        "regular": {str(d): lenvec.is_d_regular(lv, d) for d in range(2, n + 2)},
        "a_vector": short_complex(ordered).a_vector(),
        "fingerprint": fingerprint(lv).to_json(),
    }
    if args.d is not None:
        d = args.d
        if d < 2:
            raise ParseError("--d must be at least 2")
        report["d"] = d
        report["d_regular"] = lenvec.is_d_regular(lv, d) if d - 1 <= n else None
        report["dim_moduli"] = strat.dim_moduli(n, d) if n >= d else None
        report["codimensions"] = {str(k): strat.codim_stratum(n, d, k) for k in strat.strata_indices(d)}
    _emit(report)
    return 0


def cmd_compare(args) -> int:
    a, b = _vector(args.a), _vector(args.b)
    if a.n != b.n:
        raise LengthMismatch(f"vectors have different lengths ({a.n} vs {b.n})")
    same = same_chamber_up_to_permutation(a, b)
    out = {
        "same_chamber_up_to_permutation": same,
        "ring_comparison": None,
        "detail": first_difference(fingerprint(a), fingerprint(b)),
    }
    if args.d is not None:
        try:
            cmp = ring.compare_rings(a, b, args.d)
        except NotGeneric:
            raise
        except LinkageError as exc:
            out["ring_comparison_error"] = f"{type(exc).__name__}: {exc}"
        else:
            out["ring_comparison"] = cmp.verdict.value
            out["ring_differing"] = list(cmp.differing)
    _emit(out)
    return 0


def cmd_ring(args) -> int:
    lv = _vector(args.vector)
    try:
        presentation = ring.build_ring(lv, args.d)
    except EvenD as exc:
        raise EvenD(f"{exc}; even d is described by the exterior face ring of the "
                    "earlier even-dimensional treatment and is not modelled here") from exc
    _emit(ring.ring_report(presentation))
    return 0


def _pretty_table(table: dict) -> str:
    lines = [f"n={table['n']} d={table['d']} dim={table['dim']}", ""]
    head = f"{'k':>3} {'codim':>6} {'outer':>6} {'inner':>6} {'top':>6}"
    lines.append(head)
    for row in table["strata"]:
        lines.append(f"{row['k']:>3} {row['codim']:>6} {row['codim_outer']:>6} "
                     f"{row['codim_inner']:>6} {row['top']:>6}")
    lines.append("")
    ks = [row["k"] for row in table["strata"]]
    lines.append(f"{'j':>3} {'degree':>7} {'GM':>3}  " + " ".join(f"p({k})/dual".rjust(12) for k in ks))
    for p in table["perversities"]:
        cells = " ".join(f"{p['p'][str(k)]}/{p['dual'][str(k)]}".rjust(12) for k in ks)
        gm = "yes" if p["goresky_macpherson"] else "no"
        lines.append(f"{p['j']:>3} {str(p['degree']):>7} {gm:>3}  {cells}")
    return "\n".join(lines) + "\n"


def cmd_perversities(args) -> int:
    table = strat.stratification_table(args.n, args.d)
    if args.pretty:
        sys.stdout.write(_pretty_table(table))
    else:
        _emit(table)
    return 0


def _regular_counts(atlas) -> dict:
    counts: dict[int, dict[str, int]] = {}
    for r in atlas.records:
        for d, v in r.regular.items():
            c = counts.setdefault(d, {"regular": 0, "not_regular": 0})
            c["regular" if v else "not_regular"] += 1
    return {str(d): counts[d] for d in sorted(counts)}


def cmd_enumerate(args) -> int:
    atlas = chambers.enumerate_chambers(args.n)
    chambers.write_atlas(atlas, args.out)
    _emit({"n": atlas.n, "chambers": len(atlas), "out": args.out,
           "regularity": _regular_counts(atlas)})
    return 0


def cmd_annotate(args) -> int:
    atlas = chambers.read_atlas(args.atlas)
    atlas = chambers.annotate_regularity(atlas, _d_list(args.d))
    out = args.out or args.atlas
    chambers.write_atlas(atlas, out)
    _emit({"n": atlas.n, "chambers": len(atlas), "out": out,
           "regularity": _regular_counts(atlas)})
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="linkage", description="Invariants of linkage moduli spaces.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="genericity, regularity, a-vector and fingerprint")
    a.add_argument("--vector", required=True)
    a.add_argument("--d", type=int)
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("compare", help="same chamber up to permutation, plus ring comparison")
    c.add_argument("--a", required=True)
    c.add_argument("--b", required=True)
    c.add_argument("--d", type=int)
    c.set_defaults(func=cmd_compare)

    r = sub.add_parser("ring", help="Z/2 intersection ring model")
    r.add_argument("--vector", required=True)
    r.add_argument("--d", type=int, required=True)
    r.set_defaults(func=cmd_ring)

    pv = sub.add_parser("perversities", help="codimension and perversity tables")
    pv.add_argument("--n", type=int, required=True)
    pv.add_argument("--d", type=int, required=True)
    pv.add_argument("--pretty", action="store_true")
    pv.set_defaults(func=cmd_perversities)

    e = sub.add_parser("enumerate", help="chamber atlas for n")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_enumerate)

    an = sub.add_parser("annotate", help="add regularity flags to an atlas")
    an.add_argument("--atlas", required=True)
    an.add_argument("--d", required=True, help="comma-separated list of d")
    an.add_argument("--out")
    an.set_defaults(func=cmd_annotate)
    return p


def _error(kind: str, exc: BaseException, **extra) -> dict:
    return {"error": kind, "message": str(exc), **extra}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        _emit(_error("UsageError", exc))
        return EXIT_PARSE
    except ParseError as exc:
        _emit(_error("ParseError", exc))
        return EXIT_PARSE
    except NotGeneric as exc:
        _emit(_error("NotGeneric", exc, generic=False, witness=indices_of(exc.witness),
                     witness_mask=f"{exc.witness:#x}"))
        return EXIT_NOT_GENERIC
    except EvenD as exc:
        _emit(_error("EvenD", exc))
        return EXIT_EVEN_D
    except GuardExceeded as exc:
        _emit(_error("GuardExceeded", exc))
        return EXIT_GUARD
    except LinkageError as exc:
        _emit(_error(type(exc).__name__, exc))
        return EXIT_OTHER
    except OSError as exc:
        _emit(_error("IOError", exc))
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
