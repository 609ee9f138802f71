"""Command-line front end.

Thin adapters only: each subcommand parses arguments, calls the owning module
and serializes the report.  Reports are deterministic (exact rationals in
lowest terms, sorted JSON keys), so repeated runs are byte-identical.

Exit codes: 0 a verdict was produced (even "falsified" or "infeasible"),
1 usage error, 2 hypothesis violation (e.g. rho not strictly decreasing).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import certificates, dominance, interrupters, numerics, shifts
from .matrixcore import DiagonalOperator, TruncatedOperator, build_factorable
from .rationals import format_rational, parse_rational
from .sequences import (
    FamilyError,
    HypothesisViolation,
    SequenceFamily,
    WeightSequence,
    list_catalog,
    resolve_family,
)


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we reserve that
        raise UsageError(message)


def _parse_params(pairs) -> dict:
    params = {}
    for item in pairs or []:
        if "=" not in item:
            raise UsageError("--param expects NAME=VALUE, got %r" % item)
        name, value = item.split("=", 1)
        params[name.strip()] = value.strip()
    return params


def _load_json_arg(text):
    """Inline JSON, or @path to read a file."""
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as fh:
            return json.load(fh)
    return json.loads(text)


def _family(args) -> SequenceFamily:
    fam = resolve_family(args.family, _parse_params(getattr(args, "param", None)))
    if not isinstance(fam, SequenceFamily):
        raise UsageError("family %r is a shift; this command needs a factorable family"
                         % args.family)
    return fam


def _weights(args) -> WeightSequence:
    if getattr(args, "weights", None):
        values = [parse_rational(v) for v in _load_json_arg(args.weights)]
        return WeightSequence(
            name="inline",
            w=lambda k: values[k],
            table_len=len(values),
        )
    named = resolve_family(args.family, _parse_params(getattr(args, "param", None)))
    if not isinstance(named, WeightSequence):
        raise UsageError("family %r is factorable; this command needs shift weights"
                         % args.family)
    return named


def _diag_from_json(obj, description) -> DiagonalOperator:
    return DiagonalOperator.from_values([parse_rational(v) for v in obj],
                                        description=description)


def _matrix_from_json(obj) -> TruncatedOperator:
    rows = [[parse_rational(v) for v in row] for row in obj]
    return TruncatedOperator.from_rows(rows, provenance="cli matrix")


# ---------------------------------------------------------------------------
# subcommand handlers: each returns (report dict, rows for csv)


def _cmd_families(args):
    rows = list_catalog()
    return {"command": "families list", "families": rows}, rows


def _cmd_verify(args):
    operand = resolve_family(args.family, _parse_params(args.param))
    if isinstance(operand, SequenceFamily):
        pair = interrupters.factorable_pair(operand)
        report = interrupters.verify_factorable_identity(operand, pair, args.n)
    else:
        pair = interrupters.shift_pair(operand, parse_rational(args.p0))
        report = interrupters.verify_shift_identity(operand, pair, args.n)
    out = {"command": "verify identity", "family": operand.describe(),
           "report": report.to_json()}
    if args.float and isinstance(operand, SequenceFamily):
        # float cross-check of the finite side on the same window
        m = build_factorable(operand, args.n).to_float().entries
        q = np.array([float(pair.q[k]) for k in range(args.n)])
        gram = interrupters.gram_matrix(operand, args.n).to_float().entries
        dev = float(np.max(np.abs((m * q) @ m.T - gram)))
        out["float_cross_check_max_dev"] = dev
    return out, [report.to_json()]


def _cmd_certify(args):
    fam = _family(args)
    pair = interrupters.factorable_pair(fam)
    cert = certificates.pair_certify(pair, args.claim, args.n, fam.declared_bounds)
    return ({"command": "certify", "family": fam.describe(), "certificate": cert.to_json()},
            [cert.to_json()])


def _cmd_delta_search(args):
    fam = _family(args)
    interval = certificates.delta_search(fam, args.k_max)
    return ({"command": "delta-search", "family": fam.describe(),
             "interval": interval.to_json()}, [interval.to_json()])


def _cmd_sandwich(args):
    fam = _family(args)
    pair = interrupters.factorable_pair(fam)
    d = _diag_from_json(_load_json_arg(args.d), "D")
    cert = certificates.sandwich_window_certify(pair.q, d, pair.p, args.n,
                                                fam.declared_bounds)
    return ({"command": "sandwich-certify", "family": fam.describe(),
             "certificate": cert.to_json()}, [cert.to_json()])


def _cmd_shift_classify(args):
    w = _weights(args)
    n = args.n
    if w.table_len is not None:
        n = min(n, w.table_len)
    cls = shifts.classify_shift(w, n)
    return ({"command": "shift classify", "family": w.describe(), "n": n,
             "classification": cls.to_json()}, [cls.to_json()])


def _cmd_falsify(args):
    fam = resolve_family(args.family, _parse_params(args.param))
    matrix, tail = numerics.commutator_compression(fam, args.gamma, args.n, args.cutoff)
    verdict = numerics.psd_check(matrix, tail.bound)
    out = {"command": "falsify hyponormal", "family": fam.describe(),
           "gamma": args.gamma, "n": args.n, "tail": tail.to_json(),
           "verdict": {"lambda_min": verdict.lambda_min,
                       "threshold": verdict.threshold,
                       "falsified": verdict.falsified}}
    return out, [out["verdict"]]


def _cmd_gamma(args):
    fam = resolve_family(args.family, _parse_params(args.param))
    est = numerics.gamma_estimate(fam, args.n, args.cutoff)
    return ({"command": "gamma", "family": fam.describe(), "estimate": est.to_json()},
            [est.to_json()])


def _cmd_dominance(args):
    fam = _family(args)
    rows = []
    for n in range(args.n_from, args.n_to + 1):
        rep = dominance.dominance_quantity(fam, n)
        rows.append({"n": rep.n, "value": format_rational(rep.value),
                     "exceeds_one": rep.exceeds_one})
    return ({"command": "dominance", "family": fam.describe(), "rows": rows}, rows)


def _cmd_shifted_identity(args):
    a = _matrix_from_json(_load_json_arg(args.matrix))
    q = _diag_from_json(_load_json_arg(args.q), "Q")
    p = _diag_from_json(_load_json_arg(args.p), "P")
    r1 = parse_rational(args.r)
    rep1 = interrupters.shifted_identity_report(a, q, p, r1)
    out = {"command": "shifted-identity", "n": a.n, "r": format_rational(r1),
           "report": rep1.to_json()}
    if args.r2 is not None:
        r2 = parse_rational(args.r2)
        rep2 = interrupters.shifted_identity_report(a, q, p, r2)
        conclusion = interrupters.equal_interrupter_verdict(
            q, p, r1, r2, rep1.base_pass, rep1.shifted_pass, rep2.shifted_pass, a.n)
        out["report_r2"] = rep2.to_json()
        out["conclusion"] = conclusion
    return out, [out["report"]]


# ---------------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="posinorm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, family=True, n=True):
        if family:
            p.add_argument("--family", required=False, default=None)
            p.add_argument("--param", action="append", default=[],
                           help="exact rational parameter NAME=VALUE, repeatable")
        if n:
            p.add_argument("--n", type=int, default=32)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None)
        group = p.add_mutually_exclusive_group()
        group.add_argument("--exact", action="store_true", default=True)
        group.add_argument("--float", action="store_true", default=False)

    p = sub.add_parser("families", help="catalog operations")
    p.add_argument("action", choices=("list",))
    common(p, family=False, n=False)
    p.set_defaults(handler=_cmd_families)

    p = sub.add_parser("verify", help="verify an interrupter identity exactly")
    p.add_argument("target", choices=("identity",))
    common(p)
    p.add_argument("--p0", default="1", help="free leading P entry for shift pairs")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("certify", help="diagonal-inequality certificate from the pair")
    common(p)
    p.add_argument("--claim", choices=("posinormal", "coposinormal", "hyponormal"),
                   default="posinormal")
    p.set_defaults(handler=_cmd_certify)

    p = sub.add_parser("delta-search", help="delta-interval feasibility scan")
    common(p, n=False)
    p.add_argument("--k-max", type=int, default=64)
    p.set_defaults(handler=_cmd_delta_search)

    p = sub.add_parser("sandwich-certify",
                       help="window check Q >= D >= P for the sandwich sqrt(D) M sqrt(D)")
    common(p)
    p.add_argument("--d", required=True, help="JSON array of rationals, or @file")
    p.set_defaults(handler=_cmd_sandwich)

    p = sub.add_parser("shift", help="weighted shift operations")
    p.add_argument("action", choices=("classify",))
    common(p)
    p.add_argument("--weights", default=None, help="inline JSON array of rationals")
    p.set_defaults(handler=_cmd_shift_classify)

    p = sub.add_parser("falsify", help="float falsification of an operator inequality")
    p.add_argument("target", choices=("hyponormal",))
    common(p)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--K", dest="cutoff", type=int, default=None)
    p.set_defaults(handler=_cmd_falsify)

    p = sub.add_parser("gamma", help="bisection estimate of the minimal gamma")
    common(p)
    p.add_argument("--K", dest="cutoff", type=int, default=None)
    p.set_defaults(handler=_cmd_gamma)

    p = sub.add_parser("dominance", help="dominance falsification quantity")
    common(p, n=False)
    p.add_argument("--n-from", type=int, default=3)
    p.add_argument("--n-to", type=int, default=12)
    p.set_defaults(handler=_cmd_dominance)

    p = sub.add_parser("shifted-identity",
                       help="check the pair identity for A - r on finite matrices")
    common(p, family=False, n=False)
    p.add_argument("--matrix", required=True, help="JSON rows of rationals, or @file")
    p.add_argument("--q", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--r", required=True)
    p.add_argument("--r2", default=None)
    p.set_defaults(handler=_cmd_shifted_identity)

    return parser


def _emit(report: dict, rows: list, args) -> str:
    if args.format == "csv":
        buf = io.StringIO()
        flat_rows = [{k: json.dumps(v, sort_keys=True) if isinstance(v, (dict, list))
                      else v for k, v in row.items()} for row in rows]
        fields = sorted({k for row in flat_rows for k in row})
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\r\n")
        writer.writeheader()
        for row in flat_rows:
            writer.writerow(row)
        return buf.getvalue()
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        report, rows = args.handler(args)
        text = _emit(report, rows, args)
    except (UsageError, FamilyError, json.JSONDecodeError, OSError) as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return 1
    except (HypothesisViolation, certificates.CertificateError, ValueError) as exc:
        print("hypothesis violation: %s" % exc, file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
