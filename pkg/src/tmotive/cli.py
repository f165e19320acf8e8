"""Batch command-line front end.

Subcommands: validate, exp-coeffs, h1, lfunction, tensor, dual, exterior,
siegel, torsion, reduce.  Inputs are definition files (see motive.load_motive)
and literals in the shared grammar; outputs are either human tables or
line-delimited JSON records with sorted keys.  Runs are batch and
deterministic: identical inputs give byte-identical outputs.

Exit codes: 0 ok, 2 validation failure, 3 precision/undecided, 4 parse error,
5 internal defect.
"""

import argparse
import json
import sys

from .analytic import exp_coeffs, torsion_operator
from .construct import dual_presentation, exterior_power, tensor
from .errors import (InternalDefect, NotDefinedError, ParseError,
                     PrecisionError, TMotiveError, UnsupportedError,
                     ValidationError)
from .grammar import format_poly, format_scalar, parse_cinf, parse_poly
from .h1 import h1_of, h_1_of
from .lfun import (global_L, good_reduction_check, local_factor,
                   ordinary_check, torsion_count_reduction)
from .motive import dump_motive, load_motive
from .poly import enumerate_monic_irreducibles, theta_ring
from .cinf import CinfContext
from .lattice import is_lattice, siegel_matrix


def _load(path):
    with open(path, "r", encoding="utf-8") as fh:
        return load_motive(fh.read())


def _emit_records(records, out):
    for rec in records:
        out.write(json.dumps(rec, sort_keys=True) + "\n")


def _matrix_strings(mat):
    return [[format_scalar(x) for x in row] for row in mat.rows]


def cmd_validate(args, out):
    M = _load(args.motive)
    if args.emit_normalized:
        out.write(dump_motive(M))
        return 0
    try:
        r, n = M.rank_dim()
        rank_s = str(r)
    except UnsupportedError:
        n = M.n
        rank_s = "UNSUPPORTED (det A_k = 0, supply a T-basis)"
    if args.emit == "records":
        _emit_records([{"op": "validate", "ok": True, "n": M.n, "k": M.k,
                        "rank": rank_s}], out)
    else:
        out.write(f"valid t-motive: n={M.n} k={M.k} rank={rank_s}\n")
    return 0


def cmd_exp_coeffs(args, out):
    M = _load(args.motive)
    coeffs = exp_coeffs(M, args.count)
    records = []
    for i in range(1, args.count + 1):
        mat = coeffs[i]
        if M.n == 1:
            val = format_scalar(mat[0, 0])
            records.append({"op": "exp-coeffs", "i": i, "value": val})
            if args.emit == "table":
                out.write(f"c_{i} = {val}\n")
        else:
            val = _matrix_strings(mat)
            records.append({"op": "exp-coeffs", "i": i, "value": val})
            if args.emit == "table":
                out.write(f"C_{i} = {val}\n")
    if args.emit == "records":
        _emit_records(records, out)
    return 0


def _h1_one(M, direction, args, out, records):
    fn = h1_of if direction == "upper" else h_1_of
    value, status, cert = fn(M, horizon=args.horizon, window=args.window,
                             precision=args.precision,
                             branch_cap=args.branch_cap)
    name = "h1" if direction == "upper" else "h_1"
    profiles = []
    for c in cert.convergent():
        profiles.append([str(v) if v is not None else ">=prec" for v in c.profile])
    rec = {"op": "h1", "direction": direction, "value": value,
           "status": status, "rank_low": cert.rank_low,
           "rank_high": cert.rank_high, "horizon": cert.horizon,
           "window": cert.window, "precision": str(cert.precision),
           "profiles": profiles}
    records.append(rec)
    if args.emit == "table":
        out.write(f"{name} = {value} [{status}] "
                  f"(horizon={cert.horizon}, window={cert.window}, "
                  f"precision={cert.precision})\n")
        for i, prof in enumerate(profiles):
            out.write(f"  candidate {i}: " + " ".join(prof) + "\n")
    return 3 if status != "exact" and args.strict else 0


def cmd_h1(args, out):
    M = _load(args.motive)
    records = []
    rc = 0
    if args.direction in ("upper", "both"):
        rc = max(rc, _h1_one(M, "upper", args, out, records))
    if args.direction in ("lower", "both"):
        rc = max(rc, _h1_one(M, "lower", args, out, records))
    if args.emit == "records":
        _emit_records(records, out)
    return rc


def cmd_lfunction(args, out):
    M = _load(args.motive)
    D = args.max_deg
    primes = enumerate_monic_irreducibles(M.field, D)
    records = []
    rows = []
    bad = []
    for P in primes:
        try:
            ls = local_factor(M, P, D)
            rows.append((format_poly(P), repr(ls)))
            records.append({"op": "local-factor", "prime": format_poly(P),
                            "series": repr(ls)})
        except TMotiveError:
            bad.append(format_poly(P))
    L, bad_primes = global_L(M, D)
    records.append({"op": "global-L", "max_deg": D, "series": repr(L),
                    "bad_primes": [format_poly(P) for P in bad_primes]})
    if args.emit == "records":
        _emit_records(records, out)
    else:
        for name, series in rows:
            out.write(f"{name}\t{series}\n")
        out.write(f"L(M,U) mod U^{D + 1} = {L!r}\n")
        if bad_primes:
            out.write("bad primes: " + ", ".join(format_poly(P) for P in bad_primes) + "\n")
    return 0


def cmd_tensor(args, out):
    M1 = _load(args.motive)
    M2 = _load(args.with_motive)
    pres = tensor(M1, M2)
    rec = {"op": "tensor", "r": pres.r, "n": pres.n}
    if args.emit == "records":
        _emit_records([rec], out)
    else:
        out.write(f"tensor: r={pres.r} n={pres.n}\n")
    return 0


def cmd_dual(args, out):
    M = _load(args.motive)
    dq = dual_presentation(M)
    rec = {"op": "dual", "den_exp": dq.den_exp, "target_dim": dq.target_dim,
           "num": [[repr(e) for e in row] for row in dq.num.rows]}
    if args.emit == "records":
        _emit_records([rec], out)
    else:
        out.write(f"dual: dimension {dq.target_dim}, "
                  f"Q' = num/(T-t)^{dq.den_exp}\n")
        for row in dq.num.rows:
            out.write("  " + "  ".join(repr(e) for e in row) + "\n")
    return 0


def cmd_exterior(args, out):
    M = _load(args.motive)
    pres = exterior_power(M, args.k)
    rec = {"op": "exterior", "k": args.k, "rank": pres.r, "dim": pres.n}
    if args.emit == "records":
        _emit_records([rec], out)
    else:
        out.write(f"exterior power k={args.k}: rank={pres.r} dim={pres.n}\n")
    return 0


def cmd_siegel(args, out):
    with open(args.vectors, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    header = lines[0].split()
    if header[0] != "context":
        raise ParseError("vectors file must start with: context p=<p> [precision=..]")
    opts = dict(kv.split("=", 1) for kv in header[1:])
    ctx = CinfContext(int(opts["p"]), int(opts.get("e", "1")),
                      precision=int(opts.get("precision", "64")))
    vectors = []
    for ln in lines[1:]:
        vectors.append([parse_cinf(s, ctx) for s in ln.split(";")])
    cert = is_lattice(ctx, vectors)
    records = [{"op": "siegel", "lattice": bool(cert),
                "pivots": [str(v) for v in cert.pivot_valuations],
                "reason": cert.reason}]
    if not cert:
        if args.emit == "records":
            _emit_records(records, out)
        else:
            out.write(f"not a lattice: {cert.reason}\n")
        return 3 if "UNDECIDED" in (cert.reason or "") else 2
    S = siegel_matrix(ctx, vectors, n=len(vectors[0]))
    records[0]["siegel"] = [[repr(x) for x in row] for row in S.rows]
    if args.emit == "records":
        _emit_records(records, out)
    else:
        out.write("lattice certified; Siegel matrix:\n")
        for row in S.rows:
            out.write("  " + "  ".join(repr(x) for x in row) + "\n")
    return 0


def cmd_torsion(args, out):
    M = _load(args.motive)
    R = theta_ring(M.field)
    P = parse_poly(args.prime, R)
    if args.count_reduction:
        count, expected = torsion_count_reduction(M, P, args.ext)
        rec = {"op": "torsion-count", "prime": format_poly(P), "ext": args.ext,
               "count": count, "expected": expected}
        if args.emit == "records":
            _emit_records([rec], out)
        else:
            out.write(f"torsion count over ext {args.ext}: {count} "
                      f"(expected {expected})\n")
        return 0
    from .poly import Poly
    TPoly = Poly(M.field, "T", list(P.coeffs))
    op, expected_dim = torsion_operator(M, TPoly)
    rec = {"op": "torsion-operator", "q_degree": op.q_degree(),
           "expected_dim": expected_dim}
    if args.emit == "records":
        _emit_records([rec], out)
    else:
        out.write(f"torsion operator q-degree {op.q_degree()}, "
                  f"kernel F_q-dimension claim {expected_dim}\n")
    return 0


def cmd_reduce(args, out):
    M = _load(args.motive)
    R = theta_ring(M.field)
    P = parse_poly(args.prime, R)
    verdict, reason = good_reduction_check(M, P)
    rec = {"op": "reduce", "prime": format_poly(P), "verdict": verdict,
           "reason": reason}
    if verdict == "good":
        rec["ordinary"] = ordinary_check(M, P)
    if args.emit == "records":
        _emit_records([rec], out)
    else:
        out.write(f"reduction at {format_poly(P)}: {verdict}"
                  + (f" ({reason})" if reason else "")
                  + (f", {rec['ordinary']}" if "ordinary" in rec else "") + "\n")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="tmotive",
                                 description="exact t-motive computations")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, motive=True):
        if motive:
            p.add_argument("--motive", required=True, help="definition file")
        p.add_argument("--emit", choices=("table", "records"), default="table")

    p = sub.add_parser("validate")
    common(p)
    p.add_argument("--emit-normalized", action="store_true")

    p = sub.add_parser("exp-coeffs")
    common(p)
    p.add_argument("--count", type=int, default=3)

    p = sub.add_parser("h1")
    common(p)
    p.add_argument("--direction", choices=("upper", "lower", "both"),
                   default="upper")
    p.add_argument("--horizon", type=int, default=24)
    p.add_argument("--window", type=int, default=6)
    p.add_argument("--precision", type=int, default=64)
    p.add_argument("--branch-cap", type=int, default=64)
    p.add_argument("--strict", action="store_true",
                   help="exit 3 when the verdict is not exact")

    p = sub.add_parser("lfunction")
    common(p)
    p.add_argument("--max-deg", type=int, required=True)

    p = sub.add_parser("tensor")
    common(p)
    p.add_argument("--with", dest="with_motive", required=True)

    p = sub.add_parser("dual")
    common(p)

    p = sub.add_parser("exterior")
    common(p)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("siegel")
    common(p, motive=False)
    p.add_argument("--vectors", required=True)

    p = sub.add_parser("torsion")
    common(p)
    p.add_argument("--prime", required=True)
    p.add_argument("--count-reduction", action="store_true")
    p.add_argument("--ext", type=int, default=1)

    p = sub.add_parser("reduce")
    common(p)
    p.add_argument("--prime", required=True)
    return ap


COMMANDS = {
    "validate": cmd_validate,
    "exp-coeffs": cmd_exp_coeffs,
    "h1": cmd_h1,
    "lfunction": cmd_lfunction,
    "tensor": cmd_tensor,
    "dual": cmd_dual,
    "exterior": cmd_exterior,
    "siegel": cmd_siegel,
    "torsion": cmd_torsion,
    "reduce": cmd_reduce,
}


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 4
    except (PrecisionError,) as exc:
        print(f"precision/undecided: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, UnsupportedError, NotDefinedError) as exc:
        print(f"validation: {exc}", file=sys.stderr)
        return 2
    except InternalDefect as exc:
        print(f"internal defect: {exc}", file=sys.stderr)
        return 5
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
