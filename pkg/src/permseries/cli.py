"""Command-line front end.

Every number printed is an exact "p/q" string.  Exit status 2 means the
arguments or a spec could not be parsed; 3 means a certificate or invariant
check failed, and the offending exact value is printed on stderr.

Specs are JSON objects or a short colon form:

  series:  alt-harmonic | repeated-harmonic | geometric:-1/2
           | literal:1,-1/2,1/3 | bdn:<set spec>
  set:     finite-sup:1,2,3 | identity | custom:1,1,2,5
  perm:    identity | two-pos-one-neg | pair-swap | reverse:L
           | growing-reverse | shuffle:SEED:L | explicit:2,1,3
           | riemann:TARGET | sigma-from-lambda:EPS:SEQ:UPTO
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import bdn, catalog, instrument, oscillate
from .core import (
    _Acc,
    _fraction,
    ConvergentSeries,
    Permutation,
    TermStream,
    apply_permutation,
    bracket_series,
    format_rational,
    parse_rational,
    permuted_series,
)
from .errors import BracketingError, ConstructionError, OverlapError
from .rearrange import RearrangementTarget, riemann_permutation

S_SEQUENCES = {
    "ones": lambda n: 1,
    "identity": lambda n: n,
    "square": lambda n: n * n,
}


class SpecError(ValueError):
    pass


def _load(text: str):
    text = text.strip()
    if text.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise SpecError(f"bad JSON spec: {e}") from None
        if not isinstance(obj, dict) or "kind" not in obj:
            raise SpecError("JSON spec needs a 'kind' field")
        return obj
    kind, _, rest = text.partition(":")
    return {"kind": kind, "_rest": rest}


def _rationals(text: str) -> list[Fraction]:
    try:
        return [parse_rational(t) for t in text.split(",") if t.strip()]
    except ValueError as e:
        raise SpecError(str(e)) from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as e:
        raise SpecError(f"expected integers: {e}") from None


@dataclass
class SeriesInfo:
    series: ConvergentSeries | None
    stream: TermStream
    certificates: tuple | None = None


def parse_set(text) -> bdn.PseudoboundedSet:
    spec = _load(text) if isinstance(text, str) else text
    kind, rest = spec["kind"], spec.get("_rest", "")
    if kind == "finite-sup":
        values = spec.get("values") if "values" in spec else _ints(rest)
        if not values or min(int(v) for v in values) < 1:
            raise SpecError("finite-sup needs a nonempty list of positive integers")
        return bdn.finite_sup(values)
    if kind == "identity":
        return bdn.identity_set()
    if kind == "custom":
        values = spec.get("enum") if "enum" in spec else _ints(rest)
        if not values or min(int(v) for v in values) < 1:
            raise SpecError("custom needs a nonempty enumeration prefix of positive integers")
        return bdn.custom(values, spec.get("tail", "constant"))
    raise SpecError(f"unknown set kind {kind!r}")


def parse_series(text) -> SeriesInfo:
    spec = _load(text) if isinstance(text, str) else text
    kind, rest = spec["kind"], spec.get("_rest", "")
    if kind == "alt-harmonic":
        cs = catalog.alt_harmonic()
        return SeriesInfo(cs, cs.terms, catalog.alt_harmonic_certificates())
    if kind == "repeated-harmonic":
        cs = catalog.repeated_harmonic()
        return SeriesInfo(cs, cs.terms, catalog.repeated_harmonic_certificates())
    if kind == "geometric":
        try:
            ratio = parse_rational(str(spec.get("ratio", rest)))
        except ValueError as e:
            raise SpecError(str(e)) from None
        if not abs(ratio) < 1:
            raise SpecError(f"geometric ratio must satisfy |r| < 1, got {format_rational(ratio)}")
        cs = catalog.geometric(ratio)
        return SeriesInfo(cs, cs.terms)
    if kind == "literal":
        if spec.get("tail", "zero") != "zero":
            raise SpecError("literal series only support a zero tail")
        if "terms" in spec:
            terms = [parse_rational(str(t)) for t in spec["terms"]]
        elif "_rest" in spec:
            terms = _rationals(rest)
        else:
            raise SpecError("literal JSON spec needs a 'terms' list")
        cs = catalog.literal(terms)
        return SeriesInfo(cs, cs.terms)
    if kind == "bdn":
        s = parse_set(spec["set"] if "set" in spec else rest)
        b = bdn.bdn_series(s)
        return SeriesInfo(b.as_convergent(), b.signed)
    raise SpecError(f"unknown series kind {kind!r}")


def parse_perm(text, series: SeriesInfo | None = None) -> Permutation:
    spec = _load(text) if isinstance(text, str) else text
    kind, rest = spec["kind"], spec.get("_rest", "")
    parts = rest.split(":") if rest else []
    try:
        if kind == "identity":
            return catalog.identity()
        if kind == "two-pos-one-neg":
            return catalog.two_pos_one_neg()
        if kind == "pair-swap":
            return catalog.pair_swap()
        if kind == "growing-reverse":
            return catalog.growing_block_reverse()
        if kind == "reverse":
            return catalog.block_reverse(int(spec.get("size", parts[0] if parts else 3)))
        if kind == "shuffle":
            seed = int(spec.get("seed", parts[0] if parts else 0))
            size = int(spec.get("size", parts[1] if len(parts) > 1 else 8))
            return catalog.block_shuffle(seed, size)
        if kind == "explicit":
            return catalog.explicit(spec["prefix"] if "prefix" in spec else _ints(rest))
    except (ValueError, IndexError) as e:
        raise SpecError(f"bad permutation spec: {e}") from None
    if kind == "riemann":
        if series is None or series.certificates is None:
            raise SpecError("riemann permutations need a series with divergence certificates")
        target = RearrangementTarget.parse(str(spec.get("target", rest)))
        plus, minus, decay = series.certificates
        return riemann_permutation(series.stream, target, plus, minus, decay)
    if kind == "sigma-from-lambda":
        if series is None:
            raise SpecError("sigma-from-lambda needs a series")
        eps = parse_rational(str(spec.get("eps", parts[0] if parts else "1/2")))
        seq = str(spec.get("s", parts[1] if len(parts) > 1 else "square"))
        upto = int(spec.get("upto", parts[2] if len(parts) > 2 else 100))
        fuel = int(spec.get("fuel", 10**5))
        return _sigma_from_lambda(series.stream, eps, seq, upto, fuel)[0]
    raise SpecError(f"unknown permutation kind {kind!r}")


def _sigma_from_lambda(stream: TermStream, eps: Fraction, seq: str, upto: int, fuel: int):
    if seq not in S_SEQUENCES:
        raise SpecError(f"unknown S-sequence {seq!r}; choose from {sorted(S_SEQUENCES)}")
    p = instrument.PlusTailPredicate(stream, eps)
    s = S_SEQUENCES[seq]
    lam = instrument.lambda_stream(p, s, instrument.kappa_witnesses(p, s, fuel))
    ivs = instrument.bad_intervals(lam, upto)
    return instrument.sigma_from_lambda(stream, ivs), ivs, lam


def _emit_json(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _write_sums(rows_stream: TermStream, count: int, out, with_float: bool) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["n", "term", "partial_sum"] + (["partial_sum_float"] if with_float else []))
    total = _Acc(0)
    for n in range(1, count + 1):
        a = rows_stream.term(n)
        total += a
        s = _fraction(total)
        row = [n, format_rational(a), format_rational(s)]
        if with_float:
            row.append(repr(float(s)))
        w.writerow(row)


def cmd_sums(args) -> int:
    info = parse_series(args.series)
    stream = info.stream
    if args.perm:
        stream = apply_permutation(stream, parse_perm(args.perm, info))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            _write_sums(stream, args.terms, fh, args.float)
    else:
        _write_sums(stream, args.terms, sys.stdout, args.float)
    return 0


def cmd_rearrange(args) -> int:
    info = parse_series(args.series)
    if info.certificates is None:
        raise SpecError(f"series {args.series!r} has no divergence certificates")
    target = RearrangementTarget.parse(args.target)
    plus, minus, decay = info.certificates
    sigma = riemann_permutation(info.stream, target, plus, minus, decay, keep_sums=True)
    prefix = sigma.prefix(args.terms)
    _emit_json({
        "series": args.series,
        "target": str(target),
        "terms": args.terms,
        "prefix": prefix,
        "partial_sum": format_rational(sigma.emitted_sum(args.terms)),
        "switches": [
            {"position": s.position, "index": s.index, "sign": s.sign,
             "partial_sum": format_rational(s.partial_sum), "bound_ok": s.ok}
            for s in sigma.switches if s.position <= args.terms
        ],
        "boundaries": [
            {"position": p, "level": lvl, "partial_sum": format_rational(v)}
            for p, lvl, v in sigma.boundaries if p <= args.terms
        ],
    })
    return 0


INDEX_MAPS = {
    "identity": lambda k: k,
    "dyadic": lambda k: 2 ** (k - 1),
    "odd": lambda k: 2 * k - 1,
}


def cmd_bracket(args) -> int:
    info = parse_series(args.series)
    br = bracket_series(info.stream, INDEX_MAPS[args.f])
    blocks = [br.blocks.term(k) for k in range(1, args.blocks + 1)]
    end = br.f(args.blocks + 1) - 1
    ok = sum(blocks, Fraction(0)) == info.stream.partial_sum(end)
    _emit_json({
        "series": args.series,
        "f": args.f,
        "f_values": [br.f(k) for k in range(1, args.blocks + 2)],
        "blocks": [format_rational(b) for b in blocks],
        "telescoping": {"through": end, "ok": ok},
    })
    return 0 if ok else 3


def _rearranged_series(info: SeriesInfo, sigma_spec: str) -> tuple[ConvergentSeries, Permutation]:
    kind = _load(sigma_spec)["kind"]
    if kind == "two-pos-one-neg" and info.series is not None and info.series.name == "alt-harmonic":
        return catalog.alt_harmonic_two_pos_one_neg()
    sigma = parse_perm(sigma_spec, info)
    if info.series is None or info.series.absolute_modulus is None:
        raise SpecError("no modulus is known for this rearranged series")
    return permuted_series(info.series, sigma), sigma


def cmd_oscillate(args) -> int:
    info = parse_series(args.series)
    rearranged, sigma = _rearranged_series(info, args.sigma)
    br = bracket_series(rearranged, INDEX_MAPS[args.f])
    delta = parse_rational(args.delta)
    w = oscillate.build_oscillation(info.series, sigma, br, delta, args.side, budget=args.budget)
    blocks = [w.block(i) for i in range(1, args.blocks + 1)]
    bound = delta / 3
    _emit_json({
        "delta": format_rational(delta),
        "side": args.side,
        "s_approx": format_rational(w.s_approx),
        "t_approx": format_rational(w.t_approx),
        "k": w.block_bounds(args.blocks + 1),
        "blocks": [{"sum": format_rational(b), "exceeds_delta_over_3": abs(b) > bound} for b in blocks],
        "pass": all(abs(b) > bound for b in blocks),
    })
    return 0


def cmd_bdn_build(args) -> int:
    series = bdn.bdn_series(parse_set(args.set))
    _write_sums(series.signed, args.terms, sys.stdout, args.float)
    return 0


def cmd_bdn_bracket(args) -> int:
    s = parse_set(args.set)
    sigma = parse_perm(args.perm)
    wb = bdn.weak_bracketing(s, sigma)
    rows = []
    for i in range(1, args.blocks + 1):
        b = wb.block(i)
        k = wb.selected(i)
        rows.append({"i": i, "k": k, "n_k": wb.n(k), "sum": format_rational(b),
                     "bound": format_rational(Fraction(1, 2**k)), "ok": abs(b) < Fraction(1, 2**k)})
    last = wb.selected(args.blocks + 1)
    _emit_json({
        "set": s.name,
        "perm": sigma.name,
        "j": [wb.j(k) for k in range(1, last + 2)],
        "n": [wb.n(k) for k in range(1, last + 1)],
        "blocks": rows,
        "pass": all(r["ok"] for r in rows),
    })
    return 0 if all(r["ok"] for r in rows) else 3


def cmd_bdn_bound(args) -> int:
    print(bdn.bounded_from_convergence(parse_set(args.set), args.n, args.range))
    return 0


def cmd_s_scan(args) -> int:
    info = parse_series(args.series)
    p = instrument.PlusTailPredicate(info.stream, parse_rational(args.eps))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "status", "witness"])
    for n in range(1, args.upto + 1):
        r = instrument.kappa(p, n, args.fuel)
        if isinstance(r, instrument.Member):
            w.writerow([n, "member", r.m])
        else:
            w.writerow([n, "unknown", r.searched_up_to])
    return 0


def cmd_sigma(args) -> int:
    info = parse_series(args.series)
    eps = parse_rational(args.eps)
    sigma, ivs, lam = _sigma_from_lambda(info.stream, eps, args.s, args.upto, args.fuel)
    witnesses = []
    for iv in ivs:
        j, k = instrument.verify_sig1(info.stream, sigma, iv, eps)
        total = sum((info.stream.term(sigma(i)) for i in range(j + 1, k + 1)), Fraction(0))
        witnesses.append({"interval": [iv.lo, iv.hi], "j": j, "k": k, "sum": format_rational(total)})
    _emit_json({
        "eps": format_rational(eps),
        "s": args.s,
        "lambda": lam.prefix(args.upto),
        "sigma": sigma.prefix(args.upto),
        "sig1": witnesses,
    })
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="permseries", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sums", help="CSV of terms and exact partial sums")
    p.add_argument("--series", required=True)
    p.add_argument("--terms", type=int, required=True)
    p.add_argument("--perm")
    p.add_argument("--out")
    p.add_argument("--float", action="store_true", help="add a decimal convenience column")
    p.set_defaults(func=cmd_sums)

    p = sub.add_parser("rearrange", help="Riemann rearrangement to a target")
    p.add_argument("--series", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--terms", type=int, required=True)
    p.set_defaults(func=cmd_rearrange)

    p = sub.add_parser("bracket", help="block sums of a bracketing")
    p.add_argument("--series", required=True)
    p.add_argument("--f", choices=sorted(INDEX_MAPS), required=True)
    p.add_argument("--blocks", type=int, default=10)
    p.set_defaults(func=cmd_bracket)

    p = sub.add_parser("oscillate", help="oscillating permutation between two sums")
    p.add_argument("--series", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--delta", required=True)
    p.add_argument("--blocks", type=int, default=5)
    p.add_argument("--f", choices=sorted(INDEX_MAPS), default="identity")
    p.add_argument("--side", choices=oscillate.SIDES, default="s_below_t")
    p.add_argument("--budget", type=int, default=oscillate.DEFAULT_BUDGET)
    p.set_defaults(func=cmd_oscillate)

    p = sub.add_parser("bdn", help="series built from a pseudobounded set")
    bsub = p.add_subparsers(dest="bdn_command", required=True)
    q = bsub.add_parser("build")
    q.add_argument("--set", required=True)
    q.add_argument("--terms", type=int, required=True)
    q.add_argument("--float", action="store_true")
    q.set_defaults(func=cmd_bdn_build)
    q = bsub.add_parser("bracket")
    q.add_argument("--set", required=True)
    q.add_argument("--perm", default="identity")
    q.add_argument("--blocks", type=int, default=8)
    q.set_defaults(func=cmd_bdn_bracket)
    q = bsub.add_parser("bound")
    q.add_argument("--set", required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--range", type=int, required=True)
    q.set_defaults(func=cmd_bdn_bound)

    p = sub.add_parser("instrument", help="plus-tail predicate, S, lambda and sigma")
    isub = p.add_subparsers(dest="instrument_command", required=True)
    q = isub.add_parser("s-scan")
    q.add_argument("--series", required=True)
    q.add_argument("--eps", required=True)
    q.add_argument("--fuel", type=int, default=10**4)
    q.add_argument("--upto", type=int, default=20)
    q.set_defaults(func=cmd_s_scan)
    q = isub.add_parser("sigma")
    q.add_argument("--series", required=True)
    q.add_argument("--eps", required=True)
    q.add_argument("--s", default="square", choices=sorted(S_SEQUENCES))
    q.add_argument("--fuel", type=int, default=10**5)
    q.add_argument("--upto", type=int, default=50)
    q.set_defaults(func=cmd_sigma)
    return ap


def main(argv=None) -> int:
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ConstructionError, BracketingError, OverlapError) as e:
        value = getattr(e, "value", None)
        print(f"error: {e}", file=sys.stderr)
        if value is not None:
            shown = format_rational(value) if isinstance(value, Fraction) else value
            print(f"value: {shown}", file=sys.stderr)
        return 3
    except (SpecError, ValueError, KeyError) as e:
        print(f"spec error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
