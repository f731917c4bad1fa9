"""Command line entry point ``spectra``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .covers import cover_report
from .harness import kz_limit_table, report, safe_name, siegel_veech_from_sum, verify_genus
from .hnfilt import (
    WSpectrum,
    format_fraction,
    hyperelliptic_slopes,
    parse_fraction,
    w_catalog,
    w_hyperelliptic,
    w_upper_bounds,
)
from .polygons import dominates, polygon_csv, polygon_of, polygons_svg
from .spectra import RunRecord, estimate_spectrum
from .strata import UnknownComponent, double_cover_image, get_component, parse_component_id, parse_qstratum


def _seeds(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}") from None


def _positive(text: str) -> int:
    n = int(float(text)) if "e" in text.lower() else int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def cmd_estimate(args) -> int:
    comp = get_component(args.stratum)
    rec = estimate_spectrum(
        comp.representative, args.steps, args.seed, args.batches,
        renorm_every=args.renorm_every, full=args.full, component=comp.id,
    )
    if args.out:
        rec.save(args.out)
    for i, (v, s) in enumerate(zip(rec.estimates, rec.stderr), 1):
        print(f"lambda_{i} = {v:.6f} +- {s:.6f}")
    print(f"sum = {rec.total:.6f} +- {rec.total_stderr:.6f}  (theta_1 = {rec.theta1:.6f}, restarts = {rec.restarts})")
    return 0


def _wspec_for(text: str) -> tuple[str, WSpectrum]:
    if text.strip().startswith("Q"):
        q = parse_qstratum(text)
        if q.is_hyperelliptic_source:
            return f"{q} (hyperelliptic locus)", w_hyperelliptic(q)
        # not a genus-zero source: show the raw slope multiset truncated to the cover genus
        g = double_cover_image(q).genus
        return f"{q} (raw slope multiset, not a genus-zero source)", WSpectrum.exact_values(hyperelliptic_slopes(q)[:g])
    stratum, _ = parse_component_id(text)
    try:
        comp = get_component(text)
        return comp.id, w_catalog(comp)
    except UnknownComponent:
        return f"{stratum} (upper bounds)", w_upper_bounds(stratum)


def cmd_wspec(args) -> int:
    name, w = _wspec_for(args.stratum)
    if args.json:
        print(json.dumps({"component": name, **w.to_dict()}, sort_keys=True))
        return 0
    total = ("" if w.is_exact else "<=") + format_fraction(w.total)
    print(f"{name}: w = {', '.join(w.formatted())}; sum = {total}")
    return 0


def cmd_verify(args) -> int:
    results = verify_genus(args.genus, args.steps, args.seeds, args.batches, exact_only=args.exact_only)
    for v, rec in results:
        lam = ", ".join(f"{x:.4f}" for x in v.lambda_hat[1:])
        w = ", ".join(v.w.formatted()[1:])
        extra = "" if v.sum_residual is None else f"; sum residual {v.sum_residual:+.4f}"
        print(f"{v.component:<16} {v.status:<34} lambda = ({lam})  w = ({w}){extra}")
    if args.out:
        report([v for v, _ in results], args.out)
        for _, rec in results:
            rec.save(Path(args.out) / f"run_{safe_name(rec.component)}.json")
    print(f"[{results[0][0].label if results else 'no components'}]")
    return 0


def _parse_w(text: str, record: RunRecord) -> WSpectrum:
    if text == "auto":
        return w_catalog(record.component)
    vals = [parse_fraction(t) for t in text.split(",")]
    return WSpectrum.exact_values(vals)


def cmd_polygon(args) -> int:
    rec = RunRecord.load(args.lambda_path)
    w = _parse_w(args.w, rec)
    lam = polygon_of(rec.estimates.values)
    wpoly = polygon_of(w.values)
    tol = [3 * s for s in rec.partial_sum_stderr]
    verdict = dominates(list(rec.estimates.values), list(w.values), tol) if w.is_exact else None
    if args.svg:
        Path(args.svg).write_text(
            polygons_svg([("P_lambda (measured)", lam), ("P_w", wpoly)], title=rec.component), encoding="utf-8"
        )
    if args.csv:
        Path(args.csv).write_text(polygon_csv(lam), encoding="utf-8")
    status = verdict.status if verdict is not None else "w has only upper bounds"
    print(f"{rec.component}: {status}")
    return 0


def cmd_cover(args) -> int:
    rep = cover_report(parse_qstratum(args.q))
    sys.stdout.write(rep.to_json() if args.json else rep.render())
    return 0


def cmd_sv(args) -> int:
    rec = RunRecord.load(args.from_path)
    sv = siegel_veech_from_sum(args.stratum, rec.total, rec.total_stderr)
    print(f"kappa = {format_fraction(sv.kappa)}")
    print(f"c_area = {sv.c_area:.6f} +- {sv.c_area_stderr:.6f}" + ("  (negative estimate)" if sv.negative else ""))
    return 0


def cmd_kzlimit(args) -> int:
    for g, n, b in kz_limit_table(args.gmax):
        print(f"g={g} N={n} lambda_2 >= {format_fraction(b)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spectra", description="Lyapunov and Harder-Narasimhan spectra of strata.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("estimate", help="estimate the Lyapunov spectrum of a component")
    e.add_argument("--stratum", required=True, help='component, e.g. "H(4)^hyp"')
    e.add_argument("--steps", type=_positive, required=True, help="accelerated induction steps")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--batches", type=int, default=20)
    e.add_argument("--renorm-every", type=int, default=8)
    e.add_argument("--full", action="store_true", help="track all 2g exponents")
    e.add_argument("--out", help="write the run record as JSON")
    e.set_defaults(func=cmd_estimate)

    w = sub.add_parser("wspec", help="w-spectrum of a component or hyperelliptic source")
    w.add_argument("--stratum", required=True, help='"H(6,2)^odd", "H(7,1)" or "Q(3,-1,-1,-1,-1,-1,-1,-1)"')
    w.add_argument("--json", action="store_true")
    w.set_defaults(func=cmd_wspec)

    v = sub.add_parser("verify", help="check lambda against w for every component of a genus")
    v.add_argument("--genus", type=int, required=True)
    v.add_argument("--steps", type=_positive, required=True)
    v.add_argument("--seeds", type=_seeds, required=True, help="comma separated, e.g. 1,2,3")
    v.add_argument("--batches", type=int, default=20)
    v.add_argument("--exact-only", action="store_true", help="skip components with bounds-only w")
    v.add_argument("--out", help="directory for JSON, CSV and SVG reports")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("polygon", help="compare the polygons of a run and of w")
    g.add_argument("--lambda", dest="lambda_path", required=True, help="run record JSON")
    g.add_argument("--w", default="auto", help='"auto" or a list such as "1,3/5,1/5"')
    g.add_argument("--svg")
    g.add_argument("--csv")
    g.set_defaults(func=cmd_polygon)

    c = sub.add_parser("cover", help="double cover bookkeeping for a quadratic stratum")
    c.add_argument("--q", required=True, help='e.g. "Q(1,2,-1,-1,-1)"')
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_cover)

    s = sub.add_parser("sv", help="Siegel-Veech constant from a measured sum")
    s.add_argument("--stratum", required=True)
    s.add_argument("--from", dest="from_path", required=True, help="run record JSON")
    s.set_defaults(func=cmd_sv)

    k = sub.add_parser("kzlimit", help="hyperelliptic lower bounds (N-2)/N for lambda_2")
    k.add_argument("--gmax", type=int, default=10)
    k.set_defaults(func=cmd_kzlimit)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"spectra: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
