"""Command-line driver: verification suites and computations as JSON reports.

Exit codes: 0 when every check passes, 1 when any check fails, 2 on usage or
input errors.
"""

from __future__ import annotations

import argparse
import math
import random
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional

from . import __version__
from .algebra import dagger_gauge
from .barcomplex import (augmentation, bar_differential, basis_chain,
                         contraction_defect, growth_certificate, homotopy_summands, prism_defect,
                         random_chain, random_kernel_chain, random_simplex)
from .config import CapExceeded
from .forms import (FormsError, algebra_from_spec, commutator_quotient_dim,
                    iwasawa_tower, load_tower, x_complex_homology)
from .group import (FiniteGroup, GroupError, combing_profile, geodesic_combing, late_jump_combing,
                    parse_group)
from .io import canonical_json, load_element
from .scalar import INF, check_prime, format_rational, parse_rational
from .torus import TorusError, hh_total

DEFAULT_SEED = 1
GAUGE_PRIME = 5


class Report:
    def __init__(self, command: str, params: Dict[str, Any], seed: int = DEFAULT_SEED):
        self.command = command
        self.params = params
        self.seed = seed
        self.checks: List[Dict[str, str]] = []
        self.results: Dict[str, Any] = {}

    def check(self, name: str, ok: Optional[bool], details: str = ""):
        status = "skip" if ok is None else ("pass" if ok else "fail")
        self.checks.append({"name": name, "status": status, "details": details})

    @property
    def failed(self) -> bool:
        return any(c["status"] == "fail" for c in self.checks)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "params": self.params,
            "checks": sorted(self.checks, key=lambda c: c["name"]),
            "results": self.results,
            "seed": self.seed,
            "version": __version__,
        }


def _rat(x) -> str:
    if x == INF:
        return "inf"
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format_rational(Fraction(x))


# ------------------------------------------------------------------ verify bar


def cmd_verify_bar(group: str, max_degree: int, ball_radius: int, samples: int, seed: int,
                   sign: int = 1, p: int = GAUGE_PRIME) -> Report:
    G = parse_group(group)
    rep = Report("verify bar", {"group": group, "max_degree": max_degree, "ball": ball_radius,
                                "samples": samples}, seed)
    rng = random.Random(seed)
    ball = G.ball(ball_radius)
    comb = geodesic_combing(G)
    profile = combing_profile(comb, ball_radius)
    rep.results["ball_size"] = len(ball)
    rep.results["combing"] = comb.name
    rep.results["profile"] = {
        "C_est": _rat(Fraction(profile.C_est).limit_denominator(10**6)),
        "S_est": profile.S_est,
        "D_est": _rat(Fraction(profile.D_est).limit_denominator(10**6)),
        "growth_order": None if profile.growth_order is None else round(profile.growth_order, 6),
    }
    rep.check("combing_profile", profile.ok, "; ".join(profile.failures))

    # delta o delta = 0 and augmentation o delta_1 = 0
    bad = None
    for n in range(1, max_degree + 2):
        for _ in range(samples):
            ch = random_chain(G, n, ball, rng)
            if n == 1:
                if augmentation(bar_differential(ch)) != 0:
                    bad = f"degree 1: {ch!r}"
            elif not bar_differential(bar_differential(ch)).is_zero():
                bad = f"degree {n}: {ch!r}"
            if bad:
                break
        if bad:
            break
    rep.check("delta_squared", bad is None, bad or "")

    # prism identity for left translations against the identity map
    bad = None
    for n in range(0, max_degree + 1):
        for _ in range(samples):
            ch = random_chain(G, n, ball, rng)
            s = rng.choice(ball)
            f = lambda x, s=s: G.multiply(s, x)
            if not prism_defect(f, lambda x: x, ch, sign).is_zero():
                bad = f"degree {n}, shift {G.format_element(s)}"
                break
        if bad:
            break
    rep.check("prism_identity", bad is None, bad or "")

    # contraction and summand count
    bad_c = bad_s = None
    worst = 0
    for n in range(0, max_degree + 1):
        for _ in range(samples):
            ch = random_kernel_chain(G, n, ball, rng)
            if bad_c is None and not contraction_defect(comb, ch, sign).is_zero():
                bad_c = f"degree {n}: {ch!r}"
            for t in ch.terms:
                count = len(homotopy_summands(comb, t, True, sign))
                bound = sum(profile.J[x] for x in t)
                worst = max(worst, count)
                if count > bound and bad_s is None:
                    bad_s = f"{t!r}: {count} summands > {bound}"
    rep.check("contraction", bad_c is None, bad_c or "")
    rep.check("summand_count", bad_s is None, bad_s or "")
    rep.results["max_summands"] = worst

    # growth certificates on gauged chains, and rejection of the late-jump fixture
    gauge = Fraction(1, 4)
    bad = None
    for _ in range(samples):
        n = rng.randrange(0, max_degree + 1)
        t = random_simplex(G, n, ball, rng)
        e = math.ceil(gauge * (sum(G.word_length(x) for x in t) + 1)) - 1
        ch = basis_chain(G, t, Fraction(p) ** e)
        cert = growth_certificate(comb, ch, gauge, p)
        if not cert.verified:
            bad = f"{t!r}: observed {_rat(cert.observed_gauge)} < {_rat(cert.gauge_out)}"
            break
    rep.check("growth_certificate", bad is None, bad or "")
    if isinstance(G, FiniteGroup):
        rep.check("adversary_rejected", None, "word lengths are bounded in a finite group")
    else:
        far = next((x for x in reversed(ball) if G.word_length(x) >= 2), ball[-1])
        adversary = late_jump_combing(comb, stage=4 * ball_radius + 8, distance=4 * ball_radius + 16)
        ch = basis_chain(G, [far], Fraction(p) ** (math.ceil(gauge * (G.word_length(far) + 1)) - 1))
        cert = growth_certificate(adversary, ch, gauge, p)
        rep.check("adversary_rejected", not cert.verified,
                  f"observed {_rat(cert.observed_gauge)} vs predicted {_rat(cert.gauge_out)}")
    return rep


# ------------------------------------------------------------------ torus


def _poly(e) -> str:
    parts = []
    for (m, n), v in sorted(e.terms.items()):
        parts.append(f"{format_rational(v)}*U1^{m}*U2^{n}")
    return " + ".join(parts) if parts else "0"


def cmd_torus_hh(p: int, lam: Fraction, window: int, method: str, require_unit: bool = False,
                 min_window: Optional[int] = None) -> Report:
    check_prime(p)
    rep = Report("torus hh", {"p": p, "lambda": format_rational(lam), "window": window,
                              "method": method, "min_window": min_window}, DEFAULT_SEED)
    res = hh_total(lam, window, method=method, p=p, require_unit=require_unit, min_window=min_window)
    rep.results["dims"] = None if res.dims is None else list(res.dims)
    rep.results["stabilized"] = res.stabilized
    rep.results["degenerate"] = res.degenerate
    rep.results["per_window"] = {str(w): {k: list(v) for k, v in entry.items()}
                                 for w, entry in res.per_window.items()}
    rep.results["generators"] = {
        k: [_poly(g) if not isinstance(g, tuple) else [_poly(x) for x in g] for g in gens]
        for k, gens in res.generators.items()}
    rep.results["notes"] = res.notes
    rep.check("stabilized", res.stabilized, "" if res.stabilized else res.notes[-1])
    rep.check("method_agreement", res.agreement,
              "" if res.agreement is not False else "graded and windowed totals differ")
    return rep


# ------------------------------------------------------------------ finite algebras


def cmd_finite_x(group: str, level: int) -> Report:
    alg = algebra_from_spec(group)
    rep = Report("finite x", {"group": group, "level": level}, DEFAULT_SEED)
    h = x_complex_homology(alg, level)
    q = commutator_quotient_dim(alg, 0)
    rep.results.update({"h_even": h[0], "h_odd": h[1], "quotient_dim": q, "dim": alg.dim})
    if group.startswith("matrix:"):
        rep.check("class_count", None, "not a group algebra")
    else:
        G = parse_group(group)
        classes = len(G.conjugacy_classes())
        rep.results["classes"] = classes
        rep.check("class_count", q == classes, f"quotient {q}, classes {classes}")
    rep.check("x_homology", level < 1 or h == (q, 0), f"h = {h}, expected ({q}, 0)")
    return rep


def cmd_iwasawa(tower: str, levels: Optional[int], n: int = 1) -> Report:
    tw = load_tower(tower)
    if levels is not None:
        if levels < 1 or levels > len(tw.levels):
            raise FormsError(f"tower has {len(tw.levels)} levels")
        tw.levels, tw.maps = tw.levels[:levels], tw.maps[:levels - 1]
    rep = Report("iwasawa", {"tower": tower, "levels": len(tw.levels), "n": n}, DEFAULT_SEED)
    try:
        rows = iwasawa_tower(tw, n)
    except FormsError as exc:
        rep.check("homomorphisms", False, str(exc))
        return rep
    rep.check("homomorphisms", True)
    rep.results["levels"] = [
        {"group": r.group, "quotient_dim": r.quotient_dim, "h_even": r.x_homology[0],
         "h_odd": r.x_homology[1], "classes": r.class_count,
         "transition_surjective": r.transition_surjective} for r in rows]
    rep.results["dims"] = [r.quotient_dim for r in rows]
    rep.check("transitions_surjective", all(r.transition_surjective for r in rows[1:]))
    rep.check("class_count", all(r.quotient_dim == r.class_count for r in rows))
    return rep


def cmd_gauge(path: str, p: int = GAUGE_PRIME) -> Report:
    check_prime(p)
    f = load_element(path)
    rep = Report("gauge", {"input": path, "p": p}, DEFAULT_SEED)
    g = dagger_gauge(f, p)
    rep.results["gauge"] = _rat(g)
    rep.results["support"] = len(f.terms)
    rep.check("positive_gauge", g > 0, f"gauge {_rat(g)}")
    return rep


# ------------------------------------------------------------------ driver


def _pretty(report: Dict[str, Any]) -> str:
    lines = [f"{report['command']}  (version {report['version']}, seed {report['seed']})"]
    for c in report["checks"]:
        lines.append(f"  {c['status']:<4}  {c['name']:<24} {c['details']}")
    for k in sorted(report["results"]):
        v = report["results"][k]
        lines.append(f"  {k}: {canonical_json(v) if isinstance(v, (dict, list)) else v}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="daggerhom", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="JSON output (the default)")
        p.add_argument("--pretty", action="store_true", help="human-readable table")

    v = sub.add_parser("verify", help="verification suites")
    vsub = v.add_subparsers(dest="suite", required=True)
    vb = vsub.add_parser("bar", help="bar complex, homotopy and growth suites")
    vb.add_argument("--group", required=True)
    vb.add_argument("--max-degree", type=int, default=3)
    vb.add_argument("--ball", type=int, default=4)
    vb.add_argument("--samples", type=int, default=50)
    vb.add_argument("--seed", type=int, default=DEFAULT_SEED)
    vb.add_argument("--corrupt-sign", action="store_true", help=argparse.SUPPRESS)
    common(vb)

    t = sub.add_parser("torus", help="noncommutative torus")
    tsub = t.add_subparsers(dest="suite", required=True)
    th = tsub.add_parser("hh", help="Hochschild homology")
    th.add_argument("--p", type=int, required=True)
    th.add_argument("--lambda", dest="lam", type=parse_rational, required=True)
    th.add_argument("--window", type=int, default=6)
    th.add_argument("--min-window", type=int, default=None)
    th.add_argument("--method", choices=("graded", "windowed", "both"), default="graded")
    th.add_argument("--require-unit", action="store_true", help="reject lambda that is not a p-adic unit")
    common(th)

    f = sub.add_parser("finite", help="finite-dimensional algebras")
    fsub = f.add_subparsers(dest="suite", required=True)
    fx = fsub.add_parser("x", help="X-complex homology")
    fx.add_argument("--group", required=True, help="group spec or matrix:k")
    fx.add_argument("--level", type=int, default=1)
    common(fx)

    iw = sub.add_parser("iwasawa", help="commutator quotients along a tower")
    iw.add_argument("--tower", required=True)
    iw.add_argument("--levels", type=int, default=None)
    iw.add_argument("--n", type=int, default=1)
    common(iw)

    g = sub.add_parser("gauge", help="dagger gauge of an element file")
    g.add_argument("--input", required=True)
    g.add_argument("--p", type=int, default=GAUGE_PRIME)
    common(g)
    return ap


def run(args: argparse.Namespace) -> Report:
    if args.command == "verify":
        return cmd_verify_bar(args.group, args.max_degree, args.ball, args.samples, args.seed,
                              sign=-1 if args.corrupt_sign else 1)
    if args.command == "torus":
        return cmd_torus_hh(args.p, args.lam, args.window, args.method, args.require_unit,
                            args.min_window)
    if args.command == "finite":
        return cmd_finite_x(args.group, args.level)
    if args.command == "iwasawa":
        return cmd_iwasawa(args.tower, args.levels, args.n)
    return cmd_gauge(args.input, args.p)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = run(args)
    except (GroupError, TorusError, FormsError, CapExceeded, ValueError, KeyError, OSError) as exc:
        print(f"daggerhom: error: {exc}", file=sys.stderr)
        return 2
    data = report.to_dict()
    print(_pretty(data) if args.pretty else canonical_json(data))
    return 1 if report.failed else 0


if __name__ == "__main__":
    sys.exit(main())
