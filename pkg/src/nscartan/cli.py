"""Command-line front end: ``nscartan {groups,cusps,unit,runge,all}``.

Every verb prints one JSON document (sorted keys) with

    checks         list of {name, status, detail}; status in pass/fail/skip/inconclusive
    discrepancies  closed-form values next to computed ones, one entry per comparison
    ok             true iff no check failed or was inconclusive

Exit status: 0 ok, 1 some check failed or was inconclusive, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import cusp_comb, gl2_groups, runge_engine, siegel_units
from .fp_arith import ENUMERATION_LIMIT, is_prime, make_context

OUT_ENV = "NSCARTAN_OUT"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class Bundle:
    command: str
    config: dict
    checks: list = field(default_factory=list)
    discrepancies: list = field(default_factory=list)
    results: dict = field(default_factory=dict)

    def check(self, name: str, ok, detail="") -> None:
        status = ok if isinstance(ok, str) else ("pass" if ok else "fail")
        self.checks.append({"name": name, "status": status, "detail": detail})

    def skip(self, name: str, reason: str) -> None:
        self.checks.append({"name": name, "status": "skip", "detail": reason})

    def compare(self, name: str, paper, computed, assert_equal: bool = True, note: str = "") -> None:
        """Record a closed-form comparison; optionally also assert it."""
        agree = _close(paper, computed)
        self.discrepancies.append({"check": name, "paper": paper, "computed": computed,
                                   "agree": agree, "note": note})
        if assert_equal:
            self.check(name, agree, f"closed form {paper}, computed {computed}")

    def merge(self, other: "Bundle", prefix: str) -> None:
        for c in other.checks:
            self.checks.append({**c, "name": f"{prefix}: {c['name']}"})
        for d in other.discrepancies:
            self.discrepancies.append({**d, "check": f"{prefix}: {d['check']}"})
        self.results[prefix] = other.results

    @property
    def ok(self) -> bool:
        return all(c["status"] in ("pass", "skip") for c in self.checks)

    def to_dict(self) -> dict:
        return {"command": self.command, "config": self.config, "checks": self.checks,
                "discrepancies": self.discrepancies, "results": self.results, "ok": self.ok}


def _close(a, b) -> bool:
    if isinstance(a, (int, str, Fraction)) and isinstance(b, (int, str, Fraction)):
        return str(a) == str(b)
    return math.isclose(float(a), float(b), rel_tol=1e-9)


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"not serializable: {type(x)}")


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, default=_jsonable) + "\n"


def _prime(p: int, limit: int = ENUMERATION_LIMIT) -> int:
    if not is_prime(p) or p == 2:
        raise UsageError(f"{p} is not an odd prime")
    if p >= limit:
        raise UsageError(f"p={p} exceeds the limit {limit} for this command")
    return p


# -- suites -----------------------------------------------------------------------------------

def run_groups(p: int, seed: int = 0, conjugators: int = 20) -> Bundle:
    _prime(p, gl2_groups.CLOSURE_PRIME_LIMIT)
    ctx = make_context(p)
    b = Bundle("groups", {"p": p, "seed": seed, "conjugators": conjugators})
    mod3 = p % 3
    sizes = {"Cns": p * p - 1, "Nns": 2 * (p * p - 1), "Csp": (p - 1) ** 2,
             "Nsp": 2 * (p - 1) ** 2, "Hintersect": 4 * (p - 1), "Borel": p * (p - 1) ** 2,
             "Unipotent": p}
    if mod3 == 2:
        sizes["G"] = 2 * (p * p - 1) // 3
    groups = {k: gl2_groups.build_subgroup(ctx, k) for k in sizes}
    for k, n in sizes.items():
        b.compare(f"|{k}|", n, groups[k].order)
        b.check(f"closure of generators of {k}",
                gl2_groups.closure_elements(ctx, groups[k].generators) == groups[k].elements)
    if mod3 != 2:
        b.skip("|G|", f"p = {mod3} mod 3: G(p) is only considered for p = 2 mod 3")

    nns = groups["Nns"]
    b.compare("[Nns:Cns]", 2, gl2_groups.index(groups["Cns"], nns))
    b.compare("[Nns:H(p)]", (p + 1) // 2, gl2_groups.index(groups["Hintersect"], nns))
    g_checks = ["[Nns:G(p)]", "H(p) in G(p)", "Nns/cubes is D3", "det G(p) = F_p^x"]
    if mod3 == 2:
        G = groups["G"]
        b.compare("[Nns:G(p)]", 3, gl2_groups.index(G, nns))
        b.check("H(p) in G(p)", gl2_groups.check_lemma_lem1(ctx))
        b.check("Nns/cubes is D3", gl2_groups.quotient_is_dihedral3(ctx))
        b.compare("|det G(p)|", p - 1, len(gl2_groups.det_image(G)))
        b.skip("det(cubes of Cns) != F_p^x", "only expected for p = 1 mod 3")
    else:
        for name in g_checks:
            b.skip(name, f"p = {mod3} mod 3: G(p)-specific check")
        cubes = gl2_groups.cns_cubes(ctx)
        b.check("det(cubes of Cns) != F_p^x", len(gl2_groups.det_image(cubes)) != p - 1)
    b.check("control: Nns/Cns is not D3",
            not gl2_groups.quotient_is_dihedral3(ctx, groups["Cns"]))

    prof = gl2_groups.pgl_order_profile(nns)
    b.compare("|image of Nns in PGL2|", 2 * (p + 1), prof.image_size)
    b.check("PGL orders of Nns divide p+1", all((p + 1) % m == 0 for m in prof.orders))
    coset = gl2_groups.coset_elements(ctx)
    b.check("GL orders on Nns-Cns divide 2(p-1)",
            all(2 * (p - 1) % gl2_groups.element_order(p, g) == 0 for g in coset))
    b.check("squares of Nns-Cns are scalar", gl2_groups.squares_are_scalar(ctx))
    b.check("control: squares of Cns are not all scalar",
            not gl2_groups.squares_are_scalar(ctx, "cartan"))
    b.compare("|det H(p)|", p - 1, len(gl2_groups.det_image(groups["Hintersect"])))
    b.compare("|det U(p)|", 1, len(gl2_groups.det_image(groups["Unipotent"])))

    rng = random.Random(seed)
    conj = [gl2_groups.random_invertible(p, rng) for _ in range(conjugators)]
    gen = gl2_groups.conjugated_unipotent_generates(ctx, conj)
    b.check(f"<H(p), gU(p)g^-1> = GL2 for {conjugators} seeded g", all(gen),
            f"{sum(gen)}/{len(gen)} generate")
    b.results = {"sizes": {k: groups[k].order for k in sizes},
                 "pgl_profile": {"image_size": prof.image_size,
                                 "orders": {str(k): v for k, v in prof.orders.items()}},
                 "gl2_order": gl2_groups.gl2_order(p)}
    return b


def cusp_closed_form(p: int, curve: str):
    """(closed form, orbit-counting value) for the cusp count, None if no closed form is stated."""
    return {
        "x0": (2, 2),
        "sp": (p + 1, p + 1),
        "sp+": ((p + 1) // 2, (p + 1) // 2),
        "ns": (p + 1, p - 1),
        "ns+": ((p - 1) // 2, (p - 1) // 2),
        "G": (3 * (p - 1) // 2, 3 * (p - 1) // 2),
        "Hp": (None, None),
    }[curve]


def run_cusps(p: int, curve: str) -> Bundle:
    _prime(p)
    if p < 5:
        raise UsageError("cusp tables need p >= 5")
    if curve not in cusp_comb.CURVES:
        raise UsageError(f"unsupported curve {curve!r}; choose from {', '.join(cusp_comb.CURVES)}")
    if curve == "G" and p % 3 != 2:
        raise UsageError("X_G(p) needs p = 2 mod 3 (otherwise det G(p) is not all of F_p^x)")
    ctx = make_context(p)
    b = Bundle("cusps", {"p": p, "curve": curve})
    table = cusp_comb.cusp_table(ctx, curve)
    paper, counted = cusp_closed_form(p, curve)
    if curve == "ns":
        b.compare("cusp count (closed form)", paper, table.cusp_count, assert_equal=False,
                  note="orbit counting gives (p^2-1)/2 points, free action of a group of "
                       "order (p+1)/2, hence p-1 classes")
        b.check("cusp count (orbit counting)", table.cusp_count == counted,
                f"expected {counted}, got {table.cusp_count}")
    elif paper is not None:
        b.compare("cusp count", paper, table.cusp_count)
    orbits = table.galois_orbits()
    inf = [c for c in range(table.cusp_count) if table.at_infinity[c]]
    b.check("at-infinity cusps form one Galois orbit",
            any(sorted(o) == inf for o in orbits), f"{len(inf)} at infinity")
    if curve == "x0":
        b.check("two rational cusps", sorted(len(o) for o in orbits) == [1, 1])
    if curve in ("ns", "ns+"):
        b.check("all cusps at infinity", len(inf) == table.cusp_count)
        b.compare("Galois orbits", 1, len(orbits))
    if curve == "sp+":
        b.compare("cusps at infinity", 1, len(inf))
    if curve == "G":
        b.compare("Galois orbits", 2, len(orbits))
        b.compare("cusps at infinity", (p - 1) // 2, len(inf))
        b.check("at-infinity orbit is O_cubes/+-1", cusp_comb.cube_orbit_check(ctx))
    b.results = {"table": table.to_dict(), "galois_orbits": orbits}
    return b


def run_unit(p: int, mode: str = "exact", K: int | None = None, seed: int = 0,
             samples: int = 20) -> Bundle:
    _prime(p)
    ctx = make_context(p)
    try:
        siegel_units.require_cube_orbit(ctx)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    limit = siegel_units.EXACT_PRIME_LIMIT if mode == "exact" else siegel_units.COMPLEX_PRIME_LIMIT
    if p > limit:
        raise UsageError(f"{mode} mode is limited to p <= {limit}")
    K = siegel_units.default_K(p) if K is None else K
    if K <= 0:
        raise UsageError("K must be positive")
    b = Bundle("unit", {"p": p, "mode": mode, "K": K, "seed": seed, "samples": samples})
    rep = siegel_units.unit_report(ctx, mode, K, samples, seed)
    b.check("Kubert-Lang conditions", rep["kubert_lang"]["ok"], "; ".join(rep["kubert_lang"]["failures"]))
    b.check("series leading exponent = 3 sum B2/2", rep["ord_consistent"],
            f"series {rep['ord_series']}, sum {rep['ord_computed']}")
    b.check("series |leading coefficient| = |rho| oracle",
            math.isclose(rep["rho_abs_series"], rep["rho_abs_computed"], rel_tol=1e-9))
    ident = rep["product_identity"]
    b.check("full product identity", ident["status"], ident["reason"])
    b.check(f"remainder bound at {samples} sampled tau", all(s["ok"] for s in rep["samples"]))
    tw = siegel_units.twisted_order(ctx)
    b.check("twisted fiber: 0 absent, others (p+1)/3",
            tw.fiber[0] == 0 and all(tw.fiber[a] == (p + 1) // 3 for a in range(1, p)))
    tw_ok = [siegel_units.eval_log_decomposition(ctx, t, twisted=True).ok
             for t in siegel_units.sample_taus(samples, seed)]
    b.check(f"twisted remainder bound at {samples} sampled tau", all(tw_ok))
    note = "leading-order data of the series; see the decisions ledger"
    b.compare("Ord_q(U)", siegel_units.paper_order(p), rep["ord_computed"], False, note)
    b.compare("Ord_gamma(U)", siegel_units.paper_twisted_order(p), rep["twisted_ord_computed"],
              False, note)
    b.compare("|rho_U|", siegel_units.paper_rho_abs(p), rep["rho_abs_computed"], False, note)
    b.compare("|rho_U| from the displayed rho factors", rep["rho_abs_paper_formula"],
              rep["rho_abs_computed"], False, note)
    b.compare("|prod g^3|", p**3, ident["magnitude"], False,
              "product over all nonzero pairs of F_p^2")
    b.results = rep
    return b


def run_runge_prime(p: float, sources=("paper", "oracle")) -> Bundle:
    if not runge_engine.P_MIN <= p <= runge_engine.P_MAX:
        raise UsageError(f"p={p} outside [{runge_engine.P_MIN}, {runge_engine.P_MAX:.1e}]; "
                         "smaller p and the |log|q|| < sqrt(p) regime are handled externally")
    b = Bundle("runge", {"p": p, "constants": list(sources)})
    for src in sources:
        rep = runge_engine.j_log_bound(p, src)
        b.check(f"log|j| bound <= 7 sqrt(p) [{src}]", rep.headline_ok,
                f"bound {rep.j_log_bound:.6f}, 7 sqrt(p) {rep.seven_sqrt_p:.6f}")
        b.results[src] = rep.to_dict()
    return b


def run_threshold() -> Bundle:
    b = Bundle("runge", {"threshold": True})
    t = runge_engine.threshold()
    b.compare("threshold p* <= 1.4e7", True, t.consistent, note=f"p* = {t.p_star:.6f}")
    b.check("p* in [1.3e7, 1.4e7]", 1.3e7 <= t.p_star <= 1.4e7)
    b.check("sign change brackets p*",
            runge_engine.crossing_gap(t.p_star * 0.999) > 0 > runge_engine.crossing_gap(t.p_star * 1.001))
    b.results = t.to_dict()
    return b


def _scan_chunk(args) -> list[dict]:
    pts, src = args
    out = []
    for p in pts:
        r = runge_engine.j_log_bound(p, src)
        out.append({"p": p, "source": src, "j_log_bound": r.j_log_bound,
                    "seven_sqrt_p": r.seven_sqrt_p, "margin": r.margin, "headline_ok": r.headline_ok})
    return out


def ordered_map(fn, items, jobs: int):
    """map preserving input order; processes when jobs > 1."""
    if jobs <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def run_scan(pmin: float, pmax: float, n: int, sources=("paper", "oracle"), jobs: int = 1) -> Bundle:
    try:
        pts = runge_engine.scan_points(pmin, pmax, n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    b = Bundle("runge", {"scan": [pmin, pmax, n], "constants": list(sources)})
    chunks = [pts[i: i + 100] for i in range(0, len(pts), 100)]
    rows = []
    for src in sources:
        for part in ordered_map(_scan_chunk, [(c, src) for c in chunks], jobs):
            rows.extend(part)
        mine = [r for r in rows if r["source"] == src]
        worst = min(mine, key=lambda r: r["margin"] / r["seven_sqrt_p"])
        b.check(f"log|j| bound <= 7 sqrt(p) at {len(mine)} points [{src}]",
                all(r["headline_ok"] for r in mine),
                f"smallest relative margin {worst['margin'] / worst['seven_sqrt_p']:.4f} at p={worst['p']}")
    b.results = {"points": len(pts), "rows": rows}
    return b


def run_all(primes, mode="exact", K=None, seed=0, jobs=1, scan_n=1000, samples=20) -> Bundle:
    b = Bundle("all", {"primes": list(primes), "mode": mode, "K": K, "seed": seed,
                       "scan_n": scan_n, "samples": samples})
    tasks = []
    for p in primes:
        tasks.append(("groups", p, None))
        for curve in cusp_comb.CURVES:
            if curve == "G" and p % 3 != 2:
                continue
            tasks.append(("cusps", p, curve))
        if p % 3 == 2:
            tasks.append(("unit", p, None))
    results = ordered_map(_run_task, [(t, mode, K, seed, samples) for t in tasks], jobs)
    for (verb, p, curve), sub in zip(tasks, results):
        b.merge(sub, f"{verb} {p}" + (f" {curve}" if curve else ""))
    b.merge(run_threshold(), "runge threshold")
    b.merge(run_scan(runge_engine.P_MIN, runge_engine.P_MAX, scan_n, jobs=jobs), "runge scan")
    return b


def _run_task(args) -> Bundle:
    (verb, p, curve), mode, K, seed, samples = args
    if verb == "groups":
        return run_groups(p, seed)
    if verb == "cusps":
        return run_cusps(p, curve)
    return run_unit(p, mode if p <= siegel_units.EXACT_PRIME_LIMIT else "complex", K, seed, samples)


# -- argument handling ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help=f"directory for the JSON report (default: ${OUT_ENV})")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)

    ap = argparse.ArgumentParser(prog="nscartan", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="verb", required=True)

    g = sub.add_parser("groups", parents=[common], help="subgroup checks in GL_2(F_p)")
    g.add_argument("p", type=int)

    c = sub.add_parser("cusps", parents=[common], help="cusp table of a modular curve")
    c.add_argument("p", type=int)
    c.add_argument("curve", choices=list(cusp_comb.CURVES))

    u = sub.add_parser("unit", parents=[common], help="Siegel unit on the cube orbit")
    u.add_argument("p", type=int)
    u.add_argument("--mode", choices=["exact", "complex"], default="exact")
    u.add_argument("--K", type=int, default=None, help="truncation in powers of q^(1/p)")
    u.add_argument("--samples", type=int, default=20)

    r = sub.add_parser("runge", parents=[common], help="bounds on log|j| and the prime threshold")
    r.add_argument("p", type=float, nargs="?")
    r.add_argument("--threshold", action="store_true")
    r.add_argument("--scan", nargs=3, type=float, metavar=("PMIN", "PMAX", "N"))
    r.add_argument("--constants", choices=["paper", "oracle", "both"], default="both")
    r.add_argument("--csv", help="also write the scan rows as CSV to this path")

    a = sub.add_parser("all", parents=[common], help="every suite for a list of primes")
    a.add_argument("--primes", type=int, nargs="+", default=[11, 17, 23])
    a.add_argument("--mode", choices=["exact", "complex"], default="exact")
    a.add_argument("--K", type=int, default=None)
    a.add_argument("--scan-n", type=int, default=1000)
    a.add_argument("--samples", type=int, default=20)
    return ap


def _dispatch(args) -> tuple[Bundle, str]:
    if args.verb == "groups":
        return run_groups(args.p, args.seed), f"groups-{args.p}"
    if args.verb == "cusps":
        return run_cusps(args.p, args.curve), f"cusps-{args.p}-{args.curve.replace('+', 'plus')}"
    if args.verb == "unit":
        return (run_unit(args.p, args.mode, args.K, args.seed, args.samples),
                f"unit-{args.p}-{args.mode}")
    if args.verb == "runge":
        sources = ("paper", "oracle") if args.constants == "both" else (args.constants,)
        chosen = sum(x is not None and x is not False for x in (args.p, args.threshold or None, args.scan))
        if chosen != 1:
            raise UsageError("runge takes exactly one of: a prime p, --threshold, --scan PMIN PMAX N")
        if args.threshold:
            return run_threshold(), "runge-threshold"
        if args.scan:
            pmin, pmax, n = args.scan
            if n != int(n) or n < 1:
                raise UsageError("N must be a positive integer")
            bundle = run_scan(pmin, pmax, int(n), sources, args.jobs)
            if args.csv:
                _write_csv(args.csv, bundle.results["rows"])
            return bundle, f"runge-scan-{int(pmin)}-{int(pmax)}-{int(n)}"
        p = int(args.p) if float(args.p).is_integer() else args.p
        return run_runge_prime(p, sources), f"runge-{p}"
    for p in args.primes:
        _prime(p)
        if p < 5:
            raise UsageError("all needs primes >= 5")
    return (run_all(args.primes, args.mode, args.K, args.seed, args.jobs, args.scan_n, args.samples),
            "all")


def _write_csv(path: str, rows: list[dict]) -> None:
    cols = ["p", "source", "j_log_bound", "seven_sqrt_p", "margin", "headline_ok"]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols)
        w.writeheader()
        w.writerows(rows)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        bundle, name = _dispatch(args)
    except UsageError as exc:
        print(f"nscartan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = dumps(bundle.to_dict())
    sys.stdout.write(text)
    out = args.out or os.environ.get(OUT_ENV)
    if out:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, name + ".json"), "w") as fh:
            fh.write(text)
    failed = [c["name"] for c in bundle.checks if c["status"] not in ("pass", "skip")]
    summary = f"{bundle.command}: {len(bundle.checks) - len(failed)}/{len(bundle.checks)} checks ok"
    if failed:
        summary += "; not ok: " + ", ".join(failed[:5]) + (" ..." if len(failed) > 5 else "")
    print(summary, file=sys.stderr)
    return EXIT_OK if bundle.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
