"""Command-line driver: count, verify, exponent, refine, riesz.

Machine output is JSON lines with sorted keys and counts as decimal
strings; human reports are plain text.  Output bytes depend only on the
configuration and seed (timings are opt-in), so identical runs are
byte-identical regardless of the thread count.  Exit codes: 0 success,
1 usage or hypothesis error, 2 budget exceeded.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import analysis, diophantine, refinement
from .curves import Curve, curve_to_text, moment_curve, parse_curve
from .diophantine import BudgetExceeded, CountRecord
from .exponents import ExponentPair
from .lattice import SparseSet, read_set
from .polynomials import parse_poly

EXIT_OK, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _fraction(text: str) -> Fraction:
    return Fraction(text)


@dataclasses.dataclass
class RunConfig:
    """Validated knobs shared by the subcommands."""

    curve_text: str = "n,n^2"
    N_values: list[int] = dataclasses.field(default_factory=lambda: [8])
    seed: int = 0
    budget_tuples: int = diophantine.DEFAULT_TUPLE_BUDGET
    cache: str | None = None
    out: str | None = None
    c_box: int = 1
    threads: int = 1
    timings: bool = False

    def __post_init__(self):
        if self.budget_tuples <= 0:
            raise UsageError("budget must be positive")
        if self.threads < 1:
            raise UsageError("threads must be >= 1")
        self.N_values = sorted(set(self.N_values))
        if any(n < 1 for n in self.N_values):
            raise UsageError("N values must be >= 1")
        parse_curve(self.curve_text)  # fail early on bad curve text

    @property
    def curve(self) -> Curve:
        return parse_curve(self.curve_text)


def load_config_file(path: str) -> dict[str, str]:
    """Flat key=value lines; '#' starts a comment."""
    out: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"bad config line: {raw!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def _pick(ns, filecfg: dict[str, str], key: str, conv, default):
    val = getattr(ns, key, None)
    if val is not None:
        return val
    if key in filecfg:
        return conv(filecfg[key])
    return default


def _build_config(ns) -> RunConfig:
    filecfg = load_config_file(ns.config) if getattr(ns, "config", None) else {}
    return RunConfig(
        curve_text=_pick(ns, filecfg, "curve", str, "n,n^2"),
        N_values=_pick(ns, filecfg, "N", _int_list, [8]),
        seed=_pick(ns, filecfg, "seed", int, 0),
        budget_tuples=_pick(ns, filecfg, "budget_tuples", int,
                            diophantine.DEFAULT_TUPLE_BUDGET),
        cache=_pick(ns, filecfg, "cache", str, None),
        out=_pick(ns, filecfg, "out", str, None),
        c_box=_pick(ns, filecfg, "c_box", int, 1),
        threads=_pick(ns, filecfg, "threads", int, 1),
        timings=bool(getattr(ns, "timings", False)),
    )


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--curve", dest="curve", help="curve text, e.g. 'n,n^2'")
    p.add_argument("--N", dest="N", type=_int_list, help="comma-separated N values")
    p.add_argument("--seed", type=int, help="64-bit seed recorded in reports")
    p.add_argument("--budget-tuples", dest="budget_tuples", type=int,
                   help="enumeration budget")
    p.add_argument("--cache", help="JSON-lines count cache file")
    p.add_argument("--out", help="output file")
    p.add_argument("--c-box", dest="c_box", type=int, help="box dilate multiplier")
    p.add_argument("--threads", type=int, help="worker threads (results identical)")
    p.add_argument("--config", help="key=value config file (flags win)")
    p.add_argument("--timings", action="store_true", help="include elapsed seconds")


# ----------------------------------------------------------------------
# count
# ----------------------------------------------------------------------

class CountCache:
    def __init__(self, path: str | None):
        self.path = path
        self.table: dict[str, dict] = {}
        if path and Path(path).exists():
            for line in Path(path).read_text().splitlines():
                if not line.strip():
                    continue
                rec = json.loads(line)
                self.table[rec["key"]] = rec

    @staticmethod
    def key(curve: str, mode: str, s_or_k: int, N: int, z) -> str:
        zs = ",".join(str(v) for v in z) if z is not None else "-"
        return f"{curve}|{mode}|{s_or_k}|{N}|{zs}"

    def get(self, key: str):
        return self.table.get(key)

    def put(self, key: str, record: CountRecord) -> None:
        entry = {"key": key, "count": str(record.count), "method": record.method}
        self.table[key] = entry
        if self.path:
            with open(self.path, "a") as fh:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")


def _compute_count(cfg: RunConfig, mode: str, s_or_k: int, N: int,
                   z: list[int] | None, method: str, poly_text: str | None,
                   slack: int) -> CountRecord:
    if mode == "homogeneous":
        return diophantine.count_homogeneous(cfg.curve, s_or_k, N, method,
                                             cfg.budget_tuples, cfg.threads)
    if mode == "inhomogeneous":
        if z is None:
            raise UsageError("inhomogeneous mode needs --z")
        return diophantine.count_inhomogeneous(cfg.curve, s_or_k, N, tuple(z),
                                               method, cfg.budget_tuples, cfg.threads)
    if mode == "max":
        return diophantine.max_inhomogeneous_record(cfg.curve, s_or_k, N,
                                                    budget=cfg.budget_tuples)
    if mode == "lemma1":
        if z is None or len(z) != 1:
            raise UsageError("lemma1 mode needs --z with one component")
        return diophantine.count_lemma1(parse_poly(poly_text), z[0], N, slack)
    if mode == "lemma2":
        if z is None or len(z) != 2:
            raise UsageError("lemma2 mode needs --z with two components")
        return diophantine.count_lemma2(parse_poly(poly_text), z[0], z[1], N, slack)
    if mode == "lemma3":
        if z is None or len(z) != 3:
            raise UsageError("lemma3 mode needs --z with three components")
        return diophantine.count_lemma3(z[0], z[1], z[2], N, slack)
    raise UsageError(f"unknown mode {mode!r}")


def cmd_count(ns) -> int:
    cfg = _build_config(ns)
    mode = ns.mode
    s_or_k = ns.s if ns.s is not None else (ns.k if ns.k is not None else 2)
    z = ns.z
    poly_text = ns.poly or cfg.curve_text
    cache = CountCache(cfg.cache)
    audit_rng = random.Random(cfg.seed ^ 0x5EED)
    lines = []
    for N in cfg.N_values:
        key = CountCache.key(poly_text if mode.startswith("lemma") else cfg.curve_text,
                             mode, s_or_k, N, z)
        hit = cache.get(key)
        if hit is not None:
            rec = CountRecord(
                poly_text if mode.startswith("lemma") else cfg.curve_text,
                mode, s_or_k, N, tuple(z) if z else None,
                int(hit["count"]), hit.get("method", "cached"), 0.0, cached=True)
            if audit_rng.random() < 0.01:
                fresh = _compute_count(cfg, mode, s_or_k, N, z, ns.method,
                                       poly_text, ns.slack)
                if fresh.count != rec.count:
                    raise RuntimeError(
                        f"cache mismatch for {key}: {rec.count} != {fresh.count}")
        else:
            rec = _compute_count(cfg, mode, s_or_k, N, z, ns.method, poly_text,
                                 ns.slack)
            cache.put(key, rec)
        lines.append(json.dumps(rec.json_dict(cfg.timings), sort_keys=True,
                                separators=(",", ":")))
    payload = "\n".join(lines) + "\n"
    sys.stdout.write(payload)
    if cfg.out:
        Path(cfg.out).write_text(payload)
    return EXIT_OK


# ----------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------

def _suite_poly(fault: str | None):
    from .curves import AffineTransform, apply_transform
    checks = []
    corpus = ["0", "n", "n^2", "2n^3-n+5", "n^2+n", "2n^3-n"]
    ok = all(str(parse_poly(t)) in (t, "0") and
             parse_poly(str(parse_poly(t))) == parse_poly(t) for t in corpus)
    checks.append(("poly.print_parse_roundtrip", len(corpus), ok))
    c = parse_curve("n,n^2")
    t = AffineTransform.dilation(2, 3).then(AffineTransform.shear(2, 1, 1))
    tc = apply_transform(c, t)
    flip = -1 if fault == "transform-sign" else 1
    ok = all(tc(n) == t.apply_point(tuple(flip * v for v in c(n)))
             for n in range(-8, 9))
    checks.append(("poly.transform_equivariance", 17, ok))
    return checks

def _suite_operators(fault: str | None):
    from .curves import AffineTransform, apply_transform
    from .lattice import (SparseFunction, adjoint_unnormalized,
                          average_unnormalized, pairing, power_sum)
    rng = random.Random(11)
    checks = []
    c = parse_curve("n,n^2")
    ok_adj = ok_mass = True
    for _ in range(8):
        f = SparseFunction({(rng.randint(-4, 4), rng.randint(-4, 4)):
                            Fraction(rng.randint(-3, 3), rng.randint(1, 4))
                            for _ in range(5)}, 2)
        g = SparseFunction({(rng.randint(-4, 4), rng.randint(-4, 4)):
                            Fraction(rng.randint(-3, 3), rng.randint(1, 4))
                            for _ in range(5)}, 2)
        lhs = pairing(average_unnormalized(c, 5, f), g)
        rhs = pairing(f, adjoint_unnormalized(c, 5, g))
        if fault == "adjoint-sign":
            rhs = -rhs
        ok_adj = ok_adj and lhs == rhs
        ok_mass = ok_mass and average_unnormalized(c, 5, f).mass() == 5 * f.mass()
    checks.append(("operators.adjoint_identity", 8, ok_adj))
    checks.append(("operators.mass_scaling", 8, ok_mass))
    f = SparseFunction({(1, 2): Fraction(2, 3), (0, -1): Fraction(-1, 2),
                        (3, 3): Fraction(1)}, 2)
    t = AffineTransform.shear(2, 1, 2)
    tc = apply_transform(c, t)
    lhs = power_sum(average_unnormalized(tc, 4, f), 2)
    rhs = power_sum(average_unnormalized(c, 4, f.compose_transform(t)), 2)
    checks.append(("operators.shear_transport", 1, lhs == rhs))
    d1 = parse_curve("n^2")
    td = apply_transform(d1, AffineTransform.dilation(3))
    f1 = SparseFunction({(i,): Fraction(rng.randint(-3, 3), 2)
                         for i in range(-5, 6)}, 1)
    lhs = power_sum(average_unnormalized(td, 4, f1), 3)
    rhs = sum(power_sum(average_unnormalized(d1, 4, g), 3)
              for g in f1.residue_slices(3))
    checks.append(("operators.dilation_decomposition", 1, lhs == rhs))
    return checks

def _suite_counting(fault: str | None):
    checks = []
    p2 = parse_poly("n^2")
    ok = True
    N = 5
    brute: dict[int, int] = {}
    for n in range(1, N + 1):
        for m in range(1, N + 1):
            brute[p2(n) - p2(m)] = brute.get(p2(n) - p2(m), 0) + 1
    for z in range(-30, 31):
        if z == 0:
            continue
        got = diophantine.count_lemma1(p2, z, N).count
        if fault == "count-off-by-one":
            got += 1
        if got != brute.get(z, 0):
            ok = False
    checks.append(("counting.lemma1_vs_brute", 60, ok))
    curve1 = parse_curve("n")
    ok = all(diophantine.count_homogeneous(curve1, 2, n, "mitm").count
             == diophantine.count_homogeneous(curve1, 2, n, "brute").count
             == (2 * n ** 3 + n) // 3 for n in (1, 2, 3, 4))
    checks.append(("counting.mitm_equals_brute", 4, ok))
    c2 = parse_curve("n,n^2")
    total = 0
    seen = set()
    for a in range(1, 4):
        for b in range(1, 4):
            seen.add((a - b, a * a - b * b))
    ok = True
    for z in seen:
        total += diophantine.count_inhomogeneous(c2, 1, 3, z, "brute").count
    ok = total == 3 ** 2
    checks.append(("counting.partition_identity", len(seen), ok))
    return checks

def _suite_refinement(fault: str | None):
    rng = random.Random(23)
    c = parse_curve("n,n^2")
    checks = []
    ok = True
    instances = 0
    for _ in range(3):
        E = SparseSet({(rng.randint(0, 10), rng.randint(0, 10)) for _ in range(12)}, 2)
        base = E.sorted_points()
        F = SparseSet({tuple(a + b for a, b in zip(base[rng.randrange(len(base))],
                                                   c(rng.randint(1, 6))))
                       for _ in range(12)}, 2)
        rep = refinement.verify_subcritical_instance(E, F, c, 6, 1, y_cap=4)
        instances += 1
        passed = rep.all_passed()
        if fault == "refinement-flip":
            passed = not passed
        ok = ok and passed
    checks.append(("refinement.instance_checks", instances, ok))
    return checks


_SUITES = {
    "poly": _suite_poly,
    "operators": _suite_operators,
    "counting": _suite_counting,
    "refinement": _suite_refinement,
}


def cmd_verify(ns) -> int:
    names = [s for s in (ns.suites.split(",") if ns.suites else []) if s]
    if ns.suites is None:
        names = list(_SUITES)
    if not names:
        raise UsageError("empty suite selection")
    unknown = [n for n in names if n not in _SUITES]
    if unknown:
        raise UsageError(f"unknown suites: {unknown}")
    failures = 0
    for name in names:
        for prop, instances, ok in _SUITES[name](ns.fault_inject):
            print(f"[{'PASS' if ok else 'FAIL'}] {prop} (instances={instances})")
            failures += 0 if ok else 1
    print(f"verify: {failures} failing properties")
    return EXIT_OK if failures == 0 else EXIT_USAGE


# ----------------------------------------------------------------------
# exponent
# ----------------------------------------------------------------------

def _exponent_rows(cfg: RunConfig, ns) -> tuple[list[tuple[int, float]], float]:
    c = cfg.curve
    family = ns.family
    pair = ExponentPair(Fraction(1) / _fraction(ns.p), Fraction(1) / _fraction(ns.q))
    rows: list[tuple[int, float]] = []
    if family in ("dirac", "dual", "box"):
        kind = {"dirac": "dirac", "dual": "curve_image_dual",
                "box": "parabolic_box"}[family]
        for N in cfg.N_values:
            E, F = analysis.make_extremizer(kind, c, N, cfg.c_box)
            rows.append((N, analysis.rwt_ratio(E, F, pair, c, N)))
        if family == "dirac":
            ref = -float(pair.inv_q_dual)
        elif family == "dual":
            ref = -float(pair.inv_p)
        else:
            ref = -float(c.total_degree * pair.inv_r)
    elif family == "jcount":
        s = ns.s if ns.s is not None else 2
        for N in cfg.N_values:
            rec = diophantine.count_homogeneous(c, s, N, "mitm", cfg.budget_tuples,
                                                cfg.threads)
            rows.append((N, float(rec.count)))
        ref = float(max(s, 2 * s - c.total_degree))
    elif family == "maxinhom":
        k = ns.k if ns.k is not None else 1
        for N in cfg.N_values:
            _, count = diophantine.max_inhomogeneous(c, k, N, budget=cfg.budget_tuples)
            rows.append((N, float(count)))
        ref = float(k - 1)
    else:
        raise UsageError(f"unknown family {family!r}")
    return rows, ref


def cmd_exponent(ns) -> int:
    cfg = _build_config(ns)
    if len(cfg.N_values) < 3:
        raise UsageError("need at least 3 N values for a fit")
    rows, ref = _exponent_rows(cfg, ns)
    fit = analysis.fit_exponent(rows)
    csv_lines = ["N,value"] + [f"{n},{v!r}" for n, v in rows]
    csv_text = "\n".join(csv_lines) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(csv_text)
    else:
        sys.stdout.write(csv_text)
    print(f"family={ns.family} slope={fit.slope:.6f} reference={ref:.6f} "
          f"max_residual={fit.max_residual:.6f} seed={cfg.seed}")
    return EXIT_OK


# ----------------------------------------------------------------------
# refine
# ----------------------------------------------------------------------

def _demo_sets(seed: int, N: int, c: Curve) -> tuple[SparseSet, SparseSet]:
    rng = random.Random(seed)
    d = c.dimension
    E = {tuple(rng.randint(0, N) for _ in range(d)) for _ in range(3 * N)}
    base = sorted(E)
    F = {tuple(a + b for a, b in zip(base[rng.randrange(len(base))],
                                     c(rng.randint(1, N))))
         for _ in range(3 * N)}
    return SparseSet(E, d), SparseSet(F, d)


def cmd_refine(ns) -> int:
    cfg = _build_config(ns)
    c = cfg.curve
    k = ns.k if ns.k is not None else 2
    if k not in (1, 2, 3):
        raise UsageError("k must be 1, 2 or 3")
    N = cfg.N_values[-1]
    if ns.E and ns.F:
        E = read_set(Path(ns.E).read_text().splitlines())
        F = read_set(Path(ns.F).read_text().splitlines())
    elif ns.demo:
        E, F = _demo_sets(cfg.seed, N, c)
    else:
        raise UsageError("refine needs --E and --F files, or --demo")
    if not len(E) or not len(F):
        raise UsageError("E and F must be nonempty")
    try:
        report = refinement.verify_subcritical_instance(
            E, F, c, N, k, y_cap=ns.y_cap, budget=cfg.budget_tuples)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        partial = getattr(exc, "partial_size", None)
        if partial is not None:
            print(f"partial tower size: {partial}", file=sys.stderr)
        return EXIT_BUDGET
    payload = report.trace.to_json() + "\n"
    sys.stdout.write(payload)
    sys.stdout.write(report.trace.human_report() + "\n")
    if cfg.out:
        Path(cfg.out).write_text(payload)
    return EXIT_OK


# ----------------------------------------------------------------------
# riesz
# ----------------------------------------------------------------------

def cmd_riesz(ns) -> int:
    cfg = _build_config(ns)
    res = ns.resolution if ns.resolution is not None else 8
    pts = analysis.riesz_diagram_data(cfg.curve, res)
    lines = ["inv_p,inv_q,region,dominant_term"]
    lines += [f"{p.inv_p},{p.inv_q},{p.region},{p.dominant}" for p in pts]
    text = "\n".join(lines) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ----------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="curveavg",
                     description="exact averaging-operator toolkit for integer curves")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="exact Diophantine counts")
    _add_common(p)
    p.add_argument("--mode", default="homogeneous",
                   choices=["homogeneous", "inhomogeneous", "max",
                            "lemma1", "lemma2", "lemma3"])
    p.add_argument("--s", type=int, help="number of summands per side")
    p.add_argument("--k", type=int, help="alias of --s for inhomogeneous modes")
    p.add_argument("--z", type=_int_list, help="target components, e.g. '1,0,-2'")
    p.add_argument("--method", default="mitm", choices=["brute", "mitm"])
    p.add_argument("--poly", help="polynomial for lemma1/lemma2 modes")
    p.add_argument("--slack", type=int, default=4,
                   help="hypothesis range multiplier before flagging")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("verify", help="run the built-in property suites")
    _add_common(p)
    p.add_argument("--suites", help="comma-separated suite names (default: all)")
    p.add_argument("--fault-inject", dest="fault_inject",
                   help="debug: flip a sign to demonstrate failure detection")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("exponent", help="log-log slope of a measured family")
    _add_common(p)
    p.add_argument("--family", default="dirac",
                   choices=["dirac", "dual", "box", "jcount", "maxinhom"])
    p.add_argument("--p", default="3/2", help="Lebesgue exponent p")
    p.add_argument("--q", default="3", help="Lebesgue exponent q")
    p.add_argument("--s", type=int, help="summands for jcount")
    p.add_argument("--k", type=int, help="summands for maxinhom")
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("refine", help="run the refinement pipeline on sets")
    _add_common(p)
    p.add_argument("--E", help="file with one lattice point per line")
    p.add_argument("--F", help="file with one lattice point per line")
    p.add_argument("--demo", action="store_true", help="seeded demo instance")
    p.add_argument("--k", type=int, help="flow depth (1, 2 or 3)")
    p.add_argument("--y-cap", dest="y_cap", type=int,
                   help="max start points to evaluate")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("riesz", help="region/dominant-term grid as CSV")
    _add_common(p)
    p.add_argument("--resolution", type=int, help="grid subdivisions (default 8)")
    p.set_defaults(func=cmd_riesz)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        return ns.func(ns)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
