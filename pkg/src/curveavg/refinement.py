"""Executable method of refinements.

The pipeline: refine E and F by alternating half-mass thresholds, flow
back and forth along the curve through parameter slices, build the
pruned tower of parameter chains for a start point y, and bound |E| from
below through the multiplicity of the telescoping image map.

The implicit constants of the refinement lemma are made explicit by
recomputing the current mass ratio at each level and thresholding at
half of it; every threshold is recorded in the trace.
"""
from __future__ import annotations

import dataclasses
import json
from fractions import Fraction

from .curves import Curve, Point, curve_to_text
from .diophantine import BudgetExceeded
from .lattice import SparseSet, alpha_beta, correlation_count

DEFAULT_TOWER_BUDGET = 5_000_000


def _add(x: Point, y: Point) -> Point:
    return tuple(a + b for a, b in zip(x, y))


def _sub(x: Point, y: Point) -> Point:
    return tuple(a - b for a, b in zip(x, y))


@dataclasses.dataclass(frozen=True)
class RefinedSets:
    """Levels E_0 >= E_1 >= ... >= E_k and F_0 >= ... >= F_k with the
    recorded per-level thresholds (alpha_j/2, beta_j/2)."""

    curve: Curve
    N: int
    E_levels: tuple[SparseSet, ...]
    F_levels: tuple[SparseSet, ...]
    alphas: tuple[Fraction, ...]   # alpha_j, j = 1..k (recomputed ratios)
    betas: tuple[Fraction, ...]

    @property
    def k(self) -> int:
        return len(self.E_levels) - 1

    def alpha_threshold(self, j: int) -> Fraction:
        return self.alphas[j - 1] / 2

    def beta_threshold(self, j: int) -> Fraction:
        return self.betas[j - 1] / 2


def refine(E: SparseSet, F: SparseSet, c: Curve, N: int, k: int) -> RefinedSets:
    """Iterate F_j = {x : unnorm avg of 1_{E_{j-1}} at x > alpha_j/2} and
    E_j = {y : adjoint of 1_{F_j} at y > beta_j/2}, with alpha_j, beta_j the
    mass ratios recomputed at each step.  Each step keeps at least half of
    the current pairing mass, so all levels stay nonempty."""
    if not len(E) or not len(F):
        raise ValueError("E and F must be nonempty")
    c.require_separated()
    alpha0, beta0 = alpha_beta(E, F, c, N)
    if alpha0 == 0 or beta0 == 0:
        raise ValueError("no mass flows between E and F (alpha or beta is zero)")
    gs = [c(n) for n in range(1, N + 1)]
    E_levels = [E]
    F_levels = [F]
    alphas: list[Fraction] = []
    betas: list[Fraction] = []
    for _ in range(k):
        Ej_prev, Fj_prev = E_levels[-1], F_levels[-1]
        eset = Ej_prev.points
        counts = {x: sum(1 for g in gs if _sub(x, g) in eset) for x in Fj_prev.points}
        alpha_j = Fraction(sum(counts.values()), len(Fj_prev))
        thr_a = alpha_j / 2
        Fj = SparseSet([x for x, v in counts.items() if v > thr_a], F.dimension)
        fset = Fj.points
        adj = {y: sum(1 for g in gs if _add(y, g) in fset) for y in Ej_prev.points}
        beta_j = Fraction(sum(adj.values()), len(Ej_prev))
        thr_b = beta_j / 2
        Ej = SparseSet([y for y, v in adj.items() if v > thr_b], E.dimension)
        alphas.append(alpha_j)
        betas.append(beta_j)
        E_levels.append(Ej)
        F_levels.append(Fj)
    return RefinedSets(c, N, tuple(E_levels), tuple(F_levels),
                       tuple(alphas), tuple(betas))


@dataclasses.dataclass(frozen=True)
class PropertyCheck:
    name: str
    passed: bool
    instances: int
    detail: str = ""


def lemma_properties_report(r: RefinedSets) -> list[PropertyCheck]:
    """Recompute the six refinement-lemma properties with the recorded
    constants: nesting, pointwise lower bounds, and half-mass retention."""
    c, N = r.curve, r.N
    gs = [c(n) for n in range(1, N + 1)]
    checks: list[PropertyCheck] = []
    nest_f = all(r.F_levels[j].points <= r.F_levels[j - 1].points
                 for j in range(1, r.k + 1))
    nest_e = all(r.E_levels[j].points <= r.E_levels[j - 1].points
                 for j in range(1, r.k + 1))
    checks.append(PropertyCheck("i_F_nested", nest_f, r.k))
    checks.append(PropertyCheck("iv_E_nested", nest_e, r.k))

    ok_ii = ok_iii = ok_v = ok_vi = True
    n_ii = n_v = 0
    for j in range(1, r.k + 1):
        eprev = r.E_levels[j - 1].points
        fj = r.F_levels[j]
        thr_a = r.alpha_threshold(j)
        for x in fj.points:
            n_ii += 1
            if not sum(1 for g in gs if _sub(x, g) in eprev) > thr_a:
                ok_ii = False
        mass_prev = correlation_count(r.E_levels[j - 1], r.F_levels[j - 1], c, N)
        mass_j = correlation_count(r.E_levels[j - 1], fj, c, N)
        if 2 * mass_j < mass_prev:
            ok_iii = False
        ej = r.E_levels[j]
        thr_b = r.beta_threshold(j)
        fset = fj.points
        for y in ej.points:
            n_v += 1
            if not sum(1 for g in gs if _add(y, g) in fset) > thr_b:
                ok_v = False
        mass_before = correlation_count(r.E_levels[j - 1], fj, c, N)
        mass_after = correlation_count(ej, fj, c, N)
        if 2 * mass_after < mass_before:
            ok_vi = False
    checks.append(PropertyCheck("ii_pointwise_alpha", ok_ii, n_ii))
    checks.append(PropertyCheck("iii_mass_retention_F", ok_iii, r.k))
    checks.append(PropertyCheck("v_pointwise_beta", ok_v, n_v))
    checks.append(PropertyCheck("vi_mass_retention_E", ok_vi, r.k))
    return checks


@dataclasses.dataclass(frozen=True)
class Slice:
    """One parameter slice: the admissible values of the next parameter."""

    prefix: tuple[int, ...]
    direction: str           # "B" lands in an F level, "A" in an E level
    members: frozenset[int]


def _partial_point(y: Point, prefix: tuple[int, ...], c: Curve) -> Point:
    cur = y
    for i, n in enumerate(prefix):
        g = c(n)
        cur = _add(cur, g) if i % 2 == 0 else _sub(cur, g)
    return cur


def slice_members(y: Point, prefix: tuple[int, ...], direction: str,
                  r: RefinedSets, c: Curve, N: int) -> Slice:
    """Membership-test the next parameter against the right refined level."""
    k = r.k
    if len(prefix) >= 2 * k:
        raise ValueError("prefix already complete")
    if any(not 1 <= p <= N for p in prefix):
        raise ValueError("prefix parameters outside [1, N]")
    if not prefix and y not in r.E_levels[k]:
        raise ValueError("start point must lie in the deepest refined level")
    j = len(prefix) // 2
    cur = _partial_point(y, prefix, c)
    if direction == "B":
        if len(prefix) % 2 != 0:
            raise ValueError("B slices follow even prefixes")
        target = r.F_levels[k - j].points
        members = frozenset(n for n in range(1, N + 1) if _add(cur, c(n)) in target)
    elif direction == "A":
        if len(prefix) % 2 != 1:
            raise ValueError("A slices follow odd prefixes")
        target = r.E_levels[k - j - 1].points
        members = frozenset(m for m in range(1, N + 1) if _sub(cur, c(m)) in target)
    else:
        raise ValueError("direction must be 'A' or 'B'")
    return Slice(prefix, direction, members)


def prune_last_slice(y: Point, prefix: tuple[int, ...], s: Slice, c: Curve) -> Slice:
    """Drop every m_k whose chain telescopes back to y (zero total sum)."""
    if s.direction != "A":
        raise ValueError("only the final A slice is pruned")
    cur = _partial_point(y, prefix, c)
    kept = frozenset(m for m in s.members if _sub(cur, c(m)) != y)
    return Slice(s.prefix, s.direction, kept)


def prune_bound(c: Curve) -> int:
    """Curve-dependent cap on how many members pruning can remove: the
    removed set solves a fixed nonconstant polynomial equation in m_k."""
    return c.components[0].degree


def psi(y: Point, chain: tuple[int, ...], c: Curve) -> Point:
    """y + gamma(n1) - gamma(m1) + ... + gamma(nk) - gamma(mk)."""
    if len(chain) % 2 != 0:
        raise ValueError("chain length must be even")
    return _partial_point(y, chain, c)


@dataclasses.dataclass
class TowerResult:
    tower_size: int
    images: dict[Point, int]
    min_b_sizes: tuple[int, ...]     # per level 1..k, smallest B slice seen
    min_a_sizes: tuple[int, ...]     # per level 1..k, smallest (pruned) A slice seen
    max_pruned: int                  # most members removed from one final slice
    pruning_violations: int          # chains whose image returned to y (must be 0)


def build_tower(y: Point, r: RefinedSets, c: Curve, N: int, k: int,
                budget: int = DEFAULT_TOWER_BUDGET) -> TowerResult:
    """Depth-first, counting-first enumeration of the pruned tower.

    Chains are never materialised; images accumulate in a value -> count
    map, and per-level minimum slice sizes are recorded for the explicit
    tower lower bound.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if y not in r.E_levels[k]:
        raise ValueError("start point must lie in the deepest refined level")
    gs = [c(n) for n in range(1, N + 1)]
    e_pts = [lv.points for lv in r.E_levels]
    f_pts = [lv.points for lv in r.F_levels]
    images: dict[Point, int] = {}
    min_b = [N + 1] * (k + 1)
    min_a = [N + 1] * (k + 1)
    state = {"size": 0, "max_pruned": 0, "violations": 0}

    def walk(level: int, cur: Point) -> None:
        target_f = f_pts[k - level + 1]
        bs = [n for n in range(1, N + 1) if _add(cur, gs[n - 1]) in target_f]
        if len(bs) < min_b[level]:
            min_b[level] = len(bs)
        target_e = e_pts[k - level]
        for n in bs:
            mid = _add(cur, gs[n - 1])
            if level == k:
                kept = 0
                removed = 0
                for m in range(1, N + 1):
                    img = _sub(mid, gs[m - 1])
                    if img not in target_e:
                        continue
                    if img == y:
                        removed += 1
                        continue
                    kept += 1
                    images[img] = images.get(img, 0) + 1
                state["size"] += kept
                if state["size"] > budget:
                    err = BudgetExceeded(
                        f"tower exceeds budget {budget} (partial size {state['size']})")
                    err.partial_size = state["size"]
                    raise err
                if removed > state["max_pruned"]:
                    state["max_pruned"] = removed
                if kept < min_a[level]:
                    min_a[level] = kept
            else:
                asl = [m for m in range(1, N + 1) if _sub(mid, gs[m - 1]) in target_e]
                if len(asl) < min_a[level]:
                    min_a[level] = len(asl)
                for m in asl:
                    walk(level + 1, _sub(mid, gs[m - 1]))

    walk(1, y)
    for img in images:
        if img == y:
            state["violations"] += 1
    return TowerResult(state["size"], images, tuple(min_b[1:]), tuple(min_a[1:]),
                       state["max_pruned"], state["violations"])


def multiplicity(images: dict[Point, int]) -> tuple[int, Point]:
    """Largest image count and the smallest point attaining it."""
    if not images:
        raise ValueError("empty tower")
    m = max(images.values())
    witness = min(p for p, cnt in images.items() if cnt == m)
    return m, witness


@dataclasses.dataclass
class RefinementTrace:
    curve: str
    N: int
    k: int
    alpha: Fraction
    beta: Fraction
    set_sizes_e: tuple[int, ...]
    set_sizes_f: tuple[int, ...]
    alpha_thresholds: tuple[Fraction, ...]
    beta_thresholds: tuple[Fraction, ...]
    chosen_y: Point
    tower_size: int
    multiplicity: int
    witness_z: Point
    min_b_sizes: tuple[int, ...]
    min_a_sizes: tuple[int, ...]
    checks: dict[str, bool]
    trivial_regime: bool = False
    note: str = ""

    def json_dict(self) -> dict:
        return {
            "curve": self.curve,
            "N": self.N,
            "k": self.k,
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "sizes_E": list(self.set_sizes_e),
            "sizes_F": list(self.set_sizes_f),
            "alpha_thresholds": [str(t) for t in self.alpha_thresholds],
            "beta_thresholds": [str(t) for t in self.beta_thresholds],
            "chosen_y": list(self.chosen_y),
            "tower_size": self.tower_size,
            "multiplicity": self.multiplicity,
            "witness_z": list(self.witness_z),
            "min_b_sizes": list(self.min_b_sizes),
            "min_a_sizes": list(self.min_a_sizes),
            "checks": self.checks,
            "trivial_regime": self.trivial_regime,
            "note": self.note,
        }

    def to_json(self) -> str:
        return json.dumps(self.json_dict(), sort_keys=True, separators=(",", ":"))

    def human_report(self) -> str:
        lines = [
            f"refinement trace: curve={self.curve} N={self.N} k={self.k}",
            f"  alpha = {self.alpha}  beta = {self.beta}",
            f"  |E_j| = {list(self.set_sizes_e)}  |F_j| = {list(self.set_sizes_f)}",
        ]
        if self.trivial_regime:
            lines.append(f"  trivial regime: {self.note}")
        else:
            lines.append(f"  chosen y = {self.chosen_y}  |T| = {self.tower_size}"
                         f"  m = {self.multiplicity}  witness z = {self.witness_z}")
        for name, ok in sorted(self.checks.items()):
            lines.append(f"  [{'PASS' if ok else 'FAIL'}] {name}")
        return "\n".join(lines)


@dataclasses.dataclass
class InstanceReport:
    trace: RefinementTrace
    per_y: list[tuple[Point, int, int, Point]]   # (y, |T|, m, witness)
    refined: RefinedSets | None

    def all_passed(self) -> bool:
        return all(self.trace.checks.values())


def verify_subcritical_instance(E: SparseSet, F: SparseSet, c: Curve, N: int, k: int,
                                y_cap: int | None = None,
                                budget: int = DEFAULT_TOWER_BUDGET) -> InstanceReport:
    """Run the whole pipeline on one instance and check every inequality.

    With alpha or beta not exceeding the pruning cap the instance routes
    to the trivial regime (alpha^k beta^k <= (cap N)^k needs no tower);
    otherwise the tower is built for each start point (capped sample,
    lexicographic order) and the recorded-constant chain is verified.
    """
    c.require_separated()
    if k not in (1, 2, 3):
        raise ValueError("k must be 1, 2 or 3")
    alpha, beta = alpha_beta(E, F, c, N)
    curve_s = curve_to_text(c)
    cap = prune_bound(c)

    if alpha <= cap or beta <= cap:
        trivial_ok = alpha ** k * beta ** k <= (Fraction(cap) * N) ** k
        trace = RefinementTrace(
            curve_s, N, k, alpha, beta,
            (len(E),), (len(F),), (), (),
            (0,) * c.dimension, 0, 0, (0,) * c.dimension, (), (),
            {"trivial_bound": bool(trivial_ok)},
            trivial_regime=True,
            note=f"alpha or beta <= pruning cap {cap}; trivial bound applies",
        )
        return InstanceReport(trace, [], None)

    refined = refine(E, F, c, N, k)
    checks = {f"lemma_{p.name}": p.passed for p in lemma_properties_report(refined)}

    ys = sorted(refined.E_levels[k].points)
    if y_cap is not None:
        ys = ys[:y_cap]
    per_y: list[tuple[Point, int, int, Point]] = []
    eq15_ok = eq16_ok = prune_ok = thresholds_ok = True
    chain_ok = True
    best_tower: TowerResult | None = None
    best_row: tuple[Point, int, int, Point] | None = None
    thr_prod = Fraction(1)
    for j in range(1, k + 1):
        lvl = k - j + 1
        last = refined.alpha_threshold(lvl) - (cap if j == k else 0)
        thr_prod *= refined.beta_threshold(lvl) * max(Fraction(0), last)

    for y in ys:
        tower = build_tower(y, refined, c, N, k, budget)
        if tower.tower_size == 0:
            per_y.append((y, 0, 0, y))
            continue
        m, witness = multiplicity(tower.images)
        row = (y, tower.tower_size, m, witness)
        per_y.append(row)
        if tower.pruning_violations or witness == y:
            prune_ok = False
        if tower.tower_size > m * len(E):
            eq16_ok = False
        prod = 1
        for j in range(1, k + 1):
            prod *= tower.min_b_sizes[j - 1] * tower.min_a_sizes[j - 1]
        if tower.tower_size < prod:
            eq15_ok = False
        for j in range(1, k + 1):
            lvl = k - j + 1
            if not tower.min_b_sizes[j - 1] > refined.beta_threshold(lvl):
                thresholds_ok = False
            slack = cap if j == k else 0
            if not tower.min_a_sizes[j - 1] > refined.alpha_threshold(lvl) - slack:
                thresholds_ok = False
        if thr_prod > m * len(E):
            chain_ok = False
        if best_row is None or (m, tower.tower_size) > (best_row[2], best_row[1]):
            best_row, best_tower = row, tower

    checks.update({
        "pruning_never_returns": prune_ok,
        "eq15_tower_lower_bound": eq15_ok,
        "eq16_multiplicity_bound": eq16_ok,
        "recorded_slice_thresholds": thresholds_ok,
        "threshold_chain_vs_mE": chain_ok,
    })

    if best_row is not None:
        chosen_y, tsize, mult, witness = best_row
        min_b, min_a = best_tower.min_b_sizes, best_tower.min_a_sizes
    else:
        chosen_y, tsize, mult, witness = (0,) * c.dimension, 0, 0, (0,) * c.dimension
        min_b, min_a = (), ()
    trace = RefinementTrace(
        curve_s, N, k, alpha, beta,
        tuple(len(s) for s in refined.E_levels),
        tuple(len(s) for s in refined.F_levels),
        tuple(refined.alpha_threshold(j) for j in range(1, k + 1)),
        tuple(refined.beta_threshold(j) for j in range(1, k + 1)),
        chosen_y, tsize, mult, witness, min_b, min_a,
        checks,
    )
    return InstanceReport(trace, per_y, refined)
