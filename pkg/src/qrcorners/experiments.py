"""Group-family scans and the built-in verification suite."""

from __future__ import annotations

import itertools
import logging
import re
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import oracles
from .boxnorm import box_norm, box_norm_naive, lift, verify_box_control
from .corners import (
    FunctionGk,
    SubsetK,
    corner_stats,
    count_simplices,
    cov_forward,
    cov_inverse,
    good_fraction,
    hypergraph_edges,
)
from .errors import QRCornersError
from .groups import check_axioms, parse_group
from .regularity import structured_reduction, weak_regularity
from .spectral import character_degrees, quasirandomness_degree, verify_mean_ergodic
from .subsets import SubsetSpec, derive_rng, generate_subset, random_sign_function

log = logging.getLogger(__name__)

REPORT_FIELDS = ["group", "order", "D", "k", "subset", "density", "mean", "tv",
                 "theta", "good_fraction", "count", "error"]


def resolve_theta(rule: str | float, mean: float) -> float:
    """``0.01`` -> 0.01; ``mean/2`` -> mean / 2; ``mean*0.3`` -> 0.3 * mean."""
    if isinstance(rule, (int, float)):
        return float(rule)
    text = rule.strip().replace(" ", "")
    m = re.fullmatch(r"mean(?:([*/])([0-9.eE+-]+))?", text)
    if m:
        if m.group(1) is None:
            return mean
        factor = float(m.group(2))
        return mean * factor if m.group(1) == "*" else mean / factor
    return float(text)


@dataclass
class ExperimentReport:
    group: str
    order: int
    D: int | None
    k: int
    subset: str
    density: float | None = None
    mean: float | None = None
    tv: float | None = None
    theta: float | None = None
    good_fraction: float | None = None
    count: int | None = None
    error: str = ""
    wall_time: float | None = field(default=None, compare=False)

    def row(self, timing: bool = False) -> dict:
        out = {name: getattr(self, name) for name in REPORT_FIELDS}
        if timing:
            out["wall_time"] = self.wall_time
        return out


def run_experiment(desc: str, k: int, spec: SubsetSpec, theta_rule="mean/2") -> ExperimentReport:
    start = time.perf_counter()
    G = parse_group(desc)
    D = character_degrees(G).D
    A = generate_subset(G, k, spec)
    series = corner_stats(G, A)
    theta = resolve_theta(theta_rule, series.mean)
    return ExperimentReport(
        group=G.label, order=G.order, D=D, k=k, subset=spec.describe(),
        density=float(A.density), mean=series.mean, tv=series.tv, theta=theta,
        good_fraction=good_fraction(series, theta), count=series.total_count,
        wall_time=time.perf_counter() - start)


def tv_scan(family: Sequence[str], k: int, spec: SubsetSpec, theta_rule="mean/2",
            seed: int | None = None) -> list[ExperimentReport]:
    """One report per group, in family order; a failing row carries its error."""
    if seed is not None:
        spec = SubsetSpec(spec.kind, spec.delta, spec.length, spec.sets, spec.m, seed)
    reports = []
    for desc in family:
        try:
            reports.append(run_experiment(desc, k, spec, theta_rule))
        except QRCornersError as exc:
            log.warning("%s: %s", desc, exc)
            reports.append(ExperimentReport(desc, 0, None, k, spec.describe(),
                                             error=f"{type(exc).__name__}: {exc}"))
    return reports


def box_control_scan(family: Sequence[str], k: int = 2, seed: int = 0) -> list[dict]:
    """``verify_box_control`` on seeded random ±1 functions for each group."""
    rows = []
    for desc in family:
        G = parse_group(desc)
        fs = [random_sign_function(G.order, k, seed, label=f"box-control:{G.label}:{i}")
              for i in range(k + 1)]
        rep = verify_box_control(G, fs)
        rows.append({"group": G.label, "order": G.order, "k": k, **rep.to_dict()})
    return rows


# --------------------------------------------------------------------------
# verification suite


@dataclass
class SuiteResult:
    name: str
    ok: bool
    seconds: float
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _axioms(level):
    descs = ["cyclic:1", "cyclic:6", "cyclic:12", "sym:3", "sym:4", "sym:5", "alt:4", "alt:5",
             "sl2:2", "sl2:3", "sl2:5", "prod:(cyclic:2,cyclic:3)", "prod:(sl2:3,cyclic:2)"]
    if level == "full":
        descs += ["sl2:7", "sl2:11", "sl2:13"]
    bad = [d for d in descs if not check_axioms(parse_group(d)).ok]
    return not bad, f"{len(descs)} groups" + (f", failed: {bad}" if bad else "")


def _degrees(level):
    descs = ["cyclic:7", "sym:3", "sym:4", "alt:5", "sl2:5"]
    if level == "full":
        descs += ["sl2:7", "sym:5"]
    for d in descs:
        G = parse_group(d)
        rep = character_degrees(G)
        if sum(x * x for x in rep.degrees) != G.order:
            return False, f"{d}: sum of squares {sum(x * x for x in rep.degrees)}"
        if rep.degrees != oracles.regular_rep_degrees(G):
            return False, f"{d}: class algebra and regular representation disagree"
    return True, f"{len(descs)} groups"


def _mean_ergodic(level):
    descs = ["sl2:5"] + (["sl2:7"] if level == "full" else [])
    worst = 0.0
    for d in descs:
        G = parse_group(d)
        rep = verify_mean_ergodic(G, quasirandomness_degree(G), trials=100, seed=0)
        worst = max(worst, rep.max_ratio)
        if not rep.ok:
            return False, f"{d}: ratio {rep.max_ratio}"
    return True, f"max ratio {worst:.4f}"


def _corner_bijection(level):
    cases = [("cyclic:5", 2), ("sym:3", 2)]
    if level == "full":
        cases += [(f"cyclic:{n}", 2) for n in range(6, 13)] + [("cyclic:5", 3), ("cyclic:6", 3)]
    for desc, k in cases:
        G = parse_group(desc)
        rng = derive_rng(0, f"verify:{desc}:{k}")
        for _ in range(3):
            A = SubsetK(rng.random((G.order,) * k) < 0.5)
            fast = corner_stats(G, A).total_count
            simp = count_simplices(hypergraph_edges(G, A))
            slow = sum(oracles.naive_corner_counts(G, A.indicator))
            if not fast == simp == slow:
                return False, f"{desc}, k={k}: {fast} / {simp} / {slow}"
    return True, f"{len(cases)} (group, k) cases"


def _cov_roundtrip(level):
    for desc in ["cyclic:4", "sym:3"]:
        G = parse_group(desc)
        for k in (1, 2):
            for g in G.elements():
                for a in itertools.product(G.elements(), repeat=k):
                    if cov_inverse(G, cov_forward(G, g, a)) != (g, a):
                        return False, f"{desc}: roundtrip failed at {(g, a)}"
    return True, "exhaustive on cyclic:4, sym:3, k <= 2"


def _box_norm(level):
    sizes = [(n, k) for n in (2, 3, 4) for k in (1, 2)]
    if level == "full":
        sizes = [(n, k) for n in range(2, 7) for k in (1, 2, 3)]
    rng = derive_rng(0, "verify:boxnorm")
    worst = 0.0
    for n, k in sizes:
        F = rng.uniform(-1, 1, size=(n,) * k)
        diff = abs(box_norm(F).raw_power - box_norm_naive(F).raw_power)
        worst = max(worst, diff)
        if diff > 1e-9:
            return False, f"n={n}, k={k}: diff {diff:.3e}"
    return True, f"max diff {worst:.2e}"


def _regularity(level):
    seeds = range(2) if level == "fast" else range(5)
    for s in seeds:
        F = random_sign_function(8, 2, s).values
        d = weak_regularity(F, 0.25, seed=s)
        if box_norm(d.F_u).norm > 0.25 or not all(p.ignores_coordinate() for p in d.partitions):
            return False, f"seed {s}: contract violated"
    return True, f"{len(seeds)} decompositions"


def _reduction(level):
    G = parse_group("cyclic:6")
    rng = derive_rng(0, "verify:reduction")
    fs = [FunctionGk((rng.random((6, 6)) < 0.5).astype(float)) for _ in range(3)]
    d = weak_regularity(lift(G, 2, 2, fs[2]), 0.3, seed=0)
    rep = structured_reduction(G, fs, d)
    ok = rep.max_error <= 1e-9 and all(r.invariant for r in rep.invariance)
    return ok, f"{len(rep.terms)} terms, error {rep.max_error:.2e}"


SUITES: list[tuple[str, Callable]] = [
    ("group-axioms", _axioms),
    ("character-degrees", _degrees),
    ("mean-ergodic", _mean_ergodic),
    ("corner-simplex-bijection", _corner_bijection),
    ("change-of-variables", _cov_roundtrip),
    ("box-norm-oracle", _box_norm),
    ("weak-regularity", _regularity),
    ("structured-reduction", _reduction),
]


def verify_suite(level: str = "fast") -> list[SuiteResult]:
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    results = []
    for name, fn in SUITES:
        start = time.perf_counter()
        try:
            ok, detail = fn(level)
        except Exception as exc:  # a crash is a failed suite, not an aborted run
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(SuiteResult(name, bool(ok), time.perf_counter() - start, detail))
    return results
