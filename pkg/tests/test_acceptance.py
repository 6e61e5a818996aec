"""Acceptance criteria 1-9, one test each.

Each test records a ``[PASS]`` / ``[FAIL]`` line (printed, and repeated in the
terminal summary) before asserting.  Trend criteria compare a fresh run with
the frozen fixtures in ``tests/fixtures`` (see ``regenerate.py`` there).
"""

from __future__ import annotations

import itertools
import json
import time
from pathlib import Path

import numpy as np
import pytest

from qrcorners import (
    FunctionGk,
    SubsetK,
    box_norm,
    box_norm_naive,
    character_degrees,
    check_axioms,
    check_T_range_invariance,
    corner_stats,
    count_simplices,
    hypergraph_edges,
    inverse_lift_k,
    lift,
    parse_group,
    quasirandomness_degree,
    rank_expansion,
    structured_reduction,
    verify_mean_ergodic,
    weak_regularity,
)
from qrcorners.experiments import box_control_scan, tv_scan
from qrcorners.oracles import naive_corner_counts
from qrcorners.subsets import derive_rng, parse_subset_spec, random_sign_function

FIXTURES = Path(__file__).parent / "fixtures"
FAMILY = ["sl2:5", "sl2:7", "sl2:13"]


def non_increasing(xs, tol):
    return all(b <= a + tol for a, b in zip(xs, xs[1:]))


def groups_up_to_128():
    descs = [f"cyclic:{n}" for n in range(1, 129)]
    descs += [f"sym:{m}" for m in range(1, 6)] + [f"alt:{m}" for m in range(1, 6)]
    descs += ["sl2:2", "sl2:3", "sl2:5"]
    descs += ["prod:(cyclic:2,cyclic:2)", "prod:(cyclic:3,sym:3)", "prod:(sym:3,sym:3)",
              "prod:(alt:4,cyclic:5)", "prod:(sl2:3,cyclic:2)", "prod:(sym:4,cyclic:5)",
              "prod:(alt:5,cyclic:2)", "prod:(sl2:2,prod:(cyclic:2,cyclic:2))"]
    return descs


def test_criterion_1_group_axioms(acceptance):
    start = time.perf_counter()
    bad = []
    descs = groups_up_to_128()
    for d in descs:
        G = parse_group(d)
        assert G.order <= 128
        rep = check_axioms(G)
        if not (rep.ok and rep.exhaustive):
            bad.append(d)
    sampled = []
    for p in (7, 11, 13):
        rep = check_axioms(parse_group(f"sl2:{p}"), samples=10_000)
        sampled.append(rep.ok and not rep.exhaustive)
    elapsed = time.perf_counter() - start
    ok = not bad and all(sampled) and elapsed < 5
    acceptance(1, ok, f"{len(descs)} groups exhaustive, sl2:7..13 sampled, {elapsed:.2f}s")
    assert not bad, bad
    assert all(sampled)
    assert elapsed < 5


def test_criterion_2_quasirandomness(acceptance):
    start = time.perf_counter()
    descs = [f"cyclic:{n}" for n in (1, 2, 3, 7, 12, 60, 128, 336, 1000, 5040)]
    descs += [f"sym:{m}" for m in range(1, 8)] + [f"alt:{m}" for m in range(1, 8)]
    descs += [f"sl2:{p}" for p in (2, 3, 5, 7, 11, 13, 17)]
    descs += ["prod:(sl2:5,cyclic:3)", "prod:(alt:5,sl2:3)",
              "prod:(sym:4,sym:3)"]
    wrong = [d for d in descs
             if sum(x * x for x in character_degrees(parse_group(d)).degrees) != parse_group(d).order]
    expected = {"cyclic:7": 1, "cyclic:336": 1, "alt:5": 3, "sl2:5": 2, "sl2:7": 3}
    got = {d: quasirandomness_degree(parse_group(d)) for d in expected}
    elapsed = time.perf_counter() - start
    ok = not wrong and got == expected and elapsed < 30
    acceptance(2, ok, f"sum d^2 = |G| on {len(descs)} groups, D = {got}, {elapsed:.1f}s")
    assert not wrong, wrong
    assert got == expected
    assert elapsed < 30


def test_criterion_3_mean_ergodic(acceptance):
    start = time.perf_counter()
    reports = [verify_mean_ergodic(parse_group(d), quasirandomness_degree(parse_group(d)),
                                   trials=100, seed=0) for d in ("sl2:5", "sl2:7")]
    elapsed = time.perf_counter() - start
    worst = max(r.max_ratio for r in reports)
    ok = all(r.max_ratio <= 1 + 1e-9 and r.trials == 100 for r in reports) and elapsed < 60
    acceptance(3, ok, f"max LHS / (|u|^2 |v|^2 / D) = {worst:.4f} over 200 trials, {elapsed:.1f}s")
    assert all(r.max_ratio <= 1 + 1e-9 for r in reports)
    assert elapsed < 60


def test_criterion_4_corner_simplex_bijection(acceptance):
    start = time.perf_counter()
    cases = [(f"cyclic:{n}", 2) for n in range(5, 13)] + [("cyclic:5", 3), ("cyclic:6", 3)]
    mismatches = []
    checked = 0
    for desc, k in cases:
        G = parse_group(desc)
        rng = derive_rng(0, f"acceptance-4:{desc}:{k}")
        for trial in range(20):
            A = SubsetK(rng.random((G.order,) * k) < rng.uniform(0.2, 0.9))
            fast = corner_stats(G, A).total_count
            naive = sum(naive_corner_counts(G, A.indicator))
            simplices = count_simplices(hypergraph_edges(G, A))
            checked += 1
            if not fast == naive == simplices:
                mismatches.append((desc, k, trial, fast, naive, simplices))
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 30
    acceptance(4, ok, f"{checked} subsets, corners == naive == simplices, {elapsed:.1f}s")
    assert not mismatches, mismatches
    assert elapsed < 30


def test_criterion_5_box_norm(acceptance):
    start = time.perf_counter()
    worst = 0.0
    k1_exact = True
    runs = 0
    for n, k in itertools.product(range(1, 7), range(1, 4)):
        rng = derive_rng(0, f"acceptance-5:{n}:{k}")
        for _ in range(50):
            F = rng.uniform(-1, 1, size=(n,) * k)
            fast, naive = box_norm(F), box_norm_naive(F)
            worst = max(worst, abs(fast.raw_power - naive.raw_power), abs(fast.norm - naive.norm))
            if k == 1 and fast.norm != abs(F.mean()):
                k1_exact = False
            runs += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and k1_exact and elapsed < 60
    acceptance(5, ok, f"{runs} functions, max |recursive - naive| = {worst:.1e}, "
                      f"k=1 equals |mean| exactly: {k1_exact}, {elapsed:.1f}s")
    assert worst <= 1e-9
    assert k1_exact
    assert elapsed < 60


def test_criterion_6_weak_regularity(acceptance):
    start = time.perf_counter()
    problems = []
    achieved = []
    for seed in range(10):
        F = random_sign_function(8, 2, seed).values
        d = weak_regularity(F, 0.25, seed=seed)  # raises ConvergenceError if over budget
        independent = box_norm_naive(d.F_u).norm
        achieved.append(independent)
        if independent > 0.25:
            problems.append((seed, "box norm", independent))
        if np.abs(d.F_s).max() > 1 + 1e-12 or np.abs(d.F_u).max() > 2 + 1e-12:
            problems.append((seed, "bounds"))
        if not np.allclose(d.F_s + d.F_u, F, atol=1e-15):
            problems.append((seed, "sum"))
        for p in d.partitions:
            for x in itertools.product(range(8), repeat=2):
                for v in range(8):
                    y = list(x)
                    y[p.j] = v
                    if p.labels[x] != p.labels[tuple(y)]:
                        problems.append((seed, "omission", p.j, x, v))
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 300
    acceptance(6, ok, f"10 seeds converged, max box_norm(F_u) = {max(achieved):.4f}, {elapsed:.1f}s")
    assert not problems, problems[:5]
    assert elapsed < 300


def test_criterion_7_structured_reduction(acceptance):
    start = time.perf_counter()
    G = parse_group("cyclic:6")
    rng = derive_rng(0, "acceptance-7")
    fs = [FunctionGk((rng.random((6, 6)) < 0.5).astype(float)) for _ in range(3)]
    d = weak_regularity(lift(G, 2, 2, fs[2]), 0.3, seed=0)
    rep = structured_reduction(G, fs, d)
    # re-check every inverse-lifted factor directly, independent of the report
    invariant = all(
        check_T_range_invariance(G, inverse_lift_k(G, fac.astype(float)), j).invariant
        for _, factors in rank_expansion(d).terms for j, fac in enumerate(factors))
    elapsed = time.perf_counter() - start
    ok = rep.max_error <= 1e-9 and invariant and all(r.invariant for r in rep.invariance) \
        and elapsed < 120
    acceptance(7, ok, f"{len(rep.terms)} structured terms, reconstruction error "
                      f"{rep.max_error:.1e}, factors invariant: {invariant}, {elapsed:.2f}s")
    assert rep.max_error <= 1e-9
    assert invariant and all(r.invariant for r in rep.invariance)
    assert elapsed < 120


@pytest.mark.slow
def test_criterion_8_quasirandomness_trend(acceptance):
    fixture = json.loads((FIXTURES / "tv_scan_sl2.json").read_text())
    start = time.perf_counter()
    rows = [r.row() for r in tv_scan(FAMILY, 2, parse_subset_spec("random:0.25"), "mean/2",
                                     seed=fixture["seed"])]
    [contrast] = [r.row() for r in tv_scan(["cyclic:336"], 2,
                                           parse_subset_spec("interval", delta=0.25), "mean/2",
                                           seed=fixture["seed"])]
    elapsed = time.perf_counter() - start
    tvs = [r["tv"] for r in rows]
    sl2_7 = rows[1]["tv"]
    trend = non_increasing(tvs, 0.02)
    good = rows[2]["good_fraction"] >= 0.95
    contrast_ok = contrast["density"] == rows[1]["density"] and contrast["tv"] >= 5 * sl2_7
    matches = rows == fixture["rows"] and contrast == fixture["contrast"][0]
    ok = trend and good and contrast_ok and matches and elapsed < 600
    acceptance(8, ok, f"tv {['%.2e' % t for t in tvs]}, good_fraction(sl2:13) = "
                      f"{rows[2]['good_fraction']}, contrast tv ratio "
                      f"{contrast['tv'] / sl2_7:.1f}x, fixture match: {matches}, {elapsed:.0f}s")
    assert trend and good and contrast_ok
    assert matches
    assert elapsed < 600


@pytest.mark.slow
def test_criterion_9_box_control_trend(acceptance):
    fixture = json.loads((FIXTURES / "box_control_sl2.json").read_text())
    start = time.perf_counter()
    rows = box_control_scan(FAMILY, 2, seed=fixture["seed"])
    elapsed = time.perf_counter() - start
    residuals = [r["residual"] for r in rows]
    trend = non_increasing(residuals, 0.02)
    matches = all(
        r["group"] == f["group"]
        and np.allclose([r["lhs"], r["min_boxnorm"], r["residual"], *r["boxnorms"]],
                        [f["lhs"], f["min_boxnorm"], f["residual"], *f["boxnorms"]],
                        rtol=1e-12, atol=1e-15)
        for r, f in zip(rows, fixture["rows"]))
    ok = trend and matches and elapsed < 600
    acceptance(9, ok, f"residuals {residuals} (lhs {['%.2e' % r['lhs'] for r in rows]}, "
                      f"min box norm {['%.3f' % r['min_boxnorm'] for r in rows]}), "
                      f"fixture match: {matches}, {elapsed:.0f}s")
    assert trend
    assert matches
    assert elapsed < 600
