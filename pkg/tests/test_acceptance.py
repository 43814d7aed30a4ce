"""Acceptance criteria 1-10. Each test prints one PASS/FAIL line."""

import itertools
import math
import random
import statistics
import time
from fractions import Fraction

import pytest

from fnt import fixtures, generators
from fnt.cli import bench_rows
from fnt.compose import comp_pt
from fnt.netmodel import Arc, FlowNetwork, Interval
from fnt.planar import (ScheduleTrace, annotation_diagnostics, bind_schedule, greedy_schedule,
                        to_3_regular)
from fnt.polyoracle import (check_tight, input_safe, maxflow_augmenting, oracle_pt,
                            output_safe, strong_sub)
from fnt.typings import (check_complement_symmetry, flow_bounds, is_subtyping, make_typing,
                         meet, realizable_low_dim, satisfies)


@pytest.fixture
def report(capsys):
    def emit(num, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {num}: {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, detail
    return emit


CORPUS = generators.small_corpus(200, seed=0)


def three_schedules(n, seed):
    internal = [a.id for a in n.internal]
    cands = [tuple(internal), tuple(reversed(internal)), greedy_schedule(n).order]
    rng = random.Random(seed)
    while len(set(cands)) < min(3, math.factorial(len(internal))):
        shuffled = internal[:]
        rng.shuffle(shuffled)
        cands.append(tuple(shuffled))
        cands = list(dict.fromkeys(cands))
    return list(dict.fromkeys(cands))[:3]


_corpus_results = {}


def corpus_results():
    # shared by criteria 1, 2 and 4; computed once
    if not _corpus_results:
        t0 = time.perf_counter()
        rows = []
        for i, n in enumerate(CORPUS):
            ref = oracle_pt(n)
            got = [(s, comp_pt(n, s)) for s in three_schedules(n, i)]
            rows.append((n, ref, got))
        _corpus_results["rows"] = rows
        _corpus_results["seconds"] = time.perf_counter() - t0
    return _corpus_results


def same(a, b):
    return a.ok == b.ok and (not a.ok or a.typing == b.typing)


def test_criterion_1_oracle_equivalence(report):
    res = corpus_results()
    bad = [n.name for n, ref, got in res["rows"] if not all(same(g, ref) for _, g in got)]
    sizes_ok = all(len(n.nodes) <= 8 and len(n.arcs) <= 14 and len(n.io_arcs) <= 4
                   for n in CORPUS)
    distinct = sum(len(got) == 3 for _, _, got in res["rows"])
    feasible = sum(ref.ok for _, ref, _ in res["rows"])
    ok = not bad and sizes_ok and res["seconds"] < 60
    report(1, ok, f"{len(CORPUS)} networks ({feasible} feasible, {distinct} with 3 distinct "
                  f"schedules), mismatches={bad[:5]}, {res['seconds']:.1f}s")


def test_criterion_2_schedule_obliviousness(report):
    res = corpus_results()
    bad = [n.name for n, _, got in res["rows"]
           if not all(same(a, b) for (_, a), (_, b) in itertools.combinations(got, 2))]
    report(2, not bad, f"all schedule pairs agree on {len(res['rows'])} networks; bad={bad[:5]}")


def test_criterion_3_reference_fixtures(report):
    T1, T2, T3 = fixtures.T1(), fixtures.T2(), fixtures.T3()
    checks = {
        "meet": meet(T1, T2).typing == T3 and len(T3.entries) == 16,
        "T1<:T3": is_subtyping(T1, T3),
        "T2<:T3": is_subtyping(T2, T3),
        "not T1<:T2": not is_subtyping(T1, T2),
        "not T2<:T1": not is_subtyping(T2, T1),
        "f1": satisfies(dict(a1=15, a2=0, a3=3, a4=12), T2)
        and not satisfies(dict(a1=15, a2=0, a3=3, a4=12), T1),
        "f2": satisfies(dict(a1=0, a2=25, a3=0, a4=25), T1)
        and not satisfies(dict(a1=0, a2=25, a3=0, a4=25), T2),
        "bounds": flow_bounds(T1) == [(0, 30)],
    }
    failed = [k for k, v in checks.items() if not v]
    report(3, not failed, f"{len(checks)} fixture checks, failed={failed}")


def test_criterion_4_complement_symmetry(report):
    res = corpus_results()
    typings = 0
    bad = []

    def look(label, t):
        nonlocal typings
        typings += 1
        if check_complement_symmetry(t):
            bad.append(label)

    for n, ref, got in res["rows"]:
        if ref.ok:
            look(f"{n.name} oracle", ref.typing)
        for s, g in got:
            if g.ok:
                look(f"{n.name} final", g.typing)
        comp_pt(n, got[0][0], observer=lambda k, t, nm=n.name: look(f"{nm} stage {k}", t))
    for t in (fixtures.T1(), fixtures.T2(), fixtures.T3(), meet(fixtures.T1(), fixtures.T2()).typing):
        look(t.name or "fixture", t)
    report(4, not bad, f"{typings} typings from oracle, comp_pt stages and meet; asymmetric={bad[:5]}")


def test_criterion_5_maxflow(report):
    bad = []
    for seed in range(100):
        rng = random.Random(50_000 + seed)
        n_nodes = rng.randint(1, 8)
        p, q = rng.randint(1, 2), rng.randint(1, 2)
        m = rng.randint(n_nodes - 1, min(n_nodes * (n_nodes - 1), 14 - p - q))
        n = generators.random_network(n_nodes, m, p, q, seed=seed, lower_prob=0.0)
        t = comp_pt(n, greedy_schedule(n)).typing
        if flow_bounds(t)[0][1] != maxflow_augmenting(n):
            bad.append(n.name)
    report(5, not bad, f"100 lc=0 instances, mismatches={bad[:5]}")


def _two_cycles(n):
    pairs = {(a.tail, a.head) for a in n.internal}
    return [p for p in pairs if (p[1], p[0]) in pairs]


def test_criterion_6_three_regularization(report):
    problems = []
    preserved = 0
    for seed in range(40):
        rng = random.Random(seed)
        p = rng.randint(1, 2)
        q = rng.randint(1, 4 - p)
        n = generators.random_min_degree3(rng.randint(3, 6), rng.randint(0, 3), p, q, seed=seed)
        n2, _ = to_3_regular(n)
        m = len(n.arcs)
        if set(n2.degree().values()) != {3} or _two_cycles(n2):
            problems.append(f"{n.name}: structure")
        if len(n2.nodes) > 2 * m or len(n2.arcs) > 3 * m:
            problems.append(f"{n.name}: size")
        a, b = oracle_pt(n), oracle_pt(n2)
        if not same(a, b):
            problems.append(f"{n.name}: typing")
        preserved += 1
    families = 0
    for k, cols, seed in itertools.product((2, 3, 4), (4, 6), (0, 1)):
        n, e = generators.spoke_grid(k, cols, seed=seed)
        n2, e2 = to_3_regular(n, e)
        families += 1
        if set(n2.degree().values()) != {3} or _two_cycles(n2):
            problems.append(f"{n.name}: structure")
        if len(n2.nodes) > 2 * len(n.arcs) or len(n2.arcs) > 3 * len(n.arcs):
            problems.append(f"{n.name}: size")
        if e2.outer_k > 2 * k:
            problems.append(f"{n.name}: outer {e2.outer_k} > {2 * k}")
        errs = [d for d in annotation_diagnostics(n2, e2) if d.level == "error"]
        if errs:
            problems.append(f"{n.name}: {errs[0]}")
    report(6, not problems, f"{preserved} random instances with typing check, {families} annotated "
                            f"families; problems={problems[:5]}")


def test_criterion_7_schedule_index_bound(report):
    problems = []
    worst = {}
    for k in (1, 2, 3):
        for cols, seed in itertools.product((3, 5, 8, 13), (0, 1, 2)):
            n, e = generators.grid(k, cols, seed=seed)
            pq = len(n.io_arcs)
            trace = ScheduleTrace()
            s = bind_schedule(n, e, trace)
            acc = max((d - io for d, io in trace.accumulator), default=0)
            worst[k] = max(worst.get(k, 0), s.index_bound)
            if pq != 4 or s.index_bound > 2 * k + 4 + pq or acc > 2 * k + 2:
                problems.append((k, cols, seed, s.index_bound, acc))
    report(7, not problems, f"max delta per k {worst} vs bound 2k+8; violations={problems[:5]}")


def test_criterion_8_linear_scaling(report):
    rows = bench_rows(2, [1000, 10000, 100000], reps=5)
    t = [r[2] for r in rows]
    ratios = [t[1] / t[0], t[2] / t[1]]
    ok = all(r <= 14 for r in ratios)
    report(8, ok, "medians " + ", ".join(f"n={r[1]}: {r[2]:.3f}s" for r in rows)
                  + f"; ratios {ratios[0]:.2f}, {ratios[1]:.2f}")


def _one_node_typing(caps):
    arcs = (Arc("a1", None, "u", 0, caps[0]), Arc("a2", None, "u", 0, caps[1]),
            Arc("a3", "u", None, 0, caps[2]))
    return oracle_pt(FlowNetwork(("u",), arcs)).typing


def test_criterion_9_strong_subtyping(report):
    T2, T3 = fixtures.T2(), fixtures.T3()
    facts = {
        "not strong(T2,T3)": not strong_sub(T2, T3),
        "T2<:T3": is_subtyping(T2, T3),
        "input_safe(T3',T2)": input_safe(fixtures.T3_input(), T2),
        "output_safe(T3'',T2)": output_safe(fixtures.T3_output(), T2),
    }
    rng = random.Random(9)
    pairs = premises = 0
    problems = []
    for _ in range(50):
        triple = [_one_node_typing([Fraction(rng.randint(1, 12)) for _ in range(3)])
                  for _ in range(3)]
        for t in triple:
            if not check_tight(t):
                problems.append("untight")
            if not strong_sub(t, t):
                problems.append("reflexivity")
        rel = {(i, j): strong_sub(triple[i], triple[j]) for i in range(3) for j in range(3)}
        for (i, j), v in rel.items():
            pairs += 1
            if v and not is_subtyping(triple[i], triple[j]):
                problems.append("strong without plain")
        for i, j, k in itertools.permutations(range(3)):
            if rel[i, j] and rel[j, k]:
                premises += 1
                if not rel[i, k]:
                    problems.append("transitivity")
    failed = [k for k, v in facts.items() if not v]
    report(9, not failed and not problems,
           f"facts failed={failed}; 50 triples, {pairs} ordered pairs, "
           f"{premises} transitivity premises; problems={problems[:5]}")


def _perturbed(rng):
    r1, r2 = rng.randint(0, 4), rng.randint(0, 4)
    s1, s2 = r1 + rng.randint(0, 6), r2 + rng.randint(0, 6)
    if rng.random() < 0.5:
        r3 = r1 + r2 + rng.choice([-2, -1, 1, 2])
        r3 = max(r3, 0) if r3 != r1 + r2 else r3 + 1
        s3 = max(s1, s2, r3)
    else:
        r3 = r1 + r2
        s3 = rng.choice([max(s1, s2) - rng.randint(1, 3), s1 + s2 + rng.randint(1, 3)])
        s3 = max(s3, r3)
        if max(s1, s2) <= s3 <= s1 + s2:
            s3 = s1 + s2 + 1
    return make_typing(("a1", "a2"), ("a3",), {
        ("a1",): (r1, s1), ("a2",): (r2, s2), ("a3",): (-s3, -r3),
        ("a1", "a2"): (r3, s3), ("a1", "a3"): (-s2, -r2), ("a2", "a3"): (-s1, -r1)})


def test_criterion_10_realizability(report):
    counts = {}
    for lower in (True, False):
        for ports in (2, 3):
            acc = {"sum": 0, "exact": 0}
            for seed in range(50):
                t = oracle_pt(generators.one_node(ports, seed=seed, lower=lower)).typing
                for rule in acc:
                    acc[rule] += bool(realizable_low_dim(t, rule=rule))
            counts[lower, ports] = acc
    rng = random.Random(10)
    rejected = sum(not realizable_low_dim(_perturbed(rng)) for _ in range(50))
    accepted_all = all(acc["sum"] == 50 for acc in counts.values())
    detail = "; ".join(f"{'lc>=0' if lo else 'lc=0'} {p}-port sum rule {a['sum']}/50 exact {a['exact']}/50"
                       for (lo, p), a in counts.items())
    report(10, accepted_all and rejected == 50, f"{detail}; perturbed rejected {rejected}/50")
