from fractions import Fraction

import pytest

from fnt import fixtures
from fnt.netmodel import Interval
from fnt.typings import (Feasible, Infeasible, TypingError, check_complement_symmetry,
                         extend_by_complement, flow_bounds, make_typing, meet, parse_typing,
                         realizable_low_dim, satisfies, serialize_typing, is_subtyping)

T1, T2, T3 = fixtures.T1(), fixtures.T2(), fixtures.T3()


def assignment(a1, a2, a3, a4):
    return {"a1": a1, "a2": a2, "a3": a3, "a4": a4}


def test_satisfies_listed_assignments():
    f = assignment(15, 0, 3, 12)
    assert satisfies(f, T2)
    assert not satisfies(f, T1)
    g = assignment(0, 25, 0, 25)
    assert satisfies(g, T1)
    assert not satisfies(g, T2)
    assert satisfies(assignment(0, 0, 0, 0), T1)


def test_satisfies_domain_mismatch():
    with pytest.raises(TypingError):
        satisfies({"a1": 1}, T1)


def test_flow_bounds():
    assert flow_bounds(T1) == [(0, 30)]
    assert flow_bounds(fixtures.T3_output()) == [(0, 25)]


def test_extend_by_complement_restores_t1():
    ent = dict(T1.entries)
    del ent[T1.mask(["a3"])]
    del ent[T1.mask(["a4"])]
    partial = make_typing(("a1", "a2"), ("a3", "a4"), ent)
    assert extend_by_complement(partial) == T1
    assert extend_by_complement(T1) == T1


def test_extend_by_complement_conflict():
    t = make_typing(("a1",), ("a2",), {("a1",): (0, 5), ("a2",): (0, 4)})
    with pytest.raises(TypingError):
        extend_by_complement(t)


def test_meet_t1_t2_is_t3():
    res = meet(T1, T2)
    assert isinstance(res, Feasible)
    assert res.typing == T3
    for key, (lo, hi) in {("a1", "a3"): (-10, 10), ("a1", "a4"): (-23, 15),
                          ("a2", "a3"): (-15, 23), ("a2", "a4"): (-10, 10)}.items():
        assert res.typing[key] == Interval(Fraction(lo), Fraction(hi))
    assert meet(T1, T1).typing == T1


def test_meet_empty():
    a = make_typing(("x",), ("y",), {("x",): (0, 1), ("y",): (-1, 0)})
    b = make_typing(("x",), ("y",), {("x",): (2, 3), ("y",): (-3, -2)})
    res = meet(a, b)
    assert isinstance(res, Infeasible)
    assert res.subset == ("x",)


def test_subtyping_verdicts():
    assert is_subtyping(T1, T3)
    assert is_subtyping(T2, T3)
    assert not is_subtyping(T1, T2)
    assert not is_subtyping(T2, T1)
    assert is_subtyping(T1, T1)


def test_fixtures_symmetric():
    for t in (T1, T2, T3, fixtures.T3_input(), fixtures.T3_output()):
        assert check_complement_symmetry(t) == []


def test_printed_t3_prime_breaks_symmetry():
    bad = check_complement_symmetry(fixtures.T3_input_printed())
    t = fixtures.T3_input_printed()
    assert (t.mask(["a2"]), t.mask(["a1", "a3", "a4"])) in bad


def one_in_one_out(r, s):
    return make_typing(("a1",), ("a2",), {("a1",): (r, s), ("a2",): (-s, -r)})


def two_in_one_out(r, s):
    (r1, r2, r3), (s1, s2, s3) = r, s
    return make_typing(("a1", "a2"), ("a3",), {
        ("a1",): (r1, s1), ("a2",): (r2, s2), ("a3",): (-s3, -r3),
        ("a1", "a2"): (r3, s3), ("a1", "a3"): (-s2, -r2), ("a2", "a3"): (-s1, -r1)})


def test_realizable_dim2():
    assert realizable_low_dim(one_in_one_out(3, 7))
    bad = make_typing(("a1",), ("a2",), {("a1",): (3, 7), ("a2",): (-6, -3)})
    assert not realizable_low_dim(bad)


def test_realizable_dim3_sum_rule():
    assert realizable_low_dim(two_in_one_out((1, 2, 3), (4, 6, 7)))
    assert not realizable_low_dim(two_in_one_out((1, 2, 4), (4, 6, 7)))


def test_realizable_rules_disagree_on_principal_typing():
    # one node, a1, a2 in [0,10], a3 in [5,20]: principal, yet r1 + r2 != r3
    t = two_in_one_out((0, 0, 5), (10, 10, 20))
    assert not realizable_low_dim(t, rule="sum")
    assert realizable_low_dim(t, rule="exact")


def test_realizable_above_dim3_unknown():
    assert realizable_low_dim(T1) is None


def test_round_trip_t1():
    text = serialize_typing(T1)
    lines = text.splitlines()
    assert lines[0] == "typing T1 in:a1,a2 out:a3,a4"
    assert len(lines) == 17  # header plus one line per subset of 4 arcs
    assert parse_typing(text) == T1


def test_parse_implied_empty_entry():
    text = "typing t in:x out:y\nt {x} 1 2\nt {y} -2 -1\n"
    t = parse_typing(text)
    assert t[0] == Interval(Fraction(0), Fraction(0))


def test_parse_rejects_nonzero_full():
    text = serialize_typing(T1).replace("t {a1,a2,a3,a4} 0 0", "t {a1,a2,a3,a4} 0 1")
    with pytest.raises(TypingError):
        parse_typing(text)


def test_parse_rejects_duplicate_subset():
    text = serialize_typing(T1) + "t {a1} 0 15\n"
    with pytest.raises(TypingError):
        parse_typing(text)


def test_two_block_round_trip():
    t = make_typing(("x", "u"), ("y", "w"), {("x",): (0, 1), ("y",): (-1, 0),
                                               ("u",): (0, 2), ("w",): (-2, 0)},
                    blocks=[("x", "y"), ("u", "w")])
    assert parse_typing(serialize_typing(t)) == t
