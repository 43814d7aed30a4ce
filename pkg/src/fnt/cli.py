"""Command-line entry point: ``fnt typing|flow|schedule|check|gen|verify|bench``.

Exit codes: 0 success or property holds, 1 property fails, 2 infeasible
network, 3 input error.
"""

from __future__ import annotations

import argparse
import gc
import random
import statistics
import sys
import time
import warnings
from pathlib import Path

from . import generators
from .compose import (BindingSchedule, ScheduleError, comp_pt, parse_schedule, schedule_index,
                      serialize_schedule)
from .netmodel import (FlowNetwork, Interval, LayeredEmbedding, NetworkError, components,
                       format_rational, parse_network, serialize_network, validate_network)
from .planar import EmbeddingError, bind_schedule, greedy_schedule, is_good_embedding
from .polyoracle import (OracleError, check_tight, input_safe, oracle_pt, output_safe,
                         strong_sub)
from .typings import (Feasible, Typing, TypingError, flow_bounds, is_subtyping, parse_typing,
                      realizable_low_dim, serialize_typing)

OK, FAILS, INFEASIBLE, INPUT_ERROR = 0, 1, 2, 3


class InputError(Exception):
    pass


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_network(path: str) -> tuple[FlowNetwork, LayeredEmbedding | None]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        n, e = parse_network(text)
    except NetworkError as exc:
        raise InputError(f"{path}: {exc}") from None
    diags = validate_network(n)
    for d in diags:
        if d.level == "warning":
            _err(f"{path}: {d}")
    errors = [d for d in diags if d.level == "error"]
    if errors:
        raise InputError("\n".join(f"{path}: {d}" for d in errors))
    return n, e


def _load_typing(path: str) -> Typing:
    try:
        return parse_typing(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except TypingError as exc:
        raise InputError(f"{path}: {exc}") from None


def _schedule(n: FlowNetwork, e: LayeredEmbedding | None, strategy: str,
              schedule_path: str | None = None) -> tuple[BindingSchedule, str]:
    if strategy == "file":
        if not schedule_path:
            raise InputError("--strategy file needs --schedule PATH")
        try:
            s = parse_schedule(Path(schedule_path).read_text())
        except (OSError, ScheduleError) as exc:
            raise InputError(f"{schedule_path}: {exc}") from None
        try:
            return BindingSchedule(s.order, schedule_index(n, s)), "file"
        except ScheduleError as exc:
            raise InputError(f"{schedule_path}: {exc}") from None
    if strategy == "planar":
        ok, diags = is_good_embedding(n, e)
        if ok:
            return bind_schedule(n, e, check=False), "planar"
        if any(d.code == "disconnected" for d in diags):
            raise InputError("network is disconnected")
        _err("warning: embedding is not good, falling back to greedy")
        for d in diags[:5]:
            _err(f"  {d}")
    try:
        return greedy_schedule(n), "greedy"
    except ScheduleError as exc:
        raise InputError(str(exc)) from None


def _typing_of(n: FlowNetwork, e, args):
    if args.strategy != "file" and len(components(n).blocks) > 1:
        # schedulers need a connected network; any order works for comp_pt
        return comp_pt(n, tuple(a.id for a in n.internal))
    s, _ = _schedule(n, e, args.strategy, args.schedule)
    return comp_pt(n, s)


def _report_infeasible(res) -> int:
    subset = ",".join(res.subset)
    print(f"infeasible: subset {{{subset}}} has empty type "
          f"[{format_rational(res.lo)},{format_rational(res.hi)}] at {res.stage}")
    return INFEASIBLE


# ---------------------------------------------------------------- commands

def cmd_typing(args) -> int:
    n, e = _load_network(args.input)
    res = _typing_of(n, e, args)
    if not res.ok:
        return _report_infeasible(res)
    _emit(serialize_typing(res.typing), args.out)
    return OK


def cmd_flow(args) -> int:
    n, e = _load_network(args.input)
    res = _typing_of(n, e, args)
    if not res.ok:
        return _report_infeasible(res)
    lines = [f"min={format_rational(lo)} max={format_rational(hi)}"
             for lo, hi in flow_bounds(res.typing)]
    _emit("\n".join(lines) + ("\n" if lines else ""), args.out)
    return OK


def cmd_schedule(args) -> int:
    n, e = _load_network(args.input)
    s, used = _schedule(n, e, args.strategy, args.schedule)
    _emit(serialize_schedule(s), args.out)
    if used == "planar":
        k = e.outer_k
        bound = 2 * k + 4 + len(n.io_arcs)
        if s.index_bound > bound:
            _err(f"delta={s.index_bound} exceeds 2k+4+p+q={bound}")
            return FAILS
    return OK


def cmd_check(args) -> int:
    t1 = _load_typing(args.first)
    mode = args.mode
    if mode in ("realizable", "tight"):
        if mode == "tight":
            try:
                verdict = check_tight(t1)
            except OracleError as exc:
                raise InputError(str(exc)) from None
            why = "some entry is wider than its true range"
        else:
            verdict = realizable_low_dim(t1, rule=args.rule)
            if verdict is None:
                raise InputError(f"realizability is only decided up to dimension 3 (got {t1.dim})")
            why = f"not realizable under the {args.rule} rule"
        if not verdict:
            print(f"fails: {why}")
        return OK if verdict else FAILS
    if args.second is None:
        raise InputError(f"--mode {mode} needs two typings")
    t2 = _load_typing(args.second)
    if set(t1.io_arcs) != set(t2.io_arcs):
        raise InputError("typings range over different arcs")
    try:
        if mode == "sub":
            verdict = is_subtyping(t1, t2)
        elif mode == "strong":
            verdict = strong_sub(t1, t2)
        elif mode == "input-safe":
            verdict = input_safe(t1, t2)
        else:
            verdict = output_safe(t1, t2)
    except (OracleError, TypingError) as exc:
        raise InputError(str(exc)) from None
    if not verdict:
        print(f"fails: {mode}({t1.name}, {t2.name}) does not hold")
    return OK if verdict else FAILS


def cmd_gen(args) -> int:
    try:
        if args.family == "grid":
            n, e = generators.grid(args.k, args.cols, args.seed, args.cap_max)
        elif args.family == "ring":
            n, e = generators.ring(args.n, args.seed, args.cap_max)
        else:
            n = generators.random_network(args.n, args.m, args.p, args.q, args.seed, args.cap_max)
            e = None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(serialize_network(n, e), args.out)
    return OK


def _schedules_for(n: FlowNetwork, e, rng: random.Random) -> list[tuple[str, tuple[str, ...]]]:
    internal = [a.id for a in n.internal]
    out = [("declared", tuple(internal)), ("reversed", tuple(reversed(internal)))]
    try:
        out.append(("greedy", greedy_schedule(n).order))
    except ScheduleError:
        pass
    if e is not None and is_good_embedding(n, e)[0]:
        out.append(("planar", bind_schedule(n, e, check=False).order))
    shuffled = internal[:]
    rng.shuffle(shuffled)
    out.append(("shuffled", tuple(shuffled)))
    return out


def _widen(t: Typing) -> Typing:
    """Demonstration fault: loosen the first nontrivial entry by 1."""
    ent = dict(t.entries)
    for m in sorted(ent):
        if m and m not in t.blocks:
            iv = ent[m]
            ent[m] = Interval(iv.lo, iv.hi + 1)
            break
    return Typing(t.io_arcs, t.directions, ent, t.blocks, t.name)


def _verify_one(n: FlowNetwork, e, rng: random.Random, inject: bool) -> tuple[bool, str]:
    # no timings here: output bytes must not depend on the machine
    try:
        ref = oracle_pt(n)
    except OracleError as exc:
        raise InputError(str(exc)) from None
    parts = ["oracle feasible" if ref.ok else "oracle infeasible"]
    ok = True
    for label, order in _schedules_for(n, e, rng):
        got = comp_pt(n, order)
        if inject and got.ok:
            got = Feasible(_widen(got.typing))
        same = (got.ok == ref.ok) and (not got.ok or got.typing == ref.typing)
        ok &= same
        parts.append(f"{label} {'ok' if same else 'MISMATCH'}")
    return ok, ", ".join(parts)


def cmd_verify(args) -> int:
    rng = random.Random(args.seed)
    cases: list[tuple[str, FlowNetwork, object]] = []
    for path in args.inputs:
        n, e = _load_network(path)
        cases.append((path, n, e))
    for i, n in enumerate(generators.small_corpus(args.random, args.seed)):
        cases.append((f"random seed={args.seed + i}", n, None))
    if not cases:
        raise InputError("nothing to verify: give NETF files or --random N")
    failures = 0
    for label, n, e in cases:
        ok, detail = _verify_one(n, e, rng, args.inject)
        failures += not ok
        print(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")
    print(f"{len(cases) - failures}/{len(cases)} passed")
    return OK if failures == 0 else FAILS


def bench_rows(k: int, sizes: list[int], reps: int = 3, seed: int = 0):
    """(requested size, nodes, median seconds, delta) per size; generation excluded.

    Repetitions are interleaved across sizes so a slow stretch on a shared
    machine lands on every size instead of skewing one median.
    """
    cases = []
    for size in sizes:
        cols = max(3, (size - 4) // (2 * (k - 1)) if k > 1 else size // 2)
        n, e = generators.grid(k, cols, seed)
        bind_schedule(n, e)  # untimed warm-up
        cases.append((n, e))
    times = [[] for _ in sizes]
    deltas = [None] * len(sizes)
    for _ in range(reps):
        for i, (n, e) in enumerate(cases):
            gc.collect()
            gc.disable()  # as timeit does; collector passes scale with the live heap
            try:
                t0 = time.perf_counter()
                s = bind_schedule(n, e)
                res = comp_pt(n, s)
                times[i].append(time.perf_counter() - t0)
            finally:
                gc.enable()
            deltas[i] = s.index_bound
            assert res.ok
    return [(size, len(n.nodes), statistics.median(ts), d)
            for size, (n, _), ts, d in zip(sizes, cases, times, deltas)]


def cmd_bench(args) -> int:
    sizes = [int(float(x)) for x in args.sizes.split(",") if x.strip()] if args.sizes else []
    lines = ["size\tnodes\tseconds\tdelta"]
    for k in args.k:
        for size, nodes, sec, delta in bench_rows(k, sizes, args.reps, args.seed):
            lines.append(f"{size}\t{nodes}\t{sec:.4f}\t{delta}")
    _emit("\n".join(lines) + "\n", args.out)
    return OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fnt", description="Principal typings of flow networks.")
    sub = p.add_subparsers(dest="command", required=True)

    def strategy(sp):
        sp.add_argument("--strategy", choices=("planar", "greedy", "file"), default="greedy")
        sp.add_argument("--schedule", help="SCHEDF file for --strategy file")

    sp = sub.add_parser("typing", help="print the principal typing (TYPF)")
    sp.add_argument("input")
    strategy(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_typing)

    sp = sub.add_parser("flow", help="print min and max flow per component")
    sp.add_argument("input")
    strategy(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_flow)

    sp = sub.add_parser("schedule", help="print a binding schedule (SCHEDF)")
    sp.add_argument("input")
    strategy(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_schedule)

    sp = sub.add_parser("check", help="decide a property of one or two typings")
    sp.add_argument("first")
    sp.add_argument("second", nargs="?")
    sp.add_argument("--mode", required=True,
                    choices=("sub", "strong", "input-safe", "output-safe", "realizable", "tight"))
    sp.add_argument("--rule", choices=("sum", "exact"), default="sum")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("gen", help="generate a seeded instance (NETF)")
    sp.add_argument("family", choices=("grid", "ring", "random"))
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--cols", type=int, default=6)
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--m", type=int, default=5)
    sp.add_argument("--p", type=int, default=1)
    sp.add_argument("--q", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cap-max", type=int, default=8)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("verify", help="compare compositional typings with the oracle")
    sp.add_argument("inputs", nargs="*")
    sp.add_argument("--random", type=int, default=0, help="also check N seeded random networks")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--inject", action="store_true", help="widen one entry to demonstrate FAIL")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bench", help="time the planar pipeline on grid instances")
    sp.add_argument("--k", type=int, nargs="+", default=[2])
    sp.add_argument("--sizes", default="1000,10000,100000")
    sp.add_argument("--reps", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except InputError as exc:
        _err(f"error: {exc}")
        return INPUT_ERROR
    except EmbeddingError as exc:
        _err(f"error: {exc}")
        for d in exc.diagnostics:
            _err(f"  {d}")
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
