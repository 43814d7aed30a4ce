"""Largest accumulator dimension seen by the planar schedule, against 2k + 4 + p + q."""

import argparse
import itertools
from dataclasses import dataclass

from fnt import generators
from fnt.planar import ScheduleTrace, bind_schedule


@dataclass
class Config:
    max_k: int = 4
    cols: tuple[int, ...] = (3, 5, 8, 13, 21)
    seeds: int = 3


def run(cfg: Config) -> int:
    over = 0
    print("k\tcols\tseed\tdelta\tbound")
    for k in range(1, cfg.max_k + 1):
        for cols, seed in itertools.product(cfg.cols, range(cfg.seeds)):
            n, e = generators.grid(k, cols, seed=seed)
            trace = ScheduleTrace()
            s = bind_schedule(n, e, trace)
            bound = 2 * k + 4 + len(n.io_arcs)
            over += s.index_bound > bound
            print(f"{k}\t{cols}\t{seed}\t{s.index_bound}\t{bound}")
    print(f"{over} instances over the bound")
    return 1 if over else 0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-k", type=int, default=4)
    ap.add_argument("--cols", type=int, nargs="+", default=[3, 5, 8, 13, 21])
    ap.add_argument("--seeds", type=int, default=3)
    a = ap.parse_args()
    raise SystemExit(run(Config(a.max_k, tuple(a.cols), a.seeds)))


if __name__ == "__main__":
    main()
