"""Wall time of bind_schedule + comp_pt on grid instances, with decade ratios."""

import argparse
from dataclasses import dataclass, field

from fnt.cli import bench_rows


@dataclass
class Config:
    k: list[int] = field(default_factory=lambda: [1, 2, 3])
    sizes: list[int] = field(default_factory=lambda: [1000, 10000, 100000])
    reps: int = 5
    seed: int = 0


def run(cfg: Config) -> None:
    print("k\tsize\tnodes\tseconds\tratio\tdelta")
    for k in cfg.k:
        prev = None
        for size, nodes, sec, delta in bench_rows(k, cfg.sizes, cfg.reps, cfg.seed):
            ratio = f"{sec / prev:.2f}" if prev else "-"
            print(f"{k}\t{size}\t{nodes}\t{sec:.4f}\t{ratio}\t{delta}")
            prev = sec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1000, 10000, 100000])
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    run(Config(**vars(ap.parse_args())))


if __name__ == "__main__":
    main()
