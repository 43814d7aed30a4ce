"""Compare compositional typings with the projection oracle on a random corpus.

Every internal-arc order tried (declaration, reversed, greedy, one shuffle)
must give exactly the oracle's typing, or Infeasible when the oracle does.
"""

import argparse
import random
import time
from dataclasses import dataclass

from fnt import generators
from fnt.compose import comp_pt, schedule_index
from fnt.planar import greedy_schedule
from fnt.polyoracle import oracle_pt


@dataclass
class Config:
    count: int = 200
    seed: int = 0
    verbose: bool = False


def orders(n, rng):
    base = [a.id for a in n.internal]
    shuffled = base[:]
    rng.shuffle(shuffled)
    return {"decl": base, "rev": base[::-1], "greedy": list(greedy_schedule(n).order) if base else [],
            "shuffle": shuffled}


def run(cfg: Config) -> int:
    rng = random.Random(cfg.seed)
    bad = feasible = 0
    worst = 0
    t0 = time.perf_counter()
    for n in generators.small_corpus(cfg.count, cfg.seed):
        ref = oracle_pt(n)
        feasible += ref.ok
        for name, order in orders(n, rng).items():
            got = comp_pt(n, order)
            ok = got.ok == ref.ok and (not ref.ok or got.typing == ref.typing)
            if not ok:
                bad += 1
                print(f"MISMATCH {n.name} order={name}")
            elif cfg.verbose:
                print(f"ok {n.name} {name}")
            worst = max(worst, schedule_index(n, order))
    dt = time.perf_counter() - t0
    print(f"{cfg.count} networks, {feasible} feasible, max index {worst}, "
          f"{bad} mismatches, {dt:.1f}s")
    return 1 if bad else 0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("-v", "--verbose", action="store_true")
    raise SystemExit(run(Config(**vars(ap.parse_args()))))


if __name__ == "__main__":
    main()
