"""Time the oracle's class-labelling kernel: numba loop vs numpy fallback.

    python3 benchmarks/bench_oracle.py --repeat 5
"""

from __future__ import annotations

import argparse
import random
import time

from reidnum import _kernels
from reidnum.oracle import FiniteGroupTable, reidemeister_oracle
from reidnum.verify import random_endomorphism

CASES = [
    (2, 2, 2, 2, 2, 2, 2, 2, 2, 2),
    (4, 8, 16, 32),
    (9, 27, 81),
    (6, 60, 120),
    (8, 8, 8, 8, 8, 8),
]


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args(argv)

    if not _kernels.HAVE_NUMBA:
        print("numba unavailable (or REIDNUM_DISABLE_NUMBA set); timing the numpy path only")
    rng = random.Random(args.seed)
    print(f"{'moduli':<28}{'order':>9}{'R':>8}{'numpy s':>11}{'numba s':>11}{'speedup':>9}")
    for moduli in CASES:
        table = FiniteGroupTable(moduli)
        M = random_endomorphism(rng, moduli)

        def run(flag):
            return reidemeister_oracle(table, M, max_order=table.order, representatives=False, use_numba=flag)

        r = run(False).number
        t_np = best_of(lambda: run(False), args.repeat)
        if _kernels.HAVE_NUMBA:
            assert run(True).number == r
            t_nb = best_of(lambda: run(True), args.repeat)
            nb, speed = f"{t_nb:11.4f}", f"{t_np / t_nb:8.1f}x"
        else:
            nb, speed = f"{'-':>11}", f"{'-':>9}"
        print(f"{str(moduli):<28}{table.order:>9}{str(r):>8}{t_np:11.4f}{nb}{speed}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
