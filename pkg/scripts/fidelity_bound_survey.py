"""Distribution of the best SU(2)-coherent fidelity for random single-block states.

Reports min, mean and max fidelity per photon number next to the lower bound
1/sqrt(N+1).
"""

import argparse
import math
from dataclasses import dataclass

import numpy as np

from qpolar.fock import TwoModeBasis
from qpolar.majorana import max_fidelity_su2
from qpolar.randstate import random_pure_state


@dataclass(frozen=True)
class Config:
    n_max: int = 10
    samples: int = 50
    seed: int = 1


def main(cfg: Config) -> None:
    rng = np.random.default_rng(cfg.seed)
    print(f"{'N':>3} {'bound':>9} {'min F':>9} {'mean F':>9} {'max F':>9}")
    for n in range(1, cfg.n_max + 1):
        b = TwoModeBasis(n)
        f = np.array([max_fidelity_su2(random_pure_state(b, rng, blocks=[n])).fidelity for _ in range(cfg.samples)])
        print(f"{n:3d} {1 / math.sqrt(n + 1):9.6f} {f.min():9.6f} {f.mean():9.6f} {f.max():9.6f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=Config.n_max)
    ap.add_argument("--samples", type=int, default=Config.samples)
    ap.add_argument("--seed", type=int, default=Config.seed)
    ns = ap.parse_args()
    main(Config(ns.n_max, ns.samples, ns.seed))
