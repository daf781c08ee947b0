"""Pure-state split feasibility for (|0,N> + |N-1,1>)/sqrt(2) over a range of N.

For each N, prints the Stokes vector, the verdict in the fixed +S1 frame and
in the frame of the computed Stokes direction, and any caveats.
"""

import argparse
from dataclasses import dataclass

from qpolar.polarization import counterexample_analysis


@dataclass(frozen=True)
class Config:
    n_min: int = 2
    n_max: int = 6


def main(cfg: Config) -> None:
    for n in range(cfg.n_min, cfg.n_max + 1):
        a = counterexample_analysis(n)
        s = a.stokes
        print(f"N={n}  S=({s.s0:.6g}, {s.vector[0]:.6g}, {s.vector[1]:.6g}, {s.vector[2]:.6g})")
        for label, rep in (("+S1 frame", a.reference_frame), ("S frame", a.stokes_frame)):
            print(f"  {label:9s} {rep.status:10s} min p = {rep.min_p_remainder:.6g}"
                  f"  coplanarity = {rep.coplanarity_normalized:.6g}")
        for c in a.caveats:
            print(f"  caveat: {c}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-min", type=int, default=Config.n_min)
    ap.add_argument("--n-max", type=int, default=Config.n_max)
    ns = ap.parse_args()
    main(Config(ns.n_min, ns.n_max))
