"""Lambda decompositions of kappa div(Delta_N) for squarefree N."""
import argparse
import csv
import sys
from dataclasses import dataclass

from hypreg.modular import is_squarefree, lambda_decomposition, prime_factors


@dataclass
class Config:
    n_max: int = 210
    p0_all: bool = True


def rows(cfg: Config):
    for N in range(2, cfg.n_max + 1):
        if not is_squarefree(N):
            continue
        ps = prime_factors(N) if cfg.p0_all else prime_factors(N)[:1]
        for p0 in ps:
            L = lambda_decomposition(N, p0)
            yield {"N": N, "p0": p0, "kappa": L.kappa,
                   "lambdas": " ".join(f"{d}:{v}" for d, v in L.lambdas), "holds": L.holds}


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=210)
    ap.add_argument("--first-prime-only", action="store_true")
    a = ap.parse_args()
    w = csv.DictWriter(sys.stdout, fieldnames=["N", "p0", "kappa", "lambdas", "holds"])
    w.writeheader()
    for r in rows(Config(a.n_max, not a.first_prime_only)):
        w.writerow(r)
