"""Worst defects of the four length-two iterated-integral identities on random paths."""
import argparse
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from hypreg.curve import HyperellipticModel
from hypreg.verify import basic_properties


@dataclass
class Config:
    models: dict = field(default_factory=lambda: {
        "genus 1: x^3 - x": [0, -1, 0, 1],
        "genus 2: x(x-1)(x-2)(x-3)(x-4)": [0, 24, -50, 35, -10, 1],
        "genus 3: x^7 - 1": [-1, 0, 0, 0, 0, 0, 0, 1],
    })
    n: int = 100
    seed: int = 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    cfg = Config(n=a.n, seed=a.seed)
    with warnings.catch_warnings(), np.errstate(all="ignore"):
        warnings.simplefilter("ignore")
        for name, c in cfg.models.items():
            t = time.time()
            d = basic_properties(HyperellipticModel(c), cfg.n, cfg.seed)
            print(f"{name:34s} " + "  ".join(f"({k}) {v:.1e}" for k, v in d.items())
                  + f"  [{time.time() - t:.1f}s]")
