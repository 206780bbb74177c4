"""Cyclic finite-difference residual of d(omega_D) as the step halves."""
import argparse

import numpy as np

from symplab.ambient import AmbientModel, TrigTerm
from symplab.embedding import graph_torus
from symplab.forms import d_omega_D_fd
from symplab.lab.fields import FieldGenerator
from symplab.surface import TorusGrid


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--N", type=int, default=32)
    p.add_argument("--eps", type=float, nargs="+", default=[0.0, 0.1, 1.0])
    p.add_argument("--h0", type=float, default=1e-2)
    p.add_argument("--halvings", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    g = TorusGrid.square(args.N)
    x, y = g.coords()
    normal = np.stack([0.05 * np.sin(2 * np.pi * (x + y)), 0.05 * np.cos(2 * np.pi * (x - y))], -1)
    for eps in args.eps:
        terms = [TrigTerm((1, 0, 0, 0), eps / (2 * np.pi), "sin", 3)] if eps else []
        f = graph_torus(AmbientModel.standard(2, terms), g, normal)
        gen = FieldGenerator(np.random.default_rng(args.seed), 2, 0.3)
        V = [gen.vector(g, 4) for _ in range(3)]
        hs = [args.h0 / 2 ** k for k in range(args.halvings + 1)]
        res = [d_omega_D_fd(f, *V, h, f.area_form()) for h in hs]
        print(f"eps = {eps}")
        for k, (h, r) in enumerate(zip(hs, res)):
            ratio = f"{res[k - 1] / r:7.3f}" if k and r > 0 else "      -"
            print(f"  h = {h:.3e}  residual = {r:.3e}  ratio = {ratio}")


if __name__ == "__main__":
    main()
