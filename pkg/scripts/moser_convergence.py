"""Moser residual and oracle error for the sheared family versus grid size and steps."""
import argparse
import json

import numpy as np

from symplab.ambient import AmbientModel
from symplab.embedding import sheared_torus
from symplab.lab.suites import moser_oracle
from symplab.moser import moser_reparametrize
from symplab.surface import AreaForm, TorusGrid


def study(a, sizes, steps_list, mode):
    model = AmbientModel.standard(2)
    rows = []
    for n in sizes:
        g = TorusGrid.square(n)
        x, _ = g.coords()
        for steps in steps_list:
            res = moser_reparametrize(sheared_torus(model, g, a), AreaForm.constant(g), steps,
                                      mode=mode)
            img = x + res.phi.displacement[..., 0]
            rows.append({"N": n, "steps": steps, "residual": res.residual,
                         "oracle": float(np.max(np.abs(img - moser_oracle(x, a))))})
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--a", type=float, default=0.3)
    p.add_argument("--sizes", type=int, nargs="+", default=[32, 64, 128])
    p.add_argument("--steps", type=int, nargs="+", default=[10, 50, 200])
    p.add_argument("--interp", choices=("spline", "fourier"), default="spline")
    p.add_argument("--json", help="also write rows here")
    args = p.parse_args()
    rows = study(args.a, args.sizes, args.steps, args.interp)
    print(f"{'N':>5} {'steps':>6} {'residual':>11} {'oracle':>11}")
    for r in rows:
        print(f"{r['N']:>5} {r['steps']:>6} {r['residual']:>11.3e} {r['oracle']:>11.3e}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
