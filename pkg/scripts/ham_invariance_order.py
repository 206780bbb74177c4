"""Change of omega_D under a Hamiltonian flow versus RK4 step count; used to
calibrate the C * steps^-4 + C' * N^-2 bound shipped in the default scenario."""
import argparse

import numpy as np

from symplab.ambient import ham_flow_tangent
from symplab.embedding import Embedding
from symplab.forms import omega_D
from symplab.lab import load_scenario
from symplab.lab.fields import FieldGenerator


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--scenario", default="scenarios/default.json")
    p.add_argument("--amplitude", type=float, nargs="+", default=[0.1, 0.2, 0.5])
    p.add_argument("--steps", type=int, nargs="+", default=[4, 8, 16, 32, 64])
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    sc = load_scenario(args.scenario)
    f = sc.build_embedding()
    sigma = sc.area_form(f)
    for amp in args.amplitude:
        gen = FieldGenerator(np.random.default_rng(args.seed), sc.fields.bandwidth, 1.0)
        pairs = [(gen.vector(f.grid, 4), gen.vector(f.grid, 4)) for _ in range(3)]
        base = [omega_D(f, v, w, sigma).value for v, w in pairs]
        H = gen.hamiltonian(4, amplitude=amp)
        print(f"H amplitude {amp}")
        prev = None
        for steps in args.steps:
            q, Phi = ham_flow_tangent(f.model, H, f.lift, 1.0, steps)
            fh = Embedding(f.model, q, f.winding)
            push = lambda v: np.einsum("...ab,...b->...a", Phi, v)
            err = max(abs(omega_D(fh, push(v), push(w), sigma).value - b)
                      for (v, w), b in zip(pairs, base))
            order = f"{np.log2(prev / err):6.2f}" if prev and err > 0 else "     -"
            print(f"  steps {steps:>4}  error {err:.3e}  order {order}  C_eff {err * steps ** 4:.3g}")
            prev = err


if __name__ == "__main__":
    main()
