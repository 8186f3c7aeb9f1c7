"""Orders of the Phi_0 K-matrix and its action on the simples alpha_0..alpha_n."""

import argparse

from spherical_an import derived_objects as do
from spherical_an import group_words as gw


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=8)
    ap.add_argument("--object-n", type=int, default=4, help="check the object-level cycle up to this n")
    args = ap.parse_args()
    print(f"{'n':>3} {'order':>6}  cycle")
    for n in range(1, args.max_n + 1):
        order = gw.matrix_order(gw.k_matrix(gw.phi0(n)))
        cycle = ""
        if n <= args.object_n:
            alphas = gw.alpha_objects(n)
            hits = []
            for l, a in enumerate(alphas):
                img = do.decode(gw.apply_word_tw(gw.phi0(n), do.reconstruct(a)))
                j = next((j for j, b in enumerate(alphas) if do.is_isomorphic(img, b)), None)
                hits.append(f"{l}->{j}")
            cycle = " ".join(hits)
        print(f"{n:>3} {order:>6}  {cycle}")


if __name__ == "__main__":
    main()
