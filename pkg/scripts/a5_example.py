"""The length-15 spherical object on A_5: sphericality certificate, the first
reduction step, and a scan showing that no single twist lowers l."""

import argparse
import time

from spherical_an import derived_objects as do
from spherical_an import normalizer as nm
from spherical_an import textio
from spherical_an import twist_engine as te
from spherical_an.chain_core import SubchainLineBundle as S


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--file", default="tests/data/a5.txt")
    args = ap.parse_args()
    with open(args.file, encoding="utf-8") as fh:
        a5 = textio.load(fh.read())
    print(f"object: {a5}")
    print(f"l = {a5.l_value()}, per curve {a5.l_vector()}")
    v = do.is_spherical(a5)
    print(f"spherical: {bool(v)}")
    for k, val in v.certificate.items():
        print(f"  {k}: {val}")

    x = do.reconstruct(a5)
    t0 = time.time()
    print("\nsingle twists T / T' along O_Cl(a), 1 <= l <= 5, -4 <= a <= 2:")
    for l in range(1, 6):
        row = []
        for a in range(-4, 3):
            s = do.reconstruct(do.sheaf(5, S.curve(l, a)))
            row.append(f"{nm.l_tw(te.tw_twist(s, x)):3d}/{nm.l_tw(te.tw_twist(s, x, True)):<3d}")
        print(f"  C{l}: " + " ".join(row))
    print(f"  ({time.time() - t0:.1f}s)")

    tr = nm.reduce_spherical(a5, check=True)
    print("\nreduction:")
    print(tr.report())


if __name__ == "__main__":
    main()
