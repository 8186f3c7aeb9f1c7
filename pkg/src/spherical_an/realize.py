"""Images of sheaves on the chain in the twisted-complex model.

Anchors: O_{C_i}(-1) is the simple S_i and omega_Z[1] is S_0.  Everything else
is produced by canonical cones between objects already built:

* O_{[s,t]}(-1,0,..,0,-1) and O_{C_i}(-2) by peeling an end curve off omega_Z
  (kernel of the restriction to that curve);
* O_C(a) from O_C(a-1), O_C(a-2) by the Euler sequence in either direction;
* a longer subchain bundle R as the unique non-split extension
  0 -> O_{[s+1,t]}(a_{s+1}-1, a_{s+2}, ..) -> R -> O_{C_s}(a_s) -> 0.
"""

from __future__ import annotations

from functools import lru_cache

from . import linalg as la
from . import twisted as tw
from .chain_core import ChainError, SubchainLineBundle


class RealizationError(RuntimeError):
    pass


def unique_map(x: tw.Tw, y: tw.Tw, r: int) -> tw.Morphism:
    hc = tw.HomComplex(x, y, r)
    if len(hc) != 1:
        raise RealizationError(f"expected a one-dimensional Hom^{r}, found {len(hc)}")
    return hc.basis()[0]


def _kernel_of(x: tw.Tw, f: tw.Morphism) -> tw.Tw:
    w, _ = tw.cocone(f)
    return tw.minimize(w)


@lru_cache(maxsize=None)
def _omega_type(n: int, s: int, t: int) -> tw.Tw:
    """O_{[s,t]}(-1,0,..,0,-1) for s < t, and O_{C_s}(-2) for s = t."""
    if n == 1:
        return tw.simple(1, 0, -1)
    if (s, t) == (1, n):
        return tw.simple(n, 0, -1)
    if s > 1:
        big = _omega_type(n, s - 1, t)
        end = tw.simple(n, s - 1)
    else:
        big = _omega_type(n, s, t + 1)
        end = tw.simple(n, t + 1)
    return _kernel_of(big, unique_map(big, end, 0))


@lru_cache(maxsize=None)
def _curve(n: int, i: int, a: int) -> tw.Tw:
    if a == -1:
        return tw.simple(n, i)
    if a == -2:
        return _omega_type(n, i, i)
    if a >= 0:
        lo, mid = _curve(n, i, a - 2), _curve(n, i, a - 1)
        fs = tw.HomComplex(lo, mid, 0).basis()
        if len(fs) != 2:
            raise RealizationError("Euler sequence needs a two-dimensional Hom")
        tgt = tw.direct_sum(mid, mid)
        coev = tw.block_morphism(lo, tgt, 0, {(0, 0): fs[0], (1, 0): fs[1]}, [lo], [mid, mid])
        c, _, _ = tw.cone(coev)
        return tw.minimize(c)
    mid, hi = _curve(n, i, a + 1), _curve(n, i, a + 2)
    gs = tw.HomComplex(mid, hi, 0).basis()
    if len(gs) != 2:
        raise RealizationError("Euler sequence needs a two-dimensional Hom")
    src = tw.direct_sum(mid, mid)
    ev = tw.block_morphism(src, hi, 0, {(0, 0): gs[0], (0, 1): gs[1]}, [mid, mid], [hi])
    return _kernel_of(src, ev)


@lru_cache(maxsize=None)
def _bundle(n: int, s: int, t: int, degrees: tuple) -> tw.Tw:
    if s == t:
        return _curve(n, s, degrees[0])
    if degrees == (-1,) + (0,) * (t - s - 1) + (-1,):
        return _omega_type(n, s, t)
    head = _curve(n, s, degrees[0])
    rest = (degrees[1] - 1,) + degrees[2:]
    tail = _bundle(n, s + 1, t, rest)
    ext = unique_map(head, tail, 1)
    return tw.minimize(tw.cone_of_degree_one(head, tail, ext))


def sheaf_object(n: int, r: SubchainLineBundle) -> tw.Tw:
    """The twisted complex of a subchain line bundle."""
    if not r.fits(n):
        raise ChainError(f"{r} does not fit on a chain of length {n}")
    return _bundle(n, r.s, r.t, tuple(r.degrees))


@lru_cache(maxsize=None)
def point_object(n: int, i: int) -> tw.Tw:
    """O_x for a point x of C_i away from the nodes."""
    lo, hi = _curve(n, i, -1), _curve(n, i, 0)
    fs = tw.HomComplex(lo, hi, 0).basis()
    neighbours = [tw.simple(n, j) for j in (i - 1, i + 1) if 1 <= j <= n]
    for c in (1, 2, 3, 5, 7):
        f = fs[0] + fs[1].scaled(c)
        obj = tw.minimize(tw.cone(f)[0])
        if all(not tw.hom_dims(obj, nb) for nb in neighbours):
            return obj
    raise RealizationError("could not find a point away from the nodes")
