"""Spherical twists and the other word letters, acting on objects.

Twists are computed as cones in the twisted-complex model::

    T_s(x)  = cone( sum_r s[-r] (x) Hom^r(s, x)  --ev-->  x )
    T'_s(x) = cocone( x  --ev-->  sum_r s[r] (x) Hom^r(x, s)^v )

Tensoring with line bundles goes through twists as well: O_X(C_i) acts as
T_{O_{C_i}(-2)} o T_{O_{C_i}(-1)}, and O_X(0,..,0,1) as T'_n o .. o T'_1 o rho,
where rho rotates the vertices of the McKay quiver (so that
T_1 o .. o T_n o (x) O_X(0,..,0,1) is rho).  The flip reverses the chain and
fixes the vertex of omega_Z.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import derived_objects as do
from . import linalg as la
from . import twisted as tw
from .chain_core import PicElement, SubchainLineBundle, weight_mod_root, root_lattice_member
from .realize import sheaf_object
from .words import Flip, Shift, Tensor, Twist, TwistWord


class OutOfTable(LookupError):
    pass


TwistGenerator = Twist


# ---------------------------------------------------------------- cones


def tw_twist(s: tw.Tw, x: tw.Tw, inverse: bool = False) -> tw.Tw:
    if not x.atoms:
        return x
    if inverse:
        lo, hi = tw.degree_range(x, s)
    else:
        lo, hi = tw.degree_range(s, x)
    parts, mats = [], []
    for r in range(lo, hi + 1):
        hc = tw.HomComplex(x, s, r) if inverse else tw.HomComplex(s, x, r)
        for f in hc.basis():
            parts.append(tw.shift(s, r if inverse else -r))
            mats.append(f.mat)
    if not parts:
        return x
    other = tw.direct_sum(*parts)
    offs = tw.offsets(parts)
    mat = {}
    for off, m in zip(offs, mats):
        for (t, c), e in m.items():
            mat[(t + off, c) if inverse else (t, c + off)] = e
    if inverse:
        ev = tw.Morphism(x, other, 0, mat)
        w, _ = tw.cocone(ev)
        return tw.minimize(w)
    ev = tw.Morphism(other, x, 0, mat)
    return tw.minimize(tw.cone(ev)[0])


def cone_twist(gen: Twist, d: do.DerivedObject) -> do.DerivedObject:
    """T_sigma(D) (or T'_sigma(D)) through the realization of D."""
    x = do.reconstruct(d)
    y = tw_twist(sheaf_object(d.n, gen.sigma), x, gen.inverse)
    return do.decode(y)


# ---------------------------------------------------------------- closed formulas


def twist_table(sigma: SubchainLineBundle, r: SubchainLineBundle, n: int) -> do.DerivedObject:
    """T_{O_{C_l}(b)}(R) from the closed formulas; OutOfTable when not covered."""
    if sigma.length != 1:
        raise OutOfTable("the table only covers single-curve twists")
    l, b = sigma.s, sigma.degrees[0]
    s, t = r.s, r.t
    degs = list(r.degrees)
    one = lambda x: do.DerivedObject.make(n, {0: [x]})
    if l < s - 1 or l > t + 1:
        return one(r)
    if l == s - 1:
        return one(SubchainLineBundle(l, t, (b, degs[0] + 1) + tuple(degs[1:])))
    if l == t + 1:
        return one(SubchainLineBundle(s, l, tuple(degs[:-1]) + (degs[-1] + 1, b)))
    d = r.deg(l) - b
    if s == t:
        if d == 0:
            return do.DerivedObject.make(n, {1: [r]})
        if d == 1:
            return do.DerivedObject.make(n, {-1: [SubchainLineBundle.curve(l, b - 1)]})
        raise OutOfTable(f"single curve with degree difference {d}")
    if l in (s, t):
        left = l == s
        if d == 0:
            return do.DerivedObject.make(n, {0: [r], 1: [sigma]}, {1: {(0, 0): _unit(sigma, r, n)}})
        if d == 1:
            rest = SubchainLineBundle(s + 1, t, tuple(degs[1:])) if left else SubchainLineBundle(s, t - 1, tuple(degs[:-1]))
            return one(rest)
        if d == 2:
            new = list(degs)
            if left:
                new[0] -= 2
                new[1] += 1
            else:
                new[-1] -= 2
                new[-2] += 1
            h0 = SubchainLineBundle(s, t, tuple(new))
            hm1 = SubchainLineBundle.curve(l, r.deg(l) - 3)
            return do.DerivedObject.make(n, {-1: [hm1], 0: [h0]}, {0: {(0, 0): _unit(h0, hm1, n)}})
        raise OutOfTable(f"end curve with degree difference {d}")
    if d == 1:
        return one(r)
    if d == 2:
        new = list(degs)
        k = l - s
        new[k] -= 2
        new[k - 1] += 1
        new[k + 1] += 1
        return one(SubchainLineBundle(s, t, tuple(new)))
    raise OutOfTable(f"interior curve with degree difference {d}")


def _unit(src: SubchainLineBundle, tgt: SubchainLineBundle, n: int) -> list:
    from . import ext_calculus as ec

    dim = len(ec.ext2_basis(src, tgt, n))
    if dim != 1:
        raise OutOfTable(f"expected a one-dimensional Ext^2, found {dim}")
    return [1]


def twist(gen: Twist, d: do.DerivedObject, use_table: bool = True) -> do.DerivedObject:
    """Table lookup for single sheaves, cones otherwise."""
    if use_table and not gen.inverse and d.is_sheaf():
        (p, (r,)), = d.profile
        try:
            return do.shift(twist_table(gen.sigma, r, d.n), -p)
        except OutOfTable:
            pass
    return cone_twist(gen, d)


# ---------------------------------------------------------------- functoriality


def twist_on_morphism(sigma: SubchainLineBundle, f: tw.Morphism) -> tw.Morphism:
    """The map T_sigma(f): T_sigma(X) -> T_sigma(Y) for a closed degree-0 map f: X -> Y.

    Both twists are taken as the unminimized cones of the evaluation maps built
    from the fixed Hom bases; the cone map is [[1 (x) M, 0], [h, f]] where M is
    the matrix of f_* on Hom^*(sigma, -) and h the homotopies correcting f o ev.
    """
    n = f.src.n
    s = sheaf_object(n, sigma)
    x, y = f.src, f.tgt
    cx, evx, bx = _eval_cone(s, x)
    cy, evy, by = _eval_cone(s, y)
    alg = tw.ext_algebra(n)
    nx = sum(p.size for p, _, _ in bx)
    ny = sum(p.size for p, _, _ in by)
    mat: dict = {}
    # source C_x = (sum s[-r])[1] + X, target C_y = (sum s[-r])[1] + Y
    off_x = {}
    off = 0
    for idx, (part, r, _) in enumerate(bx):
        off_x[idx] = off
        off += part.size
    off_y = {}
    off = 0
    for idx, (part, r, _) in enumerate(by):
        off_y[idx] = off
        off += part.size
    by_degree: dict[int, list[int]] = {}
    for idx, (_, r, _) in enumerate(by):
        by_degree.setdefault(r, []).append(idx)
    for idx, (part, r, g) in enumerate(bx):
        fg = f * g
        hc = tw.HomComplex(s, y, r)
        cvec = hc.coords(fg)
        corr = tw.Morphism(s, y, r, dict(fg.mat))
        for c, jdx in zip(cvec, by_degree.get(r, [])):
            if c:
                for i, (v, _) in enumerate(s.atoms):
                    tgt_i, src_i = i + off_y[jdx], i + off_x[idx]
                    mat[(tgt_i, src_i)] = {alg.idem[v]: c}
                corr = corr + by[jdx][2].scaled(-c)
        h = _homotopy(s, y, r, corr)
        # h has degree r - 1 as a map s -> Y; as a map s[-r][1] -> Y it has degree 0
        for (t, c2), e in h.mat.items():
            mat[(t + ny, c2 + off_x[idx])] = e
    for (t, c2), e in f.mat.items():
        mat[(t + ny, c2 + nx)] = e
    return tw.Morphism(cx, cy, 0, mat)


def _eval_cone(s: tw.Tw, x: tw.Tw):
    lo, hi = tw.degree_range(s, x)
    basis = []
    for r in range(lo, hi + 1):
        for g in tw.HomComplex(s, x, r).basis():
            basis.append((tw.shift(s, -r), r, g))
    if not basis:
        return x, None, []
    other = tw.direct_sum(*[p for p, _, _ in basis])
    offs = tw.offsets([p for p, _, _ in basis])
    mat = {}
    for off, (_, _, g) in zip(offs, basis):
        for (t, c), e in g.mat.items():
            mat[(t, c + off)] = e
    ev = tw.Morphism(other, x, 0, mat)
    c, _, _ = tw.cone(ev)
    return c, ev, basis


def _homotopy(s: tw.Tw, y: tw.Tw, r: int, target: tw.Morphism) -> tw.Morphism:
    """Some h of degree r-1 with D(h) = target (target must be exact)."""
    if target.is_zero():
        return tw.Morphism(s, y, r - 1, {})
    hc = tw.HomComplex(s, y, r)
    dmat = hc._differential(r - 1)
    src = hc.bases[r - 1]
    want = hc.vector(target)
    sol = la.solve(dmat, want) if src else None
    if sol is None:
        raise ValueError("correction term is not exact")
    out: dict = {}
    for (t, c, b), v in zip(src, sol):
        if v:
            out.setdefault((t, c), {})[b] = v
    return tw.Morphism(s, y, r - 1, out)


# ---------------------------------------------------------------- other letters


def _relabel(x: tw.Tw, vmap, emap) -> tw.Tw:
    atoms = tuple((vmap(v), g) for v, g in x.atoms)
    delta = {}
    for key, e in x.delta.items():
        ne = {}
        for b, c in e.items():
            nb, sg = emap(b)
            ne[nb] = ne.get(nb, la.ZERO) + sg * c
        delta[key] = {k: v for k, v in ne.items() if v}
    return tw.Tw(x.n, atoms, delta)


@lru_cache(maxsize=None)
def _rotation_maps(n: int, k: int):
    alg = tw.ext_algebra(n)
    nv = n + 1
    table = {}
    for v in range(nv):
        table[alg.idem[v]] = (alg.idem[(v + k) % nv], 1)
        table[alg.omega[v]] = (alg.omega[(v + k) % nv], 1)
        table[alg.x[v]] = (alg.x[(v + k) % nv], 1)
        table[alg.y[v]] = (alg.y[(v + k) % nv], 1)
    return table


@lru_cache(maxsize=None)
def _flip_maps(n: int):
    alg = tw.ext_algebra(n)
    nv = n + 1
    sv = lambda v: (nv - v) % nv
    table = {}
    for v in range(nv):
        table[alg.idem[v]] = (alg.idem[sv(v)], 1)
        table[alg.omega[v]] = (alg.omega[sv(v)], -1)
    for k in range(nv):
        table[alg.x[k]] = (alg.y[n - k], 1)
        table[alg.y[k]] = (alg.x[n - k], 1)
    return table


def rotate(x: tw.Tw, k: int = 1) -> tw.Tw:
    table = _rotation_maps(x.n, k % (x.n + 1))
    return _relabel(x, lambda v: (v + k) % (x.n + 1), lambda b: table[b])


def flip(x: tw.Tw) -> tw.Tw:
    table = _flip_maps(x.n)
    return _relabel(x, lambda v: (x.n + 1 - v) % (x.n + 1), lambda b: table[b])


def _simple_twist(x: tw.Tw, l: int, a: int, inverse: bool) -> tw.Tw:
    return tw_twist(sheaf_object(x.n, SubchainLineBundle.curve(l, a)), x, inverse)


def tensor(x: tw.Tw, pic: PicElement) -> tw.Tw:
    """x (x) L through twists and the quiver rotation."""
    n = x.n
    k = (-weight_mod_root(pic)) % (n + 1)
    rest = PicElement(tuple(d - (k if i == n else 0) for i, d in enumerate(pic.degrees, start=1)))
    ok, coeffs = root_lattice_member(rest)
    assert ok, "weight decomposition failed"
    for i, c in enumerate(coeffs, start=1):
        for _ in range(abs(c)):
            if c > 0:
                x = _simple_twist(x, i, -1, False)
                x = _simple_twist(x, i, -2, False)
            else:
                x = _simple_twist(x, i, -2, True)
                x = _simple_twist(x, i, -1, True)
    for _ in range(k):
        x = rotate(x, 1)
        for i in range(1, n + 1):
            x = _simple_twist(x, i, -1, True)
    return x


def apply_letter_tw(letter, x: tw.Tw) -> tw.Tw:
    if isinstance(letter, Twist):
        return tw_twist(sheaf_object(x.n, letter.sigma), x, letter.inverse)
    if isinstance(letter, Tensor):
        return tensor(x, letter.pic)
    if isinstance(letter, Flip):
        return flip(x)
    if isinstance(letter, Shift):
        return tw.shift(x, letter.k)
    raise TypeError(f"unknown letter {letter!r}")


def apply_word_tw(w: TwistWord, x: tw.Tw) -> tw.Tw:
    for letter in w.letters:
        x = apply_letter_tw(letter, x)
    return x


def apply_word(w: TwistWord, d: do.DerivedObject) -> do.DerivedObject:
    """Letters are applied left to right."""
    if w.n != d.n:
        raise ValueError("word and object live on different chains")
    if not w.letters:
        return d
    return do.decode(apply_word_tw(w, do.reconstruct(d)))
