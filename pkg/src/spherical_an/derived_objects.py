"""Objects of D_Z(X) as graded subchain-bundle profiles plus Ext^2 connecting classes.

A ``DerivedObject`` records H^p for every p (as a sorted tuple of subchain line
bundles) and, for every p, the class e^p in Ext^2(H^p, H^{p-1}) as a block
matrix: block (i, j) holds the coordinates of its component R_j^p -> R_i^{p-1}
in ``ext_calculus.ext2_basis``.

The data determine the object up to isomorphism.  ``reconstruct`` builds an
explicit twisted complex by the usual induction on the cohomological width
(cocones of maps H^p[-p] -> tau_{<p}[1] lifting e^p), and ``decode`` recovers
profile and classes from any twisted complex whose cohomology sheaves are
pure and decompose into subchain bundles.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import ext_calculus as ec
from . import linalg as la
from . import linked_sheaves as ls
from . import twisted as tw
from .chain_core import ChainError, KClass, SubchainLineBundle, k_class as bundle_k_class
from .realize import point_object, sheaf_object


class DecodeError(RuntimeError):
    """A twisted complex whose cohomology is outside the pure subchain class."""


class UnrepresentableClass(RuntimeError):
    """e-data that cannot be lifted (should not happen on a smooth surface)."""


def _frac(x) -> Fraction:
    return la.to_fraction(la.to_fmpq(x)) if not isinstance(x, Fraction) else x


@dataclass(frozen=True)
class DerivedObject:
    n: int
    profile: tuple  # ((p, (R, ...)), ...) increasing p, only non-empty degrees
    e_classes: tuple = ()  # ((p, (((i, j), coords), ...)), ...) only non-zero blocks

    @classmethod
    def make(cls, n: int, profile: Mapping[int, Sequence[SubchainLineBundle]],
             e_classes: Mapping[int, Mapping[tuple, Sequence]] | None = None,
             validate: bool = True) -> "DerivedObject":
        """Build from dicts.  Summands are kept in the given order; e-blocks refer to it."""
        prof = tuple((int(p), tuple(rs)) for p, rs in sorted(profile.items()) if rs)
        es = []
        for p, blocks in sorted((e_classes or {}).items()):
            items = []
            for (i, j), vec in sorted(blocks.items()):
                vec = tuple(_frac(v) for v in vec)
                if any(vec):
                    items.append(((int(i), int(j)), vec))
            if items:
                es.append((int(p), tuple(items)))
        obj = cls(n, prof, tuple(es))
        if validate:
            obj.check_shapes()
        return obj

    # -- accessors
    @property
    def degrees(self) -> list[int]:
        return [p for p, _ in self.profile]

    def H(self, p: int) -> tuple:
        for q, rs in self.profile:
            if q == p:
                return rs
        return ()

    def e(self, p: int) -> dict:
        for q, blocks in self.e_classes:
            if q == p:
                return dict(blocks)
        return {}

    def summands(self):
        for p, rs in self.profile:
            for r in rs:
                yield p, r

    def check_shapes(self) -> None:
        for r in (r for _, r in self.summands()):
            if not r.fits(self.n):
                raise ChainError(f"{r} does not fit on a chain of length {self.n}")
        for p, blocks in self.e_classes:
            src, tgt = self.H(p), self.H(p - 1)
            for (i, j), vec in blocks:
                if not (0 <= i < len(tgt) and 0 <= j < len(src)):
                    raise ChainError(f"e^{p} block ({i},{j}) outside the profile")
                dim = len(ec.ext2_basis(src[j], tgt[i], self.n))
                if len(vec) != dim:
                    raise ChainError(f"e^{p} block ({i},{j}) needs {dim} coordinates, got {len(vec)}")

    # -- simple invariants
    def l_value(self) -> int:
        return sum(r.length for _, r in self.summands())

    def l_curve(self, i: int) -> int:
        return sum(1 for _, r in self.summands() if r.contains(i))

    def l_vector(self) -> tuple:
        return tuple(self.l_curve(i) for i in range(1, self.n + 1))

    def k_class(self) -> KClass:
        out = KClass.zero(self.n)
        for p, r in self.summands():
            c = bundle_k_class(r, self.n)
            out = out + (c if p % 2 == 0 else -c)
        return out

    def c1(self) -> tuple:
        return self.k_class().curve_mult

    def is_sheaf(self) -> bool:
        return len(self.profile) == 1 and len(self.profile[0][1]) == 1

    def __str__(self) -> str:
        parts = []
        for p, rs in self.profile:
            parts.append(f"H^{p}: " + " + ".join(map(str, rs)))
        return "; ".join(parts) if parts else "0"


def sheaf(n: int, r: SubchainLineBundle, degree: int = 0) -> DerivedObject:
    """R placed so that its only cohomology sheaf sits in ``degree``."""
    return DerivedObject.make(n, {degree: [r]})


def zero(n: int) -> DerivedObject:
    return DerivedObject(n, (), ())


def shift(d: DerivedObject, k: int) -> DerivedObject:
    """d[k]: H^p(d[k]) = H^{p+k}(d).  e-classes are carried over unchanged."""
    prof = {p - k: rs for p, rs in d.profile}
    es = {p - k: dict(b) for p, b in d.e_classes}
    out = DerivedObject.make(d.n, prof, es, validate=False)
    x = _REALIZED.get(d)
    if x is not None:
        _REALIZED[out] = tw.shift(x, k)
    return out


def direct_sum(a: DerivedObject, b: DerivedObject) -> DerivedObject:
    if a.n != b.n:
        raise ChainError("direct sum over different chains")
    prof, es = {}, {}
    degs = sorted(set(a.degrees) | set(b.degrees))
    for p in degs:
        prof[p] = list(a.H(p)) + list(b.H(p))
    for p in degs:
        blocks = dict(a.e(p))
        na_src, na_tgt = len(a.H(p)), len(a.H(p - 1))
        for (i, j), v in b.e(p).items():
            blocks[(i + na_tgt, j + na_src)] = v
        es[p] = blocks
    return DerivedObject.make(a.n, prof, es, validate=False)


# ---------------------------------------------------------------- twisted complexes


def _sum_object(n: int, rs: Sequence[SubchainLineBundle]) -> tw.Tw:
    return tw.direct_sum(*[sheaf_object(n, r) for r in rs])


def _e_morphism(d: DerivedObject, p: int, src: tw.Tw, tgt: tw.Tw, degree: int) -> tw.Morphism:
    """e^p as a map with the matrix of the degree-2 map H^p -> H^{p-1}."""
    hs, ht = d.H(p), d.H(p - 1)
    so = tw.offsets([sheaf_object(d.n, r) for r in hs])
    to = tw.offsets([sheaf_object(d.n, r) for r in ht])
    mat: dict = {}
    for (i, j), vec in d.e(p).items():
        f = ec.from_coords(hs[j], ht[i], d.n, 2, [la.to_fmpq(v) for v in vec])
        for (t, s), e in f.mat.items():
            mat[(t + to[i], s + so[j])] = e
    return tw.Morphism(src, tgt, degree, mat)


def _block_coords(n: int, f: tw.Morphism, hs, ht) -> dict:
    """Split a degree-2 matrix H^p -> H^{p-1} into ext2-basis coordinates per block."""
    so = tw.offsets([sheaf_object(n, r) for r in hs])
    to = tw.offsets([sheaf_object(n, r) for r in ht])
    out = {}
    for i, ri in enumerate(ht):
        oi = sheaf_object(n, ri)
        for j, rj in enumerate(hs):
            oj = sheaf_object(n, rj)
            mat = {}
            for (t, s), e in f.mat.items():
                if to[i] <= t < to[i] + oi.size and so[j] <= s < so[j] + oj.size:
                    mat[(t - to[i], s - so[j])] = e
            if not ec.ext2_basis(rj, ri, n):
                continue
            vec = ec.coords(rj, ri, n, 2, tw.Morphism(oj, oi, 2, mat))
            if any(vec):
                out[(i, j)] = tuple(la.to_fraction(v) for v in vec)
    return out


_REALIZED: dict = {}


def reconstruct(d: DerivedObject) -> tw.Tw:
    """A minimal twisted complex with the given cohomology sheaves and e-classes."""
    cached = _REALIZED.get(d)
    if cached is not None:
        return cached
    n = d.n
    if not d.profile:
        return tw.zero_object(n)
    cur = pi = None
    prev_p = None
    prev_obj = None
    for p, rs in d.profile:
        hp = tw.shift(_sum_object(n, rs), -p)
        if cur is None:
            cur, pi = hp, tw.identity(hp)
            prev_p, prev_obj = p, hp
            continue
        cur1 = tw.shift(cur, 1)
        psi = tw.Morphism(hp, cur1, 0, {})
        if prev_p == p - 1 and d.e(p):
            target_obj = tw.shift(prev_obj, 1)
            e = _e_morphism(d, p, hp, target_obj, 0)
            pi1 = tw.shift_morphism(pi, 1)
            tgt_hc = tw.HomComplex(hp, target_obj, 0)
            src_hc = tw.HomComplex(hp, cur1, 0)
            basis = src_hc.basis()
            cols = [tgt_hc.coords(pi1 * b) for b in basis]
            want = tgt_hc.coords(e)
            sol = la.solve(la.from_columns(cols, len(want)), want) if cols else None
            if sol is None:
                raise UnrepresentableClass(f"e^{p} does not lift to tau_<{p}")
            for c, b in zip(sol, basis):
                if c:
                    psi = psi + b.scaled(c)
        w, wmap = tw.cocone(psi)
        m, _, inc = tw.minimize(w, track=True)
        cur, pi = m, wmap * inc
        prev_p, prev_obj = p, hp
    _REALIZED[d] = cur
    return cur


def tw_k_class(x: tw.Tw) -> KClass:
    n = x.n
    curve = [0] * n
    point = 0
    for v, g in x.atoms:
        sgn = -1 if g % 2 else 1
        if v == 0:
            curve = [c - sgn for c in curve]
            point += sgn
        else:
            curve[v - 1] += sgn
    return KClass(tuple(curve), point)


def _point_dims(x: tw.Tw) -> list[dict]:
    return [tw.hom_dims(x, point_object(x.n, i)) for i in range(1, x.n + 1)]


def generic_ranks(x: tw.Tw) -> dict[int, tuple]:
    """Rank of H^p along each curve, from Hom^k(x, O_y) = r_{-k} + r_{1-k} at general y."""
    dims = _point_dims(x)
    out: dict[int, list] = {}
    for i, h in enumerate(dims):
        if not h:
            continue
        # solve from the top: r_{-k} = h_k - r_{1-k}
        ks = sorted(h)
        lo, hi = ks[0], ks[-1]
        r = {}
        for k in range(lo, hi + 1):
            val = h.get(k, 0) - r.get(1 - k, 0)
            if val < 0:
                raise DecodeError("negative generic rank")
            if val:
                r[-k] = val
        if h.get(hi, 0) != r.get(1 - hi, 0) + r.get(-hi, 0):
            raise DecodeError("generic ranks do not close up")
        for p, v in r.items():
            out.setdefault(p, [0] * x.n)[i] = v
    return {p: tuple(v) for p, v in sorted(out.items())}


def decode(x: tw.Tw, seed: int = 0) -> DerivedObject:
    """Cohomology sheaves and e-classes of a twisted complex, top degree first."""
    n = x.n
    rng = random.Random(seed)
    cur = tw.minimize(x)
    if not cur.atoms:
        return zero(n)
    ranks = generic_ranks(cur)
    profile: dict[int, list] = {}
    es: dict[int, dict] = {}
    prev = None  # (m, H, obj H[-m], delta: H[-m] -> cur[1])
    start = cur
    while cur.atoms:
        if not ranks:
            raise DecodeError("object with zero-dimensional cohomology")
        m = max(ranks)
        r_m = ranks.pop(m)

        def hom_to(t, cur=cur, m=m):
            return tw.hom_dim(cur, sheaf_object(n, t), -m)

        try:
            hs = ls.decompose_from_homs(n, r_m, hom_to)
        except ls.UnsupportedTorsion as exc:
            raise DecodeError(f"H^{m} is not a sum of subchain bundles: {exc}") from exc
        hobj = tw.shift(_sum_object(n, hs), -m)
        phi = _generic_iso_on_top(cur, hobj, rng)
        if prev is not None and prev[0] == m + 1:
            f = tw.shift_morphism(phi, 1) * prev[3]
            blocks = _block_coords(n, f, prev[1], hs)
            if blocks:
                es[m + 1] = blocks
        profile[m] = hs
        w, _ = tw.cocone(phi)
        c, inc, _ = tw.cone(phi)
        wm, p, _ = tw.minimize(w, track=True)
        delta = tw.shift_morphism(p, 1) * inc
        prev = (m, hs, hobj, delta)
        cur = wm
    out = DerivedObject.make(n, profile, es, validate=False)
    if out.k_class() != tw_k_class(start):
        raise DecodeError("K-class check failed after decoding")
    _REALIZED.setdefault(out, start)
    return out


def _generic_iso_on_top(cur: tw.Tw, hobj: tw.Tw, rng: random.Random) -> tw.Morphism:
    hc = tw.HomComplex(cur, hobj, 0)
    basis = hc.basis()
    ends = tw.HomComplex(hobj, hobj, 0).basis()
    if len(basis) != len(ends):
        raise DecodeError("top cohomology is not the guessed sheaf")
    for _ in range(6):
        phi = tw.Morphism(cur, hobj, 0, {})
        for b in basis:
            phi = phi + b.scaled(rng.randint(1, 97))
        imgs = [hc.coords(g * phi) for g in ends]
        if la.rank(la.from_columns(imgs, len(basis))) == len(ends):
            return phi
    raise DecodeError("no map inducing an isomorphism on top cohomology")


def realize(d: DerivedObject) -> tw.Tw:
    return reconstruct(d)


def from_sheaf(n: int, r: SubchainLineBundle) -> DerivedObject:
    d = sheaf(n, r)
    _REALIZED.setdefault(d, sheaf_object(n, r))
    return d


# ---------------------------------------------------------------- E_2 page


@dataclass
class E2Page:
    """E_2^{p,q} dimensions and the d_2^{0,q} matrices for Hom(A, B)."""

    dims: dict  # (p, q) -> dim
    d2: dict  # q -> fmpq_mat from E_2^{0,q} to E_2^{2,q-1}
    e00_identity: list | None = None  # coordinates of sum of identities in E_2^{0,0}

    def d2_rank(self, q: int) -> int:
        m = self.d2.get(q)
        return la.rank(m) if m is not None else 0

    def e3(self) -> dict:
        out = {}
        for (p, q), v in self.dims.items():
            if p == 0:
                v -= self.d2_rank(q)
            elif p == 2:
                v -= self.d2_rank(q + 1)
            if v:
                out[(p, q)] = v
        return out


def _h_objects(d: DerivedObject) -> dict:
    return {p: _sum_object(d.n, rs) for p, rs in d.profile}


def e2_page(a: DerivedObject, b: DerivedObject, sign: int | None = None) -> E2Page:
    if a.n != b.n:
        raise ChainError("objects over different chains")
    sign = ec.D2_SIGN if sign is None else sign
    n = a.n
    ha, hb = _h_objects(a), _h_objects(b)
    ea = {p: _e_morphism(a, p, ha[p], ha[p - 1], 2) for p in ha if p - 1 in ha}
    eb = {p: _e_morphism(b, p, hb[p], hb[p - 1], 2) for p in hb if p - 1 in hb}
    dims: dict = {}
    qs = sorted({j - i for i in ha for j in hb})
    bases0: dict = {}
    cplx2: dict = {}
    for q in qs:
        for k in (0, 1, 2):
            tot = 0
            for i in ha:
                if i + q in hb:
                    if k == 0:
                        hc = tw.HomComplex(ha[i], hb[i + q], 0)
                        bases0[(i, q)] = hc.basis()
                        tot += len(bases0[(i, q)])
                    else:
                        tot += sum(ec.ext_profile(r, s, n).ext1 if k == 1 else ec.ext_profile(r, s, n).ext2
                                   for r in a.H(i) for s in b.H(i + q))
            if tot:
                dims[(k, q)] = tot
    # d_2^{0,q}: (f_i) -> (sign (-1)^q f_{i-1} e^i(a) - e^{i+q}(b) f_i) in Hom^2(H^i(a), H^{i+q-1}(b))
    d2 = {}
    for q in qs:
        cols_index = [(i, k) for i in sorted(ha) if (i, q) in bases0 for k in range(len(bases0[(i, q)]))]
        rows_parts = [i for i in sorted(ha) if i + q - 1 in hb]
        if not cols_index or not rows_parts:
            continue
        row_off, total = {}, 0
        for i in rows_parts:
            cplx2[(i, q - 1)] = cplx2.get((i, q - 1)) or tw.HomComplex(ha[i], hb[i + q - 1], 2)
            row_off[i] = total
            total += len(cplx2[(i, q - 1)])
        if total == 0:
            continue
        m = la.zeros(total, len(cols_index))
        sgn = sign * (-1 if q % 2 else 1)
        for col, (i, k) in enumerate(cols_index):
            f = bases0[(i, q)][k]
            # term landing in Hom^2(H^{i+1}(a), H^{i+q}(b)): f o e^{i+1}(a)
            if i + 1 in ea and i + 1 in row_off:
                g = f * ea[i + 1]
                for r, v in enumerate(cplx2[(i + 1, q - 1)].coords(g)):
                    if v:
                        m[row_off[i + 1] + r, col] += sgn * v
            if i + q in eb and i in row_off:
                g = eb[i + q] * f
                for r, v in enumerate(cplx2[(i, q - 1)].coords(g)):
                    if v:
                        m[row_off[i] + r, col] -= v
        d2[q] = m
    ident = None
    if 0 in qs and a == b:
        ident = []
        for i in sorted(ha):
            if (i, 0) in bases0:
                ident += tw.HomComplex(ha[i], hb[i], 0).coords(tw.identity(ha[i]))
    return E2Page(dims, d2, ident)


def hom_dims(a: DerivedObject, b: DerivedObject) -> dict[int, int]:
    """dim Hom^k(A, B) from the E_3 = E_infinity page."""
    out: dict[int, int] = {}
    for (p, q), v in e2_page(a, b).e3().items():
        out[p + q] = out.get(p + q, 0) + v
    return {k: v for k, v in sorted(out.items()) if v}


def hom_dims_direct(a: DerivedObject, b: DerivedObject) -> dict[int, int]:
    """The same dimensions counted on the realizations."""
    return tw.hom_dims(reconstruct(a), reconstruct(b))


@dataclass(frozen=True)
class SphericalVerdict:
    spherical: bool
    failed: str | None
    certificate: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.spherical


def is_spherical(d: DerivedObject) -> SphericalVerdict:
    """The three conditions on the E_2 page of Hom(D, D)."""
    if not d.profile:
        return SphericalVerdict(False, "zero object", {})
    page = e2_page(d, d)
    cert = {"E2": dict(sorted(page.dims.items()))}
    ext1 = {q: v for (p, q), v in page.dims.items() if p == 1}
    cert["E2^{1,q}"] = ext1
    if ext1:
        return SphericalVerdict(False, "E2^{1,q} != 0", cert)
    inj = {}
    for (p, q), v in page.dims.items():
        if p == 0 and q != 0:
            inj[q] = (v, page.d2_rank(q))
    cert["d2^{0,q} (dim, rank)"] = inj
    bad = [q for q, (v, r) in inj.items() if r != v]
    if bad:
        return SphericalVerdict(False, f"d2^(0,{bad[0]}) not injective", cert)
    m = page.d2.get(0)
    dim00 = page.dims.get((0, 0), 0)
    ker = la.nullspace(m) if m is not None else [[la.ONE if i == j else la.ZERO for i in range(dim00)] for j in range(dim00)]
    cert["dim ker d2^{0,0}"] = len(ker)
    if len(ker) != 1:
        return SphericalVerdict(False, "ker d2^(0,0) is not one-dimensional", cert)
    ident = page.e00_identity
    if m is not None and ident is not None and not la.is_zero_vec(la.mat_vec(m, ident)):
        return SphericalVerdict(False, "sum of identities is not a d2-cycle", cert)
    return SphericalVerdict(True, None, cert)


# ---------------------------------------------------------------- isomorphism and splitting


def is_isomorphic(a: DerivedObject, b: DerivedObject, tries: int = 4, seed: int = 0) -> bool:
    """Equal profiles and a degree-0 map between the realizations with acyclic cone."""
    if a.n != b.n:
        return False
    if [(p, sorted(rs)) for p, rs in a.profile] != [(p, sorted(rs)) for p, rs in b.profile]:
        return False
    if a == b:
        return True
    return tw_isomorphic(reconstruct(a), reconstruct(b), tries, seed)


def tw_isomorphic(x: tw.Tw, y: tw.Tw, tries: int = 4, seed: int = 0) -> bool:
    if tw_k_class(x) != tw_k_class(y):
        return False
    if not x.atoms and not y.atoms:
        return True
    basis = tw.HomComplex(x, y, 0).basis()
    if not basis:
        return False
    rng = random.Random(seed)
    for _ in range(tries):
        f = tw.Morphism(x, y, 0, {})
        for b in basis:
            f = f + b.scaled(rng.randint(-50, 50) or 1)
        if not tw.minimize(tw.cone(f)[0]).atoms:
            return True
    return False


@dataclass(frozen=True)
class NonSplit:
    degree: int
    block: tuple  # (target summand index, source summand index) in the original profile

    def __bool__(self) -> bool:
        return False


def try_split(d: DerivedObject, part: Mapping[int, Sequence[int]]):
    """Split D along ``part`` (for each degree the summand indices of the first block).

    Cross blocks in one direction are removed by the unipotent automorphisms
    1 + u (u from the other block to this one), which act linearly:
    c' = c + u_{p-1} a - d u_p.  Returns (D1, D2) or a ``NonSplit`` witness.
    """
    n = d.n
    first = {p: sorted(set(part.get(p, ()))) for p in d.degrees}
    for p, idx in first.items():
        if any(i < 0 or i >= len(d.H(p)) for i in idx):
            raise ChainError("partition index outside the profile")
    second = {p: [i for i in range(len(d.H(p))) if i not in first[p]] for p in d.degrees}
    cross12, cross21 = [], []
    for p in d.degrees:
        for (i, j), _ in d.e(p).items():
            if j in first[p] and i in second.get(p - 1, []):
                cross12.append((p, (i, j)))
            if j in second[p] and i in first.get(p - 1, []):
                cross21.append((p, (i, j)))
    if cross12 and cross21:
        p, blk = min(cross12 + cross21)
        return NonSplit(p, blk)
    if cross12 or cross21:
        # (src, dst): remove the e-components going from block src to block dst
        src, dst = (first, second) if cross12 else (second, first)
        if not _eliminate(d, src, dst):
            p, blk = min(cross12 or cross21)
            return NonSplit(p, blk)
    return _restrict(d, first), _restrict(d, second)


def _eliminate(d: DerivedObject, src: dict, dst: dict) -> bool:
    """Solve for u_p: H^p[src] -> H^p[dst] killing every e-block src -> dst."""
    n = d.n
    degs = d.degrees
    unknowns = []  # (p, dst summand, src summand, basis morphism)
    for p in degs:
        for k in dst.get(p, []):
            for j in src.get(p, []):
                for b in ec.hom_basis(d.H(p)[j], d.H(p)[k], n):
                    unknowns.append((p, k, j, b))
    eqs_rows = []
    rhs = []
    for p in degs:
        if p - 1 not in degs:
            continue
        es = {ij: ec.from_coords(d.H(p)[ij[1]], d.H(p - 1)[ij[0]], n, 2, [la.to_fmpq(v) for v in vec])
              for ij, vec in d.e(p).items()}
        for i in dst.get(p - 1, []):
            for j in src[p]:
                r, s = d.H(p)[j], d.H(p - 1)[i]
                dim = len(ec.ext2_basis(r, s, n))
                if dim == 0:
                    continue
                target = [la.ZERO] * dim
                if (i, j) in es:
                    target = ec.coords(r, s, n, 2, es[(i, j)])
                cols = []
                for (q, k, l, b) in unknowns:
                    vec = [la.ZERO] * dim
                    # u_{p-1} a: l -> k at degree p-1 composed after e-block j -> l
                    if q == p - 1 and k == i and (l, j) in es:
                        vec = [x + y for x, y in zip(vec, ec.coords(r, s, n, 2, b * es[(l, j)]))]
                    # - d u_p: u_p j -> k, then e-block k -> i
                    if q == p and l == j and (i, k) in es:
                        vec = [x - y for x, y in zip(vec, ec.coords(r, s, n, 2, es[(i, k)] * b))]
                    cols.append(vec)
                for row in range(dim):
                    eqs_rows.append([c[row] for c in cols])
                    rhs.append(-target[row])
    if not eqs_rows:
        return True
    if not unknowns:
        return all(v == 0 for v in rhs)
    return la.solve(la.from_rows(eqs_rows), rhs) is not None


def _restrict(d: DerivedObject, keep: dict) -> DerivedObject:
    prof, es = {}, {}
    ren = {p: {old: new for new, old in enumerate(keep.get(p, []))} for p in d.degrees}
    for p in d.degrees:
        prof[p] = [d.H(p)[i] for i in keep.get(p, [])]
    for p in d.degrees:
        blocks = {}
        for (i, j), v in d.e(p).items():
            if j in ren.get(p, {}) and i in ren.get(p - 1, {}):
                blocks[(ren[p - 1][i], ren[p][j])] = v
        es[p] = blocks
    return DerivedObject.make(d.n, prof, es, validate=False)


# ---------------------------------------------------------------- validation


def constituent_violations(d: DerivedObject) -> list[str]:
    """Ext^1 between constituents and degree gaps above one on a shared curve."""
    out = []
    items = list(d.summands())
    for a, (p, r) in enumerate(items):
        for q, s in items[a:]:
            if ec.ext_profile(r, s, d.n).ext1:
                out.append(f"Ext^1({r}, {s}) != 0")
            for i in range(max(r.s, s.s), min(r.t, s.t) + 1):
                if abs(r.deg(i) - s.deg(i)) > 1:
                    out.append(f"degree gap on C{i} between {r} and {s}")
    return out


# ---------------------------------------------------------------- complexes of sheaves on Z


@dataclass(frozen=True)
class SheafComplex:
    """A bounded complex of pure sheaves on Z with d o d = 0."""

    n: int
    terms: tuple  # ((p, LinkedSheaf), ...)
    differentials: tuple = ()  # ((p, SheafMorphism term p -> term p+1), ...)

    def __post_init__(self):
        t = dict(self.terms)
        for p, f in self.differentials:
            if p not in t or p + 1 not in t:
                raise ChainError(f"differential in degree {p} has no source or target")
            if not f.is_valid():
                raise ChainError(f"differential in degree {p} is not a morphism")
        ds = dict(self.differentials)
        for p, f in ds.items():
            if p + 1 in ds and not (ds[p + 1] * f).is_zero():
                raise ChainError(f"d o d != 0 at degree {p}")

    def term(self, p: int) -> ls.LinkedSheaf:
        return dict(self.terms).get(p, ls.empty_sheaf(self.n))


def cohomology(x) -> DerivedObject:
    """Profile and e-classes of a twisted complex or of a complex of sheaves on Z.

    For complexes of sheaves on Z the cohomology sheaves are computed with
    kernels and cokernels; e-classes between adjacent non-zero degrees are only
    available through a twisted-complex realization, so such complexes raise
    ``UnsupportedTorsion`` unless the relevant Ext^2 groups vanish.
    """
    if isinstance(x, tw.Tw):
        return decode(x)
    if not isinstance(x, SheafComplex):
        raise TypeError("expected a twisted complex or a SheafComplex")
    n = x.n
    ds = dict(x.differentials)
    prof = {}
    for p, e in x.terms:
        if p in ds:
            k, inc = ls.kernel(ds[p])
        else:
            k, inc = e, ls.identity(e)
        if p - 1 in ds:
            h = ls.factor_through(inc, ds[p - 1])
            pure, torsion = ls.cokernel(h)
            if torsion:
                raise ls.UnsupportedTorsion(f"H^{p} has torsion {torsion}")
            q = pure
        else:
            q = k
        if not q.is_empty():
            prof[p] = ls.decompose(q)
    degs = sorted(prof)
    for p in degs:
        if p - 1 in prof:
            for r in prof[p]:
                for s in prof[p - 1]:
                    if ec.ext_profile(r, s, n).ext2:
                        raise ls.UnsupportedTorsion("e-classes of sheaf complexes need a twisted realization")
    return DerivedObject.make(n, prof)
