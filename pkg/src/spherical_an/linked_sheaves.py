"""Pure one-dimensional sheaves on the chain as bundles on components with node links.

A ``LinkedSheaf`` stores, for every curve C_i, the splitting type of its
restriction (modulo torsion) and, for every node i (joining C_i and C_{i+1}),
matrices ``L`` (c x r_i) and ``M`` (c x r_{i+1}) of full row rank: local
sections (s_i, s_{i+1}) are those with ``L s_i(node) = M s_{i+1}(node)``.

Chart convention: on C_i the left node sits at z = 0 and the right node at
z = oo.  A morphism entry O(a) -> O(b) is a polynomial of degree <= b - a; its
value at 0 is the constant term, its value at oo the coefficient of z^(b-a).
"""

from __future__ import annotations

import random
from fractions import Fraction
from dataclasses import dataclass
from typing import Callable, Sequence

from . import linalg as la
from .chain_core import ChainError, PicElement, SubchainLineBundle


class UnsupportedTorsion(RuntimeError):
    """The computation left the class of sheaves the engine certifies."""


Matrix = tuple  # tuple of row tuples of fmpq


def _mat(rows, ncols: int) -> Matrix:
    out = tuple(tuple(la.to_fmpq(x) for x in r) for r in rows)
    for r in out:
        if len(r) != ncols:
            raise ChainError("link matrix has the wrong width")
    return out


def _rank(rows: Matrix, ncols: int) -> int:
    if not rows or ncols == 0:
        return 0
    return la.rank(la.from_rows(rows))


@dataclass(frozen=True)
class Link:
    c: int
    L: Matrix
    M: Matrix


@dataclass(frozen=True)
class LinkedSheaf:
    n: int
    degrees: tuple  # per curve, tuple of ints
    links: tuple  # per node, Link

    def __post_init__(self):
        degs = tuple(tuple(int(d) for d in ds) for ds in self.degrees)
        object.__setattr__(self, "degrees", degs)
        if len(degs) != self.n or len(self.links) != max(self.n - 1, 0):
            raise ChainError("wrong number of curves or nodes")
        for i, lk in enumerate(self.links):
            ri, rj = len(degs[i]), len(degs[i + 1])
            if lk.c < 0 or lk.c > min(ri, rj):
                raise ChainError(f"link rank {lk.c} impossible at node {i + 1}")
            if len(lk.L) != lk.c or len(lk.M) != lk.c:
                raise ChainError("link matrices need c rows")
            if _rank(lk.L, ri) != lk.c or _rank(lk.M, rj) != lk.c:
                raise ChainError(f"link matrices at node {i + 1} are not of full row rank")

    def rank(self, i: int) -> int:
        return len(self.degrees[i - 1])

    @property
    def ranks(self) -> tuple:
        return tuple(len(d) for d in self.degrees)

    def is_empty(self) -> bool:
        return not any(self.degrees)


def empty_sheaf(n: int) -> LinkedSheaf:
    return LinkedSheaf(n, ((),) * n, tuple(Link(0, (), ()) for _ in range(n - 1)))


def embed(r: SubchainLineBundle, n: int) -> LinkedSheaf:
    if not r.fits(n):
        raise ChainError(f"{r} does not fit on a chain of length {n}")
    degrees = tuple((r.deg(i),) if r.contains(i) else () for i in range(1, n + 1))
    links = []
    for i in range(1, n):
        if r.contains(i) and r.contains(i + 1):
            links.append(Link(1, ((la.ONE,),), ((la.ONE,),)))
        else:
            links.append(Link(0, (), ()))
    return LinkedSheaf(n, degrees, tuple(links))


def _block_diag(a: Matrix, ac: int, b: Matrix, bc: int) -> Matrix:
    rows = [tuple(r) + (la.ZERO,) * bc for r in a]
    rows += [(la.ZERO,) * ac + tuple(r) for r in b]
    return tuple(rows)


def direct_sum(e: LinkedSheaf, f: LinkedSheaf) -> LinkedSheaf:
    if e.n != f.n:
        raise ChainError("direct sum over different chains")
    degrees = tuple(a + b for a, b in zip(e.degrees, f.degrees))
    links = []
    for i, (x, y) in enumerate(zip(e.links, f.links)):
        ri, rj = e.rank(i + 1), e.rank(i + 2)
        si, sj = f.rank(i + 1), f.rank(i + 2)
        links.append(Link(x.c + y.c, _block_diag(x.L, ri, y.L, si), _block_diag(x.M, rj, y.M, sj)))
    return LinkedSheaf(e.n, degrees, tuple(links))


def sum_of(n: int, bundles: Sequence[SubchainLineBundle]) -> LinkedSheaf:
    out = empty_sheaf(n)
    for r in bundles:
        out = direct_sum(out, embed(r, n))
    return out


def tensor_pic(e: LinkedSheaf, pic: PicElement) -> LinkedSheaf:
    if pic.n != e.n:
        raise ChainError("Pic element over a different chain")
    degrees = tuple(tuple(d + pic.degrees[i] for d in ds) for i, ds in enumerate(e.degrees))
    return LinkedSheaf(e.n, degrees, e.links)


# ---------------------------------------------------------------- polynomials

Poly = tuple  # coefficients, lowest degree first


def _padd(p: Poly, q: Poly) -> Poly:
    m = max(len(p), len(q))
    out = [la.ZERO] * m
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _pmul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [la.ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _coef(p: Poly, k: int):
    return p[k] if 0 <= k < len(p) else la.ZERO


def _peval(p: Poly, x):
    acc = la.ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class SheafMorphism:
    """Per curve an r'_i x r_i matrix of polynomials."""

    src: LinkedSheaf
    tgt: LinkedSheaf
    blocks: tuple

    def at_zero(self, i: int) -> list[list]:
        b = self.blocks[i - 1]
        return [[_coef(p, 0) for p in row] for row in b]

    def at_infinity(self, i: int) -> list[list]:
        b = self.blocks[i - 1]
        ds, dt = self.src.degrees[i - 1], self.tgt.degrees[i - 1]
        return [[_coef(p, dt[k] - ds[l]) for l, p in enumerate(row)] for k, row in enumerate(b)]

    def __mul__(self, other: "SheafMorphism") -> "SheafMorphism":
        # self after other
        blocks = []
        for i in range(self.src.n):
            a, b = self.blocks[i], other.blocks[i]
            rows = len(a)
            cols = len(b[0]) if b else len(other.src.degrees[i])
            mid = len(b)
            blk = []
            for k in range(rows):
                row = []
                for l in range(cols):
                    acc: Poly = ()
                    for m in range(mid):
                        acc = _padd(acc, _pmul(a[k][m], b[m][l]))
                    row.append(acc)
                blk.append(tuple(row))
            blocks.append(tuple(blk))
        return SheafMorphism(other.src, self.tgt, tuple(blocks))

    def __add__(self, other: "SheafMorphism") -> "SheafMorphism":
        blocks = tuple(
            tuple(tuple(_padd(p, q) for p, q in zip(r1, r2)) for r1, r2 in zip(b1, b2))
            for b1, b2 in zip(self.blocks, other.blocks)
        )
        return SheafMorphism(self.src, self.tgt, blocks)

    def scaled(self, c) -> "SheafMorphism":
        c = la.to_fmpq(c)
        blocks = tuple(tuple(tuple(tuple(x * c for x in p) if c else () for p in r) for r in b) for b in self.blocks)
        return SheafMorphism(self.src, self.tgt, blocks)

    def is_zero(self) -> bool:
        return all(not p for b in self.blocks for r in b for p in r)

    def degree_ok(self) -> bool:
        for i in range(self.src.n):
            ds, dt = self.src.degrees[i], self.tgt.degrees[i]
            for k, row in enumerate(self.blocks[i]):
                for l, p in enumerate(row):
                    if p and len(p) - 1 > dt[k] - ds[l]:
                        return False
        return True

    def is_valid(self) -> bool:
        """Degree bounds and node compatibility, checked exactly."""
        if not self.degree_ok():
            return False
        e, f = self.src, self.tgt
        for node in range(1, e.n):
            ke = _link_kernel(e, node)
            lf = f.links[node - 1]
            if lf.c == 0:
                continue
            a = self.at_infinity(node)
            b = self.at_zero(node + 1)
            ri = e.rank(node)
            for vec in ke:
                v, w = vec[:ri], vec[ri:]
                av = [sum((a[k][l] * v[l] for l in range(len(v))), la.ZERO) for k in range(len(a))]
                bw = [sum((b[k][l] * w[l] for l in range(len(w))), la.ZERO) for k in range(len(b))]
                for row_l, row_m in zip(lf.L, lf.M):
                    lhs = sum((x * y for x, y in zip(row_l, av)), la.ZERO)
                    rhs = sum((x * y for x, y in zip(row_m, bw)), la.ZERO)
                    if lhs != rhs:
                        return False
        return True


def identity(e: LinkedSheaf) -> SheafMorphism:
    blocks = tuple(
        tuple(tuple((la.ONE,) if k == l else () for l in range(len(ds))) for k in range(len(ds))) for ds in e.degrees
    )
    return SheafMorphism(e, e, blocks)


def zero_morphism(e: LinkedSheaf, f: LinkedSheaf) -> SheafMorphism:
    blocks = tuple(
        tuple(tuple(() for _ in range(len(de))) for _ in range(len(df))) for de, df in zip(e.degrees, f.degrees)
    )
    return SheafMorphism(e, f, blocks)


def _link_kernel(e: LinkedSheaf, node: int) -> list[list]:
    """Allowed pairs of fibre values (v at oo of C_node, w at 0 of C_node+1)."""
    lk = e.links[node - 1]
    ri, rj = e.rank(node), e.rank(node + 1)
    if ri + rj == 0:
        return []
    if lk.c == 0:
        return [[la.ONE if k == j else la.ZERO for k in range(ri + rj)] for j in range(ri + rj)]
    rows = [list(lr) + [-x for x in mr] for lr, mr in zip(lk.L, lk.M)]
    return la.nullspace(la.from_rows(rows))


# ---------------------------------------------------------------- Hom spaces


def _unknowns(e: LinkedSheaf, f: LinkedSheaf):
    index = {}
    for i in range(e.n):
        ds, dt = e.degrees[i], f.degrees[i]
        for k, b in enumerate(dt):
            for l, a in enumerate(ds):
                for p in range(b - a + 1):
                    index[(i, k, l, p)] = len(index)
    return index


def hom_space(e: LinkedSheaf, f: LinkedSheaf) -> list[SheafMorphism]:
    """Deterministic basis of Hom(E, F) by solving the node equations."""
    if e.n != f.n:
        raise ChainError("Hom between sheaves on different chains")
    index = _unknowns(e, f)
    nvar = len(index)
    if nvar == 0:
        return []
    eqs = []
    for node in range(1, e.n):
        lf = f.links[node - 1]
        if lf.c == 0:
            continue
        i, j = node - 1, node
        ri = e.rank(node)
        ds_i, dt_i = e.degrees[i], f.degrees[i]
        ds_j, dt_j = e.degrees[j], f.degrees[j]
        for vec in _link_kernel(e, node):
            v, w = vec[:ri], vec[ri:]
            for row_l, row_m in zip(lf.L, lf.M):
                eq = {}
                for k, lc in enumerate(row_l):
                    if not lc:
                        continue
                    for l, vl in enumerate(v):
                        top = dt_i[k] - ds_i[l]
                        if vl and top >= 0:
                            key = index[(i, k, l, top)]
                            eq[key] = eq.get(key, la.ZERO) + lc * vl
                for k, mc in enumerate(row_m):
                    if not mc:
                        continue
                    for l, wl in enumerate(w):
                        if wl and dt_j[k] - ds_j[l] >= 0:
                            key = index[(j, k, l, 0)]
                            eq[key] = eq.get(key, la.ZERO) - mc * wl
                if any(eq.values()):
                    eqs.append(eq)
    if eqs:
        m = la.from_sparse(len(eqs), nvar, {(r, c): v for r, eq in enumerate(eqs) for c, v in eq.items()})
        sols = la.nullspace(m)
    else:
        sols = [[la.ONE if a == b else la.ZERO for a in range(nvar)] for b in range(nvar)]
    return [_morphism_from_vector(e, f, index, s) for s in sols]


def _morphism_from_vector(e, f, index, vec) -> SheafMorphism:
    blocks = []
    for i in range(e.n):
        ds, dt = e.degrees[i], f.degrees[i]
        blk = []
        for k, b in enumerate(dt):
            row = []
            for l, a in enumerate(ds):
                coeffs = [vec[index[(i, k, l, p)]] for p in range(b - a + 1)]
                while coeffs and coeffs[-1] == 0:
                    coeffs.pop()
                row.append(tuple(coeffs))
            blk.append(tuple(row))
        blocks.append(tuple(blk))
    return SheafMorphism(e, f, tuple(blocks))


def hom_dim(e: LinkedSheaf, f: LinkedSheaf) -> int:
    return len(hom_space(e, f))


# ---------------------------------------------------------------- sub-bundles and kernels


def _generic_rank(block, ds, dt) -> int:
    if not block or not ds:
        return 0
    rng = random.Random(17)
    best = 0
    for _ in range(3):
        x = la.fmpq(rng.randint(2, 10 ** 6), rng.randint(1, 97))
        rows = [[_peval(p, x) for p in row] for row in block]
        best = max(best, la.rank(la.from_rows(rows)))
    return best


def _subbundle(ds: tuple, block, dt: tuple, at0: list | None, atinf: list | None, expected: int):
    """Generators of {v : block v = 0, v(0) in span(at0), v(oo) in span(atinf)}.

    Returns a list of (kappa, column of polynomials) with kappa decreasing.
    ``at0``/``atinf`` are lists of spanning vectors in fibre coordinates (None: no condition).
    """
    r = len(ds)
    gens: list[tuple[int, list]] = []
    if expected == 0:
        return gens
    ann0 = _annihilator(at0, r)
    anninf = _annihilator(atinf, r)
    m = max(ds)
    while len(gens) < expected:
        index = {}
        for l, d in enumerate(ds):
            for p in range(d - m + 1):
                index[(l, p)] = len(index)
        nvar = len(index)
        if nvar:
            eqs = []
            for k, row in enumerate(block):
                top = max([dt[k] - m + 1, 0])
                for power in range(top + 1):
                    eq = {}
                    for l, poly in enumerate(row):
                        for p in range(ds[l] - m + 1):
                            c = _coef(poly, power - p)
                            if c:
                                key = index[(l, p)]
                                eq[key] = eq.get(key, la.ZERO) + c
                    if any(eq.values()):
                        eqs.append(eq)
            for a in ann0:
                eq = {index[(l, 0)]: a[l] for l in range(r) if a[l] and ds[l] - m >= 0}
                if eq:
                    eqs.append(eq)
            for a in anninf:
                eq = {index[(l, ds[l] - m)]: a[l] for l in range(r) if a[l] and ds[l] - m >= 0}
                if eq:
                    eqs.append(eq)
            if eqs:
                mm = la.from_sparse(len(eqs), nvar, {(i, c): v for i, eq in enumerate(eqs) for c, v in eq.items()})
                space = la.nullspace(mm)
            else:
                space = [[la.ONE if a == b else la.ZERO for a in range(nvar)] for b in range(nvar)]
            generated = []
            for kappa, col in gens:
                for j in range(kappa - m + 1):
                    vec = [la.ZERO] * nvar
                    for l, poly in enumerate(col):
                        for p, c in enumerate(poly):
                            if c:
                                vec[index[(l, p + j)]] += c
                    generated.append(vec)
            stacked = generated + space
            piv = la.independent_columns(stacked, nvar) if stacked else []
            for idx in piv:
                if idx < len(generated):
                    continue
                vec = stacked[idx]
                col = []
                for l, d in enumerate(ds):
                    coeffs = [vec[index[(l, p)]] for p in range(d - m + 1)]
                    while coeffs and coeffs[-1] == 0:
                        coeffs.pop()
                    col.append(tuple(coeffs))
                gens.append((m, col))
        m -= 1
        if m < min(ds) - 10 * (sum(abs(x) for x in dt) + sum(abs(x) for x in ds) + 10):
            raise UnsupportedTorsion("sub-bundle search did not terminate")
    return gens


def _annihilator(span: list | None, r: int) -> list[list]:
    if span is None:
        return []
    if not span:
        return [[la.ONE if i == j else la.ZERO for i in range(r)] for j in range(r)]
    return la.nullspace(la.from_rows([list(v) for v in span]))


def _fibres(gens, ds):
    at0 = [[_coef(col[l], 0) for l in range(len(ds))] for _, col in gens]
    atinf = [[_coef(col[l], ds[l] - kappa) for l in range(len(ds))] for kappa, col in gens]
    # returned as lists of columns (one per generator)
    return at0, atinf


def _cols_to_rows(cols, r):
    return [[cols[j][i] for j in range(len(cols))] for i in range(r)]


def kernel(f: SheafMorphism) -> tuple[LinkedSheaf, SheafMorphism]:
    """ker f with its inclusion; kernels of maps between pure sheaves are pure."""
    e = f.src
    n = e.n
    exp = []
    base = []
    for i in range(n):
        ds, dt = e.degrees[i], f.tgt.degrees[i]
        rk = len(ds) - _generic_rank(f.blocks[i], ds, dt)
        exp.append(rk)
        base.append(_subbundle(ds, f.blocks[i], dt, None, None, rk) if ds else [])
    # allowed values at each node, in fibre coordinates of E
    left_span: list = [None] * n  # constraint at z = 0 of curve i
    right_span: list = [None] * n  # constraint at z = oo of curve i
    for node in range(1, n):
        i, j = node - 1, node
        if not base[i] or not base[j]:
            if e.links[node - 1].c and (base[i] or base[j]):
                # sections on one side must vanish against the link
                pass
        a0, ainf = _fibres(base[i], e.degrees[i])
        b0, _ = _fibres(base[j], e.degrees[j])
        lk = e.links[node - 1]
        ki, kj = len(base[i]), len(base[j])
        if lk.c == 0:
            continue
        ri, rj = e.rank(node), e.rank(node + 1)
        A = _cols_to_rows(ainf, ri)
        B = _cols_to_rows(b0, rj)
        rows = []
        for lr, mr in zip(lk.L, lk.M):
            rl = [sum((lr[p] * A[p][q] for p in range(ri)), la.ZERO) for q in range(ki)]
            rm = [-sum((mr[p] * B[p][q] for p in range(rj)), la.ZERO) for q in range(kj)]
            rows.append(rl + rm)
        w = la.nullspace(la.from_rows(rows)) if ki + kj else []
        proj_i = [v[:ki] for v in w]
        proj_j = [v[ki:] for v in w]
        right_span[i] = [[sum((A[p][q] * u[q] for q in range(ki)), la.ZERO) for p in range(ri)] for u in proj_i]
        left_span[j] = [[sum((B[p][q] * u[q] for q in range(kj)), la.ZERO) for p in range(rj)] for u in proj_j]
    gens = []
    for i in range(n):
        ds, dt = e.degrees[i], f.tgt.degrees[i]
        if not ds or exp[i] == 0:
            gens.append([])
            continue
        if left_span[i] is None and right_span[i] is None:
            gens.append(base[i])
            continue
        # the kernel condition block v = 0 plus pointwise conditions
        gens.append(_subbundle(ds, f.blocks[i], dt, left_span[i], right_span[i], exp[i]))
    kdeg = tuple(tuple(k for k, _ in g) for g in gens)
    links = []
    for node in range(1, n):
        i, j = node - 1, node
        lk = e.links[node - 1]
        ki, kj = len(gens[i]), len(gens[j])
        if lk.c == 0 or ki == 0 or kj == 0:
            links.append(Link(0, (), ()))
            continue
        _, ainf = _fibres(gens[i], e.degrees[i])
        b0, _ = _fibres(gens[j], e.degrees[j])
        ri, rj = e.rank(node), e.rank(node + 1)
        A = _cols_to_rows(ainf, ri)
        B = _cols_to_rows(b0, rj)
        rows = []
        for lr, mr in zip(lk.L, lk.M):
            rl = [sum((lr[p] * A[p][q] for p in range(ri)), la.ZERO) for q in range(ki)]
            rm = [sum((mr[p] * B[p][q] for p in range(rj)), la.ZERO) for q in range(kj)]
            rows.append(rl + rm)
        red, piv = la.rref(la.from_rows(rows))
        keep = [[red[r, c] for c in range(ki + kj)] for r in range(len(piv))]
        lrows = tuple(tuple(r[:ki]) for r in keep)
        mrows = tuple(tuple(r[ki:]) for r in keep)
        c = len(keep)
        if _rank(lrows, ki) != c or _rank(mrows, kj) != c:
            raise UnsupportedTorsion("kernel link is not of full rank")
        links.append(Link(c, lrows, mrows))
    k = LinkedSheaf(n, kdeg, tuple(links))
    blocks = []
    for i in range(n):
        r = len(e.degrees[i])
        blocks.append(tuple(tuple(gens[i][j][1][l] for j in range(len(gens[i]))) for l in range(r)))
    inc = SheafMorphism(k, e, tuple(blocks))
    return k, inc


def _transpose_dual(f: SheafMorphism) -> SheafMorphism:
    """F^v -> E^v on each curve (links must be empty)."""
    dual = lambda s: LinkedSheaf(s.n, tuple(tuple(-d for d in ds) for ds in s.degrees), s.links)
    blocks = []
    for b, ds in zip(f.blocks, f.src.degrees):
        rows = len(ds)
        cols = len(b)
        blocks.append(tuple(tuple(b[k][l] for k in range(cols)) for l in range(rows)))
    return SheafMorphism(dual(f.tgt), dual(f.src), tuple(blocks))


def _minor_gcd(block, ds, dt, rank_):
    import sympy

    z = sympy.Symbol("z")
    mat = sympy.Matrix([[sum(sympy.Rational(int(c.p), int(c.q)) * z ** k for k, c in enumerate(p)) for p in row] for row in block])
    from itertools import combinations

    g = sympy.Integer(0)
    for rs in combinations(range(mat.rows), rank_):
        for cs in combinations(range(mat.cols), rank_):
            g = sympy.gcd(g, mat.extract(list(rs), list(cs)).det())
    return sympy.Poly(g, z)


def cokernel(f: SheafMorphism) -> tuple[LinkedSheaf, list]:
    """Pure part of coker f and a torsion report [(curve, point, length)].

    Points are rationals in the left chart or the string "oo".  Cokernels of
    maps into sheaves with non-trivial node links raise UnsupportedTorsion.
    """
    tgt = f.tgt
    if any(lk.c for lk in tgt.links) or any(lk.c for lk in f.src.links):
        raise UnsupportedTorsion("cokernels with node links are outside the supported class")
    g = _transpose_dual(f)
    qdual, inc = kernel(g)
    pure = LinkedSheaf(tgt.n, tuple(tuple(-k for k in ks) for ks in qdual.degrees), tgt.links)
    torsion = []
    import sympy

    for i in range(tgt.n):
        ds, dt = f.src.degrees[i], tgt.degrees[i]
        if not dt:
            continue
        rk = _generic_rank(f.blocks[i], ds, dt)
        kdeg = sum(_kernel_degree(f, i))
        deg_im = sum(ds) - kdeg
        deg_sat = sum(dt) - sum(pure.degrees[i])
        length = deg_sat - deg_im
        if length == 0:
            continue
        if rk == 0:
            raise UnsupportedTorsion("inconsistent torsion count")
        poly = _minor_gcd(f.blocks[i], ds, dt, rk)
        roots = sympy.roots(poly, filter="Q")
        if sum(roots.values()) != poly.degree():
            raise UnsupportedTorsion("torsion at irrational points")
        for root, mult in sorted(roots.items()):
            torsion.append((i + 1, Fraction(int(root.p), int(root.q)), int(mult)))
        if length > poly.degree():
            torsion.append((i + 1, "oo", length - poly.degree()))
    return pure, torsion


def _kernel_degree(f: SheafMorphism, i: int) -> list[int]:
    ds, dt = f.src.degrees[i], f.tgt.degrees[i]
    if not ds:
        return []
    rk = len(ds) - _generic_rank(f.blocks[i], ds, dt)
    return [k for k, _ in _subbundle(ds, f.blocks[i], dt, None, None, rk)]


# ---------------------------------------------------------------- decomposition


def lex_compare(r: SubchainLineBundle, s: SubchainLineBundle) -> int:
    """Order on bundles supported from C_1: +1 if r > s, -1 if r < s, 0 if equal."""
    if r.s != 1 or s.s != 1:
        raise ChainError("lex_compare needs bundles whose support starts at C_1")
    for a, b in zip(r.degrees, s.degrees):
        if a != b:
            return 1 if a > b else -1
    if r.t == s.t:
        return 0
    return 1 if r.t < s.t else -1


def _degree_multiset(f: Callable[[int], int], rank: int) -> dict[int, int]:
    """Degrees d_R of the summands through a curve from b -> sum max(0, b - d_R + 1)."""
    if rank == 0:
        return {}
    b = 0
    while f(b) > 0:
        b -= 4
    lo = b
    b = max(lo + 1, 0)
    while f(b) - f(b - 1) != rank:
        b += 4
    hi = b
    vals = {x: f(x) for x in range(lo - 1, hi + 1)}
    g = {x: vals[x] - vals[x - 1] for x in range(lo, hi + 1)}
    out = {}
    for d in range(lo + 1, hi + 1):
        c = g[d] - g[d - 1]
        if c:
            out[d] = c
    if g[lo] != 0 or sum(out.values()) != rank or any(c < 0 for c in out.values()):
        raise UnsupportedTorsion("Hom counts are not those of a sum of subchain bundles")
    return out


def decompose_from_homs(n: int, ranks: Sequence[int], hom_to: Callable[[SubchainLineBundle], int]) -> list[SubchainLineBundle]:
    """Summands of a sheaf known to be a sum of subchain bundles, from dim Hom(-, T).

    For an interval [s,t] the number of summands containing it with prescribed
    degrees b there is the second difference in b (one curve) or the mixed first
    difference in the two end degrees (longer intervals) of b -> dim Hom(E, O_[s,t](b)).
    """
    cache: dict = {}

    def hom(s, t, degs):
        key = (s, t, tuple(degs))
        if key not in cache:
            cache[key] = hom_to(SubchainLineBundle(s, t, tuple(degs)))
        return cache[key]

    present: dict[tuple[int, int], dict[tuple, int]] = {}
    for i in range(1, n + 1):
        ms = _degree_multiset(lambda b, i=i: hom(i, i, (b,)), ranks[i - 1])
        present[(i, i)] = {(d,): c for d, c in ms.items()}
    for length in range(2, n + 1):
        for s in range(1, n - length + 2):
            t = s + length - 1
            left, right = present[(s, t - 1)], present[(s + 1, t)]
            found = {}
            for lb in left:
                for rb in right:
                    if lb[1:] != rb[:-1]:
                        continue
                    b = lb + rb[-1:]
                    cnt = hom(s, t, b)
                    cnt -= hom(s, t, (b[0] - 1,) + b[1:])
                    cnt -= hom(s, t, b[:-1] + (b[-1] - 1,))
                    cnt += hom(s, t, (b[0] - 1,) + b[1:-1] + (b[-1] - 1,))
                    if cnt < 0:
                        raise UnsupportedTorsion("negative summand count")
                    if cnt:
                        found[b] = cnt
            present[(s, t)] = found
    summands: list[SubchainLineBundle] = []
    for length in range(n, 0, -1):
        for s in range(1, n - length + 2):
            t = s + length - 1
            for b, cnt in sorted(present[(s, t)].items()):
                longer = sum(
                    1 for r in summands if r.s <= s and t <= r.t and tuple(r.deg(i) for i in range(s, t + 1)) == b
                )
                exact = cnt - longer
                if exact < 0:
                    raise UnsupportedTorsion("inconsistent summand counts")
                summands.extend([SubchainLineBundle(s, t, b)] * exact)
    for i in range(1, n + 1):
        if sum(1 for r in summands if r.contains(i)) != ranks[i - 1]:
            raise UnsupportedTorsion("summands do not account for the generic ranks")
    return sorted(summands)


def decompose(e: LinkedSheaf) -> list[SubchainLineBundle]:
    """The multiset of subchain bundles whose sum is isomorphic to E."""
    return decompose_from_homs(e.n, e.ranks, lambda t: hom_dim(e, embed(t, e.n)))


def random_node_conjugate(e: LinkedSheaf, rng: random.Random) -> LinkedSheaf:
    """An isomorphic sheaf: random automorphisms of the splittings and of the link targets."""
    n = e.n
    g0, ginf = [], []
    for ds in e.degrees:
        r = len(ds)
        # automorphism of sum O(d): constant invertible blocks on equal degrees,
        # arbitrary polynomials from lower to higher degree
        while True:
            mat0 = [[la.ZERO] * r for _ in range(r)]
            matinf = [[la.ZERO] * r for _ in range(r)]
            for k in range(r):
                for l in range(r):
                    gap = ds[k] - ds[l]
                    if gap < 0:
                        continue
                    poly = [la.fmpq(rng.randint(-3, 3)) for _ in range(gap + 1)]
                    if k == l:
                        poly = [la.fmpq(rng.choice([1, 2, -1, 3]))]
                    mat0[k][l] = poly[0]
                    matinf[k][l] = poly[gap]
            for k in range(r):
                for l in range(r):
                    if ds[k] == ds[l]:
                        matinf[k][l] = mat0[k][l]
            if r == 0 or la.rank(la.from_rows(mat0)) == r:
                break
        g0.append(mat0)
        ginf.append(matinf)
    links = []
    for node in range(1, n):
        lk = e.links[node - 1]
        if lk.c == 0:
            links.append(lk)
            continue
        a = ginf[node - 1]
        b = g0[node]
        while True:
            t = [[la.fmpq(rng.randint(-2, 2)) for _ in range(lk.c)] for _ in range(lk.c)]
            if la.rank(la.from_rows(t)) == lk.c:
                break
        def mul(x, y):
            return [[sum((x[i][k] * y[k][j] for k in range(len(y))), la.ZERO) for j in range(len(y[0]))] for i in range(len(x))]
        lnew = mul(t, mul([list(r) for r in lk.L], a))
        mnew = mul(t, mul([list(r) for r in lk.M], b))
        links.append(Link(lk.c, tuple(map(tuple, lnew)), tuple(map(tuple, mnew))))
    return LinkedSheaf(n, e.degrees, tuple(links))


def factor_through(inc: SheafMorphism, f: SheafMorphism) -> SheafMorphism:
    """The unique h with inc o h = f, for a monomorphism inc: K -> E and f: F -> E."""
    k, e, src = inc.src, inc.tgt, f.src
    if f.tgt != e:
        raise ChainError("f does not land in the target of inc")
    blocks = []
    for i in range(e.n):
        ds, dk, de = src.degrees[i], k.degrees[i], e.degrees[i]
        index = {}
        for a, kd in enumerate(dk):
            for b, sd in enumerate(ds):
                for p in range(kd - sd + 1):
                    index[(a, b, p)] = len(index)
        eqs, rhs = [], []
        g = inc.blocks[i]
        for row in range(len(de)):
            for b, sd in enumerate(ds):
                top = de[row] - sd
                for power in range(max(top, len(f.blocks[i][row][b]) - 1) + 1):
                    eq = [la.ZERO] * len(index)
                    for a, kd in enumerate(dk):
                        for p in range(kd - sd + 1):
                            c = _coef(g[row][a], power - p)
                            if c:
                                eq[index[(a, b, p)]] += c
                    eqs.append(eq)
                    rhs.append(_coef(f.blocks[i][row][b], power))
        if index:
            sol = la.solve(la.from_rows(eqs), rhs) if eqs else [la.ZERO] * len(index)
        else:
            sol = [] if all(v == 0 for v in rhs) else None
        if sol is None:
            raise ChainError("f does not factor through the subsheaf")
        blk = []
        for a, kd in enumerate(dk):
            row = []
            for b, sd in enumerate(ds):
                coeffs = [sol[index[(a, b, p)]] for p in range(kd - sd + 1)]
                while coeffs and coeffs[-1] == 0:
                    coeffs.pop()
                row.append(tuple(coeffs))
            blk.append(tuple(row))
        blocks.append(tuple(blk))
    return SheafMorphism(src, k, tuple(blocks))
