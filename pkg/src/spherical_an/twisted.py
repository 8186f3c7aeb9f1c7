"""Twisted complexes over the Ext algebra of the simples of the McKay quiver.

The category D_Z(X) of the A_n resolution is equivalent to the bounded derived
category of finite-dimensional nilpotent modules over the preprojective algebra
of the cyclic quiver with vertices 0..n.  That algebra is Koszul, so its Ext
algebra ``E`` of simples is formal, and the thick closure of the simples is
modelled exactly by one-sided twisted complexes over ``E``:

* an object is a list of atoms ``(v, g)`` (a free generator at vertex ``v`` in
  degree ``g``; the single atom ``(v, 0)`` is the simple ``S_v``) together with a
  degree-one matrix ``delta`` over ``E`` with ``delta . delta = 0``;
* a degree-r morphism is a matrix over ``E``; the Hom complex differential is
  ``D(F) = dY F - (-1)^r F dX`` and composition is matrix multiplication.

``E`` has basis ``e_v`` (degree 0), for every edge k between u=k and v=k+1 (mod
n+1) arrows ``x_k: u->v`` and ``y_k: v->u`` (degree 1), and ``w_v`` (degree 2),
with ``y_k x_k = w_u`` and ``x_k y_k = -w_v``.  Products are written as
compositions: ``b * a`` means "first a, then b".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from . import linalg as la

Elem = dict  # basis index -> fmpq


@dataclass(frozen=True)
class Basis:
    src: int
    tgt: int
    deg: int
    name: str


class ExtAlgebra:
    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be at least 1")
        self.n = n
        self.nv = n + 1
        basis: list[Basis] = []
        self.idem = {}
        self.omega = {}
        for v in range(self.nv):
            self.idem[v] = len(basis)
            basis.append(Basis(v, v, 0, f"e{v}"))
        self.x = {}
        self.y = {}
        for k in range(self.nv):
            u, v = k, (k + 1) % self.nv
            self.x[k] = len(basis)
            basis.append(Basis(u, v, 1, f"x{k}"))
            self.y[k] = len(basis)
            basis.append(Basis(v, u, 1, f"y{k}"))
        for v in range(self.nv):
            self.omega[v] = len(basis)
            basis.append(Basis(v, v, 2, f"w{v}"))
        self.basis = basis
        # products b*a -> (index, sign)
        mult: dict[tuple[int, int], tuple[int, int]] = {}
        for a, ba in enumerate(basis):
            for b, bb in enumerate(basis):
                if bb.src != ba.tgt:
                    continue
                if ba.deg == 0:
                    mult[(b, a)] = (b, 1)
                elif bb.deg == 0:
                    mult[(b, a)] = (a, 1)
        for k in range(self.nv):
            u, v = k, (k + 1) % self.nv
            mult[(self.y[k], self.x[k])] = (self.omega[u], 1)
            mult[(self.x[k], self.y[k])] = (self.omega[v], -1)
        self.mult = mult
        self.by_shape: dict[tuple[int, int, int], list[int]] = {}
        for i, b in enumerate(basis):
            self.by_shape.setdefault((b.src, b.tgt, b.deg), []).append(i)
        # for each basis index a: list of (b, c, sign) with b*a = sign*c
        self.left_of: dict[int, list[tuple[int, int, int]]] = {}
        self.right_of: dict[int, list[tuple[int, int, int]]] = {}
        for (b, a), (c, s) in mult.items():
            self.left_of.setdefault(a, []).append((b, c, s))
            self.right_of.setdefault(b, []).append((a, c, s))

    def shape(self, src: int, tgt: int, deg: int) -> list[int]:
        return self.by_shape.get((src, tgt, deg), [])

    def compose(self, b: Elem, a: Elem) -> Elem:
        out: Elem = {}
        for bi, bc in b.items():
            for ai, ac in a.items():
                hit = self.mult.get((bi, ai))
                if hit is None:
                    continue
                c, s = hit
                val = out.get(c, la.ZERO) + (bc * ac if s > 0 else -(bc * ac))
                if val == 0:
                    out.pop(c, None)
                else:
                    out[c] = val
        return out


@lru_cache(maxsize=None)
def ext_algebra(n: int) -> ExtAlgebra:
    return ExtAlgebra(n)


def _add_into(target: dict, key, elem: Elem, scale=None) -> None:
    cur = target.get(key)
    if cur is None:
        cur = {}
    else:
        cur = dict(cur)
    for i, c in elem.items():
        c = c if scale is None else c * scale
        v = cur.get(i, la.ZERO) + c
        if v == 0:
            cur.pop(i, None)
        else:
            cur[i] = v
    if cur:
        target[key] = cur
    else:
        target.pop(key, None)


def mat_compose(alg: ExtAlgebra, g: dict, f: dict) -> dict:
    """Matrix product ``g . f`` (first f, then g); keys are (target, source)."""
    by_src: dict[int, list] = {}
    for (t, s), e in g.items():
        by_src.setdefault(s, []).append((t, e))
    out: dict = {}
    for (mid, s), fe in f.items():
        for t, ge in by_src.get(mid, ()):
            prod = alg.compose(ge, fe)
            if prod:
                _add_into(out, (t, s), prod)
    return out


def mat_add(a: dict, b: dict, sb=1) -> dict:
    out = {k: dict(v) for k, v in a.items()}
    for k, e in b.items():
        _add_into(out, k, e, None if sb == 1 else la.to_fmpq(sb))
    return out


def mat_scale(a: dict, c) -> dict:
    c = la.to_fmpq(c)
    if c == 0:
        return {}
    return {k: {i: x * c for i, x in e.items()} for k, e in a.items()}


@dataclass(frozen=True)
class Tw:
    """A twisted complex: atoms ``(vertex, degree)`` and a differential matrix."""

    n: int
    atoms: tuple
    delta: dict = field(hash=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.atoms)

    def check(self) -> None:
        alg = ext_algebra(self.n)
        for (t, s), e in self.delta.items():
            vt, gt = self.atoms[t]
            vs, gs = self.atoms[s]
            for b in e:
                bb = alg.basis[b]
                assert bb.src == vs and bb.tgt == vt and bb.deg == gs + 1 - gt, "bad delta entry"
        sq = mat_compose(alg, self.delta, self.delta)
        assert not sq, "delta does not square to zero"


@dataclass
class Morphism:
    src: Tw
    tgt: Tw
    degree: int
    mat: dict

    def __mul__(self, other: "Morphism") -> "Morphism":
        # self after other
        alg = ext_algebra(self.src.n)
        return Morphism(other.src, self.tgt, self.degree + other.degree, mat_compose(alg, self.mat, other.mat))

    def __add__(self, other: "Morphism") -> "Morphism":
        return Morphism(self.src, self.tgt, self.degree, mat_add(self.mat, other.mat))

    def scaled(self, c) -> "Morphism":
        return Morphism(self.src, self.tgt, self.degree, mat_scale(self.mat, c))

    def is_zero(self) -> bool:
        return not self.mat


def zero_object(n: int) -> Tw:
    return Tw(n, (), {})


def simple(n: int, v: int, shift: int = 0) -> Tw:
    """``S_v[shift]``."""
    return Tw(n, ((v % (n + 1), -shift),), {})


def shift(x: Tw, k: int) -> Tw:
    if k == 0:
        return x
    atoms = tuple((v, g - k) for v, g in x.atoms)
    d = x.delta if k % 2 == 0 else mat_scale(x.delta, -1)
    return Tw(x.n, atoms, d)


def shift_morphism(f: Morphism, k: int) -> Morphism:
    """The morphism f[k] between shifted objects (same matrix, sign (-1)^{k r})."""
    sign = -1 if (k * f.degree) % 2 else 1
    return Morphism(shift(f.src, k), shift(f.tgt, k), f.degree, f.mat if sign == 1 else mat_scale(f.mat, -1))


def direct_sum(*objs: Tw) -> Tw:
    if not objs:
        raise ValueError("need at least one summand")
    n = objs[0].n
    atoms = []
    delta = {}
    off = 0
    for x in objs:
        for (t, s), e in x.delta.items():
            delta[(t + off, s + off)] = e
        atoms.extend(x.atoms)
        off += x.size
    return Tw(n, tuple(atoms), delta)


def offsets(objs) -> list[int]:
    out, off = [], 0
    for x in objs:
        out.append(off)
        off += x.size
    return out


def block_morphism(src: Tw, tgt: Tw, degree: int, blocks: dict, src_parts, tgt_parts) -> Morphism:
    """Assemble a morphism between direct sums from blocks keyed (tgt_part, src_part)."""
    so, to = offsets(src_parts), offsets(tgt_parts)
    mat = {}
    for (ti, si), f in blocks.items():
        for (t, s), e in f.mat.items():
            mat[(t + to[ti], s + so[si])] = e
    return Morphism(src, tgt, degree, mat)


def identity(x: Tw) -> Morphism:
    alg = ext_algebra(x.n)
    mat = {(i, i): {alg.idem[v]: la.ONE} for i, (v, _) in enumerate(x.atoms)}
    return Morphism(x, x, 0, mat)


def cone(f: Morphism) -> tuple[Tw, Morphism, Morphism]:
    """Cone of a closed degree-0 map X -> Y with the maps Y -> C and C -> X[1]."""
    if f.degree != 0:
        raise ValueError("cone needs a degree-0 morphism")
    x, y = f.src, f.tgt
    x1 = shift(x, 1)
    nx = x.size
    delta = dict(x1.delta)
    for (t, s), e in y.delta.items():
        delta[(t + nx, s + nx)] = e
    for (t, s), e in f.mat.items():
        delta[(t + nx, s)] = e
    c = Tw(x.n, x1.atoms + y.atoms, delta)
    alg = ext_algebra(x.n)
    inc = Morphism(y, c, 0, {(i + nx, i): {alg.idem[v]: la.ONE} for i, (v, _) in enumerate(y.atoms)})
    proj = Morphism(c, x1, 0, {(i, i): {alg.idem[v]: la.ONE} for i, (v, _) in enumerate(x.atoms)})
    return c, inc, proj


def cocone(f: Morphism) -> tuple[Tw, Morphism]:
    """Cocone W of f: X -> Y (so W -> X -> Y -> W[1]) with the map W -> X."""
    c, _, proj = cone(f)
    w = shift(c, -1)
    # proj: C -> X[1]; shifting by -1 gives W -> X
    return w, shift_morphism(proj, -1)


def cone_of_degree_one(x: Tw, y: Tw, f: Morphism) -> Tw:
    """The extension object of a closed degree-1 map X -> Y (cone of X[-1] -> Y)."""
    nx = x.size
    delta = dict(x.delta)
    for (t, s), e in y.delta.items():
        delta[(t + nx, s + nx)] = e
    for (t, s), e in f.mat.items():
        delta[(t + nx, s)] = e
    return Tw(x.n, x.atoms + y.atoms, delta)


# ---------------------------------------------------------------- Hom complexes


class HomComplex:
    """The complex Hom(X, Y) in degrees r-1, r, r+1 with cohomology in degree r."""

    def __init__(self, x: Tw, y: Tw, r: int):
        self.x, self.y, self.r = x, y, r
        self.alg = ext_algebra(x.n)
        self.bases = {k: self._basis(k) for k in (r - 1, r, r + 1)}
        self.index = {k: {b: i for i, b in enumerate(v)} for k, v in self.bases.items()}
        dim = len(self.bases[r])
        cycles = la.sparse_nullspace(dim, self._entries(r)) if dim else []
        bounds = la.sparse_columns(len(self.bases[r - 1]), self._entries(r - 1)) if dim else []
        self.quotient = la.Quotient(dim, cycles, bounds)

    def _basis(self, r: int) -> list:
        out = []
        for m, (vm, gm) in enumerate(self.x.atoms):
            for nn, (wn, hn) in enumerate(self.y.atoms):
                for b in self.alg.shape(vm, wn, gm + r - hn):
                    out.append((nn, m, b))
        return out

    def _differential(self, r: int) -> la.fmpq_mat:
        return la.from_sparse(len(self.index[r + 1]), len(self.bases[r]), self._entries(r))

    def _entries(self, r: int) -> dict:
        src = self.bases[r]
        tgt_index = self.index[r + 1]
        alg = self.alg
        entries: dict = {}
        y_in: dict[int, list] = {}
        for (t, s), e in self.y.delta.items():
            y_in.setdefault(s, []).append((t, e))
        x_out: dict[int, list] = {}
        for (t, s), e in self.x.delta.items():
            x_out.setdefault(t, []).append((s, e))
        sign = -1 if r % 2 else 1
        for col, (nn, m, b) in enumerate(src):
            # dY o F
            for t, e in y_in.get(nn, ()):
                for bi, c in e.items():
                    hit = alg.mult.get((bi, b))
                    if hit is None:
                        continue
                    k, s = hit
                    row = tgt_index[(t, m, k)]
                    entries[(row, col)] = entries.get((row, col), la.ZERO) + (c if s > 0 else -c)
            # -(-1)^r F o dX
            for s0, e in x_out.get(m, ()):
                for ai, c in e.items():
                    hit = alg.mult.get((b, ai))
                    if hit is None:
                        continue
                    k, s = hit
                    row = tgt_index[(nn, s0, k)]
                    val = c if s > 0 else -c
                    val = -val if sign > 0 else val
                    entries[(row, col)] = entries.get((row, col), la.ZERO) + val
        return entries

    def __len__(self) -> int:
        return len(self.quotient)

    def vector(self, f: Morphism) -> list:
        idx = self.index[self.r]
        v = [la.ZERO] * len(self.bases[self.r])
        for (t, s), e in f.mat.items():
            for b, c in e.items():
                v[idx[(t, s, b)]] += c
        return v

    def morphism(self, v) -> Morphism:
        mat: dict = {}
        for (t, s, b), c in zip(self.bases[self.r], v):
            if c:
                mat.setdefault((t, s), {})[b] = la.to_fmpq(c)
        return Morphism(self.x, self.y, self.r, mat)

    def basis(self) -> list[Morphism]:
        return [self.morphism(v) for v in self.quotient.reps]

    def coords(self, f: Morphism) -> list:
        return self.quotient.coords(self.vector(f))


def hom_dim(x: Tw, y: Tw, r: int) -> int:
    if not x.atoms or not y.atoms:
        return 0
    return len(HomComplex(x, y, r))


def degree_range(x: Tw, y: Tw) -> tuple[int, int]:
    """Degrees outside this range carry no morphisms (E lives in degrees 0..2)."""
    if not x.atoms or not y.atoms:
        return (0, -1)
    gx = [g for _, g in x.atoms]
    gy = [g for _, g in y.atoms]
    lo = min(gy) - max(gx)
    hi = max(gy) - min(gx) + 2
    return lo, hi


def hom_dims(x: Tw, y: Tw) -> dict[int, int]:
    """dim Hom^r(X, Y) for all r, from ranks of the Hom-complex differentials."""
    lo, hi = degree_range(x, y)
    if lo > hi:
        return {}
    hc = HomComplex.__new__(HomComplex)
    hc.x, hc.y, hc.alg = x, y, ext_algebra(x.n)
    degs = range(lo - 1, hi + 2)
    hc.bases = {k: hc._basis(k) for k in degs}
    hc.index = {k: {b: i for i, b in enumerate(v)} for k, v in hc.bases.items()}
    ranks = {}
    for r in range(lo - 1, hi + 1):
        if hc.bases[r] and hc.bases[r + 1]:
            ranks[r] = la.sparse_rank(hc._entries(r))
        else:
            ranks[r] = 0
    out = {}
    for r in range(lo, hi + 1):
        d = len(hc.bases[r]) - ranks[r] - ranks[r - 1]
        if d:
            out[r] = d
    return out


# ---------------------------------------------------------------- minimal models


def minimize(x: Tw, track: bool = False):
    """Gaussian elimination of all unit components of the differential.

    Returns the minimal model, and with ``track`` also homotopy equivalences
    ``p: x -> m`` and ``i: m -> x``.
    """
    alg = ext_algebra(x.n)
    atoms = list(x.atoms)
    alive = list(range(len(atoms)))
    delta = {k: dict(v) for k, v in x.delta.items()}
    # transports as matrices between original indices and alive indices
    p = {(i, i): {alg.idem[v]: la.ONE} for i, (v, _) in enumerate(atoms)} if track else None
    inc = {(i, i): {alg.idem[v]: la.ONE} for i, (v, _) in enumerate(atoms)} if track else None
    while True:
        pick = None
        for (t, s), e in delta.items():
            if len(e) == 1:
                (bi, c), = e.items()
                if alg.basis[bi].deg == 0:
                    pick = (t, s, c)
                    break
        if pick is None:
            break
        b, a, lam = pick
        inv = 1 / lam
        col_a = [(t, e) for (t, s), e in delta.items() if s == a and t not in (a, b)]
        row_b = [(s, e) for (t, s), e in delta.items() if t == b and s not in (a, b)]
        for t, ea in col_a:
            for s, eb in row_b:
                prod = alg.compose(ea, eb)
                if prod:
                    _add_into(delta, (t, s), prod, -inv)
        if track:
            # p_new = step o p ; step: identity on rest, b -> rest via -d_{ia} inv
            newp = {}
            for (t, s), e in p.items():
                if t in (a, b):
                    continue
                _add_into(newp, (t, s), e)
            p_b = [(s, e) for (t, s), e in p.items() if t == b]
            for t, ea in col_a:
                for s, eb in p_b:
                    prod = alg.compose(ea, eb)
                    if prod:
                        _add_into(newp, (t, s), prod, -inv)
            p = newp
            # i_new = i o step ; step: rest -> a via -inv d_{bj}
            newi = {}
            for (t, s), e in inc.items():
                if s in (a, b):
                    continue
                _add_into(newi, (t, s), e)
            i_a = [(t, e) for (t, s), e in inc.items() if s == a]
            for t, ea in i_a:
                for s, eb in row_b:
                    prod = alg.compose(ea, eb)
                    if prod:
                        _add_into(newi, (t, s), prod, -inv)
            inc = newi
        delta = {k: v for k, v in delta.items() if a not in k and b not in k}
        alive = [i for i in alive if i not in (a, b)]
    ren = {old: new for new, old in enumerate(alive)}
    m = Tw(x.n, tuple(atoms[i] for i in alive), {(ren[t], ren[s]): e for (t, s), e in delta.items()})
    if not track:
        return m
    pm = Morphism(x, m, 0, {(ren[t], s): e for (t, s), e in p.items()})
    im = Morphism(m, x, 0, {(t, ren[s]): e for (t, s), e in inc.items()})
    return m, pm, im
