"""Exact linear algebra over Q, backed by python-flint.

Matrices are ``flint.fmpq_mat``; vectors are plain lists of ``flint.fmpq``.
Only the handful of routines the engines need live here: rank, kernels,
particular solutions and quotient coordinates (for cohomology of finite
complexes of vector spaces).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import flint

fmpq = flint.fmpq
fmpq_mat = flint.fmpq_mat

ZERO = fmpq(0)
ONE = fmpq(1)


def to_fmpq(x) -> flint.fmpq:
    if isinstance(x, flint.fmpq):
        return x
    if isinstance(x, Fraction):
        return fmpq(x.numerator, x.denominator)
    if isinstance(x, int):
        return fmpq(x)
    if isinstance(x, str):
        if "/" in x:
            p, q = x.split("/")
            return fmpq(int(p), int(q))
        return fmpq(int(x))
    raise TypeError(f"cannot coerce {x!r} to a rational")


def to_fraction(x) -> Fraction:
    x = to_fmpq(x)
    return Fraction(int(x.p), int(x.q))


def zeros(rows: int, cols: int) -> fmpq_mat:
    return fmpq_mat(rows, cols)


def from_sparse(rows: int, cols: int, entries: Mapping[tuple[int, int], object]) -> fmpq_mat:
    m = fmpq_mat(rows, cols)
    for (i, j), v in entries.items():
        if v:
            m[i, j] = to_fmpq(v)
    return m


def from_rows(rows: Sequence[Sequence[object]], ncols: int | None = None) -> fmpq_mat:
    if not rows:
        return fmpq_mat(0, ncols or 0)
    return fmpq_mat([[to_fmpq(v) for v in r] for r in rows])


def columns(m: fmpq_mat) -> list[list]:
    return [[m[i, j] for i in range(m.nrows())] for j in range(m.ncols())]


def from_columns(cols: Sequence[Sequence[object]], nrows: int) -> fmpq_mat:
    m = fmpq_mat(nrows, len(cols))
    for j, c in enumerate(cols):
        for i, v in enumerate(c):
            if v:
                m[i, j] = to_fmpq(v)
    return m


def sparse_rank(entries: Mapping[tuple[int, int], object]) -> int:
    """Rank of a sparse rational matrix, computed over Z after clearing row denominators.

    Hom-complex differentials are large and nearly monomial; FLINT's integer rank is
    exact and much faster than ``fmpq_mat.rank`` on them.
    """
    rows: dict[int, dict[int, flint.fmpq]] = {}
    for (i, j), v in entries.items():
        if v:
            rows.setdefault(i, {})[j] = to_fmpq(v)
    if not rows:
        return 0
    cols = sorted({j for r in rows.values() for j in r})
    cidx = {j: k for k, j in enumerate(cols)}
    m = flint.fmpz_mat(len(rows), len(cols))
    for k, r in enumerate(rows.values()):
        den = 1
        for v in r.values():
            q = int(v.q)
            if q != 1:
                den = den * q // math.gcd(den, q)
        for j, v in r.items():
            m[k, cidx[j]] = int(v.p) * (den // int(v.q))
    return m.rank()


def rank(m: fmpq_mat) -> int:
    if m.nrows() == 0 or m.ncols() == 0:
        return 0
    return m.rank()


def rref(m: fmpq_mat) -> tuple[fmpq_mat, list[int]]:
    """Reduced row echelon form and pivot columns."""
    if m.nrows() == 0 or m.ncols() == 0:
        return m, []
    r, rk = m.rref()
    pivots = []
    row = 0
    for j in range(m.ncols()):
        if row < rk and r[row, j] != 0:
            pivots.append(j)
            row += 1
    return r, pivots


def nullspace(m: fmpq_mat) -> list[list]:
    """Basis of the right kernel, one list per basis vector (deterministic)."""
    ncols = m.ncols()
    if m.nrows() == 0:
        return [[ONE if i == j else ZERO for i in range(ncols)] for j in range(ncols)]
    r, pivots = rref(m)
    pset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pset:
            continue
        v = [ZERO] * ncols
        v[f] = ONE
        for row, p in enumerate(pivots):
            v[p] = -r[row, f]
        basis.append(v)
    return basis


def solve(a: fmpq_mat, b: Sequence[object]) -> list | None:
    """Some x with a x = b, or None when inconsistent."""
    nr, nc = a.nrows(), a.ncols()
    if nr == 0:
        return [ZERO] * nc
    aug = fmpq_mat(nr, nc + 1)
    for i in range(nr):
        for j in range(nc):
            aug[i, j] = a[i, j]
        aug[i, nc] = to_fmpq(b[i])
    r, pivots = rref(aug)
    if pivots and pivots[-1] == nc:
        return None
    x = [ZERO] * nc
    for row, p in enumerate(pivots):
        x[p] = r[row, nc]
    return x


def independent_columns(cols: Sequence[Sequence[object]], nrows: int) -> list[int]:
    """Indices of a maximal independent subfamily, greedy from the left."""
    ech = SparseEchelon()
    return [j for j, c in enumerate(cols) if ech.add(_as_sparse(c))]


class SparseEchelon:
    """Incremental echelon basis of sparse vectors ``{index: fmpq}``.

    Each stored vector has a distinct pivot (its smallest index) with value 1.  With
    ``track`` every stored vector also carries its expression in the inputs.
    """

    def __init__(self, track: bool = False):
        self.rows: dict[int, dict] = {}
        self.combos: dict[int, dict] = {}
        self.track = track

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, v: Mapping[int, object], combo: dict | None = None):
        v = {i: to_fmpq(c) for i, c in v.items() if c}
        combo = dict(combo or {})
        while v:
            k = min(v)
            row = self.rows.get(k)
            if row is None:
                break
            c = v[k]
            for i, x in row.items():
                y = v.get(i, ZERO) - c * x
                if y:
                    v[i] = y
                else:
                    v.pop(i, None)
            if self.track:
                for i, x in self.combos[k].items():
                    y = combo.get(i, ZERO) - c * x
                    if y:
                        combo[i] = y
                    else:
                        combo.pop(i, None)
        return v, combo

    def add(self, v: Mapping[int, object], label=None) -> bool:
        """Insert v; False when it is already in the span."""
        v, combo = self.reduce(v, {label: ONE} if self.track else None)
        if not v:
            return False
        k = min(v)
        inv = 1 / v[k]
        self.rows[k] = {i: x * inv for i, x in v.items()}
        if self.track:
            self.combos[k] = {i: x * inv for i, x in combo.items()}
        return True

    def express(self, v: Mapping[int, object]) -> dict | None:
        """Coefficients of v in the tracked inputs, or None if v is not in the span."""
        rest, combo = self.reduce(v)
        if rest:
            return None
        return {i: -x for i, x in combo.items()}


def _as_sparse(v) -> dict:
    if isinstance(v, Mapping):
        return {i: c for i, c in v.items() if c}
    return {i: c for i, c in enumerate(v) if c}


def sparse_columns(ncols: int, entries: Mapping[tuple[int, int], object]) -> list[dict]:
    cols: list[dict] = [{} for _ in range(ncols)]
    for (i, j), v in entries.items():
        if v:
            cols[j][i] = to_fmpq(v)
    return cols


def sparse_nullspace(ncols: int, entries: Mapping[tuple[int, int], object]) -> list[list]:
    """Right kernel of a sparse matrix; same basis as ``nullspace`` on the dense matrix."""
    ech = SparseEchelon(track=True)
    out = []
    for j, col in enumerate(sparse_columns(ncols, entries)):
        rest, combo = ech.reduce(col, {j: ONE})
        if rest:
            ech.add(col, j)
            continue
        v = [ZERO] * ncols
        for i, x in combo.items():
            v[i] = x
        out.append(v)
    return out


class Quotient:
    """A subquotient ``Z / B`` of ``Q^dim`` with a fixed basis of representatives.

    ``cycles`` spans Z, ``bounds`` spans B (B inside Z).  ``reps`` are the chosen
    representatives and ``coords`` expresses any element of Z in that basis.
    Vectors may be dense lists or sparse dicts.
    """

    def __init__(self, dim: int, cycles: Sequence, bounds: Sequence):
        self.dim = dim
        ech = SparseEchelon(track=True)
        nb = 0
        for b in bounds:
            if ech.add(_as_sparse(b), ("b", nb)):
                nb += 1
        self.reps = []
        for c in cycles:
            sc = _as_sparse(c)
            if ech.add(sc, ("r", len(self.reps))):
                v = [ZERO] * dim
                for i, x in sc.items():
                    v[i] = to_fmpq(x)
                self.reps.append(v)
        self._ech = ech

    def __len__(self) -> int:
        return len(self.reps)

    def coords(self, z: Sequence[object]) -> list:
        h = len(self.reps)
        if h == 0:
            return []
        combo = self._ech.express(_as_sparse(z))
        if combo is None:
            raise ValueError("vector is not a cycle of this subquotient")
        out = [ZERO] * h
        for (kind, i), x in combo.items():
            if kind == "r":
                out[i] = x
        return out


def mat_vec(m: fmpq_mat, v: Sequence[object]) -> list:
    out = []
    for i in range(m.nrows()):
        s = ZERO
        for j in range(m.ncols()):
            e = m[i, j]
            if e != 0 and v[j]:
                s += e * v[j]
        out.append(s)
    return out


def is_zero_vec(v: Iterable) -> bool:
    return all(x == 0 for x in v)
