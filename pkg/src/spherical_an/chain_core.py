"""Chain combinatorics for Z = C_1 u ... u C_n: Cartan data, K-classes, Pic.

K_Z(X) is written in the basis ([O_{C_1}(-1)], ..., [O_{C_n}(-1)], [O_x]).
Pic X is identified with Z^n through the degrees on the curves.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import flint


class ChainError(ValueError):
    """Invalid chain data (indices out of range, mismatched n, ...)."""


@dataclass(frozen=True)
class ChainConfig:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ChainError(f"n must be a positive integer, got {self.n!r}")

    @property
    def curves(self) -> range:
        return range(1, self.n + 1)

    @property
    def nodes(self) -> range:
        # node i joins C_i and C_{i+1}
        return range(1, self.n)

    def check_curve(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise ChainError(f"curve index {i} outside 1..{self.n}")


@dataclass(frozen=True, order=True)
class SubchainLineBundle:
    """O_{C_s u ... u C_t}(a_s, ..., a_t)."""

    s: int
    t: int
    degrees: tuple

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(a) for a in self.degrees))
        if self.s < 1 or self.t < self.s:
            raise ChainError(f"bad support [{self.s},{self.t}]")
        if len(self.degrees) != self.t - self.s + 1:
            raise ChainError("degree list does not match the support")

    @classmethod
    def on(cls, s: int, t: int, *degrees: int) -> "SubchainLineBundle":
        return cls(s, t, tuple(degrees))

    @classmethod
    def curve(cls, i: int, a: int) -> "SubchainLineBundle":
        return cls(i, i, (a,))

    @property
    def length(self) -> int:
        return self.t - self.s + 1

    @property
    def support(self) -> range:
        return range(self.s, self.t + 1)

    def contains(self, i: int) -> bool:
        return self.s <= i <= self.t

    def deg(self, i: int) -> int:
        if not self.contains(i):
            raise ChainError(f"C_{i} is not in the support of {self}")
        return self.degrees[i - self.s]

    def fits(self, n: int) -> bool:
        return self.t <= n

    def twisted(self, pic: "PicElement") -> "SubchainLineBundle":
        return SubchainLineBundle(self.s, self.t, tuple(a + pic.degrees[i - 1] for i, a in zip(self.support, self.degrees)))

    def flipped(self, n: int) -> "SubchainLineBundle":
        return SubchainLineBundle(n + 1 - self.t, n + 1 - self.s, tuple(reversed(self.degrees)))

    def __str__(self) -> str:
        if self.s == self.t:
            return f"O_C{self.s}({self.degrees[0]})"
        return f"O_C{self.s}..C{self.t}({','.join(map(str, self.degrees))})"


@dataclass(frozen=True)
class KClass:
    curve_mult: tuple
    point_mult: int

    def __post_init__(self):
        object.__setattr__(self, "curve_mult", tuple(int(c) for c in self.curve_mult))

    @property
    def n(self) -> int:
        return len(self.curve_mult)

    @classmethod
    def zero(cls, n: int) -> "KClass":
        return cls((0,) * n, 0)

    @classmethod
    def point(cls, n: int) -> "KClass":
        return cls((0,) * n, 1)

    @classmethod
    def curve(cls, n: int, i: int) -> "KClass":
        return cls(tuple(1 if j == i else 0 for j in range(1, n + 1)), 0)

    def _same(self, other: "KClass") -> None:
        if self.n != other.n:
            raise ChainError("K-classes over different chains")

    def __add__(self, other: "KClass") -> "KClass":
        self._same(other)
        return KClass(tuple(a + b for a, b in zip(self.curve_mult, other.curve_mult)), self.point_mult + other.point_mult)

    def __neg__(self) -> "KClass":
        return KClass(tuple(-a for a in self.curve_mult), -self.point_mult)

    def __sub__(self, other: "KClass") -> "KClass":
        return self + (-other)

    def __rmul__(self, k: int) -> "KClass":
        return KClass(tuple(k * a for a in self.curve_mult), k * self.point_mult)

    def as_vector(self) -> tuple:
        return self.curve_mult + (self.point_mult,)


@dataclass(frozen=True)
class PicElement:
    degrees: tuple

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))

    @property
    def n(self) -> int:
        return len(self.degrees)

    def __add__(self, other: "PicElement") -> "PicElement":
        if self.n != other.n:
            raise ChainError("Pic elements over different chains")
        return PicElement(tuple(a + b for a, b in zip(self.degrees, other.degrees)))

    def __neg__(self) -> "PicElement":
        return PicElement(tuple(-a for a in self.degrees))

    def __sub__(self, other: "PicElement") -> "PicElement":
        return self + (-other)

    def is_trivial(self) -> bool:
        return not any(self.degrees)


def cartan_pairing(cfg: ChainConfig, i: int, j: int) -> int:
    """-C_i.C_j: the A_n Cartan matrix entry."""
    cfg.check_curve(i)
    cfg.check_curve(j)
    if i == j:
        return 2
    return -1 if abs(i - j) == 1 else 0


@lru_cache(maxsize=None)
def cartan_matrix(n: int) -> tuple:
    cfg = ChainConfig(n)
    return tuple(tuple(cartan_pairing(cfg, i, j) for j in cfg.curves) for i in cfg.curves)


def euler_form(x: KClass, y: KClass) -> int:
    """chi(x, y); point classes pair to zero."""
    x._same(y)
    c = cartan_matrix(x.n)
    return sum(a * c[i][j] * b for i, a in enumerate(x.curve_mult) if a for j, b in enumerate(y.curve_mult) if b)


def k_class(r: SubchainLineBundle, n: int) -> KClass:
    if not r.fits(n):
        raise ChainError(f"{r} does not fit on a chain of length {n}")
    return KClass(tuple(1 if r.contains(i) else 0 for i in range(1, n + 1)), sum(r.degrees) + 1)


def twist_k_action(sigma: KClass, x: KClass) -> KClass:
    """x - chi(sigma, x) sigma, the reflection in a spherical class."""
    if euler_form(sigma, sigma) != 2:
        raise ChainError("twist class must have square length 2")
    return x - euler_form(sigma, x) * sigma


def curve_divisor(n: int, i: int) -> PicElement:
    """O_X(C_i): degrees C_i.C_l."""
    cfg = ChainConfig(n)
    return PicElement(tuple(-cartan_pairing(cfg, i, l) for l in cfg.curves))


def root_lattice_member(pic: PicElement) -> tuple[bool, tuple | None]:
    """Whether pic lies in <O_X(C_1), ..., O_X(C_n)>, with coefficients."""
    n = pic.n
    cm = flint.fmpq_mat([[-v for v in row] for row in cartan_matrix(n)])
    sol = cm.solve(flint.fmpq_mat([[d] for d in pic.degrees]))
    coeffs = [sol[i, 0] for i in range(n)]
    if all(c.q == 1 for c in coeffs):
        return True, tuple(int(c.p) for c in coeffs)
    return False, None


def weight_mod_root(pic: PicElement) -> int:
    """Class of pic in Pic X / (B n Pic X) = Z/(n+1), normalised so that O_X(0,..,0,1) -> n."""
    n = pic.n
    return sum(k * d for k, d in enumerate(pic.degrees, start=1)) % (n + 1)


def smith_invariants(n: int) -> tuple:
    """Invariant factors of the Cartan matrix (an independent handle on the quotient)."""
    snf = flint.fmpz_mat([list(r) for r in cartan_matrix(n)]).snf()
    return tuple(int(snf[i, i]) for i in range(n))


def dualizing_sheaf(cfg: ChainConfig) -> SubchainLineBundle:
    n = cfg.n
    if n == 1:
        return SubchainLineBundle.curve(1, -2)
    return SubchainLineBundle(1, n, (-1,) + (0,) * (n - 2) + (-1,))


def sigma_bundles(n: int, bound: int):
    """All subchain line bundles with |degrees| <= bound, in a fixed order."""
    from itertools import product

    for s in range(1, n + 1):
        for t in range(s, n + 1):
            for degs in product(range(-bound, bound + 1), repeat=t - s + 1):
                yield SubchainLineBundle(s, t, degs)
