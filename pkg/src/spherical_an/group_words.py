"""Words in <B, Pic, flip, shift>: rewriting, relations, K-matrices and Phi_0."""

from __future__ import annotations

from dataclasses import dataclass, field

import flint

from . import derived_objects as do
from .chain_core import (
    ChainConfig,
    KClass,
    PicElement,
    SubchainLineBundle,
    dualizing_sheaf,
    euler_form,
    k_class,
)
from .twist_engine import apply_word_tw
from .words import Flip, Shift, T, Tensor, Twist, TwistWord, parse_word  # noqa: F401  (re-exported)

# ---------------------------------------------------------------- K-theory


def letter_k_matrix(letter, n: int) -> flint.fmpz_mat:
    """Action on K_Z(X) in the basis ([O_{C_1}(-1)], .., [O_{C_n}(-1)], [O_x]); columns are images."""
    dim = n + 1
    basis = [KClass.curve(n, i) for i in range(1, n + 1)] + [KClass.point(n)]
    cols = [_k_image(letter, b, n) for b in basis]
    return flint.fmpz_mat([[cols[j].as_vector()[i] for j in range(dim)] for i in range(dim)])


def _k_image(letter, x: KClass, n: int) -> KClass:
    if isinstance(letter, Twist):
        s = k_class(letter.sigma, n)
        return x - euler_form(s, x) * s
    if isinstance(letter, Tensor):
        # [O_{C_i}(-1)] -> [O_{C_i}(-1 + d_i)]
        shift = sum(c * d for c, d in zip(x.curve_mult, letter.pic.degrees))
        return KClass(x.curve_mult, x.point_mult + shift)
    if isinstance(letter, Flip):
        return KClass(tuple(reversed(x.curve_mult)), x.point_mult)
    if isinstance(letter, Shift):
        return x if letter.k % 2 == 0 else -x
    raise TypeError(f"unknown letter {letter!r}")


def k_matrix(w: TwistWord) -> flint.fmpz_mat:
    n = w.n
    m = flint.fmpz_mat([[1 if i == j else 0 for j in range(n + 1)] for i in range(n + 1)])
    for letter in w.letters:
        m = letter_k_matrix(letter, n) * m
    return m


def k_apply(w: TwistWord, x: KClass) -> KClass:
    v = k_matrix(w) * flint.fmpz_mat([[c] for c in x.as_vector()])
    vals = [int(v[i, 0]) for i in range(w.n + 1)]
    return KClass(tuple(vals[:-1]), vals[-1])


def matrix_order(m: flint.fmpz_mat, bound: int = 1000) -> int | None:
    ident = flint.fmpz_mat([[1 if i == j else 0 for j in range(m.ncols())] for i in range(m.nrows())])
    p = m
    for k in range(1, bound + 1):
        if p == ident:
            return k
        p = p * m
    return None


# ---------------------------------------------------------------- distinguished words


def phi0(cfg: ChainConfig | int) -> TwistWord:
    """Tensor by O_X(0,..,0,1), then T_{O_{C_n}(-1)}, .., T_{O_{C_1}(-1)}."""
    n = cfg.n if isinstance(cfg, ChainConfig) else cfg
    pic = PicElement((0,) * (n - 1) + (1,))
    return TwistWord(n, (Tensor(pic),) + tuple(T(l, -1) for l in range(n, 0, -1)))


def alpha_objects(n: int) -> list[do.DerivedObject]:
    """alpha_0 = omega_Z[1] and alpha_l = O_{C_l}(-1); these are the simples S_0, .., S_n."""
    out = [do.DerivedObject.make(n, {-1: [dualizing_sheaf(ChainConfig(n))]})]
    out += [do.sheaf(n, SubchainLineBundle.curve(l, -1)) for l in range(1, n + 1)]
    return out


def curve_tensor_word(n: int, l: int, a: int = 0) -> TwistWord:
    """T(l,a-1) T(l,a): tensoring by O_X(C_l) (the twists are applied left to right)."""
    return TwistWord(n, (T(l, a), T(l, a - 1)))


def default_test_set(n: int) -> list[do.DerivedObject]:
    objs = [do.sheaf(n, SubchainLineBundle.curve(i, -1)) for i in range(1, n + 1)]
    objs.append(do.sheaf(n, dualizing_sheaf(ChainConfig(n))))
    objs += [do.sheaf(n, SubchainLineBundle.curve(i, 0)) for i in range(1, n + 1)]
    objs += [do.sheaf(n, SubchainLineBundle(i, i + 1, (0, -1))) for i in range(1, n)]
    return objs


# ---------------------------------------------------------------- rewriting


def _curve_tensor_letters(l: int, k: int) -> list:
    """(x) O_X(k C_l) as twists: O_X(C_l) = T_{O(-2)} o T_{O(-1)}."""
    one = [T(l, -1), T(l, -2)]
    inv = [T(l, -2, True), T(l, -1, True)]
    return (one * k) if k >= 0 else (inv * (-k))


def _omega_letters(n: int, s: int, t: int) -> list:
    """Twist along the dualizing sheaf of C_s u .. u C_t through T(l,-1) and T_{omega_Z}."""
    if (s, t) == (1, n):
        return [Twist(dualizing_sheaf(ChainConfig(n)))]
    if s > 1:
        inner = _omega_letters(n, s - 1, t)
        # T_{omega_{[s,t]}} = T'_{s-1} o T_{omega_{[s-1,t]}} o T_{s-1}
        return [T(s - 1, -1)] + inner + [T(s - 1, -1, True)]
    inner = _omega_letters(n, s, t + 1)
    return [T(t + 1, -1)] + inner + [T(t + 1, -1, True)]


def _invert(letters: list) -> list:
    return [x.inv() for x in reversed(letters)]


def rewrite_to_B(letter, n: int) -> TwistWord:
    """A word over T(l,-1)^{+-1} and the omega_Z twist^{+-1} equal to ``letter`` as a functor.

    Single-curve letters T(l,a) are conjugated by (x) O_X(k C_l) onto a = -1 or -2,
    and T(l,-2) is the twist along the dualizing sheaf of C_l, which is peeled down
    from omega_Z one curve at a time.
    """
    omega = dualizing_sheaf(ChainConfig(n))
    if not isinstance(letter, Twist):
        raise ValueError(f"rewrite_to_B takes a twist letter, got {letter}")
    sigma = letter.sigma
    if sigma == omega:
        core = [Twist(omega)]
    elif sigma.length != 1:
        raise ValueError(f"rewrite_to_B handles single-curve twists and the omega_Z twist, got {letter}")
    else:
        l, a = sigma.s, sigma.degrees[0]
        base = -1 if a % 2 else -2
        # O_X(k C_l) has degree -2k on C_l
        k = (base - a) // 2
        conj = _curve_tensor_letters(l, k)
        # T_{sigma (x) L} = (x)L o T_sigma o (x)L^{-1}: the word applies L^{-1} first
        core = _invert(conj) + [T(l, base)] + conj
    if letter.inverse:
        core = _invert(core)
    return TwistWord(n, tuple(_expand_minus_two(core, n)))


def _expand_minus_two(letters: list, n: int) -> list:
    out = []
    for x in letters:
        if isinstance(x, Twist) and x.sigma.length == 1 and x.sigma.degrees[0] == -2:
            inner = _omega_letters(n, x.sigma.s, x.sigma.s)
            out += _invert(inner) if x.inverse else inner
        else:
            out.append(x)
    return out


def is_B_letter(letter) -> bool:
    return isinstance(letter, Twist)


# ---------------------------------------------------------------- normal-form moves


@dataclass(frozen=True)
class NormalForm:
    """Phi = Psi_B o (x)L o flip^f o [shift]; as a word: shift, flip, L, then Psi_B."""

    b_word: TwistWord
    pic: PicElement
    flip: bool
    shift: int

    def as_word(self) -> TwistWord:
        n = self.b_word.n
        head = []
        if self.shift:
            head.append(Shift(self.shift))
        if self.flip:
            head.append(Flip())
        if not self.pic.is_trivial():
            head.append(Tensor(self.pic))
        return TwistWord(n, tuple(head) + self.b_word.letters)

    def __str__(self) -> str:
        return (f"B: {self.b_word or '(empty)'}; L: {self.pic.degrees}; "
                f"flip: {'yes' if self.flip else 'no'}; shift: {self.shift}")


def push_to_front(w: TwistWord) -> NormalForm:
    """Move shifts, the flip and tensors to the front by conjugating the twists.

    Uses  T_s . (x)L = (x)L . T_{s (x) L}  and  T_s . flip = flip . T_{flip(s)}  (letters
    read left to right), together with  L . flip = flip . L^flip.
    """
    n = w.n
    shift, flipped, pic = 0, False, PicElement((0,) * n)
    twists: list[Twist] = []
    for x in w.letters:
        if isinstance(x, Twist):
            twists.append(x)
        elif isinstance(x, Shift):
            shift += x.k
        elif isinstance(x, Tensor):
            twists = [Twist(t.sigma.twisted(x.pic), t.inverse) for t in twists]
            pic = pic + x.pic
        elif isinstance(x, Flip):
            twists = [Twist(t.sigma.flipped(n), t.inverse) for t in twists]
            pic = PicElement(tuple(reversed(pic.degrees)))
            flipped = not flipped
    return NormalForm(TwistWord(n, tuple(twists)), pic, flipped, shift)


# ---------------------------------------------------------------- relations


@dataclass
class RelationReport:
    level: str
    passed: bool
    rows: list = field(default_factory=list)  # (label, verdict)
    witness: object = None

    def __bool__(self) -> bool:
        return self.passed


def check_relation(w1: TwistWord, w2: TwistWord, level: str = "objects", test_set=None) -> RelationReport:
    """Compare two words on K_Z(X) or on a finite test set of objects.

    A pass at the objects level is evidence for an isomorphism of functors, not a proof.
    """
    if w1.n != w2.n:
        raise ValueError("words over different chains")
    n = w1.n
    if level == "K":
        m1, m2 = k_matrix(w1), k_matrix(w2)
        rows = []
        witness = None
        labels = [f"[O_C{i}(-1)]" for i in range(1, n + 1)] + ["[O_x]"]
        for j, lab in enumerate(labels):
            same = all(m1[i, j] == m2[i, j] for i in range(n + 1))
            rows.append((lab, same))
            if not same and witness is None:
                witness = lab
        return RelationReport("K", witness is None, rows, witness)
    if level != "objects":
        raise ValueError("level must be 'K' or 'objects'")
    objs = test_set if test_set is not None else default_test_set(n)
    rows = []
    witness = None
    for obj in objs:
        same = images_agree(w1, w2, obj)
        rows.append((str(obj), same))
        if not same and witness is None:
            witness = obj
    return RelationReport("objects", witness is None, rows, witness)


def images_agree(w1: TwistWord, w2: TwistWord, obj: do.DerivedObject) -> bool:
    """w1(obj) = w2(obj), tested as w2^{-1}(w1(obj)) = obj so the comparison stays small."""
    x = do.reconstruct(obj)
    return do.tw_isomorphic(apply_word_tw(w1 + w2.inverse(), x), x)


def braid_words(n: int, i: int) -> tuple[TwistWord, TwistWord]:
    a, b = T(i, -1), T(i + 1, -1)
    return TwistWord(n, (a, b, a)), TwistWord(n, (b, a, b))


def commute_words(n: int, i: int, j: int) -> tuple[TwistWord, TwistWord]:
    a, b = T(i, -1), T(j, -1)
    return TwistWord(n, (a, b)), TwistWord(n, (b, a))


def conjugate(phi: TwistWord, sigma: do.DerivedObject) -> TwistWord:
    """A word for T_{phi(sigma)}: Psi, then T_{O_{C_b}(a)}, then Psi^{-1}, where Psi(phi(sigma)) = O_{C_b}(a)[i]."""
    from .normalizer import reduce_spherical

    target = do.decode(apply_word_tw(phi, do.reconstruct(sigma)))
    trace = reduce_spherical(target)
    ((_, (r,)),) = trace.result.profile
    psi = trace.word
    return psi + TwistWord(phi.n, (Twist(r),)) + psi.inverse()
