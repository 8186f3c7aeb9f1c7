"""Reduction of spherical objects, of pairs, and of autoequivalences given as words.

Every reduction step is a short word of twists chosen from the case analysis of
the reduction lemmas; a step is only accepted after replaying it and seeing l
drop.  When the case analysis offers nothing that decreases l (which the lemmas
rule out), a bounded search over nearby twists is tried and the step is tagged
"search" so that it shows up in the trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from . import derived_objects as do
from . import twisted as tw
from .chain_core import KClass, PicElement, SubchainLineBundle
from .group_words import NormalForm, default_test_set, images_agree, k_matrix, push_to_front
from .realize import point_object, sheaf_object
from .twist_engine import apply_letter_tw, apply_word, apply_word_tw
from .words import Flip, Shift, T, Tensor, Twist, TwistWord


class NotSpherical(ValueError):
    pass


class HypothesisError(ValueError):
    """The support pattern required by a chooser is not present."""


class NoProgress(RuntimeError):
    """No candidate decreased l; this contradicts the reduction lemmas."""


class PreconditionError(ValueError):
    pass


class CertificationError(RuntimeError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


# ---------------------------------------------------------------- l from point homs


def l_vector_tw(x: tw.Tw) -> tuple:
    """Per-curve generic length: sum_k dim Hom^k(x, O_y) = 2 sum_p rank_{C_i} H^p."""
    out = []
    for i in range(1, x.n + 1):
        total = sum(tw.hom_dims(x, point_object(x.n, i)).values())
        out.append(total // 2)
    return tuple(out)


def l_tw(x: tw.Tw) -> int:
    return sum(l_vector_tw(x))


# ---------------------------------------------------------------- traces


@dataclass(frozen=True)
class Step:
    letters: tuple
    l_before: int
    l_after: int
    tag: str

    def __str__(self) -> str:
        word = " ".join(map(str, self.letters)) or "-"
        return f"{word:40s} {self.tag:12s} l: {self.l_before} -> {self.l_after}"


@dataclass
class ReductionTrace:
    start: do.DerivedObject
    steps: list = field(default_factory=list)
    result: do.DerivedObject | None = None
    word: TwistWord | None = None

    def report(self) -> str:
        lines = [f"start: {self.start}".replace("\n", "; ")]
        lines += [f"  {s}" for s in self.steps]
        lines.append(f"result: {self.result}".replace("\n", "; "))
        return "\n".join(lines)

    def replay_ok(self) -> bool:
        return do.is_isomorphic(apply_word(self.word, self.start), self.result)


# ---------------------------------------------------------------- shared helpers


def _summands(d: do.DerivedObject) -> list[SubchainLineBundle]:
    return [r for _, rs in d.profile for r in rs]


def _max_deg(d: do.DerivedObject, c: int) -> int | None:
    degs = [r.deg(c) for r in _summands(d) if r.contains(c)]
    return max(degs) if degs else None


def _plateaus(lv: Sequence[int], lo: int, hi: int) -> list[tuple[int, int]]:
    """Maximal runs [s,t] inside [lo,hi] with l_{s-1} < l_s = .. = l_t > l_{t+1}."""
    ext = {i: lv[i - 1] for i in range(1, len(lv) + 1)}
    get = lambda i: ext.get(i, 0) if lo <= i <= hi else 0
    out = []
    i = lo
    while i <= hi:
        if get(i) == 0:
            i += 1
            continue
        j = i
        while j + 1 <= hi and get(j + 1) == get(i):
            j += 1
        if get(i - 1) < get(i) > get(j + 1):
            out.append((i, j))
        i = j + 1
    return out


def _try(x: tw.Tw, letters: Sequence, l0: int):
    y = x
    for letter in letters:
        y = apply_letter_tw(letter, y)
    return y, l_tw(y)


def _dedupe(cands):
    seen = set()
    out = []
    for letters, tag in cands:
        key = tuple(letters)
        if key and key not in seen:
            seen.add(key)
            out.append((key, tag))
    return out


# ---------------------------------------------------------------- Lemma A


def _lemma_a_pattern(d: do.DerivedObject, c: int):
    through, right, single, left = [], [], [], []
    for r in _summands(d):
        if not r.contains(c):
            continue
        if r.s < c < r.t:
            through.append(r)
        elif r.s == c and r.t > c:
            right.append(r)
        elif r.s == c == r.t:
            single.append(r)
        else:
            left.append(r)
    return through, right, single, left


def lemmaA_candidates(alpha: do.DerivedObject, c: int) -> list[tuple[tuple, str]]:
    """Ordered candidates from the case split at a single curve C = C_c."""
    through, right, single, left = _lemma_a_pattern(alpha, c)
    r2, r3, r4 = len(right), len(single), len(left)
    if not (r3 or r2 * r4):
        raise HypothesisError(f"no single-curve summand on C_{c} and not both sides present")
    if all(r.s == r.t == c for r in _summands(alpha)):
        raise HypothesisError("support is the single curve; use a1_reduce")
    m = _max_deg(alpha, c)
    primary = []
    if r2 and r4:
        a = right[0].deg(c)
        primary.append(((T(c, a - 1),), "lemma A"))
    else:
        side = right or left
        if all(r.deg(c) == m - 1 for r in single):
            up = sum(1 for r in side if r.deg(c) == m)
            down = sum(1 for r in side if r.deg(c) == m - 1)
            if up > down:
                primary.append(((T(c, m - 1),), "fundamental"))
            elif up < down:
                primary.append(((T(c, m - 2),), "fundamental"))
        else:
            primary.append(((T(c, m - 1),), "lemma A"))
    rest = [((T(c, m - 1),), "lemma A"), ((T(c, m - 2),), "lemma A")]
    return _dedupe(primary + rest)


def lemmaA_choose(alpha: do.DerivedObject, c: int, x: tw.Tw | None = None) -> tuple:
    x = do.reconstruct(alpha) if x is None else x
    l0 = l_tw(x)
    for letters, _ in lemmaA_candidates(alpha, c):
        if _try(x, letters, l0)[1] < l0:
            return letters
    raise NoProgress(f"Lemma A candidates at C_{c} do not decrease l")


# ---------------------------------------------------------------- Lemma B


def _middle_chain(s: int, t: int, m: dict, primed: bool) -> list:
    """T_{C_{s+1}}(-1) o .. o T_{C_{t-1}}(-1) o T_{C_t}(-2) (or the primed chain), as a word."""
    if primed:
        return [T(l, m[l] - 1, True) for l in range(t, s, -1)]
    if t == s + 1:
        return [T(t, m[t] - 2)]
    return [T(t, m[t] - 2)] + [T(l, m[l] - 1) for l in range(t - 1, s, -1)]


def _mirror_chain(s: int, t: int, m: dict, primed: bool) -> list:
    if primed:
        return [T(l, m[l] - 1, True) for l in range(s, t)]
    if t == s + 1:
        return [T(s, m[s] - 2)]
    return [T(s, m[s] - 2)] + [T(l, m[l] - 1) for l in range(s + 1, t)]


def lemmaB_candidates(alpha: do.DerivedObject, s: int, t: int) -> list[tuple[tuple, str]]:
    if s >= t:
        raise HypothesisError("Lemma B needs s < t")
    m = {l: _max_deg(alpha, l) for l in range(s, t + 1)}
    if any(v is None for v in m.values()):
        raise HypothesisError(f"[{s},{t}] is not inside the support")
    cands = []
    for c in (s, t):
        cands += [((T(c, m[c] - 1),), "lemma B"), ((T(c, m[c] - 2),), "lemma B")]
    # composites from the middle-curve argument, shortest windows first
    for width in range(1, t - s + 1):
        for a in range(s, t - width + 1):
            b = a + width
            for primed in (False, True):
                for last in (-1, -2):
                    cands.append((tuple(_middle_chain(a, b, m, primed) + [T(a, m[a] + last)]), "lemma B"))
                    cands.append((tuple(_mirror_chain(a, b, m, primed) + [T(b, m[b] + last)]), "lemma B"))
    return _dedupe(cands)


def lemmaB_choose(alpha: do.DerivedObject, s: int, t: int, x: tw.Tw | None = None) -> tuple:
    x = do.reconstruct(alpha) if x is None else x
    l0 = l_tw(x)
    for letters, _ in lemmaB_candidates(alpha, s, t):
        if _try(x, letters, l0)[1] < l0:
            return letters
    raise NoProgress(f"Lemma B candidates on [{s},{t}] do not decrease l")


# ---------------------------------------------------------------- search fallback


def _search_candidates(d: do.DerivedObject, curves: Iterable[int], depth: int = 2):
    curves = list(curves)
    singles = []
    for c in curves:
        m = _max_deg(d, c)
        if m is None:
            m = 0
        for a in range(m - 3, m + 2):
            singles.append(T(c, a))
            singles.append(T(c, a, True))
    out = [((x,), "search") for x in singles]
    if depth >= 2:
        out += [((x, y), "search") for x, y in product(singles, singles) if x != y.inv()]
    return out


# ---------------------------------------------------------------- spherical reduction


def a1_candidates(alpha: do.DerivedObject) -> list[tuple[tuple, str]]:
    curves = {r.s for r in _summands(alpha)} | {r.t for r in _summands(alpha)}
    if len(curves) != 1:
        raise HypothesisError("a1_reduce needs support on one curve")
    (c,) = curves
    a = _max_deg(alpha, c)
    return [((T(c, a - 1),), "A1"), ((T(c, a - 2),), "A1")]


def _step_candidates(d: do.DerivedObject, lo: int, hi: int) -> list:
    lv = d.l_vector()
    cands = []
    supp = [i for i in range(lo, hi + 1) if lv[i - 1]]
    if len({r.s for r in _summands(d)} | {r.t for r in _summands(d)}) == 1 and len(supp) == 1:
        return a1_candidates(d)
    for s, t in _plateaus(lv, lo, hi):
        try:
            cands += lemmaA_candidates(d, s) if s == t else lemmaB_candidates(d, s, t)
        except HypothesisError:
            continue
    return cands


def _reduce_step(x: tw.Tw, d: do.DerivedObject, lo: int, hi: int, keep=None):
    """One strictly l-decreasing step; ``keep(y)`` may veto candidates."""
    l0 = l_tw(x)
    tried = set()
    for stage in ("lemma", "search1", "search2"):
        if stage == "lemma":
            cands = _step_candidates(d, lo, hi)
        else:
            curves = [i for i in range(lo, hi + 1) if d.l_vector()[i - 1]]
            curves = sorted(set(curves) | {c for i in curves for c in (i - 1, i + 1) if lo <= c <= hi})
            cands = _search_candidates(d, curves, 1 if stage == "search1" else 2)
        for letters, tag in cands:
            if letters in tried:
                continue
            tried.add(letters)
            y, l1 = _try(x, letters, l0)
            if l1 < l0 and (keep is None or keep(letters, y)):
                return letters, tag, y, l1
    raise NoProgress(f"no twist decreases l = {l0}")


def reduce_spherical(alpha: do.DerivedObject, curves: tuple[int, int] | None = None,
                     check: bool = False) -> ReductionTrace:
    """Twist alpha down to O_{C_b}(a)[i].

    ``curves=(lo, hi)`` restricts every letter to twists along curves C_lo..C_hi.
    With ``check`` the sphericality test is rerun after every step.
    """
    n = alpha.n
    lo, hi = curves or (1, n)
    if check and not do.is_spherical(alpha):
        raise NotSpherical(str(alpha))
    trace = ReductionTrace(alpha)
    x = do.reconstruct(alpha)
    d = alpha
    letters_all: list = []
    l0 = d.l_value()
    if l0 == 0:
        raise NotSpherical("zero object")
    for _ in range(l0):
        if d.l_value() == 1:
            break
        letters, tag, y, l1 = _reduce_step(x, d, lo, hi)
        trace.steps.append(Step(letters, d.l_value(), l1, tag))
        letters_all += letters
        x = tw.minimize(y)
        d = do.decode(x)
        if d.l_value() != l1:
            raise RuntimeError("l from point homs disagrees with the decoded profile")
        if check and not do.is_spherical(d):
            raise NotSpherical(f"lost sphericality after {letters}")
    if d.l_value() != 1:
        raise NoProgress("reduction did not terminate within l steps")
    trace.result = d
    trace.word = TwistWord(n, tuple(letters_all))
    return trace


def a1_reduce(alpha: do.DerivedObject) -> ReductionTrace:
    a1_candidates(alpha)
    return reduce_spherical(alpha)


# ---------------------------------------------------------------- pairs


@dataclass
class PairTrace:
    alpha: do.DerivedObject
    beta: do.DerivedObject
    steps: list = field(default_factory=list)
    alpha_result: do.DerivedObject | None = None
    beta_result: do.DerivedObject | None = None
    word: TwistWord | None = None

    @property
    def curve(self) -> int:
        ((_, (r,)),) = self.alpha_result.profile
        return r.s

    def report(self) -> str:
        lines = [f"alpha: {self.alpha}".replace("\n", "; "), f"beta: {self.beta}".replace("\n", "; ")]
        lines += [f"  {s}" for s in self.steps]
        lines.append(f"alpha -> {self.alpha_result}".replace("\n", "; "))
        lines.append(f"beta  -> {self.beta_result}".replace("\n", "; "))
        return "\n".join(lines)


def _single(d: do.DerivedObject):
    if len(d.profile) == 1 and len(d.profile[0][1]) == 1:
        p, (r,) = d.profile[0]
        return r, -p
    return None


def pair_conditions(alpha_x: tw.Tw, beta_x: tw.Tw) -> list[str]:
    """Violated conditions on (alpha, beta) = images of (O_{C_1}, O_{C_1}(-1))."""
    bad = []
    if tw.hom_dims(beta_x, alpha_x) != {0: 2}:
        bad.append("Hom(beta, alpha) is not C^2 in degree 0")
    diff = do.tw_k_class(alpha_x) - do.tw_k_class(beta_x)
    if diff not in (KClass.point(alpha_x.n), -KClass.point(alpha_x.n)):
        bad.append("[alpha] - [beta] is not a point class (c_1 mismatch)")
    return bad


def _pair_candidates(beta: do.DerivedObject, b: int, lo: int, hi: int) -> list:
    m = {l: _max_deg(beta, l) for l in range(lo, hi + 1)}
    m = {l: (v if v is not None else 0) for l, v in m.items()}
    cands = []
    # summands away from C_b: reduce them with letters on their own support
    for r in _summands(beta):
        if r.t < b - 1 or r.s > b + 1:
            s0, t0 = max(r.s, lo), min(r.t, hi)
            if s0 <= t0:
                for c in range(s0, t0 + 1):
                    cands += [((T(c, m[c] - 1),), "remote"), ((T(c, m[c] - 2),), "remote")]
                try:
                    cands += _step_candidates(beta, s0, t0)
                except HypothesisError:
                    pass
    cands += [((T(b, m[b] - 1),), "curve b"), ((T(b, m[b] - 2),), "curve b")]
    for c in (b + 1, b - 1):
        if not lo <= c <= hi:
            continue
        s, t = min(b, c), max(b, c)
        deg = lambda i, k: m[i] + k
        for kc, kb in ((-2, 0), (-1, 0), (-2, -1), (-1, -1), (-2, -2), (-1, 1)):
            cands.append(((T(c, deg(c, kc)), T(b, deg(b, kb))), "neighbour"))
        sub = lambda kb, kc: SubchainLineBundle(s, t, (deg(s, kb if s == b else kc), deg(t, kb if t == b else kc)))
        cands += [((Twist(sub(-1, -2)),), "subchain"), ((Twist(sub(0, 0), True),), "subchain"),
                  ((Twist(sub(-1, -1)),), "subchain")]
        for kc, kb in ((-2, -1), (-1, -2)):
            cands.append(((Twist(sub(-1, -1)), T(c, deg(c, kc)), T(b, deg(b, kb))), "subchain"))
            cands.append(((Twist(sub(0, 0), True), T(c, deg(c, kc)), T(b, deg(b, kb))), "subchain"))
    return _dedupe(cands)


def _pair_normalized(sa, sb) -> bool:
    (ra, ia), (rb, ib) = sa, sb
    return ra.support == rb.support and ra.length == 1 and ia == ib and ra.degrees[0] - rb.degrees[0] == 1


def _finish_a1(ax: tw.Tw, bx: tw.Tw, sa, sb):
    (ra, _), (rb, _) = sa, sb
    if ra.support != rb.support or ra.length != 1:
        raise CertificationError(f"endpoints {ra} / {rb} lie on different curves")
    b = ra.s
    degs = (ra.degrees[0], rb.degrees[0])
    singles = [T(b, c, inv) for c in range(min(degs) - 3, max(degs) + 3) for inv in (False, True)]
    for letters in [(x,) for x in singles] + [(x, y) for x in singles for y in singles]:
        ya, la_ = _try(ax, letters, 1)
        yb, lb = _try(bx, letters, 1)
        if la_ != 1 or lb != 1:
            continue
        ya, yb = tw.minimize(ya), tw.minimize(yb)
        na, nb = _single(do.decode(ya)), _single(do.decode(yb))
        if na and nb and _pair_normalized(na, nb):
            return letters, ya, yb
    raise NoProgress(f"no twist along C_{b} normalizes the endpoints {ra} / {rb}")


def reduce_pair(alpha: do.DerivedObject, beta: do.DerivedObject, curves: tuple[int, int] | None = None) -> PairTrace:
    """Normalize (alpha, beta) to (O_{C_b}(a)[i], O_{C_b}(a-1)[i])."""
    n = alpha.n
    lo, hi = curves or (1, n)
    ax, bx = do.reconstruct(alpha), do.reconstruct(beta)
    bad = pair_conditions(ax, bx)
    if bad:
        raise PreconditionError("; ".join(bad))
    trace = PairTrace(alpha, beta)
    first = reduce_spherical(alpha, (lo, hi))
    letters_all = list(first.word.letters)
    for st in first.steps:
        trace.steps.append(Step(st.letters, st.l_before, st.l_after, "alpha:" + st.tag))
    ax = do.reconstruct(first.result)
    bx = tw.minimize(apply_word_tw(first.word, bx))
    bd = do.decode(bx)
    ((_, (ra,)),) = first.result.profile
    b = ra.s
    keep = lambda letters, y: True
    for _ in range(bd.l_value() + 1):
        if bd.l_value() == 1:
            break
        l0 = bd.l_value()
        found = None
        stages = [_pair_candidates(bd, b, lo, hi)]
        near = [c for c in range(b - 1, b + 2) if lo <= c <= hi]
        supp = [i for i in range(lo, hi + 1) if bd.l_vector()[i - 1]]
        stages.append(_search_candidates(bd, sorted(set(near) | set(supp)), 1))
        stages.append(_search_candidates(bd, near, 2))
        tried = set()
        for cands in stages:
            for letters, tag in cands:
                if letters in tried:
                    continue
                tried.add(letters)
                ya, la_ = _try(ax, letters, 1)
                if la_ != 1:
                    continue
                yb, lb = _try(bx, letters, l0)
                if lb < l0:
                    found = (letters, tag, ya, yb, lb)
                    break
            if found:
                break
        if not found:
            raise NoProgress(f"no twist keeps l(alpha) = 1 and lowers l(beta) = {l0}")
        letters, tag, ya, yb, lb = found
        trace.steps.append(Step(letters, l0, lb, "beta:" + tag))
        letters_all += letters
        ax, bx = tw.minimize(ya), tw.minimize(yb)
        ad = do.decode(ax)
        ((_, (ra,)),) = ad.profile
        b = ra.s
        bd = do.decode(bx)
    ad, bd = do.decode(ax), do.decode(bx)
    sa, sb = _single(ad), _single(bd)
    if not (sa and sb):
        raise NoProgress("pair reduction stopped before both images were single sheaves")
    if not _pair_normalized(sa, sb):
        # both on C_b with l = 1 but the wrong degree gap or shift: one more twist along C_b
        letters, ax, bx = _finish_a1(ax, bx, sa, sb)
        trace.steps.append(Step(letters, 1, 1, "beta:A1"))
        letters_all += letters
        ad, bd = do.decode(ax), do.decode(bx)
        sa, sb = _single(ad), _single(bd)
    if not (sa and sb and _pair_normalized(sa, sb)):
        raise CertificationError(f"endpoints {ad} / {bd} are not O_C(a)[i], O_C(a-1)[i]")
    trace.alpha_result, trace.beta_result = ad, bd
    trace.word = TwistWord(n, tuple(letters_all))
    return trace


# ---------------------------------------------------------------- autoequivalences


@dataclass
class FactorResult:
    word: TwistWord
    normal_form: NormalForm
    psi: TwistWord
    landing: list = field(default_factory=list)  # landing curve of each pair reduction
    traces: list = field(default_factory=list)

    def report(self) -> str:
        lines = [f"input: {self.word}", f"normal form: {self.normal_form}"]
        lines.append(f"landing curves: {self.landing}")
        return "\n".join(lines)


def _curve_sheaf(n: int, i: int, a: int) -> do.DerivedObject:
    return do.sheaf(n, SubchainLineBundle.curve(i, a))


def normalize_autoequivalence(w: TwistWord, certify: bool = True, test_set=None) -> FactorResult:
    """Write w as (B-word) o (x)L o flip^f o [s] and certify it on objects and K-theory.

    For k = 1..n the images of O_{C_k}, O_{C_k}(-1) are pair-reduced with twists
    along C_k..C_n (all curves for k = 1); after the first round the flip is used
    if C_1 landed on C_n.  The composite then sends skyscrapers to skyscrapers and
    fixes every curve, so it is a line-bundle twist up to shift.
    """
    n = w.n
    psi: list = []
    res = FactorResult(w, None, None)
    for k in range(1, n + 1):
        lo = 1 if k == 1 else k
        cur = w + TwistWord(n, tuple(psi))
        a = do.decode(apply_word_tw(cur, do.reconstruct(_curve_sheaf(n, k, 0))))
        b = do.decode(apply_word_tw(cur, do.reconstruct(_curve_sheaf(n, k, -1))))
        pt = reduce_pair(a, b, (lo, n))
        res.traces.append(pt)
        res.landing.append(pt.curve)
        psi += pt.word.letters
        ra, ia = _single(pt.alpha_result)
        if ia:
            psi.append(Shift(-ia))
        if k == 1 and pt.curve == n and n > 1:
            psi.append(Flip())
        elif pt.curve != k:
            raise CertificationError(f"O_C{k} landed on C_{pt.curve}")
    total = w + TwistWord(n, tuple(psi))
    degs = []
    shifts = set()
    for i in range(1, n + 1):
        img = do.decode(apply_word_tw(total, do.reconstruct(_curve_sheaf(n, i, -1))))
        single = _single(img)
        if not single or single[0].support != range(i, i + 1):
            raise CertificationError(f"O_C{i}(-1) is not sent to a sheaf on C_{i}: {img}", img)
        degs.append(single[0].degrees[0] + 1)
        shifts.add(single[1])
    if len(shifts) != 1:
        raise CertificationError(f"inconsistent shifts {shifts}")
    (s,) = shifts
    pic = PicElement(tuple(degs))
    m = TwistWord(n, ((Shift(s),) if s else ()) + ((Tensor(pic),) if not pic.is_trivial() else ()))
    psi_w = TwistWord(n, tuple(psi))
    nf = push_to_front(m + psi_w.inverse())
    res.normal_form, res.psi = nf, psi_w
    if certify:
        certify_normal_form(w, nf, test_set)
    return res


def certify_normal_form(w: TwistWord, nf: NormalForm, test_set=None) -> None:
    word = nf.as_word()
    if k_matrix(word) != k_matrix(w):
        raise CertificationError("K-matrices differ")
    for obj in (test_set if test_set is not None else default_test_set(w.n)):
        if not images_agree(w, word, obj):
            raise CertificationError(f"normal form disagrees on {obj}", obj)
