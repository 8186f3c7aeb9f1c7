"""Seeded random words and spherical objects for the fuzz harnesses."""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import derived_objects as do
from . import twisted as tw
from .chain_core import PicElement, SubchainLineBundle
from .normalizer import l_tw
from .twist_engine import apply_letter_tw
from .words import Flip, Shift, T, Tensor, TwistWord


@dataclass(frozen=True)
class FuzzConfig:
    max_len: int = 6
    max_l: int = 30
    twist_degrees: tuple = (-3, 1)
    pic_bound: int = 1
    p_inverse: float = 0.4
    b_only: bool = False


def random_letter(n: int, rng: random.Random, cfg: FuzzConfig):
    lo, hi = cfg.twist_degrees
    u = rng.random()
    if cfg.b_only or u < 0.7:
        return T(rng.randint(1, n), rng.randint(lo, hi), rng.random() < cfg.p_inverse)
    if u < 0.82:
        return Tensor(PicElement(tuple(rng.randint(-cfg.pic_bound, cfg.pic_bound) for _ in range(n))))
    if u < 0.91:
        return Flip()
    return Shift(rng.randint(-2, 2))


def random_word(n: int, rng: random.Random, cfg: FuzzConfig = FuzzConfig()) -> TwistWord:
    return TwistWord(n, tuple(random_letter(n, rng, cfg) for _ in range(rng.randint(1, cfg.max_len))))


def bounded_image(w: TwistWord, x: tw.Tw, max_l: int) -> tw.Tw | None:
    """w(x), or None as soon as an intermediate image has l > max_l."""
    for letter in w.letters:
        x = apply_letter_tw(letter, x)
        if l_tw(x) > max_l:
            return None
    return x


def random_spherical(n: int, rng: random.Random, cfg: FuzzConfig = FuzzConfig(), tries: int = 200):
    """(word, seed sheaf, image) with every intermediate l at most cfg.max_l."""
    for _ in range(tries):
        w = random_word(n, rng, cfg)
        seed = SubchainLineBundle.curve(rng.randint(1, n), rng.randint(-2, 2))
        x = bounded_image(w, do.reconstruct(do.sheaf(n, seed)), cfg.max_l)
        if x is not None:
            return w, seed, do.decode(tw.minimize(x))
    raise RuntimeError("no word within the l bound; raise max_l")


def random_autoequivalence(n: int, rng: random.Random, cfg: FuzzConfig = FuzzConfig(), tries: int = 200) -> TwistWord:
    """A word whose images of O_{C_1}, O_{C_1}(-1) stay within the l bound."""
    for _ in range(tries):
        w = random_word(n, rng, cfg)
        ok = all(
            bounded_image(w, do.reconstruct(do.sheaf(n, SubchainLineBundle.curve(1, a))), cfg.max_l) is not None
            for a in (0, -1)
        )
        if ok:
            return w
    raise RuntimeError("no word within the l bound; raise max_l")
