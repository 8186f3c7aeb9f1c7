"""Letters and words in twists, line-bundle tensors, the chain flip and shifts.

Syntax (whitespace separated, applied left to right)::

    T(l,a)  T'(l,a)        twist / inverse twist along O_{C_l}(a)
    Ts(s,t;a_s,..,a_t)     twist along a subchain bundle (Ts' for the inverse)
    Tw  Tw'                twist along the dualizing sheaf of the whole chain
    L(d_1,..,d_n)          tensor with the line bundle of these degrees
    flip                   the automorphism reversing the chain
    shift(k)               the shift [k]
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .chain_core import ChainConfig, ChainError, PicElement, SubchainLineBundle, dualizing_sheaf


class WordSyntaxError(ValueError):
    pass


@dataclass(frozen=True)
class Twist:
    sigma: SubchainLineBundle
    inverse: bool = False

    def inv(self) -> "Twist":
        return Twist(self.sigma, not self.inverse)

    def __str__(self) -> str:
        p = "'" if self.inverse else ""
        s = self.sigma
        if s.s == s.t:
            return f"T{p}({s.s},{s.degrees[0]})"
        return f"Ts{p}({s.s},{s.t};{','.join(map(str, s.degrees))})"


@dataclass(frozen=True)
class Tensor:
    pic: PicElement

    def inv(self) -> "Tensor":
        return Tensor(-self.pic)

    def __str__(self) -> str:
        return f"L({','.join(map(str, self.pic.degrees))})"


@dataclass(frozen=True)
class Flip:
    def inv(self) -> "Flip":
        return self

    def __str__(self) -> str:
        return "flip"


@dataclass(frozen=True)
class Shift:
    k: int

    def inv(self) -> "Shift":
        return Shift(-self.k)

    def __str__(self) -> str:
        return f"shift({self.k})"


Letter = Twist | Tensor | Flip | Shift


@dataclass(frozen=True)
class TwistWord:
    n: int
    letters: tuple = ()

    def __post_init__(self):
        ChainConfig(self.n)
        object.__setattr__(self, "letters", tuple(self.letters))
        for x in self.letters:
            _check_letter(x, self.n)

    def __str__(self) -> str:
        return " ".join(map(str, self.letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __add__(self, other: "TwistWord") -> "TwistWord":
        if self.n != other.n:
            raise ChainError("words over different chains")
        return TwistWord(self.n, self.letters + other.letters)

    def __pow__(self, k: int) -> "TwistWord":
        if k < 0:
            return self.inverse() ** (-k)
        return TwistWord(self.n, self.letters * k)

    def inverse(self) -> "TwistWord":
        return TwistWord(self.n, tuple(x.inv() for x in reversed(self.letters)))

    @classmethod
    def of(cls, n: int, letters: Iterable) -> "TwistWord":
        return cls(n, tuple(letters))


def _check_letter(x, n: int) -> None:
    if isinstance(x, Twist):
        if not x.sigma.fits(n):
            raise ChainError(f"{x} does not fit on a chain of length {n}")
    elif isinstance(x, Tensor):
        if x.pic.n != n:
            raise ChainError(f"{x} needs {n} degrees")
    elif not isinstance(x, (Flip, Shift)):
        raise ChainError(f"unknown letter {x!r}")


def T(l: int, a: int, inverse: bool = False) -> Twist:
    return Twist(SubchainLineBundle.curve(l, a), inverse)


_TOKEN = re.compile(r"\s*(Ts'|Ts|Tw'|Tw|T'|T|L|flip|shift)\s*(\(([^)]*)\))?\s*")


def _ints(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise WordSyntaxError(f"expected integers in {text!r}") from exc


def parse_word(text: str, n: int) -> TwistWord:
    letters = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise WordSyntaxError(f"cannot parse word at {text[pos:]!r}")
        name, args = m.group(1), m.group(3)
        pos = m.end()
        try:
            if name in ("T", "T'"):
                vals = _ints(args or "")
                if len(vals) != 2:
                    raise WordSyntaxError(f"{name} takes (l,a)")
                letters.append(T(vals[0], vals[1], name == "T'"))
            elif name in ("Ts", "Ts'"):
                if not args or ";" not in args:
                    raise WordSyntaxError(f"{name} takes (s,t;a_s,..,a_t)")
                head, tail = args.split(";", 1)
                s, t = _ints(head)
                letters.append(Twist(SubchainLineBundle(s, t, tuple(_ints(tail))), name == "Ts'"))
            elif name in ("Tw", "Tw'"):
                if args is not None:
                    raise WordSyntaxError("Tw takes no arguments")
                letters.append(Twist(dualizing_sheaf(ChainConfig(n)), name == "Tw'"))
            elif name == "L":
                letters.append(Tensor(PicElement(tuple(_ints(args or "")))))
            elif name == "flip":
                if args is not None:
                    raise WordSyntaxError("flip takes no arguments")
                letters.append(Flip())
            else:
                vals = _ints(args or "")
                if len(vals) != 1:
                    raise WordSyntaxError("shift takes one integer")
                letters.append(Shift(vals[0]))
        except ChainError as exc:
            raise WordSyntaxError(str(exc)) from exc
    try:
        return TwistWord(n, tuple(letters))
    except ChainError as exc:
        raise WordSyntaxError(str(exc)) from exc
