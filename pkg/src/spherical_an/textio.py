"""Plain-text object format shared by the CLI and the test fixtures.

A document is a header line followed by ``key: value`` lines::

    spherical-an 1
    kind: object
    n: 2
    H -1: 1 1 -3
    H 0: 1 2 0 0 | 2 2 -1
    e 0 0 0: 1/2

Bundles are written ``s t a_s .. a_t`` and separated by ``|``; ``e p i j`` holds the
class coordinates of the block H^p[j] -> H^{p-1}[i] (rational numbers).  Linked sheaves
use ``curve i: degrees`` and ``link i L|M: rows`` with rows separated by ``;``.
Documents in one file are separated by a line holding ``---``.
"""

from __future__ import annotations

from fractions import Fraction

from . import derived_objects as do
from . import linalg as la
from .chain_core import KClass, PicElement, SubchainLineBundle
from .linked_sheaves import Link, LinkedSheaf

FORMAT_VERSION = 1
HEADER = f"spherical-an {FORMAT_VERSION}"


class FormatError(ValueError):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split()]
    except ValueError as exc:
        raise FormatError(f"expected integers, got {text!r}") from exc


def _rats(text: str) -> list[Fraction]:
    try:
        return [Fraction(t) for t in text.split()]
    except ValueError as exc:
        raise FormatError(f"expected rationals, got {text!r}") from exc


def _bundle(text: str) -> SubchainLineBundle:
    v = _ints(text)
    if len(v) < 3:
        raise FormatError(f"bundle needs 's t degrees', got {text!r}")
    return SubchainLineBundle(v[0], v[1], tuple(v[2:]))


def bundle_text(r: SubchainLineBundle) -> str:
    return " ".join(map(str, (r.s, r.t) + r.degrees))


def _rat_text(x) -> str:
    return str(la.to_fraction(x))


# ---------------------------------------------------------------- writing


def dump(kind: str, n: int, body: list[str]) -> str:
    return "\n".join([HEADER, f"kind: {kind}", f"n: {n}"] + body) + "\n"


def dump_object(d: do.DerivedObject) -> str:
    body = [f"H {p}: " + " | ".join(bundle_text(r) for r in rs) for p, rs in d.profile]
    for p, blocks in d.e_classes:
        for (i, j), vec in blocks:
            body.append(f"e {p} {i} {j}: " + " ".join(_rat_text(c) for c in vec))
    return dump("object", d.n, body)


def dump_linked(e: LinkedSheaf) -> str:
    body = [f"curve {i}: " + " ".join(map(str, ds)) for i, ds in enumerate(e.degrees, start=1)]
    for i, lk in enumerate(e.links, start=1):
        if lk.c:
            body.append(f"link {i} L: " + "; ".join(" ".join(_rat_text(x) for x in row) for row in lk.L))
            body.append(f"link {i} M: " + "; ".join(" ".join(_rat_text(x) for x in row) for row in lk.M))
    return dump("linked", e.n, body)


def dump_kclass(x: KClass) -> str:
    return dump("kclass", x.n, ["curves: " + " ".join(map(str, x.curve_mult)), f"point: {x.point_mult}"])


def dump_pic(p: PicElement) -> str:
    return dump("pic", p.n, ["degrees: " + " ".join(map(str, p.degrees))])


# ---------------------------------------------------------------- reading


def split_documents(text: str) -> list[str]:
    docs, cur = [], []
    for line in text.splitlines():
        if line.strip() == "---":
            docs.append("\n".join(cur))
            cur = []
        else:
            cur.append(line)
    docs.append("\n".join(cur))
    return [d for d in docs if d.strip()]


def _fields(text: str) -> tuple[str, int, list[tuple[str, str]]]:
    lines = [ln for ln in (x.strip() for x in text.splitlines()) if ln and not ln.startswith("#")]
    if not lines or lines[0].split()[:1] != ["spherical-an"]:
        raise FormatError(f"missing header line {HEADER!r}")
    version = lines[0].split()[1:]
    if version != [str(FORMAT_VERSION)]:
        raise FormatError(f"unsupported format version {' '.join(version) or '(none)'}")
    pairs = []
    for ln in lines[1:]:
        if ":" not in ln:
            raise FormatError(f"expected 'key: value', got {ln!r}")
        k, v = ln.split(":", 1)
        pairs.append((k.strip(), v.strip()))
    head = dict(pairs[:2])
    if "kind" not in head or "n" not in head:
        raise FormatError("documents start with 'kind:' and 'n:' lines")
    try:
        n = int(head["n"])
    except ValueError as exc:
        raise FormatError(f"bad chain length {head['n']!r}") from exc
    return head["kind"], n, pairs[2:]


def load(text: str):
    kind, n, pairs = _fields(text)
    if kind == "object":
        return _load_object(n, pairs)
    if kind == "linked":
        return _load_linked(n, pairs)
    if kind == "kclass":
        f = dict(pairs)
        return KClass(tuple(_ints(f.get("curves", ""))), int(f.get("point", "0")))
    if kind == "pic":
        return PicElement(tuple(_ints(dict(pairs).get("degrees", ""))))
    raise FormatError(f"unknown kind {kind!r}")


def load_all(text: str) -> list:
    return [load(d) for d in split_documents(text)]


def _load_object(n: int, pairs) -> do.DerivedObject:
    profile, es = {}, {}
    for k, v in pairs:
        key = k.split()
        if key[0] == "H" and len(key) == 2:
            profile[int(key[1])] = [_bundle(b) for b in v.split("|")]
        elif key[0] == "e" and len(key) == 4:
            p, i, j = map(int, key[1:])
            es.setdefault(p, {})[(i, j)] = _rats(v)
        else:
            raise FormatError(f"unknown object field {k!r}")
    return do.DerivedObject.make(n, profile, es)


def _matrix(text: str, ncols: int) -> tuple:
    rows = tuple(tuple(la.to_fmpq(x) for x in _rats(r)) for r in text.split(";"))
    if any(len(r) != ncols for r in rows):
        raise FormatError(f"link row length differs from the rank {ncols}")
    return rows


def _load_linked(n: int, pairs) -> LinkedSheaf:
    degrees = [()] * n
    raw = {}
    for k, v in pairs:
        key = k.split()
        if key[0] == "curve" and len(key) == 2:
            degrees[int(key[1]) - 1] = tuple(_ints(v))
        elif key[0] == "link" and len(key) == 3 and key[2] in ("L", "M"):
            raw[(int(key[1]), key[2])] = v
        else:
            raise FormatError(f"unknown linked-sheaf field {k!r}")
    links = []
    for i in range(1, n):
        if (i, "L") in raw:
            L = _matrix(raw[(i, "L")], len(degrees[i - 1]))
            M = _matrix(raw[(i, "M")], len(degrees[i]))
            links.append(Link(len(L), L, M))
        else:
            links.append(Link(0, (), ()))
    return LinkedSheaf(n, tuple(degrees), tuple(links))


def parse_bundle_spec(text: str, n: int) -> do.DerivedObject:
    """Shorthand for a single sheaf: ``s t a_s .. a_t`` or ``s t a_s .. a_t @ p`` (placed in degree p)."""
    body, _, deg = text.partition("@")
    r = _bundle(body.replace(",", " "))
    return do.sheaf(n, r, int(deg) if deg.strip() else 0)


def dump_trace(n: int, word, steps) -> str:
    """Replayable trace: the full word plus one line per step (letters; l before, after; tag)."""
    body = [f"word: {word}"]
    for k, st in enumerate(steps, start=1):
        letters = " ".join(map(str, st.letters)) or "-"
        body.append(f"step {k}: {letters}; {st.l_before} {st.l_after}; {st.tag}")
    return dump("trace", n, body)


def load_trace(text: str):
    """(n, word text, [(letters text, l_before, l_after, tag)]) from a trace document."""
    kind, n, pairs = _fields(text)
    if kind != "trace":
        raise FormatError(f"expected a trace document, got {kind!r}")
    word, steps = "", []
    for k, v in pairs:
        if k == "word":
            word = v
        elif k.startswith("step"):
            letters, ls, tag = (x.strip() for x in v.split(";"))
            before, after = _ints(ls)
            steps.append((letters, before, after, tag))
        else:
            raise FormatError(f"unknown trace field {k!r}")
    return n, word, steps
