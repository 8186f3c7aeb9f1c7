import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from spherical_an import derived_objects as do
from spherical_an import linalg as la
from spherical_an import twist_engine as te
from spherical_an import twisted as tw
from spherical_an.chain_core import PicElement, SubchainLineBundle, curve_divisor, sigma_bundles
from spherical_an.group_words import images_agree
from spherical_an.words import Flip, T, Tensor, TwistWord

S = SubchainLineBundle


def table(l, b, r, n):
    return te.twist_table(S.curve(l, b), r, n)


@pytest.mark.parametrize("a", [-3, -1, 0, 2])
def test_single_curve_formulas(a):
    r = S.curve(1, a)
    assert table(1, a, r, 1) == do.sheaf(1, r, 1)
    assert table(1, a - 1, r, 1) == do.sheaf(1, S.curve(1, a - 2), -1)


@pytest.mark.parametrize("a", [-2, 0, 1])
def test_consecutive_twists_are_tensor_by_curve(a):
    # T_{O(a-1)} after T_{O(a)} is tensoring with O_X(C)
    for n in (1, 2, 3):
        w = TwistWord(n, (T(1, a), T(1, a - 1)))
        pic = TwistWord(n, (Tensor(curve_divisor(n, 1)),))
        for obj in (do.sheaf(n, S.curve(1, 0)), do.sheaf(n, S.on(1, n, *([0] * n)))):
            assert images_agree(w, pic, obj)


@pytest.mark.parametrize("degs", [(0, 0), (2, -1, 0), (-1, 3, 1, 0)])
def test_chain_formulas(degs):
    n = len(degs)
    a = S(1, n, degs)
    a1 = degs[0]
    d = table(1, a1, a, n)
    assert d.H(0) == (a,) and d.H(1) == (S.curve(1, a1),) and d.degrees == [0, 1]
    assert table(1, a1 - 1, a, n) == do.sheaf(n, S(2, n, degs[1:]))
    d = table(1, a1 - 2, a, n)
    b = (a1 - 2, degs[1] + 1) + degs[2:]
    assert d.H(-1) == (S.curve(1, a1 - 3),) and d.H(0) == (S(1, n, b),)
    for k in range(2, n):
        ak = degs[k - 1]
        assert table(k, ak - 1, a, n) == do.sheaf(n, a)
        b = list(degs)
        b[k - 2] += 1
        b[k] += 1
        b[k - 1] = ak - 2
        assert table(k, ak - 2, a, n) == do.sheaf(n, S(1, n, tuple(b)))


def test_adjacent_curve_extends_support():
    assert table(2, 5, S.curve(1, 0), 2) == do.sheaf(2, S.on(1, 2, 1, 5))
    assert table(3, 0, S.curve(1, 0), 3) == do.sheaf(3, S.curve(1, 0))
    with pytest.raises(te.OutOfTable):
        table(1, -3, S.curve(1, 0), 1)
    with pytest.raises(te.OutOfTable):
        te.twist_table(S.on(1, 2, 0, 0), S.curve(1, 0), 2)


def test_example_two_term_image():
    d = te.twist(T(1, -2), do.sheaf(2, S.on(1, 2, 0, 0)))
    assert d.H(-1) == (S.curve(1, -3),) and d.H(0) == (S.on(1, 2, -2, 1),)


# ---------------------------------------------------------------- properties


@given(st.data())
def test_table_agrees_with_cone(data):
    n = data.draw(st.integers(1, 4))
    r = data.draw(st.sampled_from(list(sigma_bundles(n, 2))))
    l = data.draw(st.integers(1, n))
    b = data.draw(st.integers(-3, 3))
    try:
        t = table(l, b, r, n)
    except te.OutOfTable:
        return
    c = te.cone_twist(T(l, b), do.sheaf(n, r))
    assert do.is_isomorphic(t, c)


@given(st.integers(1, 3), st.data())
def test_inverse_twist_undoes_twist(n, data):
    r = data.draw(st.sampled_from(list(sigma_bundles(n, 1))))
    l, b = data.draw(st.integers(1, n)), data.draw(st.integers(-2, 2))
    x = do.reconstruct(do.sheaf(n, r))
    s = do.reconstruct(do.sheaf(n, S.curve(l, b)))
    y = te.tw_twist(s, te.tw_twist(s, x), inverse=True)
    assert do.tw_isomorphic(y, x)


def _closed(f: tw.Morphism) -> bool:
    hc = tw.HomComplex(f.src, f.tgt, f.degree)
    v = hc.vector(f)
    d = hc._entries(f.degree)
    out = {}
    for (row, col), c in d.items():
        if v[col]:
            out[row] = out.get(row, la.ZERO) + c * v[col]
    return not any(out.values())


@given(st.integers(0, 2**16))
def test_twist_is_functorial_on_morphisms(seed):
    rng = random.Random(seed)
    n = 2
    sigma = S.curve(rng.randint(1, 2), rng.randint(-2, 0))
    x, y, z = (do.reconstruct(do.sheaf(n, S.curve(1, a))) for a in (-1, 0, 1))
    pick = lambda a, b: sum((g.scaled(rng.randint(-3, 3)) for g in tw.HomComplex(a, b, 0).basis()[1:]),
                            tw.HomComplex(a, b, 0).basis()[0])
    f, g = pick(x, y), pick(y, z)
    tf, tg, tgf = (te.twist_on_morphism(sigma, h) for h in (f, g, g * f))
    assert _closed(tf) and _closed(tgf)
    hc = tw.HomComplex(tgf.src, tgf.tgt, 0)
    assert hc.coords(tgf) == hc.coords(tg * tf)
    ident = te.twist_on_morphism(sigma, tw.identity(x))
    assert not tw.minimize(tw.cone(ident)[0]).atoms


@given(st.integers(1, 4), st.data())
def test_tensor_and_flip_on_sheaves(n, data):
    r = data.draw(st.sampled_from(list(sigma_bundles(n, 1))))
    pic = PicElement(tuple(data.draw(st.integers(-2, 2)) for _ in range(n)))
    x = do.reconstruct(do.sheaf(n, r))
    assert do.decode(te.tensor(x, pic)) == do.sheaf(n, r.twisted(pic))
    flipped = S(n + 1 - r.t, n + 1 - r.s, tuple(reversed(r.degrees)))
    assert do.decode(te.flip(x)) == do.sheaf(n, flipped)
    assert do.tw_isomorphic(te.flip(te.flip(x)), x)


@given(st.integers(1, 3), st.integers(0, 2**16))
def test_twist_conjugation_by_flip(n, seed):
    rng = random.Random(seed)
    l, a = rng.randint(1, n), rng.randint(-2, 1)
    obj = do.sheaf(n, S.curve(rng.randint(1, n), rng.randint(-1, 1)))
    lhs = TwistWord(n, (Flip(), T(l, a), Flip()))
    assert images_agree(lhs, TwistWord(n, (T(n + 1 - l, a),)), obj)
