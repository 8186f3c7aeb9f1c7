import random

import flint
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spherical_an import derived_objects as do
from spherical_an import group_words as gw
from spherical_an import normalizer as nm
from spherical_an.chain_core import (
    ChainConfig,
    KClass,
    PicElement,
    SubchainLineBundle,
    cartan_matrix,
    dualizing_sheaf,
    euler_form,
    root_lattice_member,
    weight_mod_root,
)
from spherical_an.words import Flip, Shift, T, Tensor, Twist, TwistWord

S = SubchainLineBundle


def _ident(k):
    return flint.fmpz_mat([[int(i == j) for j in range(k)] for i in range(k)])


@pytest.mark.parametrize("n", range(1, 9))
def test_gram_matrix_and_phi0_order(n):
    curves = [KClass.curve(n, i) for i in range(1, n + 1)]
    gram = [[euler_form(a, b) for b in curves] for a in curves]
    assert gram == [list(r) for r in cartan_matrix(n)]
    assert all(euler_form(a, KClass.point(n)) == 0 for a in curves)
    m = gw.k_matrix(gw.phi0(n))
    assert gw.matrix_order(m) == n + 1


@pytest.mark.parametrize("n", [1, 2, 4])
def test_twist_k_actions_are_reflections(n):
    for l in range(1, n + 1):
        for a in (-2, -1, 0, 3):
            m = gw.letter_k_matrix(T(l, a), n)
            assert m * m == _ident(n + 1) and m != _ident(n + 1)
            assert m.det() == -1


def test_phi0_word_shape():
    assert str(gw.phi0(1)) == "L(1) T(1,-1)"
    assert str(gw.phi0(3)) == "L(0,0,1) T(3,-1) T(2,-1) T(1,-1)"


@pytest.mark.parametrize("n", [1, 2, 3])
def test_phi0_cycles_the_simples(n):
    alphas = gw.alpha_objects(n)
    w = gw.phi0(n)
    for l in range(n + 1):
        nxt = alphas[(l + 1) % (n + 1)]
        img = do.decode(gw.apply_word_tw(w, do.reconstruct(alphas[l])))
        assert do.is_isomorphic(img, nxt)


def test_rewrite_to_B_examples():
    n = 2
    assert gw.rewrite_to_B(T(1, -1), n) == TwistWord(n, (T(1, -1),))
    omega = dualizing_sheaf(ChainConfig(n))
    assert gw.rewrite_to_B(Twist(omega), n) == TwistWord(n, (Twist(omega),))
    for letter in (T(1, -2), T(2, 0), T(1, 3, True), T(2, -4)):
        w = gw.rewrite_to_B(letter, n)
        assert all(x.sigma in (omega,) or x.sigma.degrees == (-1,) for x in w.letters)
        assert gw.check_relation(w, TwistWord(n, (letter,)))
    with pytest.raises(ValueError):
        gw.rewrite_to_B(Shift(1), n)


@pytest.mark.parametrize("n", [2, 3])
def test_braid_and_commute_relations(n):
    for i in range(1, n):
        assert gw.check_relation(*gw.braid_words(n, i))
        assert gw.check_relation(*gw.braid_words(n, i), level="K")
    for i in range(1, n + 1):
        for j in range(i + 2, n + 1):
            assert gw.check_relation(*gw.commute_words(n, i, j))


def test_relation_failure_has_witness():
    w1, w2 = TwistWord(1, (T(1, -1),)), TwistWord(1, (T(1, 0),))
    rep = gw.check_relation(w1, w2)
    assert not rep and rep.witness == do.sheaf(1, S.curve(1, -1))
    assert dict(rep.rows)[str(do.sheaf(1, S.curve(1, 0)))] is False
    assert not gw.check_relation(w1, w2, level="K")


def test_push_to_front_moves():
    n = 3
    w = TwistWord(n, (T(1, -1), Tensor(PicElement((1, 0, 0))), T(2, 0), Flip(), Shift(1)))
    nf = gw.push_to_front(w)
    assert nf.shift == 1 and nf.flip and nf.pic == PicElement((0, 0, 1))
    assert nf.b_word == TwistWord(n, (T(3, 0), T(2, 0)))
    for obj in gw.default_test_set(n)[:4]:
        assert gw.images_agree(w, nf.as_word(), obj)


def test_conjugate_examples():
    n = 2
    sigma = do.sheaf(n, S.curve(1, 0))
    ts = TwistWord(n, (Twist(S.curve(1, 0)),))
    for phi in (TwistWord(n), TwistWord(n, (Shift(3),))):
        assert gw.check_relation(gw.conjugate(phi, sigma), ts)
    phi = TwistWord(n, (T(2, -1), T(1, -2)))
    lhs = phi.inverse() + TwistWord(n, (Twist(S.curve(1, 0)),)) + phi
    assert gw.check_relation(gw.conjugate(phi, sigma), lhs)


def test_conjugate_respects_composition():
    n = 2
    sigma = do.sheaf(n, S.curve(2, -1))
    phi, psi = TwistWord(n, (T(1, -1),)), TwistWord(n, (T(2, 0, True),))
    inner = do.decode(gw.apply_word_tw(psi, do.reconstruct(sigma)))
    assert gw.check_relation(gw.conjugate(psi + phi, sigma), gw.conjugate(phi, inner))


def test_default_test_set_separates_normal_forms():
    n = 2
    forms = [TwistWord(n), TwistWord(n, (Flip(),)), TwistWord(n, (Shift(1),)),
             TwistWord(n, (Tensor(PicElement((1, 0))),)), TwistWord(n, (T(1, -1),))]
    for i, a in enumerate(forms):
        for b in forms[i + 1:]:
            assert not gw.check_relation(a, b)


# ---------------------------------------------------------------- properties


@given(st.integers(1, 3), st.integers(0, 2**16))
def test_b_words_landing_in_pic_are_in_root_lattice(n, seed):
    rng = random.Random(seed)
    letters = []
    for _ in range(rng.randint(1, 3)):
        w = gw.curve_tensor_word(n, rng.randint(1, n), rng.randint(-1, 1))
        letters += (w if rng.random() < 0.6 else w.inverse()).letters
    w = TwistWord(n, tuple(letters))
    nf = nm.normalize_autoequivalence(w).normal_form
    if len(nf.b_word) == 0 and not nf.flip and nf.shift == 0:
        assert root_lattice_member(nf.pic)[0]
        assert weight_mod_root(nf.pic) == 0


@given(st.integers(1, 3), st.integers(0, 2**16))
def test_pic_residue_invariant_under_b_insertion(n, seed):
    rng = random.Random(seed)
    pic = PicElement(tuple(rng.randint(-2, 2) for _ in range(n)))
    b = lambda: TwistWord(n, tuple(T(rng.randint(1, n), -1, rng.random() < 0.5) for _ in range(rng.randint(0, 2))))
    w = b() + TwistWord(n, (Tensor(pic),)) + b()
    nf = nm.normalize_autoequivalence(w).normal_form
    assert weight_mod_root(nf.pic) == weight_mod_root(pic)


@given(st.integers(1, 3), st.integers(0, 2**16))
def test_objects_pass_implies_k_pass(n, seed):
    rng = random.Random(seed)
    w = TwistWord(n, tuple(T(rng.randint(1, n), -1, rng.random() < 0.5) for _ in range(3)))
    v = gw.push_to_front(w + TwistWord(n, (Flip(),))).as_word()
    assert gw.check_relation(w + TwistWord(n, (Flip(),)), v)
    assert gw.check_relation(w + TwistWord(n, (Flip(),)), v, level="K")
