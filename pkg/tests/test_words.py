import pytest
from hypothesis import given
from hypothesis import strategies as st

from spherical_an.chain_core import PicElement, SubchainLineBundle, dualizing_sheaf, ChainConfig
from spherical_an.words import Flip, Shift, T, Tensor, Twist, TwistWord, WordSyntaxError, parse_word

S = SubchainLineBundle


def test_parse_all_letter_kinds():
    w = parse_word("T(1,-1) T'(2,0) Ts(1,2;-1,-2) Ts'(2,3;0,0) L(0,1,-1) flip shift(-2) Tw Tw'", 3)
    assert w.letters == (
        T(1, -1), T(2, 0, True), Twist(S.on(1, 2, -1, -2)), Twist(S.on(2, 3, 0, 0), True),
        Tensor(PicElement((0, 1, -1))), Flip(), Shift(-2),
        Twist(dualizing_sheaf(ChainConfig(3))), Twist(dualizing_sheaf(ChainConfig(3)), True),
    )


def test_parse_empty_and_spacing():
    assert parse_word("", 2) == TwistWord(2)
    assert parse_word("  T( 1 , 0 )T(2,-1)  ", 2) == TwistWord(2, (T(1, 0), T(2, -1)))


@pytest.mark.parametrize("text", ["T(1)", "T(3,0)", "L(1)", "flip(1)", "shift()", "X(1,2)", "Ts(1,2)", "T(a,b)"])
def test_parse_errors(text):
    with pytest.raises(WordSyntaxError):
        parse_word(text, 2)


def test_inverse_and_power():
    w = parse_word("T(1,-1) L(1,0) flip shift(2)", 2)
    assert str(w.inverse()) == "shift(-2) flip L(-1,0) T'(1,-1)"
    assert len(w ** 3) == 12 and (w ** -1) == w.inverse()


@st.composite
def words(draw):
    n = draw(st.integers(1, 4))
    letter = st.one_of(
        st.builds(T, st.integers(1, n), st.integers(-5, 5), st.booleans()),
        st.builds(lambda d: Tensor(PicElement(d)), st.tuples(*[st.integers(-3, 3)] * n)),
        st.just(Flip()),
        st.builds(Shift, st.integers(-3, 3)),
    )
    return TwistWord(n, tuple(draw(st.lists(letter, max_size=8))))


@given(words())
def test_print_parse_round_trip(w):
    assert parse_word(str(w), w.n) == w
    assert w.inverse().inverse() == w
