import random
from fractions import Fraction

import pytest

from endopres.words import (
    Alphabet,
    AlphabetError,
    Endomorphism,
    Word,
    WordError,
    check_small_cancellation,
    commutator,
    exponent_word,
    identity_endomorphism,
    reduce_letters,
    symmetrized_closure,
)

ACD = Alphabet(["a", "c", "d"])
XY = Alphabet(["x", "y"])


def w(alphabet, text):
    """Tiny helper: space-separated letters, trailing ' for inverse."""
    letters = []
    for tok in text.split():
        if tok.endswith("'"):
            letters.append(-(alphabet.index(tok[:-1]) + 1))
        else:
            letters.append(alphabet.index(tok) + 1)
    return Word(alphabet, letters)


def random_word(rng, alphabet, max_len):
    n = rng.randrange(max_len + 1)
    k = len(alphabet)
    return Word(alphabet, [rng.choice([1, -1]) * rng.randrange(1, k + 1) for _ in range(n)])


class TestAlphabet:
    def test_basic(self):
        assert len(ACD) == 3
        assert ACD.index("d") == 2
        assert "c" in ACD and "b" not in ACD

    def test_rejects_bad_names(self):
        with pytest.raises(AlphabetError):
            Alphabet(["a", "a"])
        with pytest.raises(AlphabetError):
            Alphabet(["1x"])
        with pytest.raises(AlphabetError):
            Alphabet([])

    def test_unknown_generator(self):
        with pytest.raises(AlphabetError):
            ACD.index("q")


class TestReduce:
    def test_cancelling_pair(self):
        # a a^-1 c -> c
        assert w(ACD, "a a' c") == w(ACD, "c")

    def test_no_adjacent_inverse_unchanged(self):
        v = w(ACD, "a c a a c a")
        assert v.letters == (1, 2, 1, 1, 2, 1)

    def test_commutator_expansion_no_cancellation(self):
        d = w(ACD, "d")
        a = w(ACD, "a")
        rel = commutator(d, d.conj(a))
        assert rel == w(ACD, "d' a' d' a d a' d a")
        assert len(rel) == 8

    def test_idempotent(self):
        rng = random.Random(1)
        for _ in range(500):
            letters = [rng.choice([1, -1]) * rng.randrange(1, 4) for _ in range(rng.randrange(30))]
            once = reduce_letters(letters)
            assert reduce_letters(once) == once


class TestGroupLaws:
    def test_identity_unit(self):
        e = Word.identity(ACD)
        v = w(ACD, "a c")
        assert e * v == v and v * e == v

    def test_multiply_cancels(self):
        assert (w(ACD, "a") * w(ACD, "a'")).is_identity
        assert w(ACD, "a c") * w(ACD, "a'") == w(ACD, "a c a'")

    def test_alphabet_mismatch(self):
        with pytest.raises(WordError):
            w(ACD, "a") * w(XY, "x")

    def test_inverse(self):
        assert Word.identity(ACD).inverse().is_identity
        assert w(ACD, "a c").inverse() == w(ACD, "c' a'")

    def test_associative_unital_involution(self):
        rng = random.Random(2)
        for _ in range(1000):
            u, v, t = (random_word(rng, ACD, 12) for _ in range(3))
            assert (u * v) * t == u * (v * t)
            assert (u * v).inverse() == v.inverse() * u.inverse()
            assert u.inverse().inverse() == u
            assert (u * u.inverse()).is_identity

    def test_power(self):
        x = w(XY, "x")
        assert x ** 1 == x
        assert x ** 0 == Word.identity(XY)
        assert x ** -2 == w(XY, "x' x'")
        v = w(XY, "x y")
        assert v ** 3 == w(XY, "x y x y x y")


class TestBuildExpressions:
    def test_commutator_definition(self):
        d, a = w(ACD, "d"), w(ACD, "a")
        assert commutator(d, d.conj(a)) == w(ACD, "d' a' d' a d a' d a")

    def test_exponent_word_convention(self):
        # x^(phi - 7) with h-terms in written order: phi^-1 x phi x^-7
        alph = Alphabet(["x", "y", "phi"])
        x = Word.generator(alph, "x")
        phi = Word.generator(alph, "phi")
        one = Word.identity(alph)
        got = exponent_word(x, [(1, phi), (-7, one)])
        assert str(got) == "phi^-1 x phi x^-7"

    def test_power_one(self):
        g = w(ACD, "c")
        assert exponent_word(g, [(1, Word.identity(ACD))]) == g


class TestCyclicReduce:
    def test_examples(self):
        alph = Alphabet(["a", "b"])
        core, conj = w(alph, "a b a'").cyclic_reduce()
        assert core == w(alph, "b")
        assert conj == w(alph, "a'")
        e = Word.identity(alph)
        assert e.cyclic_reduce() == (e, e)
        com = commutator(w(alph, "a"), w(alph, "b"))
        assert com.cyclic_reduce() == (com, e)

    def test_reconstruction(self):
        rng = random.Random(3)
        for _ in range(1000):
            v = random_word(rng, ACD, 14)
            core, conj = v.cyclic_reduce()
            assert conj.inverse() * core * conj == v
            if not core.is_identity:
                assert core.letters[0] != -core.letters[-1]


class TestEndomorphism:
    def sigma(self):
        return Endomorphism(
            ACD,
            "sigma",
            {
                "a": w(ACD, "a c a"),
                "c": w(ACD, "c d"),
                "d": w(ACD, "c"),
            },
        )

    def test_apply_on_square(self):
        assert self.sigma()(w(ACD, "a a")) == w(ACD, "a c a a c a")

    def test_identity_endo(self):
        rng = random.Random(4)
        eye = identity_endomorphism(ACD)
        for _ in range(200):
            v = random_word(rng, ACD, 10)
            assert eye(v) == v

    def test_lamplighter_image(self):
        abt = Alphabet(["a", "b", "t"])
        phi = Endomorphism(abt, "phi", {"b": w(abt, "t' b t")})
        a, b = w(abt, "a"), w(abt, "b")
        assert phi(commutator(a, b)) == commutator(a, b.conj(w(abt, "t")))

    def test_compose(self):
        s = self.sigma()
        ss = s.compose(s)
        assert ss(w(ACD, "a")) == w(ACD, "a c a c d a c a")
        eye = identity_endomorphism(ACD)
        assert s.compose(eye).images == s.images

    def test_chi_involution(self):
        tuv = Alphabet(["t", "u", "v"])
        chi = Endomorphism(
            tuv,
            "chi",
            {g: Word.generator(tuv, g, -1) for g in tuv},
        )
        cc = chi.compose(chi)
        for g in tuv:
            assert cc.image(g) == Word.generator(tuv, g)

    def test_morphism_laws(self):
        rng = random.Random(5)
        s = self.sigma()
        for _ in range(500):
            u, v = random_word(rng, ACD, 10), random_word(rng, ACD, 10)
            assert s(u * v) == s(u) * s(v)
            assert s(u.inverse()) == s(u).inverse()

    def test_compose_associative_and_action(self):
        rng = random.Random(6)
        s = self.sigma()
        t = Endomorphism(ACD, "t", {"a": w(ACD, "d"), "d": w(ACD, "a'")})
        u = Endomorphism(ACD, "u", {"c": w(ACD, "a c")})
        lhs = s.compose(t).compose(u)
        rhs = s.compose(t.compose(u))
        assert lhs.images == rhs.images
        for _ in range(300):
            v = random_word(rng, ACD, 8)
            assert s.compose(t)(v) == s(t(v))


def oracle_small_cancellation(words, lam):
    """Quadratic oracle: enumerate every prefix of u, test prefix-of-v."""
    closure = symmetrized_closure(words)
    for u in closure:
        for v in closure:
            if u == v:
                continue
            for k in range(1, len(u) + 1):
                p = u.letters[:k]
                if v.letters[: len(p)] == p:
                    if Fraction(k) >= lam * min(len(u), len(v)):
                        return False
    return True


class TestSmallCancellation:
    def test_vacuous(self):
        assert check_small_cancellation([], Fraction(1, 6)).holds

    def test_seventh_powers(self):
        x, y = w(XY, "x"), w(XY, "y")
        ws = [x ** 7, y ** 7, (x * y) ** 7]
        assert check_small_cancellation(ws, Fraction(1, 6)).holds
        assert oracle_small_cancellation(ws, Fraction(1, 6))

    def test_commutator_fails(self):
        res = check_small_cancellation([commutator(w(XY, "x"), w(XY, "y"))], Fraction(1, 6))
        assert not res.holds
        assert res.witness is not None
        assert len(res.witness.piece) >= 1
        assert not oracle_small_cancellation(
            [commutator(w(XY, "x"), w(XY, "y"))], Fraction(1, 6)
        )

    def test_trivial_word_rejected(self):
        with pytest.raises(WordError):
            check_small_cancellation([Word.identity(XY)], Fraction(1, 6))

    def test_agrees_with_oracle(self):
        rng = random.Random(7)
        lam = Fraction(1, 6)
        for _ in range(300):
            ws = []
            total = 0
            while total < 40:
                v = random_word(rng, XY, 10)
                if v.cyclic_reduce()[0].is_identity:
                    continue
                ws.append(v)
                total += len(v)
                if rng.random() < 0.3:
                    break
            got = check_small_cancellation(ws, lam).holds
            assert got == oracle_small_cancellation(ws, lam)
