"""Free-group words over finite alphabets.

Letters are stored as signed 1-based generator indices: ``+(i+1)`` is
generator ``i``, ``-(i+1)`` its formal inverse.  Words are always kept
freely reduced, so equality of group elements of the free group is
structural equality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class AlphabetError(ValueError):
    pass


class WordError(ValueError):
    pass


class Alphabet:
    """Ordered set of distinct generator names."""

    __slots__ = ("symbols", "_index")

    def __init__(self, symbols: Iterable[str]):
        symbols = tuple(symbols)
        if not symbols:
            raise AlphabetError("alphabet needs at least one generator")
        for name in symbols:
            if not _NAME_RE.match(name):
                raise AlphabetError(f"invalid generator name {name!r}")
        if len(set(symbols)) != len(symbols):
            raise AlphabetError(f"duplicate generator names in {symbols}")
        self.symbols = symbols
        self._index = {name: i for i, name in enumerate(symbols)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise AlphabetError(f"unknown generator {name!r}") from None

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[str]:
        return iter(self.symbols)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Alphabet) and self.symbols == other.symbols

    def __hash__(self) -> int:
        return hash(self.symbols)

    def __repr__(self) -> str:
        return f"Alphabet({', '.join(self.symbols)})"


def reduce_letters(letters: Iterable[int]) -> tuple[int, ...]:
    """Freely reduce a sequence of signed letters (idempotent)."""
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise WordError("letter 0 is not a valid signed index")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


class Word:
    """Freely reduced word; the empty word is the identity."""

    __slots__ = ("alphabet", "letters")

    def __init__(self, alphabet: Alphabet, letters: Iterable[int] = ()):
        letters = reduce_letters(letters)
        n = len(alphabet)
        for x in letters:
            if not 1 <= abs(x) <= n:
                raise WordError(f"letter index {x} out of range for {alphabet}")
        self.alphabet = alphabet
        self.letters = letters

    # -- constructors ---------------------------------------------------

    @classmethod
    def identity(cls, alphabet: Alphabet) -> "Word":
        return cls(alphabet, ())

    @classmethod
    def generator(cls, alphabet: Alphabet, name: str, sign: int = 1) -> "Word":
        if sign not in (1, -1):
            raise WordError("sign must be +1 or -1")
        return cls(alphabet, (sign * (alphabet.index(name) + 1),))

    @classmethod
    def from_pairs(cls, alphabet: Alphabet, pairs: Iterable[tuple[int, int]]) -> "Word":
        """Build from (generator index, sign) pairs, indices 0-based."""
        return cls(alphabet, (sign * (idx + 1) for idx, sign in pairs))

    # -- views -----------------------------------------------------------

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        """Letters as (generator index, sign) pairs, indices 0-based."""
        return tuple((abs(x) - 1, 1 if x > 0 else -1) for x in self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def exponent_sums(self) -> tuple[int, ...]:
        """Per-generator exponent sums (the abelianized image)."""
        sums = [0] * len(self.alphabet)
        for x in self.letters:
            sums[abs(x) - 1] += 1 if x > 0 else -1
        return tuple(sums)

    # -- group operations --------------------------------------------------

    def _check_same_alphabet(self, other: "Word") -> None:
        if self.alphabet != other.alphabet:
            raise WordError(
                f"alphabet mismatch: {self.alphabet} vs {other.alphabet}"
            )

    def __mul__(self, other: "Word") -> "Word":
        self._check_same_alphabet(other)
        return Word(self.alphabet, self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(self.alphabet, tuple(-x for x in reversed(self.letters)))

    __invert__ = inverse

    def __pow__(self, n: int) -> "Word":
        if n == 0:
            return Word.identity(self.alphabet)
        base = self if n > 0 else self.inverse()
        out = base
        for _ in range(abs(n) - 1):
            out = out * base
        return out

    def conj(self, h: "Word") -> "Word":
        """self^h = h^-1 self h."""
        return h.inverse() * self * h

    def cyclic_reduce(self) -> tuple["Word", "Word"]:
        """Return (core, conjugator) with self == conjugator^-1 * core * conjugator."""
        letters = list(self.letters)
        tail: list[int] = []
        while len(letters) >= 2 and letters[0] == -letters[-1]:
            tail.append(letters.pop())
            letters.pop(0)
        return Word(self.alphabet, letters), Word(self.alphabet, reversed(tail))

    # -- hashing / text -----------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Word)
            and self.letters == other.letters
            and self.alphabet.symbols == other.alphabet.symbols
        )

    def __hash__(self) -> int:
        return hash((self.alphabet.symbols, self.letters))

    def syllables(self) -> list[tuple[str, int]]:
        """Collapse runs of equal letters into (name, exponent) pairs."""
        out: list[tuple[str, int]] = []
        for x in self.letters:
            name = self.alphabet.symbols[abs(x) - 1]
            e = 1 if x > 0 else -1
            if out and out[-1][0] == name:
                out[-1] = (name, out[-1][1] + e)
            else:
                out.append((name, e))
        return out

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        parts = []
        for name, e in self.syllables():
            parts.append(name if e == 1 else f"{name}^{e}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Word({self})"


def commutator(g: Word, h: Word) -> Word:
    """[g, h] = g^-1 h^-1 g h."""
    return g.inverse() * h.inverse() * g * h


def exponent_word(g: Word, terms: Sequence[tuple[int, Word]]) -> Word:
    """g^(sum n_i h_i) expanded as the product of h_i^-1 g^n_i h_i in order."""
    out = Word.identity(g.alphabet)
    for n, h in terms:
        out = out * (g ** n).conj(h)
    return out


class Endomorphism:
    """Substitution endomorphism of the free group, given by generator images."""

    __slots__ = ("alphabet", "name", "images")

    def __init__(self, alphabet: Alphabet, name: str, images: dict[str, Word]):
        self.alphabet = alphabet
        self.name = name
        table: list[Word] = []
        for gen in alphabet:
            img = images.get(gen)
            if img is None:
                img = Word.generator(alphabet, gen)
            elif img.alphabet != alphabet:
                raise WordError(f"image of {gen!r} uses a different alphabet")
            table.append(img)
        self.images = tuple(table)

    def image(self, name: str) -> Word:
        return self.images[self.alphabet.index(name)]

    def __call__(self, w: Word) -> Word:
        if w.alphabet != self.alphabet:
            raise WordError("alphabet mismatch in endomorphism application")
        letters: list[int] = []
        for x in w.letters:
            img = self.images[abs(x) - 1]
            letters.extend(img.letters if x > 0 else (-y for y in reversed(img.letters)))
        return Word(self.alphabet, letters)

    def compose(self, other: "Endomorphism") -> "Endomorphism":
        """(self . other)(w) = self(other(w))."""
        if other.alphabet != self.alphabet:
            raise WordError("alphabet mismatch in endomorphism composition")
        images = {g: self(other.image(g)) for g in self.alphabet}
        return Endomorphism(self.alphabet, f"{self.name}*{other.name}", images)

    def is_identity_map(self) -> bool:
        return all(
            img.letters == (i + 1,) for i, img in enumerate(self.images)
        )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Endomorphism)
            and self.alphabet == other.alphabet
            and self.name == other.name
            and self.images == other.images
        )

    def __hash__(self) -> int:
        return hash((self.alphabet, self.name, self.images))

    def __repr__(self) -> str:
        rules = ", ".join(
            f"{g} -> {img}" for g, img in zip(self.alphabet, self.images)
        )
        return f"Endomorphism({self.name}: {rules})"


def identity_endomorphism(alphabet: Alphabet, name: str = "id") -> Endomorphism:
    return Endomorphism(alphabet, name, {})


# -- small cancellation -------------------------------------------------------


@dataclass(frozen=True)
class PieceWitness:
    piece: Word
    u: Word
    v: Word


@dataclass(frozen=True)
class SmallCancellationResult:
    holds: bool
    witness: PieceWitness | None = None


def _rotations(w: Word) -> list[Word]:
    letters = w.letters
    return [
        Word(w.alphabet, letters[i:] + letters[:i]) for i in range(len(letters))
    ]


def symmetrized_closure(words: Iterable[Word]) -> list[Word]:
    """All cyclic conjugates of the cyclic reductions and their inverses."""
    seen: dict[tuple, Word] = {}
    for w in words:
        core, _ = w.cyclic_reduce()
        if core.is_identity:
            raise WordError("small cancellation undefined for a trivial word")
        for u in (core, core.inverse()):
            for rot in _rotations(u):
                seen.setdefault(rot.letters, rot)
    return sorted(seen.values(), key=lambda w: (len(w), w.letters))


def _common_prefix_len(u: Word, v: Word) -> int:
    n = 0
    for a, b in zip(u.letters, v.letters):
        if a != b:
            break
        n += 1
    return n


def check_small_cancellation(
    words: Iterable[Word], lam: Fraction | float
) -> SmallCancellationResult:
    """Check the metric condition C'(lam) on the symmetrized closure.

    Every maximal common prefix (piece) of a pair of distinct symmetrized
    words must be strictly shorter than lam * min(|u|, |v|).
    """
    lam = Fraction(lam).limit_denominator(10**9) if not isinstance(lam, Fraction) else lam
    if not 0 < lam < 1:
        raise WordError("lambda must lie in (0, 1)")
    closure = symmetrized_closure(words)
    for i, u in enumerate(closure):
        for v in closure[i + 1 :]:
            k = _common_prefix_len(u, v)
            if k == 0:
                continue
            # piece length must satisfy k < lam * min(|u|, |v|)
            if k * lam.denominator >= lam.numerator * min(len(u), len(v)):
                piece = Word(u.alphabet, u.letters[:k])
                return SmallCancellationResult(False, PieceWitness(piece, u, v))
    return SmallCancellationResult(True, None)
