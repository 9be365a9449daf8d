"""Self-similar actions on the d-regular rooted tree.

Vertices are tuples of digits 1..d; the level-n vertices are ordered
lexicographically, with index given by the big-endian base-d value of the
digits minus one.  All conventions are right actions: act(uv, x) equals
act(v, act(u, x)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from endopres.words import Alphabet, Word, WordError


class TreeError(ValueError):
    pass


DEFAULT_POINT_BOUND = 3 ** 10


def identity_perm(d: int) -> tuple[int, ...]:
    return tuple(range(d))


def compose_perms(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """Permutation applying p first, then q."""
    return tuple(q[p[i]] for i in range(len(p)))


def invert_perm(p: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


@dataclass(frozen=True)
class SelfSimilarSpec:
    """Wreath recursion: per generator, d section words and a top permutation.

    Top permutations are 0-based image tuples on {0..d-1} for the digits
    1..d.  Optional metadata: a contraction bound for the word-problem
    algorithm and generating words of the branching subgroup.
    """

    degree: int
    alphabet: Alphabet
    sections: tuple[tuple[Word, ...], ...]
    tops: tuple[tuple[int, ...], ...]
    contraction_bound: int | None = None
    branching: tuple[Word, ...] = ()
    _cache: dict = field(
        default_factory=dict, compare=False, repr=False, hash=False
    )

    def __post_init__(self):
        d = self.degree
        if d < 2:
            raise TreeError("degree must be at least 2")
        if len(self.sections) != len(self.alphabet) or len(self.tops) != len(self.alphabet):
            raise TreeError("recursion must cover every generator")
        for g, (secs, top) in enumerate(zip(self.sections, self.tops)):
            if len(secs) != d:
                raise TreeError(
                    f"generator {self.alphabet.symbols[g]!r} needs exactly {d} sections"
                )
            if sorted(top) != list(range(d)):
                raise TreeError(
                    f"generator {self.alphabet.symbols[g]!r} has an invalid top permutation"
                )
            for s in secs:
                if s.alphabet != self.alphabet:
                    raise TreeError("section word over a different alphabet")

    def letter(self, x: int) -> tuple[tuple[Word, ...], tuple[int, ...]]:
        """Wreath form of a signed letter."""
        g = abs(x) - 1
        secs, top = self.sections[g], self.tops[g]
        if x > 0:
            return secs, top
        inv_top = invert_perm(top)
        inv_secs = tuple(secs[inv_top[i]].inverse() for i in range(self.degree))
        return inv_secs, inv_top


def make_spec(
    degree: int,
    alphabet: Alphabet,
    recursion: dict[str, tuple[Sequence[str], Sequence[int] | None]],
    word_parser,
    contraction_bound: int | None = None,
    branching: Iterable[str] = (),
) -> SelfSimilarSpec:
    """Convenience builder used by the catalog; word_parser(text) -> Word."""
    sections = []
    tops = []
    for g in alphabet:
        secs_text, top = recursion[g]
        sections.append(tuple(word_parser(t) for t in secs_text))
        tops.append(tuple(top) if top is not None else identity_perm(degree))
    return SelfSimilarSpec(
        degree,
        alphabet,
        tuple(sections),
        tuple(tops),
        contraction_bound,
        tuple(word_parser(t) for t in branching),
    )


def _check_word(spec: SelfSimilarSpec, w: Word) -> None:
    if w.alphabet != spec.alphabet:
        raise WordError("word over a different alphabet than the recursion")


def wreath_decompose(spec: SelfSimilarSpec, w: Word) -> tuple[tuple[Word, ...], tuple[int, ...]]:
    """Sections and top permutation of w: (uv)_i = u_i * v_(top_u(i))."""
    _check_word(spec, w)
    d = spec.degree
    secs: list[Word] = [Word.identity(spec.alphabet)] * d
    top = identity_perm(d)
    for x in w.letters:
        lsecs, ltop = spec.letter(x)
        secs = [secs[i] * lsecs[top[i]] for i in range(d)]
        top = compose_perms(top, ltop)
    return tuple(secs), top


def top_permutation(spec: SelfSimilarSpec, w: Word) -> tuple[int, ...]:
    top = identity_perm(spec.degree)
    for x in w.letters:
        _, ltop = spec.letter(x)
        top = compose_perms(top, ltop)
    return top


def act(spec: SelfSimilarSpec, w: Word, vertex: Sequence[int]) -> tuple[int, ...]:
    """Image of a vertex (digits 1..d) under the right action of w."""
    _check_word(spec, w)
    vertex = tuple(vertex)
    for digit in vertex:
        if not 1 <= digit <= spec.degree:
            raise TreeError(f"vertex digit {digit} out of range 1..{spec.degree}")
    for x in w.letters:
        vertex = _act_letter(spec, x, vertex)
    return vertex


def _act_letter(spec: SelfSimilarSpec, x: int, vertex: tuple[int, ...]) -> tuple[int, ...]:
    if not vertex:
        return vertex
    secs, top = spec.letter(x)
    head = top[vertex[0] - 1] + 1
    rest = vertex[1:]
    for y in secs[vertex[0] - 1].letters:
        rest = _act_letter(spec, y, rest)
    return (head,) + rest


@dataclass(frozen=True)
class LevelPermutation:
    level: int
    images: np.ndarray

    @property
    def is_identity(self) -> bool:
        return bool(np.array_equal(self.images, np.arange(len(self.images))))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, LevelPermutation)
            and self.level == other.level
            and np.array_equal(self.images, other.images)
        )

    def __hash__(self) -> int:
        return hash((self.level, self.images.tobytes()))

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(int(i) for i in self.images)


def _letter_tables(spec: SelfSimilarSpec, level: int) -> dict[int, np.ndarray]:
    """Permutation arrays of every signed letter on the level-n vertices."""
    cached = spec._cache.get(("letters", level))
    if cached is not None:
        return cached
    d = spec.degree
    k = len(spec.alphabet)
    if level == 0:
        tables = {x: np.zeros(1, dtype=np.int64) for g in range(k) for x in (g + 1, -(g + 1))}
    else:
        prev = _letter_tables(spec, level - 1)
        block = d ** (level - 1)
        tables = {}
        for g in range(k):
            out = np.empty(d ** level, dtype=np.int64)
            top = spec.tops[g]
            for i in range(d):
                sec = _word_perm_array(spec.sections[g][i], prev, block)
                out[i * block : (i + 1) * block] = top[i] * block + sec
            tables[g + 1] = out
            inv = np.empty_like(out)
            inv[out] = np.arange(len(out))
            tables[-(g + 1)] = inv
    spec._cache[("letters", level)] = tables
    return tables


def _word_perm_array(w: Word, tables: dict[int, np.ndarray], size: int) -> np.ndarray:
    perm = np.arange(size, dtype=np.int64)
    for x in w.letters:
        perm = tables[x][perm]
    return perm


def level_permutation(spec: SelfSimilarSpec, w: Word, level: int) -> LevelPermutation:
    """Permutation induced by w on the lexicographically ordered level-n vertices."""
    _check_word(spec, w)
    if level < 0:
        raise TreeError("level must be nonnegative")
    tables = _letter_tables(spec, level)
    return LevelPermutation(level, _word_perm_array(w, tables, spec.degree ** level))


def first_nontrivial_level(
    spec: SelfSimilarSpec, w: Word, max_level: int
) -> int | None:
    """Least level at which w acts nontrivially, or None up to max_level."""
    if max_level < 1:
        raise TreeError("max_level must be at least 1")
    for n in range(1, max_level + 1):
        if not level_permutation(spec, w, n).is_identity:
            return n
    return None


def level_quotient_order(
    spec: SelfSimilarSpec, level: int, point_bound: int = DEFAULT_POINT_BOUND
) -> int:
    """Order of the permutation group induced by the generators at a level."""
    if spec.degree ** level > point_bound:
        raise TreeError(
            f"level {level} needs {spec.degree ** level} points, above the bound {point_bound}"
        )
    gens = [
        level_permutation(spec, Word.generator(spec.alphabet, g), level).as_tuple()
        for g in spec.alphabet
    ]
    return permutation_group_order(gens)


# -- deterministic stabilizer chain --------------------------------------------


def permutation_group_order(gens: Sequence[Sequence[int]]) -> int:
    """Deterministic Schreier-Sims; base points are first moved points.

    strong[i] holds every strong generator fixing bases[:i]; the chain is
    complete once every Schreier generator sifts to the identity, so the
    order is the product of the orbit sizes.
    """
    gens = [tuple(g) for g in gens if not _is_identity(g)]
    if not gens:
        return 1
    n = len(gens[0])
    for g in gens:
        if sorted(g) != list(range(n)):
            raise TreeError("generators must be permutations of the same set")

    bases: list[int] = []
    strong: list[list[tuple[int, ...]]] = []
    transversals: list[dict[int, tuple[int, ...]]] = []

    def rebuild_orbit(i: int) -> None:
        transversals[i] = {bases[i]: tuple(range(n))}
        frontier = [bases[i]]
        while frontier:
            nxt = []
            for p in frontier:
                rep = transversals[i][p]
                for g in strong[i]:
                    q = g[p]
                    if q not in transversals[i]:
                        transversals[i][q] = compose_perms(rep, g)
                        nxt.append(q)
            frontier = nxt

    def sift(p: tuple[int, ...]) -> tuple[int, ...] | None:
        for i in range(len(bases)):
            if _is_identity(p):
                return None
            rep = transversals[i].get(p[bases[i]])
            if rep is None:
                return p
            p = compose_perms(p, invert_perm(rep))
        return None if _is_identity(p) else p

    inserted: set[tuple[int, ...]] = set()
    processed: set[tuple[int, ...]] = set()
    queue = list(gens)
    while queue:
        p = queue.pop(0)
        if p in processed:
            continue
        processed.add(p)
        residue = sift(p)
        if residue is None or residue in inserted:
            continue
        inserted.add(residue)
        level = 0
        while level < len(bases) and residue[bases[level]] == bases[level]:
            level += 1
        if level == len(bases):
            bases.append(min(i for i in range(n) if residue[i] != i))
            strong.append([])
            transversals.append({})
        for i in range(level + 1):
            strong[i].append(residue)
            rebuild_orbit(i)
        for i in range(level + 1):
            for point in sorted(transversals[i]):
                rep = transversals[i][point]
                for g in strong[i]:
                    schreier = compose_perms(
                        compose_perms(rep, g),
                        invert_perm(transversals[i][g[point]]),
                    )
                    if not _is_identity(schreier) and schreier not in processed:
                        queue.append(schreier)

    order = 1
    for tr in transversals:
        order *= len(tr)
    return order


def _is_identity(p: Sequence[int]) -> bool:
    return all(i == j for i, j in enumerate(p))


def brute_force_group_order(gens: Sequence[Sequence[int]], cap: int = 2 * 10 ** 5) -> int:
    """Closure by breadth-first products; independent oracle for small groups."""
    gens = [tuple(g) for g in gens]
    if not gens:
        return 1
    n = len(gens[0])
    seen = {tuple(range(n))}
    frontier = list(seen)
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = compose_perms(p, g)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
                    if len(seen) > cap:
                        raise TreeError("brute-force closure exceeded cap")
        frontier = nxt
    return len(seen)
