"""L-presentations: data structure, relator enumeration, and combinators.

An L-presentation <S | Q | Phi | R> presents the free group on S modulo the
normal closure of Q together with every image of R under the monoid of
substitutions generated by Phi.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from endopres.words import (
    Alphabet,
    Endomorphism,
    Word,
    WordError,
    commutator,
    identity_endomorphism,
)


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class LPresentation:
    alphabet: Alphabet
    fixed: tuple[Word, ...]        # Q
    endos: tuple[Endomorphism, ...]  # Phi
    iterated: tuple[Word, ...]     # R

    def __post_init__(self):
        for w in self.fixed + self.iterated:
            if w.alphabet != self.alphabet:
                raise PresentationError(f"relator {w} not over {self.alphabet}")
        for e in self.endos:
            if e.alphabet != self.alphabet:
                raise PresentationError(f"endomorphism {e.name} not over {self.alphabet}")

    @property
    def is_ascending(self) -> bool:
        return not self.fixed

    @property
    def is_finite_presentation(self) -> bool:
        return not self.endos and not self.iterated


@dataclass(frozen=True)
class FinitePresentation:
    alphabet: Alphabet
    relators: tuple[Word, ...]

    def __post_init__(self):
        for w in self.relators:
            if w.alphabet != self.alphabet:
                raise PresentationError(f"relator {w} not over {self.alphabet}")

    def as_lpresentation(self) -> LPresentation:
        return LPresentation(self.alphabet, self.relators, (), ())


def make_lpresentation(
    alphabet: Alphabet,
    fixed: Iterable[Word] = (),
    endos: Iterable[Endomorphism] = (),
    iterated: Iterable[Word] = (),
) -> LPresentation:
    return LPresentation(alphabet, tuple(fixed), tuple(endos), tuple(iterated))


# -- relator enumeration -------------------------------------------------------


def _cyclic_key(w: Word) -> tuple[int, ...]:
    """Least rotation of the cyclic core of w and of its inverse."""
    core, _ = w.cyclic_reduce()
    best: tuple[int, ...] | None = None
    for u in (core.letters, core.inverse().letters):
        for i in range(max(len(u), 1)):
            rot = u[i:] + u[:i]
            if best is None or rot < best:
                best = rot
    return best if best is not None else ()


@dataclass
class EnumerationFrontier:
    """One breadth-first layer of the enumeration over Phi-composition words."""

    depth: int
    phi_words: tuple[tuple[int, ...], ...]  # endo index sequences that produced news
    emitted: list[Word]                     # new deduplicated relators at this depth


def iter_enumeration(
    lpres: LPresentation, dedup_mode: str = "exact"
) -> Iterator[EnumerationFrontier]:
    """Yield enumeration layers: depth 0 is Q plus R, then Phi-images of R.

    Exploration is deduplicated on exact reduced words; with
    dedup_mode="cyclic" the *output* additionally identifies cyclic
    conjugates and inverses.  Trivial relators are dropped.
    """
    if dedup_mode not in ("exact", "cyclic"):
        raise PresentationError(f"unknown dedup mode {dedup_mode!r}")
    seen: set[tuple[int, ...]] = set()
    out_keys: set[tuple[int, ...]] = set()

    def emit(w: Word, news: list[Word]) -> None:
        if w.is_identity:
            return
        key = w.letters if dedup_mode == "exact" else _cyclic_key(w)
        if key not in out_keys:
            out_keys.add(key)
            news.append(w)

    news: list[Word] = []
    frontier: list[tuple[tuple[int, ...], Word]] = []
    for q in lpres.fixed:
        if not q.is_identity and q.letters not in seen:
            seen.add(q.letters)
            emit(q, news)
    for r in lpres.iterated:
        if not r.is_identity and r.letters not in seen:
            seen.add(r.letters)
            frontier.append(((), r))
            emit(r, news)
    yield EnumerationFrontier(0, ((),) if lpres.iterated else (), news)

    depth = 0
    while frontier:
        depth += 1
        news = []
        next_frontier: list[tuple[tuple[int, ...], Word]] = []
        for seq, w in frontier:
            for i, phi in enumerate(lpres.endos):
                img = phi(w)
                if img.is_identity or img.letters in seen:
                    continue
                seen.add(img.letters)
                next_frontier.append((seq + (i,), img))
                emit(img, news)
        frontier = next_frontier
        yield EnumerationFrontier(
            depth, tuple(seq for seq, _ in frontier), news
        )


def enumerate_relators(
    lpres: LPresentation, depth: int, dedup_mode: str = "exact"
) -> list[Word]:
    """Q plus all images phi(r) for phi a composition of at most `depth` endos.

    Breadth-first by composition length; deterministic order; deduplicated.
    """
    if depth < 0:
        raise PresentationError("depth must be nonnegative")
    out: list[Word] = []
    for layer in iter_enumeration(lpres, dedup_mode):
        if layer.depth > depth:
            break
        out.extend(layer.emitted)
    return out


# -- alphabet bookkeeping ------------------------------------------------------


def _fresh_name(name: str, taken: set[str]) -> str:
    if name not in taken:
        return name
    k = 2
    while f"{name}{k}" in taken:
        k += 1
    return f"{name}{k}"


def _disjoint_union(
    left: Alphabet, right: Alphabet
) -> tuple[Alphabet, dict[str, str]]:
    """Union alphabet; right-hand generators renamed with a numeric suffix on collision."""
    names = list(left.symbols)
    taken = set(names)
    rename: dict[str, str] = {}
    for g in right.symbols:
        new = _fresh_name(g, taken)
        rename[g] = new
        taken.add(new)
        names.append(new)
    return Alphabet(names), rename


def _transport_word(w: Word, target: Alphabet, rename: dict[str, str]) -> Word:
    letters = []
    for idx, sign in w.pairs:
        name = rename.get(w.alphabet.symbols[idx], w.alphabet.symbols[idx])
        letters.append(sign * (target.index(name) + 1))
    return Word(target, letters)


def _transport_endo(
    e: Endomorphism, target: Alphabet, rename: dict[str, str]
) -> Endomorphism:
    """Extend an endomorphism to a larger alphabet by identity on new generators."""
    images = {}
    for g in e.alphabet:
        images[rename.get(g, g)] = _transport_word(e.image(g), target, rename)
    return Endomorphism(target, e.name, images)


# -- Tietze moves --------------------------------------------------------------


@dataclass(frozen=True)
class AddGenerator:
    name: str


@dataclass(frozen=True)
class RemoveGenerator:
    name: str


@dataclass(frozen=True)
class SubstituteGenerator:
    """Replace generator `old` by new_name = old * by^sign (sign in {+1, -1})."""

    old: str
    by: str
    new_name: str
    sign: int = 1


TietzeMove = AddGenerator | RemoveGenerator | SubstituteGenerator


def _substitute_letters(w: Word, target: Alphabet, images: dict[str, Word]) -> Word:
    letters: list[int] = []
    for idx, sign in w.pairs:
        img = images[w.alphabet.symbols[idx]]
        letters.extend(img.letters if sign > 0 else (-y for y in reversed(img.letters)))
    return Word(target, letters)


def change_generators(lpres: LPresentation, moves: Sequence[TietzeMove]) -> LPresentation:
    """Apply Tietze moves to an ascending L-presentation."""
    if not lpres.is_ascending:
        raise PresentationError("change_generators requires an ascending L-presentation")
    cur = lpres
    for move in moves:
        if isinstance(move, AddGenerator):
            cur = _tietze_add(cur, move.name)
        elif isinstance(move, RemoveGenerator):
            cur = _tietze_remove(cur, move.name)
        elif isinstance(move, SubstituteGenerator):
            cur = _tietze_substitute(cur, move)
        else:
            raise PresentationError(f"unknown Tietze move {move!r}")
    return cur


def _tietze_add(lpres: LPresentation, name: str) -> LPresentation:
    if name in lpres.alphabet:
        raise PresentationError(f"generator {name!r} already present")
    alphabet = Alphabet(lpres.alphabet.symbols + (name,))
    lift = {g: Word.generator(alphabet, g) for g in lpres.alphabet}
    new_r = tuple(_substitute_letters(w, alphabet, lift) for w in lpres.iterated)
    new_r += (Word.generator(alphabet, name),)
    endos = []
    for e in lpres.endos:
        images = {g: _substitute_letters(e.image(g), alphabet, lift) for g in e.alphabet}
        images[name] = Word.identity(alphabet)
        endos.append(Endomorphism(alphabet, e.name, images))
    return LPresentation(alphabet, (), tuple(endos), new_r)


def _tietze_remove(lpres: LPresentation, name: str) -> LPresentation:
    gen_word = Word.generator(lpres.alphabet, name)
    if gen_word not in lpres.iterated:
        raise PresentationError(
            f"cannot remove {name!r}: not listed as a relator"
        )
    alphabet = Alphabet(tuple(g for g in lpres.alphabet.symbols if g != name))
    drop = {g: (Word.generator(alphabet, g) if g != name else Word.identity(alphabet))
            for g in lpres.alphabet}
    new_r = []
    for w in lpres.iterated:
        if w == gen_word:
            continue
        img = _substitute_letters(w, alphabet, drop)
        if not img.is_identity:
            new_r.append(img)
    endos = []
    for e in lpres.endos:
        images = {
            g: _substitute_letters(e.image(g), alphabet, drop)
            for g in e.alphabet
            if g != name
        }
        appended = _substitute_letters(e.image(name), alphabet, drop)
        if not appended.is_identity:
            new_r.append(appended)
        endos.append(Endomorphism(alphabet, e.name, images))
    return LPresentation(alphabet, (), tuple(endos), tuple(new_r))


def _tietze_substitute(lpres: LPresentation, move: SubstituteGenerator) -> LPresentation:
    if move.sign not in (1, -1):
        raise PresentationError("substitution sign must be +1 or -1")
    if move.old not in lpres.alphabet or move.by not in lpres.alphabet:
        raise PresentationError("substitution references unknown generators")
    if move.old == move.by:
        raise PresentationError("cannot substitute a generator along itself")
    if move.new_name != move.old and move.new_name in lpres.alphabet:
        raise PresentationError(f"generator {move.new_name!r} already present")
    symbols = tuple(
        move.new_name if g == move.old else g for g in lpres.alphabet.symbols
    )
    alphabet = Alphabet(symbols)
    # old = new * by^(-sign), every other generator is carried across
    table = {
        g: Word.generator(alphabet, g) for g in lpres.alphabet if g != move.old
    }
    table[move.old] = Word.generator(alphabet, move.new_name) * Word.generator(
        alphabet, move.by, -move.sign
    )
    new_r = tuple(
        _substitute_letters(w, alphabet, table) for w in lpres.iterated
    )
    endos = []
    for e in lpres.endos:
        images = {}
        for g in e.alphabet:
            if g == move.old:
                continue
            images[g] = _substitute_letters(e.image(g), alphabet, table)
        # phi(new) = phi(old * by^sign), rewritten over the new alphabet
        img = e.image(move.old) * e.image(move.by) ** move.sign
        images[move.new_name] = _substitute_letters(img, alphabet, table)
        endos.append(Endomorphism(alphabet, e.name, images))
    return LPresentation(alphabet, (), tuple(endos), new_r)


# -- combinators ---------------------------------------------------------------


def free_product(left: LPresentation, right: LPresentation) -> LPresentation:
    """<S u T | Q u P | Phi u Psi | R u U> with extensions by identity."""
    alphabet, rename = _disjoint_union(left.alphabet, right.alphabet)
    lid: dict[str, str] = {}
    fixed = tuple(_transport_word(q, alphabet, lid) for q in left.fixed) + tuple(
        _transport_word(p, alphabet, rename) for p in right.fixed
    )
    iterated = tuple(_transport_word(r, alphabet, lid) for r in left.iterated) + tuple(
        _transport_word(u, alphabet, rename) for u in right.iterated
    )
    endos = tuple(_transport_endo(e, alphabet, lid) for e in left.endos) + tuple(
        _transport_endo(e, alphabet, rename) for e in right.endos
    )
    return LPresentation(alphabet, fixed, endos, iterated)


def hnn_extension(
    lpres: LPresentation,
    stable: str,
    subgroup_gens: Sequence[tuple[str, Word]],
    images: dict[str, Word],
) -> LPresentation:
    """Add a stable letter with relators image(t)^-1 * t^stable per subgroup generator."""
    if stable in lpres.alphabet:
        raise PresentationError(f"stable letter {stable!r} already a generator")
    alphabet = Alphabet(lpres.alphabet.symbols + (stable,))
    lid: dict[str, str] = {}
    s = Word.generator(alphabet, stable)
    fixed = [_transport_word(q, alphabet, lid) for q in lpres.fixed]
    for name, t_word in subgroup_gens:
        if t_word.alphabet != lpres.alphabet:
            raise PresentationError(f"subgroup generator {name!r} over wrong alphabet")
        img = images.get(name)
        if img is None:
            raise PresentationError(f"missing image for subgroup generator {name!r}")
        if img.alphabet != lpres.alphabet:
            raise PresentationError(f"image of {name!r} over wrong alphabet")
        t = _transport_word(t_word, alphabet, lid)
        fixed.append(_transport_word(img, alphabet, lid).inverse() * t.conj(s))
    iterated = tuple(_transport_word(r, alphabet, lid) for r in lpres.iterated)
    endos = tuple(_transport_endo(e, alphabet, lid) for e in lpres.endos)
    return LPresentation(alphabet, tuple(fixed), endos, iterated)


def group_extension(
    normal: LPresentation,
    quot: LPresentation,
    relator_lifts: Sequence[Word],
    conjugations: dict[tuple[str, str], Word],
    split: bool,
) -> LPresentation:
    """Extension of `normal` by `quot` from explicit lift data.

    relator_lifts pairs with quot.fixed: each p becomes p * g_p^-1.
    conjugations maps (s, t) to g_(s,t) over normal's alphabet: s^t = g_(s,t).
    """
    if len(relator_lifts) != len(quot.fixed):
        raise PresentationError("need one lift per fixed relator of the quotient")
    if split and any(not g.is_identity for g in relator_lifts):
        raise PresentationError("split extension requires trivial relator lifts")
    if not split and quot.iterated:
        raise PresentationError(
            "non-split extension requires the quotient to be finitely presented"
        )
    alphabet, rename = _disjoint_union(normal.alphabet, quot.alphabet)
    lid: dict[str, str] = {}
    fixed = [_transport_word(q, alphabet, lid) for q in normal.fixed]
    for p, g_p in zip(quot.fixed, relator_lifts):
        if g_p.alphabet != normal.alphabet:
            raise PresentationError("relator lift over wrong alphabet")
        fixed.append(
            _transport_word(p, alphabet, rename)
            * _transport_word(g_p, alphabet, lid).inverse()
        )
    for s in normal.alphabet:
        for t in quot.alphabet:
            g = conjugations.get((s, t))
            if g is None:
                raise PresentationError(f"missing conjugation word for ({s}, {t})")
            if g.alphabet != normal.alphabet:
                raise PresentationError("conjugation word over wrong alphabet")
            sw = Word.generator(alphabet, s)
            tw = Word.generator(alphabet, rename[t])
            fixed.append(sw.conj(tw) * _transport_word(g, alphabet, lid).inverse())
    iterated = tuple(
        _transport_word(r, alphabet, lid) for r in normal.iterated
    ) + tuple(_transport_word(u, alphabet, rename) for u in quot.iterated)
    endos = tuple(_transport_endo(e, alphabet, lid) for e in normal.endos) + tuple(
        _transport_endo(e, alphabet, rename) for e in quot.endos
    )
    return LPresentation(alphabet, tuple(fixed), endos, iterated)


def wreath_product(base: LPresentation, top: LPresentation) -> LPresentation:
    """Restricted wreath product base wr top; the caller asserts base is abelian.

    Doubled generators get a 'b' suffix; one new substitution omega_t per top
    generator conjugates every doubled generator by t.
    """
    alphabet0, rename_top = _disjoint_union(base.alphabet, top.alphabet)
    taken = set(alphabet0.symbols)
    bar: dict[str, str] = {}
    names = list(alphabet0.symbols)
    for s in base.alphabet:
        b = _fresh_name(s + "b", taken)
        bar[s] = b
        taken.add(b)
        names.append(b)
    alphabet = Alphabet(names)
    lid: dict[str, str] = {}

    def up(w: Word, rename: dict[str, str]) -> Word:
        return _transport_word(w, alphabet, rename)

    fixed = [up(q, lid) for q in base.fixed]
    fixed += [up(p, rename_top) for p in top.fixed]
    fixed += [
        Word.generator(alphabet, s, -1) * Word.generator(alphabet, bar[s])
        for s in base.alphabet
    ]
    iterated = [up(r, lid) for r in base.iterated]
    iterated += [up(u, rename_top) for u in top.iterated]
    iterated += [
        commutator(
            Word.generator(alphabet, s1), Word.generator(alphabet, bar[s2])
        )
        for s1 in base.alphabet
        for s2 in base.alphabet
    ]
    endos = [_transport_endo(e, alphabet, lid) for e in base.endos]
    endos += [_transport_endo(e, alphabet, rename_top) for e in top.endos]
    for t in top.alphabet:
        tw = Word.generator(alphabet, rename_top[t])
        images = {
            bar[s]: Word.generator(alphabet, bar[s]).conj(tw) for s in base.alphabet
        }
        endos.append(Endomorphism(alphabet, f"omega_{rename_top[t]}", images))
    return LPresentation(alphabet, tuple(fixed), tuple(endos), tuple(iterated))


def quotient(lpres: LPresentation, extra: Iterable[Word]) -> LPresentation:
    """Quotient by the normal closure of extra words: append them to Q."""
    extra = tuple(extra)
    for w in extra:
        if w.alphabet != lpres.alphabet:
            raise PresentationError(f"relator {w} not over the presentation alphabet")
    return LPresentation(
        lpres.alphabet, lpres.fixed + extra, lpres.endos, lpres.iterated
    )


def hnn_embed(lpres: LPresentation) -> FinitePresentation:
    """Finitely presented ascending HNN overgroup of an ascending L-presentation.

    Generators S plus one stable letter per substitution; relators are
    s^phi * phi(s)^-1 for every pair, followed by R.
    """
    if not lpres.is_ascending:
        raise PresentationError("hnn_embed requires an ascending L-presentation")
    names = list(lpres.alphabet.symbols)
    for e in lpres.endos:
        if e.name in names:
            raise PresentationError(
                f"substitution name {e.name!r} collides with a generator"
            )
        names.append(e.name)
    alphabet = Alphabet(names)
    lid: dict[str, str] = {}
    relators = []
    for e in lpres.endos:
        stable = Word.generator(alphabet, e.name)
        for s in lpres.alphabet:
            sw = Word.generator(alphabet, s)
            img = _transport_word(e.image(s), alphabet, lid)
            relators.append(sw.conj(stable) * img.inverse())
    relators.extend(_transport_word(r, alphabet, lid) for r in lpres.iterated)
    return FinitePresentation(alphabet, tuple(relators))


def relatively_free(gens: Alphabet, identity_word: Word) -> LPresentation:
    """Largest group on `gens` satisfying the identity `identity_word`.

    The identity is a word over an auxiliary alphabet Y; substitutions
    phi_(x,y): y -> x y for x ranging over the generators and their inverses.
    """
    aux = identity_word.alphabet
    for g in gens:
        if g in aux:
            raise PresentationError(f"generator {g!r} overlaps the identity alphabet")
    alphabet = Alphabet(gens.symbols + aux.symbols)
    lid: dict[str, str] = {}
    fixed = tuple(Word.generator(alphabet, y) for y in aux)
    endos = []
    for x in gens:
        for y in aux:
            xw = Word.generator(alphabet, x)
            yw = Word.generator(alphabet, y)
            endos.append(
                Endomorphism(alphabet, f"phi_{x}_{y}", {y: xw * yw})
            )
            endos.append(
                Endomorphism(alphabet, f"phi_{x}i_{y}", {y: xw.inverse() * yw})
            )
    iterated = (_transport_word(identity_word, alphabet, lid),)
    return LPresentation(alphabet, fixed, tuple(endos), iterated)


# -- Reidemeister-Schreier -----------------------------------------------------


def _act_coset(
    action: Sequence[Sequence[int]], coset: int, letter: tuple[int, int]
) -> int:
    idx, sign = letter
    if sign > 0:
        return action[idx][coset]
    row = action[idx]
    for src, dst in enumerate(row):
        if dst == coset:
            return src
    raise PresentationError("inconsistent coset action")


def _word_coset(action, coset: int, w: Word) -> int:
    for pair in w.pairs:
        coset = _act_coset(action, coset, pair)
    return coset


def subgroup_presentation(
    lpres: LPresentation,
    coset_action: dict[str, Sequence[int]],
    transversal: Sequence[Word],
) -> LPresentation:
    """L-presentation of the coset-0 stabilizer via Reidemeister-Schreier.

    coset_action maps each generator name to its permutation of the cosets
    (0-based image arrays, coset of the trivial word is 0); transversal has
    one word per coset.  Fixed relators are rewritings of q^x, iterated
    relators rewritings of r^x, and each substitution induces one on the
    Schreier generators.
    """
    n = len(transversal)
    action: list[list[int]] = []
    for g in lpres.alphabet:
        row = coset_action.get(g)
        if row is None:
            raise PresentationError(f"missing coset action for generator {g!r}")
        row = list(row)
        if sorted(row) != list(range(n)):
            raise PresentationError(f"action of {g!r} is not a permutation of {n} cosets")
        action.append(row)
    for i, x in enumerate(transversal):
        if x.alphabet != lpres.alphabet:
            raise PresentationError("transversal word over wrong alphabet")
        if _word_coset(action, 0, x) != i:
            raise PresentationError(f"transversal word {x} does not lie in coset {i}")

    inv_action = []
    for row in action:
        inv = [0] * n
        for src, dst in enumerate(row):
            inv[dst] = src
        inv_action.append(inv)

    # Schreier generators: (s, x) with word trans[x] * s * trans[x.s]^-1,
    # kept when that word is not freely trivial.
    schreier: dict[tuple[int, int], int] = {}
    names: list[str] = []
    defs: list[Word] = []
    for idx, g in enumerate(lpres.alphabet):
        for x in range(n):
            word = transversal[x] * Word.generator(lpres.alphabet, g) * transversal[
                action[idx][x]
            ].inverse()
            if word.is_identity:
                continue
            schreier[(idx, x)] = len(names)
            names.append(f"{g}_{x}")
            defs.append(word)
    sub_alphabet = Alphabet(names)

    def rewrite(w: Word) -> Word:
        if _word_coset(action, 0, w) != 0:
            raise PresentationError(f"word {w} does not lie in the subgroup")
        coset = 0
        letters: list[int] = []
        for idx, sign in w.pairs:
            if sign > 0:
                key = (idx, coset)
                if key in schreier:
                    letters.append(schreier[key] + 1)
                coset = action[idx][coset]
            else:
                src = inv_action[idx][coset]
                key = (idx, src)
                if key in schreier:
                    letters.append(-(schreier[key] + 1))
                coset = src
        return Word(sub_alphabet, letters)

    def conjugate_rewrites(relators: Iterable[Word]) -> list[Word]:
        out: list[Word] = []
        seen: set[tuple[int, ...]] = set()
        for r in relators:
            for x in transversal:
                img = rewrite(r.conj(x))
                if not img.is_identity and img.letters not in seen:
                    seen.add(img.letters)
                    out.append(img)
        return out

    fixed = conjugate_rewrites(lpres.fixed)
    iterated = conjugate_rewrites(lpres.iterated)
    endos = []
    for e in lpres.endos:
        images = {}
        for (idx, x), k in schreier.items():
            img = e(defs[k])
            if _word_coset(action, 0, img) != 0:
                raise PresentationError(
                    f"substitution {e.name} does not preserve the subgroup "
                    f"(image of Schreier generator {names[k]} escapes)"
                )
            images[names[k]] = rewrite(img)
        endos.append(Endomorphism(sub_alphabet, e.name, images))
    return LPresentation(sub_alphabet, tuple(fixed), tuple(endos), tuple(iterated))
