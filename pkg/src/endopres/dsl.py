"""Presentation DSL: parser, canonical printer, and JSON serialization.

Grammar (words bind ^ to the nearest atom; integer exponent is a power,
word exponent is conjugation g^h = h^-1 g h; `1` is the empty word):

    file     := "group" NAME "{" section* "}"
    section  := "generators:" names ";" | "fixed:" words ";"
              | "endo" NAME ":" (gen "->" word)-list ";"
              | "iterated:" words ";"
              | "recursion" "degree" INT "{" (gen "=" perm? sections?)* "}"
              | "contraction" "D" "=" INT ";"
    word     := term+        term := atom ("^" (INT | atom))?
    atom     := GEN | "1" | "(" word ")" | "[" word "," word "]"

Multi-letter generator names need whitespace separators; the printer always
emits them.  `#` starts a line comment.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from endopres.lpres import LPresentation, PresentationError
from endopres.treeauto import SelfSimilarSpec, identity_perm
from endopres.words import Alphabet, Endomorphism, Word, commutator


class DslError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<arrow>->)
  | (?P<int>-?\d+)
  | (?P<name>[A-Za-z][A-Za-z0-9_]*)
  | (?P<punct>[{}()\[\],;:^=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DslError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            tokens.append(_Token(kind, tok, line, m.start() - line_start + 1))
        line += tok.count("\n")
        if "\n" in tok:
            line_start = m.start() + tok.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str) -> DslError:
        tok = self.peek()
        return DslError(message, tok.line, tok.column)

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text:
            raise DslError(
                f"expected {text!r}, found {tok.text!r}", tok.line, tok.column
            )
        return tok

    def expect_name(self) -> str:
        tok = self.next()
        if tok.kind != "name":
            raise DslError(f"expected a name, found {tok.text!r}", tok.line, tok.column)
        return tok.text

    def expect_int(self) -> int:
        tok = self.next()
        if tok.kind != "int":
            raise DslError(
                f"expected an integer, found {tok.text!r}", tok.line, tok.column
            )
        return int(tok.text)

    # -- words -----------------------------------------------------------

    def parse_word(self, alphabet: Alphabet) -> Word:
        out = self.parse_atom(alphabet, allow_exponent=True)
        while self.peek().kind in ("name", "int") or self.peek().text in ("(", "["):
            if self.peek().kind == "int" and self.peek().text != "1":
                break
            out = out * self.parse_atom(alphabet, allow_exponent=True)
        return out

    def parse_atom(self, alphabet: Alphabet, allow_exponent: bool) -> Word:
        tok = self.next()
        if tok.kind == "name":
            if tok.text not in alphabet:
                raise DslError(f"unknown generator {tok.text!r}", tok.line, tok.column)
            atom = Word.generator(alphabet, tok.text)
        elif tok.kind == "int" and tok.text == "1":
            atom = Word.identity(alphabet)
        elif tok.text == "(":
            atom = self.parse_word(alphabet)
            self.expect(")")
        elif tok.text == "[":
            left = self.parse_word(alphabet)
            self.expect(",")
            right = self.parse_word(alphabet)
            self.expect("]")
            atom = commutator(left, right)
        else:
            raise DslError(f"expected a word, found {tok.text!r}", tok.line, tok.column)
        while allow_exponent and self.peek().text == "^":
            self.next()
            if self.peek().kind == "int":
                atom = atom ** self.expect_int()
            else:
                atom = atom.conj(self.parse_atom(alphabet, allow_exponent=False))
        return atom

    def parse_word_list(self, alphabet: Alphabet, stop: str) -> list[Word]:
        words = [self.parse_word(alphabet)]
        while self.peek().text == ",":
            self.next()
            words.append(self.parse_word(alphabet))
        self.expect(stop)
        return words


def parse_word(alphabet: Alphabet, text: str) -> Word:
    """Parse a single word in the DSL word syntax."""
    parser = _Parser(text)
    word = parser.parse_word(alphabet)
    if parser.peek().kind != "eof":
        raise parser.error("trailing input after word")
    return word


@dataclass(frozen=True)
class GroupFile:
    """Parsed DSL file: presentation plus optional recursion block."""

    name: str
    lpres: LPresentation
    recursion: SelfSimilarSpec | None
    contraction_bound: int | None


def parse_dsl(text: str) -> GroupFile:
    parser = _Parser(text)
    parser.expect("group")
    name = parser.expect_name()
    parser.expect("{")

    generators: list[str] | None = None
    fixed_src: list[tuple[int, int]] = []
    endo_src: list[tuple[str, int]] = []
    iterated_src: list[tuple[int, int]] = []
    recursion_src: int | None = None
    contraction: int | None = None

    # first pass records token positions so sections may appear in any order;
    # generators must come first because words need the alphabet.
    tok = parser.peek()
    if tok.text != "generators":
        raise parser.error("the generators section must come first")
    parser.next()
    parser.expect(":")
    names = [parser.expect_name()]
    while parser.peek().text == ",":
        parser.next()
        names.append(parser.expect_name())
    parser.expect(";")
    try:
        alphabet = Alphabet(names)
    except Exception as exc:
        raise parser.error(str(exc))

    fixed: list[Word] = []
    iterated: list[Word] = []
    endos: list[Endomorphism] = []
    recursion: SelfSimilarSpec | None = None

    while parser.peek().text != "}":
        section = parser.expect_name()
        if section == "fixed":
            parser.expect(":")
            fixed.extend(parser.parse_word_list(alphabet, ";"))
        elif section == "iterated":
            parser.expect(":")
            iterated.extend(parser.parse_word_list(alphabet, ";"))
        elif section == "endo":
            endo_name = parser.expect_name()
            parser.expect(":")
            images: dict[str, Word] = {}
            while True:
                gen = parser.expect_name()
                if gen not in alphabet:
                    raise parser.error(f"unknown generator {gen!r}")
                if gen in images:
                    raise parser.error(f"duplicate image for {gen!r}")
                parser.expect("->")
                images[gen] = parser.parse_word(alphabet)
                if parser.peek().text != ",":
                    break
                parser.next()
            parser.expect(";")
            endos.append(Endomorphism(alphabet, endo_name, images))
        elif section == "recursion":
            if recursion is not None:
                raise parser.error("duplicate recursion block")
            recursion = _parse_recursion(parser, alphabet)
        elif section == "contraction":
            parser.expect("D")
            parser.expect("=")
            contraction = parser.expect_int()
            parser.expect(";")
        else:
            raise parser.error(f"unknown section {section!r}")
    parser.expect("}")
    if parser.peek().kind != "eof":
        raise parser.error("trailing input after group body")
    if recursion is not None and contraction is not None:
        recursion = SelfSimilarSpec(
            recursion.degree,
            recursion.alphabet,
            recursion.sections,
            recursion.tops,
            contraction,
            recursion.branching,
        )
    lpres = LPresentation(alphabet, tuple(fixed), tuple(endos), tuple(iterated))
    return GroupFile(name, lpres, recursion, contraction)


def _parse_recursion(parser: _Parser, lpres_alphabet: Alphabet) -> SelfSimilarSpec:
    parser.expect("degree")
    degree = parser.expect_int()
    if degree < 2:
        raise parser.error("recursion degree must be at least 2")
    parser.expect("{")
    # two passes: collect the recursion alphabet (may extend the generators),
    # then parse section words over it
    entries: list[tuple[str, tuple[int, ...] | None, list[Word] | None]] = []
    names: list[str] = []
    start = parser.pos
    depth_guard = 0
    while parser.peek().text != "}":
        gen = parser.expect_name()
        names.append(gen)
        parser.expect("=")
        while parser.peek().text not in (";", "}"):
            parser.next()
            depth_guard += 1
            if depth_guard > 100000:
                raise parser.error("unterminated recursion block")
        if parser.peek().text == ";":
            parser.next()
    if len(set(names)) != len(names):
        raise parser.error("duplicate generator in recursion block")
    for g in lpres_alphabet:
        if g not in names:
            raise parser.error(f"recursion block misses generator {g!r}")
    alphabet = Alphabet(names)
    parser.pos = start
    sections: list[tuple[Word, ...]] = []
    tops: list[tuple[int, ...]] = []
    for expected in names:
        gen = parser.expect_name()
        assert gen == expected
        parser.expect("=")
        top = identity_perm(degree)
        secs: tuple[Word, ...] = tuple(
            Word.identity(alphabet) for _ in range(degree)
        )
        if parser.peek().text == "perm":
            parser.next()
            top = _parse_perm(parser, degree)
        if parser.peek().text == "(":
            parser.next()
            words = parser.parse_word_list(alphabet, ")")
            if len(words) != degree:
                raise parser.error(
                    f"expected {degree} sections for {gen!r}, got {len(words)}"
                )
            secs = tuple(words)
        sections.append(secs)
        tops.append(top)
        if parser.peek().text == ";":
            parser.next()
    parser.expect("}")
    return SelfSimilarSpec(degree, alphabet, tuple(sections), tuple(tops))


def _parse_perm(parser: _Parser, degree: int) -> tuple[int, ...]:
    images = list(range(degree))
    saw_cycle = False
    while parser.peek().text == "(":
        parser.next()
        cycle: list[int] = []
        while parser.peek().text != ")":
            if parser.peek().text == ",":
                parser.next()
                continue
            digit = parser.expect_int()
            if not 1 <= digit <= degree:
                raise parser.error(f"cycle digit {digit} out of range 1..{degree}")
            cycle.append(digit - 1)
        parser.expect(")")
        saw_cycle = True
        if len(set(cycle)) != len(cycle):
            raise parser.error("repeated digit in cycle")
        for i, point in enumerate(cycle):
            images[point] = cycle[(i + 1) % len(cycle)]
    if not saw_cycle:
        raise parser.error("perm requires at least one cycle")
    return tuple(images)


# -- printing -------------------------------------------------------------------


def _perm_cycles(perm: tuple[int, ...]) -> str:
    seen: set[int] = set()
    parts = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cycle = [start]
        seen.add(start)
        nxt = perm[start]
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = perm[nxt]
        parts.append("(" + " ".join(str(p + 1) for p in cycle) + ")")
    return "".join(parts)


def print_dsl(
    name: str,
    lpres: LPresentation,
    recursion: SelfSimilarSpec | None = None,
    contraction_bound: int | None = None,
) -> str:
    """Canonical DSL form: print(parse(print(x))) == print(x)."""
    lines = [f"group {name} {{"]
    lines.append(f"  generators: {', '.join(lpres.alphabet.symbols)};")
    if lpres.fixed:
        lines.append(f"  fixed: {', '.join(str(q) for q in lpres.fixed)};")
    for e in lpres.endos:
        rules = ", ".join(f"{g} -> {e.image(g)}" for g in e.alphabet)
        lines.append(f"  endo {e.name}: {rules};")
    if lpres.iterated:
        lines.append(f"  iterated: {', '.join(str(r) for r in lpres.iterated)};")
    if recursion is not None:
        lines.append(f"  recursion degree {recursion.degree} {{")
        for i, g in enumerate(recursion.alphabet):
            parts = [f"    {g} ="]
            cycles = _perm_cycles(recursion.tops[i])
            if cycles:
                parts.append(f"perm{cycles}")
            parts.append("(" + ", ".join(str(s) for s in recursion.sections[i]) + ")")
            lines.append(" ".join(parts) + ";")
        lines.append("  }")
    if contraction_bound is not None:
        lines.append(f"  contraction D = {contraction_bound};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- JSON serialization ----------------------------------------------------------


def lpres_to_json(lpres: LPresentation) -> dict:
    """Canonical sorted JSON form: word strings, endo maps by name."""
    return {
        "alphabet": list(lpres.alphabet.symbols),
        "fixed": sorted(str(q) for q in lpres.fixed),
        "endos": [
            {
                "name": e.name,
                "images": {g: str(e.image(g)) for g in sorted(e.alphabet.symbols)},
            }
            for e in sorted(lpres.endos, key=lambda e: e.name)
        ],
        "iterated": sorted(str(r) for r in lpres.iterated),
    }


def lpres_from_json(data: dict) -> LPresentation:
    alphabet = Alphabet(data["alphabet"])
    fixed = tuple(parse_word(alphabet, t) for t in data["fixed"])
    endos = tuple(
        Endomorphism(
            alphabet,
            e["name"],
            {g: parse_word(alphabet, t) for g, t in e["images"].items()},
        )
        for e in data["endos"]
    )
    iterated = tuple(parse_word(alphabet, t) for t in data["iterated"])
    return LPresentation(alphabet, fixed, endos, iterated)


def lpres_to_json_text(lpres: LPresentation) -> str:
    return json.dumps(lpres_to_json(lpres), indent=2, sort_keys=True)
