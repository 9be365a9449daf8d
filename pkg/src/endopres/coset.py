"""Verification oracles: Todd-Coxeter coset enumeration and abelianization.

The enumerator is the relator-scanning (HLT) strategy over a union-find
coset graph: subgroup words are traced at coset 0, then every live coset
scans every relator, defining cosets at the first undefined entry of each
trace.  Deterministic throughout; the cap counts cosets ever created.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

from endopres.lpres import FinitePresentation, LPresentation, enumerate_relators
from endopres.words import Word


class CosetError(ValueError):
    pass


@dataclass(frozen=True)
class CosetTable:
    """Closed table: rows[c][2*g] = c.g, rows[c][2*g+1] = c.g^-1; coset 0 is H."""

    n_generators: int
    rows: tuple[tuple[int, ...], ...] | None
    overflow: bool

    @property
    def closed(self) -> bool:
        return not self.overflow

    @property
    def n_cosets(self) -> int:
        if self.rows is None:
            raise CosetError("overflowed enumeration has no coset count")
        return len(self.rows)

    def generator_permutation(self, g: int) -> tuple[int, ...]:
        if self.rows is None:
            raise CosetError("overflowed enumeration has no action")
        return tuple(row[2 * g] for row in self.rows)

    def to_permutations(self) -> list[tuple[int, ...]]:
        return [self.generator_permutation(g) for g in range(self.n_generators)]


_SENT = -1


def _directions(w: Word) -> list[int]:
    return [2 * idx if sign > 0 else 2 * idx + 1 for idx, sign in w.pairs]


class _Graph:
    def __init__(self, n_dirs: int):
        self.n_dirs = n_dirs
        self.labels: list[int] = []
        self.rows: list[list[int]] = []
        self.new_coset()

    def new_coset(self) -> int:
        c = len(self.labels)
        self.labels.append(c)
        self.rows.append([_SENT] * self.n_dirs)
        return c

    def find(self, c: int) -> int:
        root = c
        while self.labels[root] != root:
            root = self.labels[root]
        while self.labels[c] != root:
            self.labels[c], c = root, self.labels[c]
        return root

    def follow(self, c: int, d: int) -> int:
        c = self.find(c)
        row = self.rows[c]
        if row[d] == _SENT:
            nxt = self.new_coset()
            row[d] = nxt
            self.rows[nxt][d ^ 1] = c
        return self.find(row[d])

    def trace(self, c: int, dirs: Sequence[int]) -> int:
        for d in dirs:
            c = self.follow(c, d)
        return c

    def unify(self, c1: int, c2: int) -> None:
        queue = [(c1, c2)]
        while queue:
            c1, c2 = queue.pop()
            c1, c2 = self.find(c1), self.find(c2)
            if c1 == c2:
                continue
            if c2 < c1:
                c1, c2 = c2, c1
            self.labels[c2] = c1
            row1, row2 = self.rows[c1], self.rows[c2]
            for d in range(self.n_dirs):
                if row2[d] == _SENT:
                    continue
                if row1[d] == _SENT:
                    row1[d] = row2[d]
                else:
                    queue.append((row1[d], row2[d]))


def todd_coxeter(
    pres: FinitePresentation,
    subgroup: Sequence[Word] = (),
    max_cosets: int = 10 ** 5,
) -> CosetTable:
    """Enumerate cosets of the subgroup generated by `subgroup` words."""
    if max_cosets < 1:
        raise CosetError("max_cosets must be at least 1")
    k = len(pres.alphabet)
    for w in tuple(subgroup) + pres.relators:
        if w.alphabet != pres.alphabet:
            raise CosetError(f"word {w} not over the presentation alphabet")
    graph = _Graph(2 * k)
    rel_dirs = []
    seen = set()
    for r in pres.relators:
        dirs = tuple(_directions(r))
        if dirs and dirs not in seen:
            seen.add(dirs)
            rel_dirs.append(dirs)
    for h in subgroup:
        graph.unify(graph.trace(0, _directions(h)), 0)
        if len(graph.labels) > max_cosets:
            return CosetTable(k, None, True)
    visit = 0
    while visit < len(graph.labels):
        if graph.find(visit) == visit:
            for dirs in rel_dirs:
                graph.unify(graph.trace(visit, dirs), visit)
                if len(graph.labels) > max_cosets:
                    return CosetTable(k, None, True)
            # totality: define any neighbor the relator scans left open
            for d in range(2 * k):
                if graph.find(visit) != visit:
                    break
                graph.follow(visit, d)
                if len(graph.labels) > max_cosets:
                    return CosetTable(k, None, True)
        visit += 1
    # compress live cosets in discovery order
    live = [c for c in range(len(graph.labels)) if graph.find(c) == c]
    index = {c: i for i, c in enumerate(live)}
    rows = []
    for c in live:
        row = []
        for d in range(2 * k):
            tgt = graph.rows[c][d]
            if tgt == _SENT:
                raise CosetError("closed enumeration left an undefined entry")
            row.append(index[graph.find(tgt)])
        rows.append(tuple(row))
    return CosetTable(k, tuple(rows), False)


def validate_table(
    table: CosetTable, pres: FinitePresentation, subgroup: Sequence[Word] = ()
) -> bool:
    """Post-hoc check: generators act as permutations, all traces close."""
    if not table.closed:
        return False
    n = table.n_cosets
    for g in range(table.n_generators):
        perm = table.generator_permutation(g)
        if sorted(perm) != list(range(n)):
            return False
        for c in range(n):
            if table.rows[perm[c]][2 * g + 1] != c:
                return False

    def walk(c: int, w: Word) -> int:
        for d in _directions(w):
            c = table.rows[c][d]
        return c

    for r in pres.relators:
        for c in range(n):
            if walk(c, r) != c:
                return False
    for h in subgroup:
        if walk(0, h) != 0:
            return False
    return True


def order_from_presentation(
    lpres: LPresentation, depth: int, max_cosets: int = 10 ** 5
) -> int | None:
    """Group order of the depth-truncated presentation; None on overflow."""
    relators = enumerate_relators(lpres, depth)
    pres = FinitePresentation(lpres.alphabet, tuple(relators))
    table = todd_coxeter(pres, (), max_cosets)
    if not table.closed:
        return None
    return table.n_cosets


# -- Smith normal form ----------------------------------------------------------


@dataclass(frozen=True)
class AbelianInvariants:
    """Cokernel invariants: torsion divisor chain (entries >= 2) and free rank."""

    torsion: tuple[int, ...]
    free_rank: int

    def __post_init__(self):
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a != 0:
                raise CosetError(f"torsion {self.torsion} is not a divisor chain")
        if any(t < 2 for t in self.torsion):
            raise CosetError("torsion entries must be at least 2")

    def __str__(self) -> str:
        parts = [f"Z/{t}" for t in self.torsion] + ["Z"] * self.free_rank
        return " x ".join(parts) if parts else "0"


def smith_normal_form(
    matrix: Sequence[Sequence[int]], n_cols: int | None = None
) -> AbelianInvariants:
    """Invariants of Z^cols / rowspace(matrix), via integer elimination.

    n_cols is only needed when the matrix has no rows.
    """
    rows = [list(map(int, row)) for row in matrix]
    if rows:
        n_cols = len(rows[0])
        if any(len(r) != n_cols for r in rows):
            raise CosetError("ragged matrix")
    elif n_cols is None:
        n_cols = 0
    diag: list[int] = []
    m = len(rows)
    r = c = 0
    while r < m and c < n_cols:
        # pick the entry of least absolute value in the remaining block
        pi = pj = -1
        best = 0
        for i in range(r, m):
            for j in range(c, n_cols):
                v = abs(rows[i][j])
                if v and (best == 0 or v < best):
                    best, pi, pj = v, i, j
        if best == 0:
            break
        rows[r], rows[pi] = rows[pi], rows[r]
        for row in rows:
            row[c], row[pj] = row[pj], row[c]
        while True:
            pivot = rows[r][c]
            done = True
            for i in range(r + 1, m):
                q = rows[i][c] // pivot
                if q:
                    for j in range(c, n_cols):
                        rows[i][j] -= q * rows[r][j]
                if rows[i][c]:
                    rows[r], rows[i] = rows[i], rows[r]
                    done = False
                    break
            if not done:
                continue
            for j in range(c + 1, n_cols):
                q = rows[r][j] // pivot
                if q:
                    for i in range(r, m):
                        rows[i][j] -= q * rows[i][c]
                if rows[r][j]:
                    for i in range(m):
                        rows[i][c], rows[i][j] = rows[i][j], rows[i][c]
                    done = False
                    break
            if done:
                break
        diag.append(abs(rows[r][c]))
        r += 1
        c += 1
    # enforce the divisibility chain on the diagonal
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            a, b = diag[i], diag[j]
            if b % a != 0:
                g = gcd(a, b)
                diag[i], diag[j] = g, a * b // g
    diag.sort()
    torsion = tuple(d for d in diag if d >= 2)
    return AbelianInvariants(torsion, n_cols - len(diag))


def exponent_matrix(relators: Iterable[Word], n_generators: int) -> list[list[int]]:
    out = []
    for w in relators:
        sums = w.exponent_sums()
        if len(sums) != n_generators:
            raise CosetError("relator over a different alphabet")
        out.append(list(sums))
    return out


def abelianization(lpres: LPresentation, depth: int) -> AbelianInvariants:
    """SNF of the exponent-sum matrix of the depth-truncated relator set."""
    relators = enumerate_relators(lpres, depth)
    k = len(lpres.alphabet)
    return smith_normal_form(exponent_matrix(relators, k), n_cols=k)


def abelianization_stabilized(
    lpres: LPresentation, depth: int
) -> tuple[AbelianInvariants, bool]:
    """Invariants at `depth` plus whether they match the previous depth."""
    now = abelianization(lpres, depth)
    if depth == 0:
        return now, False
    return now, abelianization(lpres, depth - 1) == now
