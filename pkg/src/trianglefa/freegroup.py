"""Words and automorphisms of the free group F_n.

Letters use the Tietze convention: ``+i`` is the generator ``a_i`` and ``-i``
its inverse (1-based). Automorphisms are stored as the tuple of images of the
basis and compose right-to-left: ``(f @ g)(x) == f(g(x))``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_IMAGE_LENGTH = 64


class ImageOverflowError(ArithmeticError):
    """An automorphism image grew past the configured length limit."""


class RankError(ValueError):
    pass


class GeneratorParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"token {position}: {message}")
        self.position = position


def _reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """A freely reduced word. Build through :func:`word_reduce`."""

    rank: int
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 1:
            raise RankError("rank must be positive")
        for x in self.letters:
            if x == 0 or abs(x) > self.rank:
                raise IndexError(f"letter {x} outside basis of rank {self.rank}")
        for x, y in zip(self.letters, self.letters[1:]):
            if x == -y:
                raise ValueError("word is not freely reduced")

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: Word) -> Word:
        return word_mul(self, other)

    def __invert__(self) -> Word:
        return word_inv(self)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(f"a{x}" if x > 0 else f"a{-x}^-1" for x in self.letters)

    def pairs(self) -> list[tuple[int, int]]:
        """The word as (generator index, sign) pairs."""
        return [(abs(x), 1 if x > 0 else -1) for x in self.letters]


def word_reduce(raw: Iterable[int | tuple[int, int]], rank: int) -> Word:
    """Freely reduce a sequence of signed letters.

    Letters may be given as Tietze integers or as ``(index, sign)`` pairs.

    >>> str(word_reduce([1, 2, -2, 1], 3))
    'a1 a1'
    """
    flat = []
    for x in raw:
        if isinstance(x, tuple):
            i, s = x
            if s not in (1, -1):
                raise ValueError(f"bad sign {s}")
            x = i * s
        if x == 0 or abs(x) > rank:
            raise IndexError(f"letter {x} outside basis of rank {rank}")
        flat.append(x)
    return Word(rank, _reduce(flat))


def word_mul(u: Word, v: Word) -> Word:
    if u.rank != v.rank:
        raise RankError(f"basis mismatch: {u.rank} vs {v.rank}")
    return Word(u.rank, _reduce(u.letters + v.letters))


def word_inv(u: Word) -> Word:
    return Word(u.rank, tuple(-x for x in reversed(u.letters)))


def _invert_letters(w: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(-x for x in reversed(w))


@dataclass(frozen=True)
class FreeAut:
    """Automorphism of F_n given by the images of a_1..a_n.

    Equality and hashing are on the reduced image tuples, so values can be
    used directly as set members during closure enumeration.
    """

    rank: int
    images: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.images) != self.rank:
            raise RankError(f"expected {self.rank} images, got {len(self.images)}")

    @classmethod
    def identity(cls, rank: int) -> FreeAut:
        return cls(rank, tuple((i,) for i in range(1, rank + 1)))

    @classmethod
    def from_images(cls, images: Sequence[Sequence[int]], rank: int | None = None) -> FreeAut:
        rank = len(images) if rank is None else rank
        return cls(rank, tuple(word_reduce(w, rank).letters for w in images))

    def one(self) -> FreeAut:
        return FreeAut.identity(self.rank)

    def image(self, i: int) -> Word:
        return Word(self.rank, self.images[i - 1])

    def apply(self, w: Word, limit: int = MAX_IMAGE_LENGTH) -> Word:
        if w.rank != self.rank:
            raise RankError(f"basis mismatch: {w.rank} vs {self.rank}")
        return Word(self.rank, self._apply(w.letters, limit))

    def _apply(self, letters: tuple[int, ...], limit: int) -> tuple[int, ...]:
        out: list[int] = []
        images = self.images
        for x in letters:
            piece = images[x - 1] if x > 0 else _invert_letters(images[-x - 1])
            for y in piece:
                if out and out[-1] == -y:
                    out.pop()
                else:
                    out.append(y)
        if len(out) > limit:
            raise ImageOverflowError(f"image of length {len(out)} exceeds limit {limit}")
        return tuple(out)

    def compose(self, other: FreeAut, limit: int = MAX_IMAGE_LENGTH) -> FreeAut:
        if other.rank != self.rank:
            raise RankError(f"basis mismatch: {self.rank} vs {other.rank}")
        return FreeAut(self.rank, tuple(self._apply(w, limit) for w in other.images))

    __mul__ = compose
    __matmul__ = compose

    def is_identity(self) -> bool:
        return all(w == (i,) for i, w in enumerate(self.images, 1))

    def __str__(self) -> str:
        return "[" + ", ".join(f"a{i}->{self.image(i)}" for i in range(1, self.rank + 1)) + "]"


def aut_compose(f: FreeAut, g: FreeAut, limit: int = MAX_IMAGE_LENGTH) -> FreeAut:
    """``f∘g``: g acts first."""
    return f.compose(g, limit)


UNBOUNDED = None


def aut_order(f: FreeAut, cap: int) -> int | None:
    """Least k <= cap with f^k = id, or ``UNBOUNDED`` (None)."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    g = f
    for k in range(1, cap + 1):
        if g.is_identity():
            return k
        if k < cap:
            try:
                g = f.compose(g)
            except ImageOverflowError:
                return UNBOUNDED
    return UNBOUNDED


# Named generators --------------------------------------------------------


@dataclass(frozen=True)
class Rho:
    i: int
    j: int


@dataclass(frozen=True)
class RhoInv:
    i: int
    j: int


@dataclass(frozen=True)
class Eps:
    i: int


@dataclass(frozen=True)
class Perm:
    """Basis permutation a_k -> a_{mapping[k-1]}."""

    mapping: tuple[int, ...]

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> Perm:
        m = list(range(1, n + 1))
        m[i - 1], m[j - 1] = j, i
        return cls(tuple(m))

    @classmethod
    def from_cycles(cls, n: int, cycles: Sequence[Sequence[int]]) -> Perm:
        m = list(range(1, n + 1))
        seen: set[int] = set()
        for cyc in cycles:
            for k in cyc:
                if not 1 <= k <= n:
                    raise IndexError(f"point {k} outside 1..{n}")
                if k in seen:
                    raise ValueError(f"point {k} repeated in cycles")
                seen.add(k)
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                m[a - 1] = b
        return cls(tuple(m))


@dataclass(frozen=True)
class Theta:
    pass


@dataclass(frozen=True)
class Tau:
    pass


@dataclass(frozen=True)
class Eta:
    pass


@dataclass(frozen=True)
class Alpha:
    pass


NamedGenerator = Rho | RhoInv | Eps | Perm | Theta | Tau | Eta | Alpha


def rho(n: int, i: int, j: int) -> FreeAut:
    """Right Nielsen transformation a_i -> a_i a_j."""
    if i == j:
        raise ValueError("rho needs i != j")
    _check_index(n, i, j)
    images = [(k,) for k in range(1, n + 1)]
    images[i - 1] = (i, j)
    return FreeAut(n, tuple(images))


def rho_inv(n: int, i: int, j: int) -> FreeAut:
    if i == j:
        raise ValueError("rho needs i != j")
    _check_index(n, i, j)
    images = [(k,) for k in range(1, n + 1)]
    images[i - 1] = (i, -j)
    return FreeAut(n, tuple(images))


def eps(n: int, i: int) -> FreeAut:
    """Inverts a_i, fixes the other basis elements."""
    _check_index(n, i)
    return FreeAut(n, tuple((-k,) if k == i else (k,) for k in range(1, n + 1)))


def perm(n: int, mapping: Sequence[int]) -> FreeAut:
    if sorted(mapping) != list(range(1, n + 1)):
        raise ValueError(f"{tuple(mapping)} is not a permutation of 1..{n}")
    return FreeAut(n, tuple((m,) for m in mapping))


def transposition(n: int, i: int, j: int) -> FreeAut:
    _check_index(n, i, j)
    return perm(n, Perm.transposition(n, i, j).mapping)


def _check_index(n: int, *idx: int) -> None:
    for i in idx:
        if not 1 <= i <= n:
            raise IndexError(f"index {i} outside 1..{n}")


def aut_from_generator(g: NamedGenerator, n: int) -> FreeAut:
    if n < 1:
        raise RankError("rank must be positive")
    match g:
        case Rho(i, j):
            return rho(n, i, j)
        case RhoInv(i, j):
            return rho_inv(n, i, j)
        case Eps(i):
            return eps(n, i)
        case Perm(mapping):
            return perm(n, mapping)
        case Theta():
            _need_rank(n, 3, "theta")
            return rho(n, 1, 2) @ eps(n, 2)
        case Tau():
            _need_rank(n, 3, "tau")
            return transposition(n, 2, 3) @ eps(n, 1)
        case Eta():
            _need_rank(n, 3, "eta")
            return transposition(n, 1, 2) @ eps(n, 1) @ eps(n, 2)
        case Alpha():
            _need_rank(n, 2, "alpha")
            return eps(n, n) @ transposition(n, n, n - 1)
    raise TypeError(f"not a named generator: {g!r}")


def _need_rank(n: int, least: int, name: str) -> None:
    if n < least:
        raise RankError(f"{name} needs rank >= {least}, got {n}")


def theta(n: int) -> FreeAut:
    return aut_from_generator(Theta(), n)


def tau(n: int) -> FreeAut:
    return aut_from_generator(Tau(), n)


def eta(n: int) -> FreeAut:
    return aut_from_generator(Eta(), n)


def alpha(n: int) -> FreeAut:
    return aut_from_generator(Alpha(), n)


def abelianize(f: FreeAut) -> "IntMatrix":
    """Exponent-sum matrix, column j = abelianised image of a_j."""
    from .intmat import IntMatrix

    n = f.rank
    rows = [[0] * n for _ in range(n)]
    for j, w in enumerate(f.images):
        for x in w:
            rows[abs(x) - 1][j] += 1 if x > 0 else -1
    return IntMatrix.from_rows(rows)


# Text format -------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]+)|(\()|(\)))")


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    text = text.replace("∘", " ")
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise GeneratorParseError(f"unexpected character {text[pos:].lstrip()[0]!r}", len(tokens))
        tokens.append(m.group(m.lastindex))
        pos = m.end()
    return tokens


def parse_generator_word(text: str, n: int) -> list[NamedGenerator]:
    """Parse e.g. ``"rho 1 2 eps 3 perm (1 2)(3 4) theta"``.

    Errors carry the 0-based position of the offending token.
    """
    tokens = _tokenize(text)
    out: list[NamedGenerator] = []
    pos = 0

    def take_int() -> int:
        nonlocal pos
        if pos >= len(tokens) or not tokens[pos].isdigit():
            raise GeneratorParseError("expected an index", pos)
        value = int(tokens[pos])
        if not 1 <= value <= n:
            raise GeneratorParseError(f"index {value} outside 1..{n}", pos)
        pos += 1
        return value

    simple = {"theta": Theta, "tau": Tau, "eta": Eta, "alpha": Alpha}
    while pos < len(tokens):
        start = pos
        tok = tokens[pos].lower()
        pos += 1
        if tok in ("rho", "rhoinv"):
            i, j = take_int(), take_int()
            if i == j:
                raise GeneratorParseError("rho needs distinct indices", start)
            out.append(Rho(i, j) if tok == "rho" else RhoInv(i, j))
        elif tok == "eps":
            out.append(Eps(take_int()))
        elif tok == "perm":
            cycles = []
            while pos < len(tokens) and tokens[pos] == "(":
                opened = pos
                pos += 1
                cyc = []
                while pos < len(tokens) and tokens[pos] != ")":
                    cyc.append(take_int())
                if pos >= len(tokens):
                    raise GeneratorParseError("unclosed cycle", opened)
                pos += 1
                if cyc:
                    cycles.append(cyc)
            if pos == start + 1:
                raise GeneratorParseError("perm needs cycle notation", pos)
            try:
                out.append(Perm.from_cycles(n, cycles))
            except ValueError as exc:
                raise GeneratorParseError(str(exc), start) from None
        elif tok in simple:
            out.append(simple[tok]())
        else:
            raise GeneratorParseError(f"unknown generator {tokens[start]!r}", start)
    return out


def evaluate_generator_word(text: str, n: int) -> FreeAut:
    """Right-to-left product of a parsed generator word."""
    result = FreeAut.identity(n)
    for g in parse_generator_word(text, n):
        result = result @ aut_from_generator(g, n)
    return result
