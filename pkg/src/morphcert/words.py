"""Morphisms over finite alphabets: parsing, iteration, fixed-point streaming.

Words are stored as ``bytes`` with one letter index per byte, which caps
alphabets at 256 letters; public entry points accept letter identifiers
(strings) and translate at the boundary.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    DomainError,
    ParseError,
    ResourceError,
    UnknownSymbol,
    ValidationError,
)

Word = bytes

MAX_LETTERS = 256
DEFAULT_ITERATE_CAP = 10**8

_ID_RE = re.compile(r"[A-Za-z0-9_]+\Z")


@dataclass(frozen=True)
class Alphabet:
    """Ordered, distinct letter identifiers; index i is the wire format."""

    letters: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.letters:
            raise ValidationError("alphabet must be nonempty")
        if len(self.letters) > MAX_LETTERS:
            raise ValidationError(
                f"alphabet has {len(self.letters)} letters; at most {MAX_LETTERS} supported"
            )
        index: dict = {}
        for i, lid in enumerate(self.letters):
            if not isinstance(lid, str) or not _ID_RE.match(lid):
                raise ValidationError(f"bad letter identifier {lid!r}")
            if lid in index:
                raise ValidationError(f"duplicate letter {lid!r}")
            index[lid] = i
        object.__setattr__(self, "_index", index)

    @property
    def size(self) -> int:
        return len(self.letters)

    def __contains__(self, letter: str) -> bool:
        return letter in self._index

    def index(self, letter: str) -> int:
        try:
            return self._index[letter]
        except KeyError:
            raise ValidationError(f"unknown letter {letter!r}") from None

    def encode(self, letters: Iterable[str]) -> Word:
        return bytes(self.index(lid) for lid in letters)

    def decode(self, word: Word) -> list[str]:
        return [self.letters[b] for b in word]


@dataclass(frozen=True)
class Morphism:
    """Non-erasing morphism: one image word per letter, same alphabet."""

    alphabet: Alphabet
    images: tuple[Word, ...]

    def __post_init__(self):
        d = self.alphabet.size
        if len(self.images) != d:
            raise ValidationError("need exactly one image per letter")
        for lid, img in zip(self.alphabet.letters, self.images):
            if not isinstance(img, bytes):
                raise ValidationError(f"image of {lid!r} must be a byte word")
            if len(img) == 0:
                raise ValidationError(f"erasing rule: image of {lid!r} is empty")
            if max(img) >= d:
                raise ValidationError(f"image of {lid!r} uses an out-of-range letter index")

    @classmethod
    def from_rules(cls, alphabet: Alphabet, rules: Mapping[str, Sequence[str]]) -> "Morphism":
        for lid in rules:
            if lid not in alphabet:
                raise ValidationError(f"rule for unknown letter {lid!r}")
        missing = [lid for lid in alphabet.letters if lid not in rules]
        if missing:
            raise ValidationError(f"missing rule for letter {missing[0]!r}")
        images = tuple(alphabet.encode(rules[lid]) for lid in alphabet.letters)
        return cls(alphabet, images)

    @property
    def d(self) -> int:
        return self.alphabet.size

    def image(self, letter) -> Word:
        return self.images[_letter_index(self, letter)]


def _letter_index(m: Morphism, a) -> int:
    """Accept a letter identifier or a raw index; return the index."""
    if isinstance(a, int):
        if not 0 <= a < m.d:
            raise ValidationError(f"letter index {a} outside alphabet of size {m.d}")
        return a
    return m.alphabet.index(a)


def is_prolongable(m: Morphism, a) -> bool:
    """True iff phi(a) begins with a and has length >= 2 (nonempty tail)."""
    i = _letter_index(m, a)
    img = m.images[i]
    return len(img) >= 2 and img[0] == i


@dataclass(frozen=True)
class MorphicSystem:
    """Prolongable morphism plus a start letter and a total coding."""

    morphism: Morphism
    start: int
    coding: tuple[str, ...]

    def __post_init__(self):
        m = self.morphism
        if not isinstance(self.start, int) or not 0 <= self.start < m.d:
            raise ValidationError("start letter outside alphabet")
        if not is_prolongable(m, self.start):
            raise ValidationError(
                f"start letter {m.alphabet.letters[self.start]!r} is not prolongable: "
                "its image must begin with it and have length >= 2"
            )
        if len(self.coding) != m.d:
            raise ValidationError("coding must assign a symbol to every letter")
        for sym in self.coding:
            if not isinstance(sym, str) or not sym or any(ch.isspace() for ch in sym):
                raise ValidationError(f"bad output symbol {sym!r}")

    @classmethod
    def build(
        cls,
        morphism: Morphism,
        start,
        coding: Mapping[str, str] | None = None,
    ) -> "MorphicSystem":
        idx = _letter_index(morphism, start)
        if coding is None:
            symbols = morphism.alphabet.letters
        else:
            for lid in coding:
                morphism.alphabet.index(lid)
            # letters without an explicit entry keep their own identifier
            symbols = tuple(coding.get(lid, lid) for lid in morphism.alphabet.letters)
        return cls(morphism, idx, tuple(symbols))

    @property
    def start_id(self) -> str:
        return self.morphism.alphabet.letters[self.start]

    def symbols(self) -> tuple[str, ...]:
        """Distinct output symbols, ordered by first occurrence over letter indices."""
        return tuple(dict.fromkeys(self.coding))

    def letters_for(self, symbol: str) -> tuple[int, ...]:
        hits = tuple(i for i, s in enumerate(self.coding) if s == symbol)
        if not hits:
            raise UnknownSymbol(f"symbol {symbol!r} is not in the coding range")
        return hits


@dataclass(frozen=True)
class CheckpointSeries:
    """Exact lengths N_k = |phi^k(b)| as (k, N_k) pairs."""

    entries: tuple[tuple[int, int], ...]

    def lengths(self) -> list[int]:
        return [n for _, n in self.entries]


def _count_matrix(m: Morphism) -> list[list[int]]:
    # entry [t][s] = occurrences of letter t in the image of letter s
    return [[img.count(t) for img in m.images] for t in range(m.d)]


def iterate(m: Morphism, w: Word, k: int, *, max_len: int = DEFAULT_ITERATE_CAP) -> Word:
    """Return phi^k(w), refusing to materialize more than max_len letters."""
    if k < 0:
        raise DomainError("k must be >= 0")
    if len(w) and max(w) >= m.d:
        raise ValidationError("word uses an out-of-range letter index")
    if k == 0:
        return w
    # predict lengths exactly before building anything
    lengths = [len(img) for img in m.images]
    counts = [w.count(i) for i in range(m.d)]
    cm = _count_matrix(m)
    for _ in range(k):
        total = sum(c * L for c, L in zip(counts, lengths))
        if total > max_len:
            raise ResourceError(
                f"iterate would produce {total} letters (cap {max_len})"
            )
        counts = [sum(row[s] * counts[s] for s in range(m.d)) for row in cm]
    cur = w
    images = m.images
    for _ in range(k):
        cur = b"".join(images[ch] for ch in cur)
    return cur


def checkpoints(sys: MorphicSystem, kmax: int) -> CheckpointSeries:
    """Exact N_k = |phi^k(start)| for k = 0..kmax via big-integer count vectors."""
    if kmax < 0:
        raise DomainError("kmax must be >= 0")
    m = sys.morphism
    cm = _count_matrix(m)
    counts = [0] * m.d
    counts[sys.start] = 1
    out = [(0, 1)]
    for k in range(1, kmax + 1):
        counts = [sum(row[s] * counts[s] for s in range(m.d)) for row in cm]
        out.append((k, sum(counts)))
    return CheckpointSeries(tuple(out))


def _letter_chunks(sys: MorphicSystem) -> Iterator[Word]:
    """The fixed point lim phi^i(b) as an endless stream of byte chunks.

    Uses the decomposition b . w . phi(w) . phi^2(w) ... with phi(b) = b w,
    expanding each phi^j(w) depth-first so memory stays O(depth * image size).
    """
    images = sys.morphism.images
    b = sys.start
    yield bytes([b])
    tail = images[b][1:]
    depth = 0
    while True:
        # frames: [word, next position, remaining expansion depth]
        stack = [[tail, 0, depth]]
        while stack:
            top = stack[-1]
            word, pos, rem = top
            if pos == len(word):
                stack.pop()
            elif rem == 0:
                top[1] = len(word)
                yield word[pos:]
            else:
                letter = word[pos]
                top[1] = pos + 1
                img = images[letter]
                if len(img) == 1 and img[0] == letter:
                    yield img  # phi fixes this letter; no need to descend
                else:
                    stack.append([img, 0, rem - 1])
        depth += 1


def fixed_point_stream(sys: MorphicSystem, n: int) -> list[str]:
    """First n output symbols of psi(lim phi^i(b)). Prefix-stable in n."""
    if n < 0:
        raise DomainError("n must be >= 0")
    coding = sys.coding
    out: list[str] = []
    need = n
    for chunk in _letter_chunks(sys):
        if need <= 0:
            break
        part = chunk[:need]
        out.extend(coding[ch] for ch in part)
        need -= len(part)
    return out


def count_in_prefix(sys: MorphicSystem, symbol: str, n: int) -> int:
    """Occurrences of symbol among the first n output symbols."""
    if n < 0:
        raise DomainError("n must be >= 0")
    targets = sys.letters_for(symbol)
    total = 0
    need = n
    for chunk in _letter_chunks(sys):
        if need <= 0:
            break
        part = chunk[:need]
        for t in targets:
            total += part.count(t)
        need -= len(part)
    return total


def prefix_count_series(
    sys: MorphicSystem, symbol: str, checkpoints: Sequence[int]
) -> list[tuple[int, int]]:
    """(n, count) at several prefix lengths in one pass over the stream."""
    targets = sys.letters_for(symbol)
    for n in checkpoints:
        if n < 0:
            raise DomainError("prefix lengths must be >= 0")
    pending = sorted(set(checkpoints))
    out: dict[int, int] = {}
    pos = 0
    total = 0
    idx = 0
    while idx < len(pending) and pending[idx] == 0:
        out[0] = 0
        idx += 1
    for chunk in _letter_chunks(sys):
        if idx >= len(pending):
            break
        # counts are cheap per chunk; record any checkpoint inside this chunk
        end = pos + len(chunk)
        while idx < len(pending) and pending[idx] <= end:
            cut = pending[idx] - pos
            part = chunk[:cut]
            out[pending[idx]] = total + sum(part.count(t) for t in targets)
            idx += 1
        total += sum(chunk.count(t) for t in targets)
        pos = end
    return [(n, out[n]) for n in checkpoints]


def parse_morphism_spec(text: str) -> MorphicSystem:
    """Parse the line-oriented morphism file format into a validated system."""
    letters: list[str] | None = None
    start: str | None = None
    coding_pairs: dict[str, str] | None = None
    rules: dict[str, list[str]] = {}

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if letters is None and not line.startswith("letters:"):
            raise ParseError(f"line {lineno}: first directive must be 'letters:'")
        if line.startswith("letters:"):
            if letters is not None:
                raise ParseError(f"line {lineno}: duplicate 'letters:' directive")
            letters = line[len("letters:"):].split()
            if not letters:
                raise ParseError(f"line {lineno}: 'letters:' lists no letters")
        elif line.startswith("start:"):
            if start is not None:
                raise ParseError(f"line {lineno}: duplicate 'start:' directive")
            toks = line[len("start:"):].split()
            if len(toks) != 1:
                raise ParseError(f"line {lineno}: 'start:' needs exactly one letter")
            start = toks[0]
        elif line.startswith("coding:"):
            if coding_pairs is not None:
                raise ParseError(f"line {lineno}: duplicate 'coding:' directive")
            coding_pairs = {}
            for tok in line[len("coding:"):].split():
                lid, sep, sym = tok.partition("=")
                if not sep or not lid or not sym:
                    raise ParseError(f"line {lineno}: bad coding entry {tok!r}")
                if lid in coding_pairs:
                    raise ParseError(f"line {lineno}: duplicate coding for {lid!r}")
                coding_pairs[lid] = sym
        elif "->" in line:
            left, _, right = line.partition("->")
            lhs = left.split()
            if len(lhs) != 1:
                raise ParseError(f"line {lineno}: rule needs exactly one letter before '->'")
            lid = lhs[0]
            if lid in rules:
                raise ParseError(f"line {lineno}: duplicate rule for {lid!r}")
            rules[lid] = right.split()
        else:
            head = line.split()[0]
            raise ParseError(f"line {lineno}: unknown directive {head!r}")

    if letters is None:
        raise ParseError("missing 'letters:' directive")
    if start is None:
        raise ParseError("missing 'start:' directive")
    alphabet = Alphabet(tuple(letters))
    known = set(letters)
    for lid in rules:
        if lid not in known:
            raise ParseError(f"rule for unknown letter {lid!r}")
    for lid in letters:
        if lid not in rules:
            raise ParseError(f"missing rule for letter {lid!r}")
    for lid, image in rules.items():
        for tok in image:
            if tok not in known:
                raise ParseError(f"rule for {lid!r} uses unknown letter {tok!r}")
    if start not in known:
        raise ParseError(f"start letter {start!r} is not in the alphabet")
    if coding_pairs:
        for lid in coding_pairs:
            if lid not in known:
                raise ParseError(f"coding entry for unknown letter {lid!r}")
    morphism = Morphism.from_rules(alphabet, rules)
    return MorphicSystem.build(morphism, start, coding_pairs)


def parse_morphism_file(path) -> MorphicSystem:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_morphism_spec(fh.read())
