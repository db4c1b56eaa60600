"""Symbol alphabets and sequence readers.

Symbols are small integers: ``0`` is the terminator ``$`` and ``1..sigma``
are the alphabet proper, ordered by code.  Strings handed to the builders
are ``bytes`` objects holding these codes.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Iterator

TERMINATOR = 0
MAX_SIGMA = 255


class AlphabetError(ValueError):
    """A symbol that the alphabet cannot encode."""


class Alphabet:
    """Bidirectional mapping between characters and symbol codes 1..sigma."""

    name: str
    sigma: int

    def encode(self, text: str) -> bytes:
        raise NotImplementedError

    def decode(self, codes: Iterable[int]) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<Alphabet {self.name}>"


class LetterAlphabet(Alphabet):
    """Alphabet given by an explicit ordered list of characters."""

    def __init__(self, letters: str, name: str | None = None) -> None:
        if not 1 <= len(letters) <= MAX_SIGMA:
            raise AlphabetError(f"alphabet size must be in [1, {MAX_SIGMA}], got {len(letters)}")
        if len(set(letters)) != len(letters):
            raise AlphabetError("alphabet letters must be distinct")
        if "$" in letters:
            raise AlphabetError("'$' is reserved for the terminator")
        self.letters = letters
        self.sigma = len(letters)
        self.name = name or f"chars:{letters}"
        self._table = {ch: i + 1 for i, ch in enumerate(letters)}

    def encode(self, text: str) -> bytes:
        table = self._table
        try:
            return bytes([table[ch] for ch in text])
        except KeyError as exc:
            raise AlphabetError(f"symbol {exc.args[0]!r} not in alphabet {self.name}") from None

    def decode(self, codes: Iterable[int]) -> str:
        letters = self.letters
        return "".join("$" if c == TERMINATOR else letters[c - 1] for c in codes)


class ByteAlphabet(Alphabet):
    """Alphabet whose code for a character is its byte value, 1..sigma."""

    def __init__(self, sigma: int) -> None:
        if not 1 <= sigma <= MAX_SIGMA:
            raise AlphabetError(f"byte alphabet size must be in [1, {MAX_SIGMA}], got {sigma}")
        self.sigma = sigma
        self.name = f"byte:{sigma}"

    def encode(self, text: str) -> bytes:
        raw = text.encode("latin-1")
        if raw and (min(raw) == 0 or max(raw) > self.sigma):
            bad = next(b for b in raw if b == 0 or b > self.sigma)
            raise AlphabetError(f"byte {bad} not in alphabet {self.name}")
        return raw

    def decode(self, codes: Iterable[int]) -> str:
        return "".join("$" if c == TERMINATOR else chr(c) for c in codes)


DNA = LetterAlphabet("ACGT", name="dna")


def parse_alphabet(text: str) -> Alphabet:
    """Parse ``dna``, ``byte:N`` or ``chars:XYZ`` into an :class:`Alphabet`."""
    if text == "dna":
        return DNA
    kind, _, arg = text.partition(":")
    if kind == "byte" and arg:
        try:
            sigma = int(arg)
        except ValueError:
            raise AlphabetError(f"bad alphabet {text!r}") from None
        return ByteAlphabet(sigma)
    if kind == "chars" and arg:
        return LetterAlphabet(arg)
    raise AlphabetError(f"unknown alphabet {text!r}")


def alphabet_for_sigma(sigma: int) -> Alphabet:
    """Best-effort alphabet for displaying a graph that only records sigma."""
    if sigma == DNA.sigma:
        return DNA
    if sigma <= 26:
        return LetterAlphabet("ABCDEFGHIJKLMNOPQRSTUVWXYZ"[:sigma])
    return ByteAlphabet(sigma)


def read_fasta(path: str | Path, alphabet: Alphabet = DNA) -> Iterator[bytes]:
    """Yield encoded sequences from a FASTA file; headers are ignored."""
    fold = str.upper if alphabet is DNA else str
    chunks: list[str] = []
    with open(path, encoding="latin-1") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith(">"):
                if chunks:
                    yield alphabet.encode(fold("".join(chunks)))
                    chunks = []
                continue
            chunks.append(line)
    if chunks:
        yield alphabet.encode(fold("".join(chunks)))


def read_lines(path: str | Path, alphabet: Alphabet = DNA) -> Iterator[bytes]:
    """Yield encoded sequences from a text file holding one string per line."""
    upper = alphabet is DNA
    with open(path, encoding="latin-1") as fh:
        for line in fh:
            line = line.rstrip("\r\n")
            if not line:
                continue
            yield alphabet.encode(line.upper() if upper else line)


def read_sequences(path: str | Path, alphabet: Alphabet = DNA) -> Iterator[bytes]:
    """Dispatch on content: files whose first non-blank line starts with '>' are FASTA."""
    with open(path, encoding="latin-1") as fh:
        first = ""
        for line in fh:
            if line.strip():
                first = line
                break
    if first.startswith(">"):
        return read_fasta(path, alphabet)
    return read_lines(path, alphabet)
