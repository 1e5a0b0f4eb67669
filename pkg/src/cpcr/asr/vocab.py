"""Character vocabulary with CTC blank fixed at index 0."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


class VocabError(ValueError):
    pass


@dataclass(frozen=True)
class CharVocab:
    chars: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.chars)) != len(self.chars):
            raise VocabError("duplicate characters in vocabulary")
        if not self.chars:
            raise VocabError("vocabulary must contain at least one character")

    @classmethod
    def from_transcripts(cls, transcripts: Iterable[str]) -> "CharVocab":
        return cls(chars=tuple(sorted({c for t in transcripts for c in t})))

    @property
    def blank_index(self) -> int:
        return 0

    @property
    def num_classes(self) -> int:
        """Characters plus blank."""
        return len(self.chars) + 1

    def encode(self, text: str) -> list[int]:
        try:
            return [self.chars.index(c) + 1 for c in text]
        except ValueError:
            bad = next(c for c in text if c not in self.chars)
            raise VocabError(f"character {bad!r} is not in the vocabulary") from None

    def decode(self, ids: Iterable[int]) -> str:
        out = []
        for i in ids:
            if i == 0:
                raise VocabError("blank (index 0) cannot be decoded to a character")
            out.append(self.chars[i - 1])
        return "".join(out)

    def as_string(self) -> str:
        return "".join(self.chars)
