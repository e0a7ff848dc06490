"""IOB slot-tagging corpora: loading, vocabularies, and fractional splits.

Corpus file format: UTF-8, one "token<TAB>tag" line per token, blank line
between utterances (conlleval-ready). Tokens are lowercased on load.
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, CorpusFormatError

PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"

_TAG_RE = re.compile(r"^(O|[BI]-\S+)$")


@dataclass(frozen=True)
class Utterance:
    """A token sequence with aligned IOB slot tags."""
    id: str
    tokens: tuple[str, ...]
    tags: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tokens)


def validate_iob(tags: tuple[str, ...] | list[str]) -> str | None:
    """Return a description of the first IOB violation, or None if valid."""
    prev = "O"
    for i, tag in enumerate(tags):
        if not _TAG_RE.match(tag):
            return f"tag {tag!r} at position {i} is not O, B-<type>, or I-<type>"
        if tag.startswith("I-"):
            if prev == "O":
                return f"tag {tag!r} at position {i} follows O"
            if prev[2:] != tag[2:]:
                return f"tag {tag!r} at position {i} follows type {prev[2:]!r}"
        prev = tag
    return None


def load_corpus(path: str | Path, id_prefix: str = "u") -> list[Utterance]:
    """Parse a tab-separated corpus file into utterances, in file order."""
    path = Path(path)
    utterances: list[Utterance] = []
    tokens: list[str] = []
    tags: list[str] = []
    start_line = 1

    def flush(line_no):
        if not tokens:
            return
        problem = validate_iob(tags)
        if problem is not None:
            raise CorpusFormatError(
                f"{path}: utterance starting at line {start_line}: {problem}")
        utterances.append(Utterance(
            id=f"{id_prefix}{len(utterances):04d}",
            tokens=tuple(tokens), tags=tuple(tags)))
        tokens.clear()
        tags.clear()

    with path.open(encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                flush(line_no)
                start_line = line_no + 1
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise CorpusFormatError(
                    f"{path}:{line_no}: expected 'token<TAB>tag', "
                    f"got {len(cols)} columns")
            token, tag = cols
            if not token or not tag:
                raise CorpusFormatError(f"{path}:{line_no}: empty token or tag")
            tokens.append(token.lower())
            tags.append(tag)
        flush(line_no=None)
    return utterances


def save_corpus(utterances: list[Utterance], path: str | Path):
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for i, utt in enumerate(utterances):
            if i:
                fh.write("\n")
            for token, tag in zip(utt.tokens, utt.tags):
                fh.write(f"{token}\t{tag}\n")


@dataclass
class Vocabulary:
    """Dense token and tag index maps with reserved pad/unknown tokens."""
    token_index: dict[str, int] = field(default_factory=dict)
    tag_index: dict[str, int] = field(default_factory=dict)
    token_freq: dict[str, int] = field(default_factory=dict)

    @classmethod
    def build(cls, utterances: list[Utterance]) -> "Vocabulary":
        vocab = cls()
        vocab.token_index = {PAD_TOKEN: 0, UNK_TOKEN: 1}
        for utt in utterances:
            for token in utt.tokens:
                vocab.token_freq[token] = vocab.token_freq.get(token, 0) + 1
                if token not in vocab.token_index:
                    vocab.token_index[token] = len(vocab.token_index)
            for tag in utt.tags:
                if tag not in vocab.tag_index:
                    vocab.tag_index[tag] = len(vocab.tag_index)
        return vocab

    @property
    def pad_id(self) -> int:
        return self.token_index[PAD_TOKEN]

    @property
    def unk_id(self) -> int:
        return self.token_index[UNK_TOKEN]

    @property
    def n_tokens(self) -> int:
        return len(self.token_index)

    @property
    def n_tags(self) -> int:
        return len(self.tag_index)

    def encode_tokens(self, tokens) -> list[int]:
        """Map tokens to indices; out-of-vocabulary tokens become unknown."""
        unk = self.unk_id
        return [self.token_index.get(t, unk) for t in tokens]

    def encode_tags(self, tags) -> list[int]:
        return [self.tag_index[t] for t in tags]

    def tag_names(self) -> list[str]:
        names = [None] * len(self.tag_index)
        for tag, i in self.tag_index.items():
            names[i] = tag
        return names

    def singleton_tokens(self) -> set[str]:
        return {t for t, c in self.token_freq.items() if c == 1}

    def to_dict(self) -> dict:
        return {"tokens": self.token_index, "tags": self.tag_index,
                "token_freq": self.token_freq}

    @classmethod
    def from_dict(cls, data: dict) -> "Vocabulary":
        return cls(token_index=dict(data["tokens"]), tag_index=dict(data["tags"]),
                   token_freq=dict(data.get("token_freq", {})))


def fractional_split(utterances: list[Utterance], fraction: float,
                     seed: int) -> list[Utterance]:
    """Sample ceil(fraction * N) utterances without replacement, seeded.

    The selection keeps the original corpus order.
    """
    if not 0.0 < fraction <= 1.0:
        raise ConfigError(f"fraction must be in (0, 1], got {fraction}")
    if fraction == 1.0:
        return list(utterances)
    n = len(utterances)
    k = math.ceil(fraction * n)
    chosen = sorted(random.Random(seed).sample(range(n), k))
    return [utterances[i] for i in chosen]


def split_dev(utterances: list[Utterance], dev_fraction: float,
              seed: int) -> tuple[list[Utterance], list[Utterance]]:
    """Hold out a seeded dev portion when the corpus has no dev file."""
    if not 0.0 <= dev_fraction < 1.0:
        raise ConfigError(f"dev fraction must be in [0, 1), got {dev_fraction}")
    n = len(utterances)
    k = int(round(dev_fraction * n))
    if k == 0:
        return list(utterances), []
    chosen = set(random.Random(seed).sample(range(n), k))
    train = [u for i, u in enumerate(utterances) if i not in chosen]
    dev = [u for i, u in enumerate(utterances) if i in chosen]
    return train, dev


def write_split_manifest(path: str | Path, splits: dict[str, list[Utterance]]):
    """Record which utterance ids landed in each split, for reproducibility."""
    manifest = {name: [u.id for u in utts] for name, utts in splits.items()}
    Path(path).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
