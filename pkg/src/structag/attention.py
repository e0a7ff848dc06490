"""Attention over the knowledge memory of substructure embeddings.

The sentence vector is matched against each stored substructure vector
by inner product; the softmax of those scores weights the memory sum,
and the output network turns (memory sum + sentence vector) into the
knowledge-guided representation fed to the tagger.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import autodiff as ad
from .autodiff import Tensor
from .encoders import OutputNetwork
from .errors import DimensionError
from .knowledge import Substructure


@dataclass
class KnowledgeMemory:
    """Stacked substructure vectors plus the substructures they encode."""
    vectors: Tensor                      # (n, d), one row per substructure
    substructures: list[Substructure]

    def __post_init__(self):
        if self.vectors.value.ndim != 2 or self.vectors.shape[0] < 1:
            raise DimensionError(
                f"knowledge memory must be a non-empty (n, d) matrix, "
                f"got {self.vectors.shape}")
        if self.vectors.shape[0] != len(self.substructures):
            raise DimensionError(
                f"{self.vectors.shape[0]} memory rows for "
                f"{len(self.substructures)} substructures")

    @property
    def size(self) -> int:
        return self.vectors.shape[0]


def attend(u: Tensor, memory: KnowledgeMemory) -> Tensor:
    """Attention distribution over memory rows: softmax of inner products.

    The raw inner product is used, with no scaling factor.
    """
    if u.shape != (memory.vectors.shape[1],):
        raise DimensionError(
            f"sentence vector {u.shape} does not match memory row "
            f"dimension {memory.vectors.shape[1]}")
    return ad.softmax(ad.matmul(memory.vectors, u))


def compose(memory: KnowledgeMemory, p: Tensor) -> Tensor:
    """Sum of memory rows weighted by the attention distribution."""
    if p.shape != (memory.size,):
        raise DimensionError(
            f"attention weights {p.shape} do not match memory size {memory.size}")
    return ad.matmul(p, memory.vectors)


def knowledge_representation(u: Tensor, memory: KnowledgeMemory,
                             output_net: OutputNetwork) -> tuple[Tensor, Tensor]:
    """Full attention step: returns (guided representation o, weights p)."""
    p = attend(u, memory)
    h = compose(memory, p)
    o = output_net.apply(ad.add(h, u))
    return o, p


@dataclass
class AttentionRecord:
    """Per-utterance attention snapshot for inspection output.

    Token salience is the max weight over substructures containing the
    token; edge salience is the max weight over substructures whose path
    traverses the (head, dependent) token pair. Both are projections of
    the substructure-level distribution, defined here for visualization.
    """
    utterance_id: str
    tokens: list[str]
    substructures: list[Substructure]
    weights: list[float]
    token_salience: list[float]
    edge_salience: list[dict]

    def to_dict(self) -> dict:
        return {
            "utterance_id": self.utterance_id,
            "tokens": self.tokens,
            "substructures": [
                {"positions": list(s.positions),
                 "tokens": [self.tokens[i] for i in s.positions],
                 "weight": w}
                for s, w in zip(self.substructures, self.weights)],
            "token_salience": self.token_salience,
            "edge_salience": self.edge_salience,
        }


def build_attention_record(utterance_id: str, tokens: list[str],
                           substructures: list[Substructure],
                           weights: list[float]) -> AttentionRecord:
    token_salience = [0.0] * len(tokens)
    edge_best: dict[tuple[int, int], float] = {}
    for sub, w in zip(substructures, weights):
        for pos in sub.positions:
            if w > token_salience[pos]:
                token_salience[pos] = w
        for head, dep in zip(sub.positions, sub.positions[1:]):
            key = (head, dep)
            if w > edge_best.get(key, 0.0):
                edge_best[key] = w
    edge_salience = [{"head": h, "dependent": d, "salience": s}
                     for (h, d), s in sorted(edge_best.items())]
    return AttentionRecord(utterance_id=utterance_id, tokens=list(tokens),
                           substructures=list(substructures),
                           weights=list(weights),
                           token_salience=token_salience,
                           edge_salience=edge_salience)
