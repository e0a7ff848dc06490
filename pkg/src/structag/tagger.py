"""Recurrent slot taggers: plain chain, knowledge-guided, and joint.

All variants run left to right and emit one tag distribution per token
via a shared output layer. The knowledge-guided variants add a projected
per-utterance representation into every step's pre-activations; the
joint variant blends a chain tower and a knowledge tower before the
output softmax.
"""

from __future__ import annotations

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .cells import ElmanCell, GruCell, glorot_uniform, make_cell, zero_vector
from .errors import DimensionError

TAGGER_MODES = ("chain", "knowledge", "joint")
CELL_KINDS = ("elman", "gru")


class TaggerTower:
    """One recurrence over the sentence, optionally knowledge-conditioned."""

    def __init__(self, rng: np.random.Generator, cell_kind: str, embed_dim: int,
                 hidden_dim: int, knowledge_dim: int | None = None):
        self.cell = make_cell(cell_kind, rng, embed_dim, hidden_dim)
        self.knowledge_proj: dict[str, Tensor] | None = None
        if knowledge_dim is not None:
            gates = GruCell.GATES if isinstance(self.cell, GruCell) else ("cand",)
            self.knowledge_proj = {
                g: glorot_uniform(rng, hidden_dim, knowledge_dim) for g in gates}

    def params(self, prefix: str) -> dict[str, Tensor]:
        out = self.cell.params(prefix)
        if self.knowledge_proj is not None:
            for gate, mat in self.knowledge_proj.items():
                out[f"{prefix}.know_{gate}"] = mat
        return out

    def _knowledge_terms(self, guided: Tensor | None):
        """Project the guided representation once; reused at every step."""
        if self.knowledge_proj is None or guided is None:
            return None
        terms = {gate: ad.matmul(mat, guided)
                 for gate, mat in self.knowledge_proj.items()}
        if isinstance(self.cell, ElmanCell):
            return terms["cand"]
        return terms

    def run(self, embedded: Tensor, guided: Tensor | None = None) -> list[Tensor]:
        extra = self._knowledge_terms(guided)
        h = self.cell.initial_state()
        states = []
        for t in range(embedded.shape[0]):
            h = self.cell.step(ad.row(embedded, t), h, extra)
            states.append(h)
        return states


class Tagger:
    """Per-token tag distributions for one of the three tagger modes.

    chain       one tower, no knowledge input
    knowledge   one tower with the guided representation in every step
    joint       independent chain and knowledge towers, hidden states
                blended with weight alpha, one shared output layer
    """

    def __init__(self, rng: np.random.Generator, mode: str, cell_kind: str,
                 embed_dim: int, hidden_dim: int, n_tags: int,
                 knowledge_dim: int | None = None, alpha: float = 0.5):
        if mode not in TAGGER_MODES:
            raise ValueError(f"unknown tagger mode {mode!r}")
        if cell_kind not in CELL_KINDS:
            raise ValueError(f"unknown cell kind {cell_kind!r}")
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {alpha}")
        if mode != "chain" and knowledge_dim is None:
            raise ValueError(f"mode {mode!r} needs a knowledge dimension")
        self.mode = mode
        self.alpha = alpha
        if mode == "chain":
            self.towers = [TaggerTower(rng, cell_kind, embed_dim, hidden_dim)]
        elif mode == "knowledge":
            self.towers = [TaggerTower(rng, cell_kind, embed_dim, hidden_dim,
                                       knowledge_dim)]
        else:
            self.towers = [TaggerTower(rng, cell_kind, embed_dim, hidden_dim),
                           TaggerTower(rng, cell_kind, embed_dim, hidden_dim,
                                       knowledge_dim)]
        self.out_weight = glorot_uniform(rng, hidden_dim, n_tags)
        self.out_bias = zero_vector(n_tags)

    def params(self, prefix: str) -> dict[str, Tensor]:
        out = {}
        for i, tower in enumerate(self.towers):
            out.update(tower.params(f"{prefix}.tower{i + 1}"))
        out[f"{prefix}.out_weight"] = self.out_weight
        out[f"{prefix}.out_bias"] = self.out_bias
        return out

    def hidden_states(self, embedded: Tensor,
                      guided: Tensor | None = None) -> list[Tensor]:
        if self.mode == "chain":
            return self.towers[0].run(embedded)
        if self.mode == "knowledge":
            if guided is None:
                raise DimensionError("knowledge tagger needs a guided representation")
            return self.towers[0].run(embedded, guided)
        if guided is None:
            raise DimensionError("joint tagger needs a guided representation")
        chain_states = self.towers[0].run(embedded)
        know_states = self.towers[1].run(embedded, guided)
        return [ad.add(ad.affine(h1, self.alpha), ad.affine(h2, 1.0 - self.alpha))
                for h1, h2 in zip(chain_states, know_states)]

    def distributions(self, embedded: Tensor, guided: Tensor | None = None,
                      dropout_rate: float = 0.0,
                      rng: np.random.Generator | None = None) -> Tensor:
        """Stack per-token distributions into a (tokens, tags) matrix."""
        states = ad.stack_rows(self.hidden_states(embedded, guided))
        if dropout_rate > 0.0 and rng is not None:
            states = ad.dropout(states, dropout_rate, rng)
        logits = ad.add(ad.matmul(states, self.out_weight), self.out_bias)
        return ad.softmax(logits)


def decode_greedy(distributions: Tensor) -> list[int]:
    """Per-token argmax tag indices."""
    return distributions.value.argmax(axis=1).tolist()
