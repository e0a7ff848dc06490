"""Recurrent cells and parameter initialization shared by encoders and taggers."""

from __future__ import annotations

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor


def glorot_uniform(rng: np.random.Generator, rows: int, cols: int) -> Tensor:
    """Uniform(-s, s) with s = sqrt(6 / (fan_in + fan_out))."""
    s = np.sqrt(6.0 / (rows + cols))
    return Tensor(rng.uniform(-s, s, size=(rows, cols)))


def zero_vector(n: int) -> Tensor:
    return Tensor(np.zeros(n))


class ElmanCell:
    """h_t = tanh(W x_t + U h_{t-1} [+ extra]); no bias in the recurrence."""

    def __init__(self, rng: np.random.Generator, input_dim: int, hidden_dim: int):
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        self.w_in = glorot_uniform(rng, hidden_dim, input_dim)
        self.u_rec = glorot_uniform(rng, hidden_dim, hidden_dim)

    def params(self, prefix: str) -> dict[str, Tensor]:
        return {f"{prefix}.w_in": self.w_in, f"{prefix}.u_rec": self.u_rec}

    def initial_state(self) -> Tensor:
        return zero_vector(self.hidden_dim)

    def step(self, x: Tensor, h_prev: Tensor,
             extra: Tensor | None = None) -> Tensor:
        pre = ad.add(ad.matmul(self.w_in, x), ad.matmul(self.u_rec, h_prev))
        if extra is not None:
            pre = ad.add(pre, extra)
        return ad.tanh(pre)


class GruCell:
    """Gated recurrent unit: reset and update gates, interpolated state.

        r   = sigmoid(W_r x_t + U_r h_{t-1} [+ extra_r])
        z   = sigmoid(W_z x_t + U_z h_{t-1} [+ extra_z])
        h~  = tanh(W_h x_t + U_h (h_{t-1} * r) [+ extra_h])
        h_t = (1 - z) * h~ + z * h_{t-1}

    The optional extras are per-utterance knowledge terms added to each
    gate's pre-activation.
    """

    GATES = ("reset", "update", "cand")

    def __init__(self, rng: np.random.Generator, input_dim: int, hidden_dim: int):
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        self.w = {g: glorot_uniform(rng, hidden_dim, input_dim) for g in self.GATES}
        self.u = {g: glorot_uniform(rng, hidden_dim, hidden_dim) for g in self.GATES}

    def params(self, prefix: str) -> dict[str, Tensor]:
        out = {}
        for g in self.GATES:
            out[f"{prefix}.w_{g}"] = self.w[g]
            out[f"{prefix}.u_{g}"] = self.u[g]
        return out

    def initial_state(self) -> Tensor:
        return zero_vector(self.hidden_dim)

    def step(self, x: Tensor, h_prev: Tensor,
             extra: dict[str, Tensor] | None = None) -> Tensor:
        def pre(gate: str, h_term: Tensor) -> Tensor:
            p = ad.add(ad.matmul(self.w[gate], x), ad.matmul(self.u[gate], h_term))
            if extra is not None and gate in extra:
                p = ad.add(p, extra[gate])
            return p

        r = ad.sigmoid(pre("reset", h_prev))
        z = ad.sigmoid(pre("update", h_prev))
        cand_pre = ad.add(ad.matmul(self.w["cand"], x),
                          ad.matmul(self.u["cand"], ad.elementwise_mul(h_prev, r)))
        if extra is not None and "cand" in extra:
            cand_pre = ad.add(cand_pre, extra["cand"])
        h_cand = ad.tanh(cand_pre)
        return ad.add(ad.elementwise_mul(ad.affine(z, -1.0, 1.0), h_cand),
                      ad.elementwise_mul(z, h_prev))


def make_cell(kind: str, rng: np.random.Generator, input_dim: int,
              hidden_dim: int):
    if kind == "elman":
        return ElmanCell(rng, input_dim, hidden_dim)
    if kind == "gru":
        return GruCell(rng, input_dim, hidden_dim)
    raise ValueError(f"unknown recurrent cell kind {kind!r}")
