"""Gated recurrent unit, forward and backward, written out explicitly.

Gate convention (pinned so tests have a closed form):
    z  = sigmoid(Wz x + Uz h + bz)
    r  = sigmoid(Wr x + Ur h + br)
    c  = tanh(Wh x + Uh (r*h) + bh)
    h' = (1 - z) * h + z * c
With all-zero weights this gives h' = 0.5 * h.
"""

from __future__ import annotations

import numpy as np

GATE_NAMES = ("Wz", "Wr", "Wh", "Uz", "Ur", "Uh", "bz", "br", "bh")


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def gru_forward(t: dict, p: str, x: np.ndarray, h: np.ndarray):
    """One cell step for the weight set under prefix p. Returns (h', cache)."""
    z = sigmoid(t[p + ".Wz"] @ x + t[p + ".Uz"] @ h + t[p + ".bz"])
    r = sigmoid(t[p + ".Wr"] @ x + t[p + ".Ur"] @ h + t[p + ".br"])
    rh = r * h
    c = np.tanh(t[p + ".Wh"] @ x + t[p + ".Uh"] @ rh + t[p + ".bh"])
    h2 = (1.0 - z) * h + z * c
    return h2, (x, h, z, r, rh, c)


def gru_backward(t: dict, p: str, cache, dh2: np.ndarray, grads: dict):
    """Backprop one cell step. Accumulates into grads, returns (dx, dh)."""
    x, h, z, r, rh, c = cache
    dz = dh2 * (c - h)
    dc = dh2 * z
    dh = dh2 * (1.0 - z)

    dac = dc * (1.0 - c * c)
    grads[p + ".Wh"] += np.outer(dac, x)
    grads[p + ".Uh"] += np.outer(dac, rh)
    grads[p + ".bh"] += dac
    drh = t[p + ".Uh"].T @ dac
    dr = drh * h
    dh += drh * r

    dar = dr * r * (1.0 - r)
    grads[p + ".Wr"] += np.outer(dar, x)
    grads[p + ".Ur"] += np.outer(dar, h)
    grads[p + ".br"] += dar
    dh += t[p + ".Ur"].T @ dar

    daz = dz * z * (1.0 - z)
    grads[p + ".Wz"] += np.outer(daz, x)
    grads[p + ".Uz"] += np.outer(daz, h)
    grads[p + ".bz"] += daz
    dh += t[p + ".Uz"].T @ daz

    dx = t[p + ".Wz"].T @ daz + t[p + ".Wr"].T @ dar + t[p + ".Wh"].T @ dac
    return dx, dh


def gru_cell(x: np.ndarray, h: np.ndarray, weights: dict) -> np.ndarray:
    """Standalone cell evaluation with input validation.

    `weights` maps the names in GATE_NAMES to arrays with consistent shapes.
    """
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(h))):
        raise ValueError("non-finite input to gru_cell")
    t = {"g." + k: np.asarray(v, dtype=float) for k, v in weights.items()}
    h2, _ = gru_forward(t, "g", x, h)
    return h2
