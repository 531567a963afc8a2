"""Encoder-decoder forward pass and hand-derived backpropagation.

The encoder runs a zero-initialized bidirectional GRU over each incoming
path's motion steps, concatenates the two final states, and sums over the
path set (sorted canonically first, so the sum is exactly order-invariant).
The decoder GRU consumes [context, previous-offset embedding] at every step
and emits independent categorical logits per axis, a binary stop logit, and
optionally a two-way road-type logit. The stop flag is trained to fire on
the step that emits the last outgoing node, so every step carries all loss
terms and the uniform model's per-step loss is exactly 2*ln(n_bins) + ln 2.

No autodiff framework: gradients are derived for this fixed architecture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DISCRETE, POLAR, ModelConfig
from .gru import gru_backward, gru_forward, sigmoid
from .params import ModelParams


@dataclass
class EncodedSample:
    """One training sample in model space.

    paths: discrete mode -> sequences of (x_bin, y_bin) ints;
           polar mode -> sequences of (length_m, turn_rad) floats.
    targets: one step per outgoing node: (x_bin, y_bin, stop, edge_class),
             stop = 1 on the final step, edge_class in {0, 1} or None.
    """

    paths: list[list[tuple]]
    targets: list[tuple[int, int, int, int | None]]
    style: int | None = None
    raster_feat: np.ndarray | None = None
    sample_id: str = ""


# -- input embedding ---------------------------------------------------------


def _path_key(steps: list[tuple]) -> tuple:
    return tuple(steps)


def _embed_enc_step(params: ModelParams, step: tuple) -> tuple[np.ndarray, tuple]:
    cfg = params.config
    if cfg.encoder_mode == DISCRETE:
        bx, by = step
        if not (0 <= bx < cfg.n_bins and 0 <= by < cfg.n_bins):
            raise ValueError(f"encoder offset bin {step} out of range")
        vec = np.concatenate([params["embed_x"][bx], params["embed_y"][by]])
        return vec, ("bins", bx, by)
    r, theta = step
    u = np.array([r / cfg.offset_range, theta / math.pi])
    vec = params["polar_in.W"] @ u + params["polar_in.b"]
    return vec, ("polar", u)


def _embed_prev(params: ModelParams, bx: int, by: int) -> np.ndarray:
    return np.concatenate([params["embed_x"][bx], params["embed_y"][by]])


def start_embedding(params: ModelParams) -> np.ndarray:
    return params["start_token"]


# -- encoder -----------------------------------------------------------------


def encode(
    params: ModelParams,
    paths: list[list[tuple]],
    style: int | None = None,
    raster_feat: np.ndarray | None = None,
    want_cache: bool = False,
):
    """Context vector [sum of per-path bidirectional states, attribute vector]."""
    cfg = params.config
    if not paths:
        raise ValueError("encode needs at least one incoming path")
    h = cfg.hidden_size
    ordered = sorted(paths, key=_path_key)

    path_caches = []
    h_enc = np.zeros(2 * h)
    for steps in ordered:
        if not steps:
            raise ValueError("empty motion sequence in path set")
        xs, embed_caches = [], []
        for step in steps:
            vec, ec = _embed_enc_step(params, step)
            xs.append(vec)
            embed_caches.append(ec)
        hf = np.zeros(h)
        f_caches = []
        for x in xs:
            hf, c = gru_forward(params.tensors, "enc_f", x, hf)
            f_caches.append(c)
        hb = np.zeros(h)
        b_caches = []
        for x in reversed(xs):
            hb, c = gru_forward(params.tensors, "enc_b", x, hb)
            b_caches.append(c)
        h_enc += np.concatenate([hf, hb])
        path_caches.append((embed_caches, f_caches, b_caches))

    if raster_feat is not None:
        if not cfg.raster_attr:
            raise ValueError("model was not configured with a raster attribute head")
        feat = np.asarray(raster_feat, dtype=float)
        h_attr = params["raster_in.W"] @ feat + params["raster_in.b"]
        attr_src = ("raster", feat)
    elif style is not None:
        if not (0 <= style < cfg.n_styles):
            raise ValueError(f"style id {style} out of range")
        h_attr = params["attr_embed"][style].copy()
        attr_src = ("style", style)
    else:
        h_attr = np.zeros(cfg.embed_size)
        attr_src = ("none",)

    ctx = np.concatenate([h_enc, h_attr])
    if want_cache:
        return ctx, (ordered, path_caches, attr_src)
    return ctx


def _encode_backward(
    params: ModelParams, cache, dctx: np.ndarray, grads: dict
) -> None:
    cfg = params.config
    h = cfg.hidden_size
    ordered, path_caches, attr_src = cache
    dh_enc = dctx[: 2 * h]
    dh_attr = dctx[2 * h :]

    if attr_src[0] == "raster":
        feat = attr_src[1]
        grads["raster_in.W"] += np.outer(dh_attr, feat)
        grads["raster_in.b"] += dh_attr
    elif attr_src[0] == "style":
        grads["attr_embed"][attr_src[1]] += dh_attr

    for steps, (embed_caches, f_caches, b_caches) in zip(ordered, path_caches):
        n = len(steps)
        dxs = [np.zeros(2 * cfg.embed_size) for _ in range(n)]
        dh = dh_enc[:h].copy()
        for t in range(n - 1, -1, -1):
            dx, dh = gru_backward(params.tensors, "enc_f", f_caches[t], dh, grads)
            dxs[t] += dx
        dh = dh_enc[h:].copy()
        for t in range(n - 1, -1, -1):
            dx, dh = gru_backward(params.tensors, "enc_b", b_caches[t], dh, grads)
            dxs[n - 1 - t] += dx
        for ec, dx in zip(embed_caches, dxs):
            if ec[0] == "bins":
                e = cfg.embed_size
                grads["embed_x"][ec[1]] += dx[:e]
                grads["embed_y"][ec[2]] += dx[e:]
            else:
                grads["polar_in.W"] += np.outer(dx, ec[1])
                grads["polar_in.b"] += dx


# -- decoder -----------------------------------------------------------------


def decode_step(
    params: ModelParams,
    ctx: np.ndarray,
    h: np.ndarray,
    prev_emb: np.ndarray,
    want_cache: bool = False,
):
    """One decoder step. Returns (logits_x, logits_y, stop_logit, edge_logits, h')."""
    u = np.concatenate([ctx, prev_emb])
    h2, gcache = gru_forward(params.tensors, "dec", u, h)
    lx = params["out_x.W"] @ h2 + params["out_x.b"]
    ly = params["out_y.W"] @ h2 + params["out_y.b"]
    ls = float(params["stop.w"] @ h2 + params["stop.b"][0])
    le = None
    if params.config.edge_type_head:
        le = params["edge.W"] @ h2 + params["edge.b"]
    if want_cache:
        return (lx, ly, ls, le, h2), gcache
    return lx, ly, ls, le, h2


@dataclass
class _DecCache:
    gru_caches: list = field(default_factory=list)
    hiddens: list = field(default_factory=list)
    prev_bins: list = field(default_factory=list)  # None for the start step


def _decode_teacher(params: ModelParams, ctx: np.ndarray, targets):
    """Teacher-forced rollout over the target steps. Returns (logit tuples, cache)."""
    h = np.zeros(params.config.hidden_size)
    cache = _DecCache()
    outputs = []
    prev = None
    for bx, by, _stop, _etype in targets:
        emb = start_embedding(params) if prev is None else _embed_prev(params, *prev)
        out, gcache = decode_step(params, ctx, h, emb, want_cache=True)
        lx, ly, ls, le, h = out[0], out[1], out[2], out[3], out[4]
        outputs.append((lx, ly, ls, le))
        cache.gru_caches.append(gcache)
        cache.hiddens.append(h)
        cache.prev_bins.append(prev)
        prev = (bx, by)
    return outputs, cache


def decode_rollout(
    ctx: np.ndarray,
    params: ModelParams,
    max_steps: int,
    targets: list | None = None,
    rng: np.random.Generator | None = None,
    temperature: float = 1.0,
):
    """Roll the decoder out for inspection.

    With targets: teacher-forced, returns (logits, [], truncated). Without:
    free-running sampling (requires rng), returns (logits, steps, truncated)
    where steps are the sampled (x_bin, y_bin, stop, edge) tuples. Hitting
    max_steps truncates and flags rather than raising.
    """
    if targets is not None:
        truncated = len(targets) > max_steps
        outputs, _ = _decode_teacher(params, ctx, targets[:max_steps])
        return outputs, [], truncated
    if rng is None:
        raise ValueError("free-running rollout needs an rng")
    h = np.zeros(params.config.hidden_size)
    emb = start_embedding(params)
    outputs, steps = [], []
    for _ in range(max_steps):
        lx, ly, ls, le, h = decode_step(params, ctx, h, emb)
        outputs.append((lx, ly, ls, le))
        bx = sample_categorical(lx, rng, temperature)
        by = sample_categorical(ly, rng, temperature)
        stop = sample_stop(ls, rng, temperature)
        etype = sample_categorical(le, rng, temperature) if le is not None else None
        steps.append((bx, by, stop, etype))
        if stop:
            return outputs, steps, False
        emb = _embed_prev(params, bx, by)
    return outputs, steps, True


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - np.max(logits)
    e = np.exp(z)
    return e / e.sum()


def draw_index(weights: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw proportional to non-negative weights (one rng call)."""
    c = np.cumsum(weights)
    u = rng.random() * c[-1]
    return min(int(np.searchsorted(c, u, side="right")), len(weights) - 1)


def sample_categorical(
    logits: np.ndarray, rng: np.random.Generator, temperature: float = 1.0
) -> int:
    """Temperature-scaled draw; temperature 0 means greedy argmax."""
    if temperature <= 0.0:
        return int(np.argmax(logits))
    return draw_index(softmax(logits / temperature), rng)


def sample_stop(
    stop_logit: float, rng: np.random.Generator, temperature: float = 1.0
) -> int:
    if temperature <= 0.0:
        return int(stop_logit > 0.0)
    p = sigmoid(np.array([stop_logit / temperature]))[0]
    return int(rng.random() < p)


# -- loss and gradients ------------------------------------------------------


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - np.max(logits)
    return z - np.log(np.exp(z).sum())


def loss_and_grad(
    params: ModelParams,
    batch: list[EncodedSample],
    clip: float | None = 1.0,
):
    """Mean teacher-forced loss over the batch and its parameter gradients.

    Per decoder step the loss is CE(x bin) + CE(y bin) + CE(stop)
    (+ CE(edge type) when that head exists); steps are averaged per sample
    and samples averaged over the batch. Gradients come from explicit
    backpropagation through the decoder and both encoder directions, then
    get clipped to global norm `clip` (pass None to skip, e.g. for
    finite-difference checks).
    """
    if not batch:
        raise ValueError("empty batch")
    cfg = params.config
    grads = {name: np.zeros_like(arr) for name, arr in params.tensors.items()}
    total_loss = 0.0

    for sample in batch:
        if not sample.targets:
            raise ValueError(f"sample {sample.sample_id!r} has no outgoing nodes")
        ctx, enc_cache = encode(
            params,
            sample.paths,
            style=sample.style,
            raster_feat=sample.raster_feat,
            want_cache=True,
        )
        outputs, dec_cache = _decode_teacher(params, ctx, sample.targets)

        n_steps = len(sample.targets)
        scale = 1.0 / (len(batch) * n_steps)
        sample_loss = 0.0
        dlogits = []
        for (lx, ly, ls, le), (bx, by, stop, etype) in zip(outputs, sample.targets):
            lsx, lsy = _log_softmax(lx), _log_softmax(ly)
            step_loss = -lsx[bx] - lsy[by]
            ps = sigmoid(np.array([ls]))[0]
            # numerically safe binary cross entropy via log-sigmoid
            step_loss += math.log1p(math.exp(-abs(ls))) + max(ls, 0.0) - stop * ls
            dlx = np.exp(lsx)
            dlx[bx] -= 1.0
            dly = np.exp(lsy)
            dly[by] -= 1.0
            dls = ps - stop
            dle = None
            if le is not None:
                if etype is None:
                    raise ValueError(
                        f"sample {sample.sample_id!r} lacks edge-type labels"
                    )
                lse = _log_softmax(le)
                step_loss += -lse[etype]
                dle = np.exp(lse)
                dle[etype] -= 1.0
            sample_loss += step_loss
            dlogits.append((dlx * scale, dly * scale, dls * scale, None if dle is None else dle * scale))

        if not math.isfinite(sample_loss):
            raise ValueError(f"non-finite loss on sample {sample.sample_id!r}")
        total_loss += sample_loss / n_steps

        # decoder backward
        dctx = np.zeros_like(ctx)
        dh_next = np.zeros(cfg.hidden_size)
        for t in range(n_steps - 1, -1, -1):
            dlx, dly, dls, dle = dlogits[t]
            h_t = dec_cache.hiddens[t]
            grads["out_x.W"] += np.outer(dlx, h_t)
            grads["out_x.b"] += dlx
            grads["out_y.W"] += np.outer(dly, h_t)
            grads["out_y.b"] += dly
            grads["stop.w"] += dls * h_t
            grads["stop.b"][0] += dls
            dh = (
                params["out_x.W"].T @ dlx
                + params["out_y.W"].T @ dly
                + params["stop.w"] * dls
                + dh_next
            )
            if dle is not None:
                grads["edge.W"] += np.outer(dle, h_t)
                grads["edge.b"] += dle
                dh += params["edge.W"].T @ dle
            du, dh_prev = gru_backward(
                params.tensors, "dec", dec_cache.gru_caches[t], dh, grads
            )
            dctx += du[: len(ctx)]
            demb = du[len(ctx) :]
            prev = dec_cache.prev_bins[t]
            if prev is None:
                grads["start_token"] += demb
            else:
                e = cfg.embed_size
                grads["embed_x"][prev[0]] += demb[:e]
                grads["embed_y"][prev[1]] += demb[e:]
            dh_next = dh_prev

        _encode_backward(params, enc_cache, dctx, grads)

    loss = total_loss / len(batch)
    if clip is not None:
        from .adam import clip_gradients

        clip_gradients(grads, clip)
    return loss, grads
