"""Decoder-only autoregressive transformer, from scratch on numpy.

GPT-2 shaped: learned token and position embeddings, pre-norm blocks with
causal multi-head self-attention and a 4d GeLU MLP, a final layer norm and a
linear decode into next-token logits.  Forward, summed cross-entropy loss,
exact backpropagation, AdamW with gradient accumulation over a fixed example
window, and ancestral sampling with a per-stream KV cache.

Everything is deterministic given parameters, inputs and seeds; training
runs in single precision, gradient checks use float64.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

GELU_C = float(np.sqrt(2.0 / np.pi))
GELU_A = 0.044715
LN_EPS = 1e-5


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    max_len: int
    n_layers: int = 2
    dim: int = 16
    n_heads: int = 4
    rng_seed: int = 0
    dtype: str = "float32"

    def __post_init__(self):
        if self.dim % self.n_heads != 0:
            raise ValueError(
                f"dim {self.dim} not divisible by {self.n_heads} heads"
            )
        if min(self.vocab_size, self.max_len, self.n_layers, self.dim) < 1:
            raise ValueError("all model dimensions must be positive")

    @property
    def head_dim(self) -> int:
        return self.dim // self.n_heads

    def np_dtype(self):
        return np.dtype(self.dtype)


def param_shapes(cfg: ModelConfig) -> dict[str, tuple[int, ...]]:
    """Parameter tensors in declared (checkpoint) order."""
    d, v = cfg.dim, cfg.vocab_size
    shapes: dict[str, tuple[int, ...]] = {
        "wte": (v, d),
        "wpe": (cfg.max_len, d),
    }
    for i in range(cfg.n_layers):
        p = f"l{i}."
        shapes[p + "ln1.g"] = (d,)
        shapes[p + "ln1.b"] = (d,)
        shapes[p + "wq"] = (d, d)
        shapes[p + "wk"] = (d, d)
        shapes[p + "wv"] = (d, d)
        shapes[p + "wo"] = (d, d)
        shapes[p + "ln2.g"] = (d,)
        shapes[p + "ln2.b"] = (d,)
        shapes[p + "w1"] = (d, 4 * d)
        shapes[p + "b1"] = (4 * d,)
        shapes[p + "w2"] = (4 * d, d)
        shapes[p + "b2"] = (d,)
    shapes["lnf.g"] = (d,)
    shapes["lnf.b"] = (d,)
    shapes["head"] = (d, v)
    return shapes


def init_params(cfg: ModelConfig) -> dict[str, np.ndarray]:
    """Gaussian(0, 0.02) weights, unit layer-norm scales, zero shifts/biases."""
    rng = np.random.default_rng(cfg.rng_seed)
    dt = cfg.np_dtype()
    params = {}
    for name, shape in param_shapes(cfg).items():
        if name.endswith((".g",)):
            params[name] = np.ones(shape, dtype=dt)
        elif name.endswith((".b", "b1", "b2")) and len(shape) == 1:
            params[name] = np.zeros(shape, dtype=dt)
        else:
            params[name] = (rng.normal(0.0, 0.02, size=shape)).astype(dt)
    return params


def zero_params(cfg: ModelConfig) -> dict[str, np.ndarray]:
    return {
        name: np.zeros(shape, dtype=cfg.np_dtype())
        for name, shape in param_shapes(cfg).items()
    }


# ---------------------------------------------------------------------------
# primitives


def _layernorm(x, g, b):
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + LN_EPS)
    xhat = xc * inv
    return xhat * g + b, (xhat, inv)


def _layernorm_backward(dy, g, cache):
    xhat, inv = cache
    dg = (dy * xhat).reshape(-1, xhat.shape[-1]).sum(axis=0)
    db = dy.reshape(-1, xhat.shape[-1]).sum(axis=0)
    dxhat = dy * g
    m1 = dxhat.mean(axis=-1, keepdims=True)
    m2 = (dxhat * xhat).mean(axis=-1, keepdims=True)
    dx = (dxhat - m1 - xhat * m2) * inv
    return dx, dg, db


def _gelu(x):
    u = GELU_C * (x + GELU_A * (x * x * x))
    t = np.tanh(u)
    return 0.5 * x * (1.0 + t), t


def _gelu_backward(dy, x, t):
    du = GELU_C * (1.0 + 3.0 * GELU_A * x * x)
    return dy * (0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du)


def _split_heads(x, n_heads):
    b, l, d = x.shape
    return x.reshape(b, l, n_heads, d // n_heads).transpose(0, 2, 1, 3)


def _join_heads(x):
    b, h, l, hd = x.shape
    return x.transpose(0, 2, 1, 3).reshape(b, l, h * hd)


from functools import lru_cache


@lru_cache(maxsize=8)
def _causal_mask(l: int) -> np.ndarray:
    return np.tril(np.ones((l, l), dtype=bool))


def _softmax(x, axis=-1):
    m = np.max(x, axis=axis, keepdims=True)
    e = np.exp(x - m)
    return e / e.sum(axis=axis, keepdims=True)


# ---------------------------------------------------------------------------
# forward / backward


def _forward_batch(params, cfg: ModelConfig, tokens: np.ndarray,
                   need_cache: bool):
    """Causal forward over a (B, L) token batch; returns logits (B, L, v)
    and, when requested, the activation cache for backpropagation."""
    b, l = tokens.shape
    if l > cfg.max_len:
        raise ValueError(f"sequence length {l} exceeds max_len {cfg.max_len}")
    if tokens.min() < 0 or tokens.max() >= cfg.vocab_size:
        raise ValueError("token id outside the vocabulary")
    x = params["wte"][tokens] + params["wpe"][:l]
    causal = _causal_mask(l)
    cache = {"tokens": tokens, "layers": []} if need_cache else None
    scale = 1.0 / math.sqrt(cfg.head_dim)  # python float: keeps float32 arrays float32
    for i in range(cfg.n_layers):
        p = f"l{i}."
        a, ln1_cache = _layernorm(x, params[p + "ln1.g"], params[p + "ln1.b"])
        q = _split_heads(a @ params[p + "wq"], cfg.n_heads)
        k = _split_heads(a @ params[p + "wk"], cfg.n_heads)
        v = _split_heads(a @ params[p + "wv"], cfg.n_heads)
        scores = np.where(causal, (q @ k.transpose(0, 1, 3, 2)) * scale,
                          -np.inf)
        att = _softmax(scores)
        ctx = _join_heads(att @ v)
        attn_out = ctx @ params[p + "wo"]
        x1 = x + attn_out
        m, ln2_cache = _layernorm(x1, params[p + "ln2.g"], params[p + "ln2.b"])
        pre = m @ params[p + "w1"] + params[p + "b1"]
        h, gelu_t = _gelu(pre)
        x = x1 + h @ params[p + "w2"] + params[p + "b2"]
        if need_cache:
            cache["layers"].append(
                dict(x_in=x1 - attn_out, a=a, ln1=ln1_cache, q=q, k=k, v=v,
                     att=att, ctx=ctx, x1=x1, m=m, ln2=ln2_cache, pre=pre,
                     h=h, gelu_t=gelu_t)
            )
    f, lnf_cache = _layernorm(x, params["lnf.g"], params["lnf.b"])
    logits = f @ params["head"]
    if need_cache:
        cache["xf"] = x
        cache["f"] = f
        cache["lnf"] = lnf_cache
    return logits, cache


def forward(params, cfg: ModelConfig, tokens) -> np.ndarray:
    """Per-position next-token probability rows for one sequence."""
    toks = np.asarray(tokens, dtype=np.int64)[None, :]
    logits, _ = _forward_batch(params, cfg, toks, need_cache=False)
    return _softmax(logits[0])

def _loss_from_logits(logits, targets, mask):
    """Summed cross-entropy per example plus dlogits, mean-of-sums scaling."""
    b, l, v = logits.shape
    m = logits.max(axis=-1, keepdims=True)
    z = logits - m
    lse = np.log(np.exp(z).sum(axis=-1)) + m[..., 0]
    picked = np.take_along_axis(logits, targets[..., None], axis=-1)[..., 0]
    nll = np.where(mask, lse - picked, 0.0)
    per_example = nll.sum(axis=1)
    probs = _softmax(logits)
    grad = probs
    rows = np.zeros_like(grad)
    np.put_along_axis(rows, targets[..., None], 1.0, axis=-1)
    grad = (grad - rows) * mask[..., None] / b
    return per_example, grad.astype(logits.dtype)


def _backward_batch(params, cfg: ModelConfig, cache, dlogits):
    grads = {name: None for name in params}
    f = cache["f"]
    d, v = cfg.dim, cfg.vocab_size
    grads["head"] = f.reshape(-1, d).T @ dlogits.reshape(-1, v)
    df = dlogits @ params["head"].T
    dx, grads["lnf.g"], grads["lnf.b"] = _layernorm_backward(
        df, params["lnf.g"], cache["lnf"]
    )
    scale = 1.0 / math.sqrt(cfg.head_dim)
    for i in range(cfg.n_layers - 1, -1, -1):
        p = f"l{i}."
        c = cache["layers"][i]
        # MLP branch
        dh = dx @ params[p + "w2"].T
        grads[p + "w2"] = c["h"].reshape(-1, 4 * d).T @ dx.reshape(-1, d)
        grads[p + "b2"] = dx.reshape(-1, d).sum(axis=0)
        dpre = _gelu_backward(dh, c["pre"], c["gelu_t"])
        grads[p + "w1"] = c["m"].reshape(-1, d).T @ dpre.reshape(-1, 4 * d)
        grads[p + "b1"] = dpre.reshape(-1, 4 * d).sum(axis=0)
        dm = dpre @ params[p + "w1"].T
        dx1, grads[p + "ln2.g"], grads[p + "ln2.b"] = _layernorm_backward(
            dm, params[p + "ln2.g"], c["ln2"]
        )
        dx1 = dx1 + dx  # residual
        # attention branch
        dctx = dx1 @ params[p + "wo"].T
        grads[p + "wo"] = c["ctx"].reshape(-1, d).T @ dx1.reshape(-1, d)
        datt_v = _split_heads(dctx, cfg.n_heads)
        datt = datt_v @ c["v"].transpose(0, 1, 3, 2)
        dv = c["att"].transpose(0, 1, 3, 2) @ datt_v
        tmp = (datt * c["att"]).sum(axis=-1, keepdims=True)
        dscores = c["att"] * (datt - tmp)
        dq = (dscores @ c["k"]) * scale
        dk = (dscores.transpose(0, 1, 3, 2) @ c["q"]) * scale
        a_flat = c["a"].reshape(-1, d)
        dq_f = _join_heads(dq).reshape(-1, d)
        dk_f = _join_heads(dk).reshape(-1, d)
        dv_f = _join_heads(dv).reshape(-1, d)
        grads[p + "wq"] = a_flat.T @ dq_f
        grads[p + "wk"] = a_flat.T @ dk_f
        grads[p + "wv"] = a_flat.T @ dv_f
        da = (
            dq_f @ params[p + "wq"].T
            + dk_f @ params[p + "wk"].T
            + dv_f @ params[p + "wv"].T
        ).reshape(c["a"].shape)
        dx_in, grads[p + "ln1.g"], grads[p + "ln1.b"] = _layernorm_backward(
            da, params[p + "ln1.g"], c["ln1"]
        )
        dx = dx1 + dx_in  # residual into the block input
    tokens = cache["tokens"]
    l = tokens.shape[1]
    grads["wpe"] = np.zeros_like(params["wpe"])
    grads["wpe"][:l] = dx.sum(axis=0)
    grads["wte"] = np.zeros_like(params["wte"])
    np.add.at(grads["wte"], tokens.reshape(-1), dx.reshape(-1, d))
    return grads


def loss(params, cfg: ModelConfig, tokens) -> float:
    """Summed cross-entropy of one bracketed sequence: the negative log
    probability of each actual next token, end token included."""
    toks = np.asarray(tokens, dtype=np.int64)
    if len(toks) < 2:
        raise ValueError("need at least a start and an end token")
    inputs, targets = toks[None, :-1], toks[None, 1:]
    logits, _ = _forward_batch(params, cfg, inputs, need_cache=False)
    per_example, _ = _loss_from_logits(
        logits, targets, np.ones_like(targets, dtype=bool)
    )
    return float(per_example[0])


def backward(params, cfg: ModelConfig, tokens) -> dict[str, np.ndarray]:
    """Exact gradients of loss() with respect to every parameter."""
    toks = np.asarray(tokens, dtype=np.int64)
    inputs, targets = toks[None, :-1], toks[None, 1:]
    logits, cache = _forward_batch(params, cfg, inputs, need_cache=True)
    _, dlogits = _loss_from_logits(
        logits, targets, np.ones_like(targets, dtype=bool)
    )
    return _backward_batch(params, cfg, cache, dlogits)


def batch_loss_and_grads(params, cfg: ModelConfig, sequences):
    """Pad a window of sequences, run one fused forward/backward, and return
    (per-example summed losses, gradients of their mean).

    Padding sits after each end token and is masked out of the loss; with
    causal attention it cannot influence any unmasked position.
    """
    b = len(sequences)
    lmax = max(len(s) for s in sequences)
    inputs = np.full((b, lmax - 1), END_PAD, dtype=np.int64)
    targets = np.full((b, lmax - 1), END_PAD, dtype=np.int64)
    mask = np.zeros((b, lmax - 1), dtype=bool)
    for r, seq in enumerate(sequences):
        t = np.asarray(seq, dtype=np.int64)
        inputs[r, : len(t) - 1] = t[:-1]
        targets[r, : len(t) - 1] = t[1:]
        mask[r, : len(t) - 1] = True
    logits, cache = _forward_batch(params, cfg, inputs, need_cache=True)
    per_example, dlogits = _loss_from_logits(logits, targets, mask)
    grads = _backward_batch(params, cfg, cache, dlogits)
    return per_example, grads


END_PAD = 1  # end-token id doubles as padding; padded positions are masked


# ---------------------------------------------------------------------------
# AdamW


@dataclass
class OptimState:
    """AdamW moments plus the hyperparameters pinned by the training recipe:
    lr 5e-4, decoupled weight decay 0.01, updates every 32 examples."""

    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    step: int = 0
    lr: float = 5e-4
    weight_decay: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    accumulation_window: int = 32


def init_optim(params, lr: float = 5e-4, weight_decay: float = 0.01,
               accumulation_window: int = 32) -> OptimState:
    return OptimState(
        m={k: np.zeros_like(p) for k, p in params.items()},
        v={k: np.zeros_like(p) for k, p in params.items()},
        lr=lr,
        weight_decay=weight_decay,
        accumulation_window=accumulation_window,
    )


def _decayable(name: str, arr: np.ndarray) -> bool:
    # matrices only; embeddings, norms and biases are not decayed
    return arr.ndim == 2 and name not in ("wte", "wpe")


def adamw_update(params, opt: OptimState, grads):
    """One decoupled-weight-decay Adam step; returns new params and state."""
    t = opt.step + 1
    bc1 = 1.0 - opt.beta1 ** t
    bc2 = 1.0 - opt.beta2 ** t
    new_params, new_m, new_v = {}, {}, {}
    for name, p in params.items():
        g = grads[name].astype(p.dtype)
        m = opt.beta1 * opt.m[name] + (1.0 - opt.beta1) * g
        v = opt.beta2 * opt.v[name] + (1.0 - opt.beta2) * (g * g)
        update = (m / bc1) / (np.sqrt(v / bc2) + opt.eps)
        if _decayable(name, p):
            update = update + opt.weight_decay * p
        new_params[name] = (p - opt.lr * update).astype(p.dtype)
        new_m[name] = m
        new_v[name] = v
    new_opt = OptimState(
        m=new_m, v=new_v, step=t, lr=opt.lr, weight_decay=opt.weight_decay,
        beta1=opt.beta1, beta2=opt.beta2, eps=opt.eps,
        accumulation_window=opt.accumulation_window,
    )
    return new_params, new_opt


def train_step(params, cfg: ModelConfig, opt: OptimState, batch):
    """Accumulate gradients over one window of examples (the mean of their
    summed cross-entropies) and apply a single AdamW update.  Pure function
    of (params, opt, batch); replays are bitwise identical."""
    per_example, grads = batch_loss_and_grads(params, cfg, batch)
    mean_loss = float(per_example.mean())
    if not np.isfinite(mean_loss):
        raise FloatingPointError(
            f"non-finite training loss {mean_loss} at step {opt.step + 1}"
        )
    new_params, new_opt = adamw_update(params, opt, grads)
    return new_params, new_opt, mean_loss


# ---------------------------------------------------------------------------
# sampling


def sample_batch(params, cfg: ModelConfig, rng, n_streams: int,
                 max_len: int | None = None,
                 start_id: int = 0, end_id: int = 1) -> list[list[int]]:
    """Ancestral sampling of n_streams sequences at temperature one.

    Incremental decoding with per-layer KV caches; each step runs the
    transformer on the newest token only.  Streams stop at their end token;
    sequences that hit the length cap are returned without one (the caller
    counts them invalid).
    """
    cap = cfg.max_len if max_len is None else min(max_len, cfg.max_len)
    b = n_streams
    d, nh, hd = cfg.dim, cfg.n_heads, cfg.head_dim
    scale = 1.0 / math.sqrt(hd)
    dt = cfg.np_dtype()
    ks = [np.zeros((b, nh, cap, hd), dtype=dt) for _ in range(cfg.n_layers)]
    vs = [np.zeros((b, nh, cap, hd), dtype=dt) for _ in range(cfg.n_layers)]
    tokens = np.full(b, start_id, dtype=np.int64)
    done = np.zeros(b, dtype=bool)
    out: list[list[int]] = [[start_id] for _ in range(b)]
    for pos in range(cap - 1):
        x = params["wte"][tokens] + params["wpe"][pos]
        for i in range(cfg.n_layers):
            p = f"l{i}."
            a, _ = _layernorm(x, params[p + "ln1.g"], params[p + "ln1.b"])
            q = (a @ params[p + "wq"]).reshape(b, nh, hd)
            ks[i][:, :, pos] = (a @ params[p + "wk"]).reshape(b, nh, hd)
            vs[i][:, :, pos] = (a @ params[p + "wv"]).reshape(b, nh, hd)
            kcur = ks[i][:, :, : pos + 1]
            vcur = vs[i][:, :, : pos + 1]
            scores = np.einsum("bhd,bhtd->bht", q, kcur) * scale
            att = _softmax(scores)
            ctx = np.einsum("bht,bhtd->bhd", att, vcur).reshape(b, d)
            x = x + ctx @ params[p + "wo"]
            m, _ = _layernorm(x, params[p + "ln2.g"], params[p + "ln2.b"])
            h, _ = _gelu(m @ params[p + "w1"] + params[p + "b1"])
            x = x + h @ params[p + "w2"] + params[p + "b2"]
        f, _ = _layernorm(x, params["lnf.g"], params["lnf.b"])
        probs = _softmax(f @ params["head"])
        cdf = np.cumsum(probs.astype(np.float64), axis=1)
        cdf /= cdf[:, -1:]
        u = rng.random(b)
        nxt = (cdf < u[:, None]).sum(axis=1)
        nxt = np.minimum(nxt, cfg.vocab_size - 1)
        nxt = np.where(done, end_id, nxt)
        tokens = nxt
        for s in range(b):
            if not done[s]:
                out[s].append(int(nxt[s]))
                if nxt[s] == end_id:
                    done[s] = True
        if done.all():
            break
    return out


def sample(params, cfg: ModelConfig, rng, max_len: int | None = None,
           start_id: int = 0, end_id: int = 1) -> list[int]:
    """One sampled TokenSeq, start token included; reproducible per seed."""
    return sample_batch(params, cfg, rng, 1, max_len, start_id, end_id)[0]


# ---------------------------------------------------------------------------
# checkpoints


def save_checkpoint(path, cfg: ModelConfig, params, opt: OptimState) -> None:
    """Self-describing container: config header, parameter tensors in
    declared order, optimizer moments and counters; bitwise round trip."""
    header = {
        "config": asdict(cfg),
        "opt": {
            "step": opt.step, "lr": opt.lr, "weight_decay": opt.weight_decay,
            "beta1": opt.beta1, "beta2": opt.beta2, "eps": opt.eps,
            "accumulation_window": opt.accumulation_window,
        },
    }
    arrays = {}
    for name in param_shapes(cfg):
        arrays["p." + name] = params[name]
        arrays["m." + name] = opt.m[name]
        arrays["v." + name] = opt.v[name]
    buf = io.BytesIO()
    np.savez(buf, __header__=np.frombuffer(
        json.dumps(header, sort_keys=True).encode(), dtype=np.uint8),
        **arrays)
    with open(path, "wb") as fh:
        fh.write(buf.getvalue())


def load_checkpoint(path):
    with np.load(path) as data:
        header = json.loads(bytes(data["__header__"]).decode())
        cfg = ModelConfig(**header["config"])
        params, m, v = {}, {}, {}
        for name in param_shapes(cfg):
            params[name] = data["p." + name]
            m[name] = data["m." + name]
            v[name] = data["v." + name]
    opt = OptimState(m=m, v=v, **header["opt"])
    return cfg, params, opt
