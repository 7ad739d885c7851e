"""The local-global search loop: seed a database with local search, then
repeat (fine-tune the model on the pool, sample, decode, local-search,
merge), with per-generation checkpoints and statistics.

Every random phase draws from a dedicated stream derived from the master
seed and the generation index, so a run resumed from any checkpoint
continues exactly like an uninterrupted one.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from . import tokenizer as tk
from . import transformer as tr
from .core import Construction, Pool, ScoredConstruction, pool_load, pool_save
from .problems import Problem, make_problem

log = logging.getLogger("patternboost")

SEED_CHUNK = 512     # local searches per worker chunk in the seed phase
SEARCH_CHUNK = 256   # decoded seeds per worker chunk in the search phase
SAMPLE_BATCH = 1024  # parallel sampling streams (fixed: part of the recipe)

# problems whose score stays finite on arbitrary payloads; only these can
# run with local search disabled (the global-only ablation)
LENIENT_KINDS = {"triangle", "c4", "perm312", "sperner", "cross_sperner",
                 "boxes"}


@dataclass
class RunConfig:
    problem: str
    n: int = 0
    d: int = 0
    k: int = 0
    pool_capacity: int = 0          # 0 -> seed_runs * selection_fraction
    selection_fraction: float = 0.0  # 0 -> problem default
    seed_runs: int = 1000
    samples_per_generation: int = 1000
    generations: int = 3
    train_steps: int = 2000
    batch_window: int = 32
    lr: float = 5e-4
    weight_decay: float = 0.01
    n_layers: int = 2
    dim: int = 16
    n_heads: int = 4
    codec: str = ""                  # "" -> problem default (bpe/fixed/point)
    bpe_vocab: int = 100
    delimiters: bool = True
    fixed_width: int = 8
    master_seed: int = 0
    workers: int = 1
    out_dir: str = ""
    local_search: bool = True
    seed_mode: str = "local_search"  # or "random" (global-only ablation)
    augment_symmetries: bool = True
    box_over_weight: int = 3
    box_under_weight: int = 1

    def __post_init__(self):
        if not 0.0 <= self.selection_fraction <= 1.0:
            raise ValueError("selection fraction must lie in (0, 1]")
        for name in ("seed_runs", "batch_window", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        for name in ("samples_per_generation", "train_steps", "generations"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.seed_mode not in ("local_search", "random"):
            raise ValueError(f"unknown seed_mode {self.seed_mode!r}")
        if (not self.local_search or self.seed_mode == "random") \
                and self.problem not in LENIENT_KINDS:
            raise ValueError(
                f"problem {self.problem!r} has no lenient score; it cannot "
                "run with local search disabled or random seeding"
            )


@dataclass
class GenerationStats:
    generation: int
    samples: int
    invalid: int
    histogram: dict[int, int]  # score -> distinct new constructions
    pool_size: int
    pool_best: int
    pool_mean: float
    cumulative_searches: int
    train_loss: float | None = None

    @property
    def valid(self) -> int:
        return self.samples - self.invalid


def build_problem(cfg: RunConfig) -> Problem:
    kind = cfg.problem
    if kind in ("triangle", "c4"):
        return make_problem(kind, n=cfg.n, delimiters=cfg.delimiters)
    if kind in ("perm312", "isosceles"):
        return make_problem(kind, n=cfg.n)
    if kind == "sphere":
        return make_problem(kind, n=cfg.n,
                            augment_symmetries=cfg.augment_symmetries)
    if kind == "cube":
        return make_problem(kind, d=cfg.d)
    if kind in ("sperner", "cross_sperner"):
        return make_problem(kind, n=cfg.n, k=cfg.k)
    if kind == "boxes":
        return make_problem(kind, d=cfg.d, over_weight=cfg.box_over_weight,
                            under_weight=cfg.box_under_weight)
    raise ValueError(f"unknown problem {kind!r}")


def _problem_args(cfg: RunConfig) -> tuple[str, dict]:
    kind = cfg.problem
    if kind in ("triangle", "c4"):
        return kind, dict(n=cfg.n, delimiters=cfg.delimiters)
    if kind in ("perm312", "isosceles"):
        return kind, dict(n=cfg.n)
    if kind == "sphere":
        return kind, dict(n=cfg.n, augment_symmetries=cfg.augment_symmetries)
    if kind == "cube":
        return kind, dict(d=cfg.d)
    if kind in ("sperner", "cross_sperner"):
        return kind, dict(n=cfg.n, k=cfg.k)
    return kind, dict(d=cfg.d, over_weight=cfg.box_over_weight,
                      under_weight=cfg.box_under_weight)


def effective_selection_fraction(cfg: RunConfig, problem: Problem) -> float:
    return cfg.selection_fraction or problem.default_selection_fraction


def effective_capacity(cfg: RunConfig, problem: Problem) -> int:
    if cfg.pool_capacity:
        return cfg.pool_capacity
    frac = effective_selection_fraction(cfg, problem)
    return max(1, round(cfg.seed_runs * frac))


def _rng(cfg: RunConfig, *key: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(cfg.master_seed, spawn_key=key)
    )


# ---------------------------------------------------------------------------
# worker chunks (top level for pickling)


def _seed_chunk(args):
    kind, kwargs, count, master_seed, key, mode = args
    problem = make_problem(kind, **kwargs)
    rng = np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=key)
    )
    out = []
    for _ in range(count):
        if mode == "random":
            out.append(problem.random_payload(rng))
        else:
            out.append(problem.local_search(problem.empty_seed(), rng))
    return out


def _search_chunk(args):
    kind, kwargs, seeds, master_seed, key = args
    problem = make_problem(kind, **kwargs)
    rng = np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=key)
    )
    return [problem.local_search(seed, rng) for seed in seeds]


def _run_chunks(cfg: RunConfig, work: list, fn) -> list:
    if cfg.workers > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(fn, work))
    else:
        results = [fn(item) for item in work]
    return [payload for chunk in results for payload in chunk]


# ---------------------------------------------------------------------------
# phases


def seed_database(cfg: RunConfig,
                  problem: Problem | None = None
                  ) -> tuple[Pool, GenerationStats]:
    """Run the problem's local search from its trivial start seed_runs times
    and keep the top selection-fraction of results."""
    problem = problem or build_problem(cfg)
    kind, kwargs = _problem_args(cfg)
    work = []
    remaining = cfg.seed_runs
    chunk_idx = 0
    while remaining > 0:
        count = min(SEED_CHUNK, remaining)
        work.append((kind, kwargs, count, cfg.master_seed, (0, chunk_idx),
                     cfg.seed_mode))
        remaining -= count
        chunk_idx += 1
    payloads = _run_chunks(cfg, work, _seed_chunk)
    pool = Pool(problem.problem_id, problem.payload_len,
                effective_capacity(cfg, problem))
    histogram: dict[int, int] = {}
    seen: set[bytes] = set()
    for payload in payloads:
        score = problem.score(payload)
        if payload not in seen:
            seen.add(payload)
            histogram[score] = histogram.get(score, 0) + 1
        pool.insert(ScoredConstruction(
            score, Construction(problem.problem_id, payload)))
    stats = GenerationStats(
        generation=0, samples=cfg.seed_runs, invalid=0, histogram=histogram,
        pool_size=len(pool), pool_best=pool.best_score(),
        pool_mean=pool.mean_score(), cumulative_searches=cfg.seed_runs,
    )
    return pool, stats


def build_codec(cfg: RunConfig, problem: Problem, pool: Pool | None = None,
                vocab: tk.Vocab | None = None):
    """Codec per config; BPE vocabularies are trained once on the seed pool
    and frozen for the rest of the run."""
    codec_kind = cfg.codec or problem.default_codec
    if codec_kind == "bpe":
        if vocab is None:
            if pool is None:
                raise ValueError("training a BPE vocab needs the seed pool")
            corpus = [problem.to_text(p) for p in pool.payloads()]
            vocab = tk.bpe_train(corpus, cfg.bpe_vocab,
                                 base_symbols=problem.text_alphabet)
        return tk.BpeCodec(vocab, problem.to_text, problem.from_text,
                           problem.char_len())
    if codec_kind == "fixed":
        return tk.FixedWidthCodec(cfg.fixed_width, problem.payload_len,
                                  problem.payload_to_seed)
    if codec_kind == "point":
        if problem.kind != "sphere":
            raise ValueError("the point codec only fits the sphere problem")
        return tk.PointCodec(problem.n)
    raise ValueError(f"unknown codec {codec_kind!r}")


@dataclass
class LoopState:
    cfg: RunConfig
    problem: Problem
    codec: object
    pool: Pool
    model_cfg: tr.ModelConfig
    params: dict
    opt: tr.OptimState
    generation: int = 0
    cumulative_searches: int = 0
    vocab: tk.Vocab | None = None


def init_state(cfg: RunConfig, pool: Pool, seed_stats: GenerationStats
               ) -> LoopState:
    problem = build_problem(cfg)
    codec = build_codec(cfg, problem, pool=pool)
    model_cfg = tr.ModelConfig(
        vocab_size=codec.n_tokens, max_len=codec.max_len,
        n_layers=cfg.n_layers, dim=cfg.dim, n_heads=cfg.n_heads,
        rng_seed=cfg.master_seed,
    )
    params = tr.init_params(model_cfg)
    opt = tr.init_optim(params, lr=cfg.lr, weight_decay=cfg.weight_decay,
                        accumulation_window=cfg.batch_window)
    vocab = codec.vocab if isinstance(codec, tk.BpeCodec) else None
    return LoopState(cfg, problem, codec, pool, model_cfg, params, opt,
                     generation=0,
                     cumulative_searches=seed_stats.cumulative_searches,
                     vocab=vocab)


def _train(state: LoopState) -> float | None:
    cfg = state.cfg
    corpus = state.codec.encode_batch(state.pool.payloads())
    if not corpus:
        return None
    rng = _rng(cfg, state.generation, 1)
    recent: list[float] = []
    for _ in range(cfg.train_steps):
        idx = rng.integers(0, len(corpus), size=cfg.batch_window)
        batch = [corpus[i] for i in idx]
        state.params, state.opt, step_loss = tr.train_step(
            state.params, state.model_cfg, state.opt, batch
        )
        recent.append(step_loss)
        if len(recent) > 100:
            recent.pop(0)
    return float(np.mean(recent))


def _sample_tokens(state: LoopState) -> list[list[int]]:
    cfg = state.cfg
    out: list[list[int]] = []
    remaining = cfg.samples_per_generation
    batch_idx = 0
    while remaining > 0:
        count = min(SAMPLE_BATCH, remaining)
        rng = _rng(cfg, state.generation, 2, batch_idx)
        out.extend(tr.sample_batch(state.params, state.model_cfg, rng, count))
        remaining -= count
        batch_idx += 1
    return out


def run_generation(state: LoopState) -> GenerationStats:
    """One loop iteration: fine-tune on the pool, sample, decode, improve by
    local search, merge everything back into the pool."""
    cfg = state.cfg
    problem = state.problem
    state.generation += 1
    train_loss = _train(state) if cfg.train_steps > 0 else None
    sampled = _sample_tokens(state) if cfg.samples_per_generation > 0 else []
    seeds = []
    invalid = 0
    for toks in sampled:
        if not toks or toks[-1] != tk.END_ID:
            invalid += 1  # ran into the length cap; counted unscoreable
            continue
        try:
            seeds.append(state.codec.decode(toks))
        except tk.DecodeError:
            invalid += 1
    if cfg.local_search:
        kind, kwargs = _problem_args(cfg)
        work = []
        for ci in range(0, len(seeds), SEARCH_CHUNK):
            chunk = seeds[ci:ci + SEARCH_CHUNK]
            work.append((kind, kwargs, chunk, cfg.master_seed,
                         (state.generation, 3, ci // SEARCH_CHUNK)))
        payloads = _run_chunks(cfg, work, _search_chunk)
        state.cumulative_searches += len(seeds)
    else:
        # guarded in RunConfig: only lenient-score problems reach here
        payloads = [bytes(s) for s in seeds]
    histogram: dict[int, int] = {}
    seen: set[bytes] = set()
    for payload in payloads:
        score = problem.score(payload)
        if payload not in seen:
            seen.add(payload)
            histogram[score] = histogram.get(score, 0) + 1
        # symmetry images keep the score; isometries preserve all distances
        for image in problem.augment(payload):
            state.pool.insert(ScoredConstruction(
                score, Construction(problem.problem_id, image)))
    return GenerationStats(
        generation=state.generation,
        samples=len(sampled),
        invalid=invalid,
        histogram=histogram,
        pool_size=len(state.pool),
        pool_best=state.pool.best_score(),
        pool_mean=state.pool.mean_score(),
        cumulative_searches=state.cumulative_searches,
        train_loss=train_loss,
    )


# ---------------------------------------------------------------------------
# whole runs with checkpoints


def histogram_emit(stats_list: list[GenerationStats], path) -> None:
    """CSV with one row per (generation, score, count), sorted."""
    lines = ["generation,score,count"]
    for st in stats_list:
        for score in sorted(st.histogram):
            lines.append(f"{st.generation},{score},{st.histogram[score]}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_stats_row(out: Path, stats: GenerationStats) -> None:
    gen_dir = out / f"gen_{stats.generation}"
    payload = asdict(stats)
    payload["histogram"] = {str(k): v for k, v in stats.histogram.items()}
    with open(gen_dir / "state.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)


def _load_stats_row(out: Path, generation: int) -> GenerationStats:
    with open(out / f"gen_{generation}" / "state.json", encoding="utf-8") as fh:
        raw = json.load(fh)
    raw["histogram"] = {int(k): v for k, v in raw["histogram"].items()}
    return GenerationStats(**raw)


def _checkpoint(out: Path, state: LoopState, stats_list) -> None:
    gen_dir = out / f"gen_{state.generation}"
    gen_dir.mkdir(parents=True, exist_ok=True)
    pool_save(state.pool, gen_dir / "pool.txt")
    tr.save_checkpoint(gen_dir / "model.ckpt", state.model_cfg, state.params,
                       state.opt)
    _write_stats_row(out, stats_list[-1])
    histogram_emit(stats_list, out / "stats.csv")


def run(cfg: RunConfig) -> tuple[Pool, list[GenerationStats]]:
    """Seed, then cfg.generations loop iterations, checkpointing each one."""
    out = Path(cfg.out_dir) if cfg.out_dir else None
    pool, seed_stats = seed_database(cfg)
    log.info("gen 0 (seed): pool best %d mean %.2f size %d",
             seed_stats.pool_best, seed_stats.pool_mean, seed_stats.pool_size)
    state = init_state(cfg, pool, seed_stats)
    stats_list = [seed_stats]
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        from .cli import echo_config  # late import; cli owns the format
        echo_config(cfg, out / "config")
        if state.vocab is not None:
            tk.vocab_save(state.vocab, out / "vocab.txt")
        _checkpoint(out, state, stats_list)
    for _ in range(cfg.generations):
        stats = run_generation(state)
        stats_list.append(stats)
        log.info(
            "gen %d: %d samples, %d invalid, pool best %d mean %.2f, "
            "loss %s",
            stats.generation, stats.samples, stats.invalid, stats.pool_best,
            stats.pool_mean,
            "n/a" if stats.train_loss is None else f"{stats.train_loss:.3f}",
        )
        if out is not None:
            _checkpoint(out, state, stats_list)
    return state.pool, stats_list


def resume(out_dir, generations: int | None = None
           ) -> tuple[Pool, list[GenerationStats]]:
    """Continue a checkpointed run from its latest complete generation; with
    identical seeds the continuation matches an uninterrupted run."""
    from .cli import parse_config  # late import; cli owns the format
    out = Path(out_dir)
    cfg = parse_config(out / "config", [])
    if generations is not None:
        cfg.generations = generations
    done = sorted(
        int(p.name.split("_", 1)[1])
        for p in out.glob("gen_*")
        if (p / "pool.txt").exists() and (p / "model.ckpt").exists()
    )
    if not done:
        raise FileNotFoundError(f"{out}: no complete generation checkpoints")
    last = done[-1]
    problem = build_problem(cfg)
    pool = pool_load(out / f"gen_{last}" / "pool.txt")
    vocab = None
    if (out / "vocab.txt").exists():
        vocab = tk.vocab_load(out / "vocab.txt")
    codec = build_codec(cfg, problem, vocab=vocab)
    model_cfg, params, opt = tr.load_checkpoint(
        out / f"gen_{last}" / "model.ckpt"
    )
    stats_list = [_load_stats_row(out, g) for g in range(last + 1)]
    state = LoopState(cfg, problem, codec, pool, model_cfg, params, opt,
                      generation=last,
                      cumulative_searches=stats_list[-1].cumulative_searches,
                      vocab=vocab)
    while state.generation < cfg.generations:
        stats = run_generation(state)
        stats_list.append(stats)
        log.info("gen %d (resumed): pool best %d", stats.generation,
                 stats.pool_best)
        _checkpoint(out, state, stats_list)
    return state.pool, stats_list
