"""Command-line entry point.

Subcommands: seed, run, resume, verify, sample, histogram, oracle.  Configs
are flat ``key = value`` text with cosmetic ``[section]`` headers; every key
names a RunConfig field and unknown keys are rejected.  Logs go to stderr;
stdout carries machine-readable verify/sample/histogram/oracle output.  The
environment variable PATTERNBOOST_SEED overrides the master RNG seed.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import fields
from pathlib import Path

from . import loop as lp
from . import tokenizer as tk
from . import transformer as tr
from .oracles import brute_best, verify_all

_SECTIONS = [
    ("problem", ["problem", "n", "d", "k"]),
    ("core", ["pool_capacity", "selection_fraction"]),
    ("loop", ["seed_runs", "samples_per_generation", "generations",
              "workers", "local_search", "seed_mode", "augment_symmetries",
              "out_dir"]),
    ("tokenizer", ["codec", "bpe_vocab", "delimiters", "fixed_width"]),
    ("transformer", ["n_layers", "dim", "n_heads", "train_steps",
                     "batch_window", "lr", "weight_decay"]),
    ("rng", ["master_seed"]),
    ("boxes", ["box_over_weight", "box_under_weight"]),
]

_FIELD_TYPES = {f.name: f.type for f in fields(lp.RunConfig)}


def _convert(key: str, raw: str):
    ftype = _FIELD_TYPES[key]
    raw = raw.strip()
    if ftype == "bool":
        if raw.lower() in ("true", "1", "yes", "on"):
            return True
        if raw.lower() in ("false", "0", "no", "off"):
            return False
        raise ValueError(f"{key}: expected a boolean, got {raw!r}")
    if ftype == "int":
        return int(raw)
    if ftype == "float":
        return float(raw)
    return raw


def parse_config(path, overrides: list[str]) -> lp.RunConfig:
    """Resolve a config file plus key=value overrides into a RunConfig;
    unknown keys, bad values and missing required fields are named errors."""
    values: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line or (line.startswith("[") and line.endswith("]")):
                continue
            key, sep, raw = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key = key.strip()
            if key not in _FIELD_TYPES:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _convert(key, raw)
    for ov in overrides:
        key, sep, raw = ov.partition("=")
        if not sep:
            raise ValueError(f"override {ov!r}: expected key=value")
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ValueError(f"override: unknown key {key!r}")
        values[key] = _convert(key, raw)
    if "problem" not in values:
        raise ValueError(f"{path}: missing required key 'problem'")
    env_seed = os.environ.get("PATTERNBOOST_SEED")
    if env_seed is not None:
        values["master_seed"] = int(env_seed)
    cfg = lp.RunConfig(**values)
    # fail early on inconsistent model shape or unknown problem
    lp.build_problem(cfg)
    tr.ModelConfig(vocab_size=2, max_len=2, n_layers=cfg.n_layers,
                   dim=cfg.dim, n_heads=cfg.n_heads)
    return cfg


def echo_config(cfg: lp.RunConfig, path) -> None:
    """Write the fully resolved config; parsing the echo reproduces cfg."""
    lines = []
    for section, keys in _SECTIONS:
        lines.append(f"[{section}]")
        for key in keys:
            lines.append(f"{key} = {getattr(cfg, key)}")
        lines.append("")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines))


def _cmd_run(args) -> int:
    cfg = parse_config(args.config, args.override)
    if args.out_dir:
        cfg.out_dir = args.out_dir
    if args.seed_only:
        cfg.generations = 0
    lp.run(cfg)
    return 0


def _cmd_resume(args) -> int:
    lp.resume(args.checkpoint, generations=args.generations)
    return 0


def _cmd_verify(_args) -> int:
    try:
        reports = verify_all()
    except FileNotFoundError as exc:
        print(f"FAIL fixtures missing ({exc})")
        return 2
    ok = True
    for rep in reports:
        for line in rep.lines():
            print(line)
        ok = ok and rep.ok
    return 0 if ok else 1


def _cmd_sample(args) -> int:
    import numpy as np

    ckpt = Path(args.model)
    cfg_m, params, _opt = tr.load_checkpoint(ckpt)
    run_dir = ckpt.parent.parent
    codec = None
    if (run_dir / "config").exists():
        run_cfg = parse_config(run_dir / "config", [])
        problem = lp.build_problem(run_cfg)
        vocab = None
        if (run_dir / "vocab.txt").exists():
            vocab = tk.vocab_load(run_dir / "vocab.txt")
        codec = lp.build_codec(run_cfg, problem, vocab=vocab)
    rng = np.random.default_rng(args.seed)
    for toks in tr.sample_batch(params, cfg_m, rng, args.count):
        status = "valid"
        if codec is not None:
            try:
                codec.decode(toks)
            except tk.DecodeError:
                status = "invalid"
        elif not toks or toks[-1] != tk.END_ID:
            status = "invalid"
        print(status, " ".join(map(str, toks)))
    return 0


def _cmd_histogram(args) -> int:
    rows = Path(args.stats).read_text(encoding="utf-8").splitlines()
    per_gen: dict[int, dict[int, int]] = {}
    for line in rows[1:]:
        gen, score, count = line.split(",")
        per_gen.setdefault(int(gen), {})[int(score)] = int(count)
    for gen in sorted(per_gen):
        hist = per_gen[gen]
        total = sum(hist.values())
        best = max(hist)
        mode = max(hist, key=lambda s: (hist[s], s))
        print(f"generation={gen} best={best} mode={mode} distinct={total}")
    return 0


def _cmd_oracle(args) -> int:
    value = brute_best(args.problem, args.size, k=args.k)
    print(f"{args.problem} {args.size} {value}")
    return 0


def main(argv=None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO,
        format="%(asctime)s %(name)s %(message)s",
    )
    ap = argparse.ArgumentParser(prog="patternboost")
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="seed then iterate the search loop")
    p_run.add_argument("config")
    p_run.add_argument("override", nargs="*",
                       help="key=value overrides of config fields")
    p_run.add_argument("--out-dir", default="")
    p_run.set_defaults(fn=_cmd_run, seed_only=False)

    p_seed = sub.add_parser("seed", help="seed the database only")
    p_seed.add_argument("config")
    p_seed.add_argument("override", nargs="*")
    p_seed.add_argument("--out-dir", default="")
    p_seed.set_defaults(fn=_cmd_run, seed_only=True)

    p_res = sub.add_parser("resume", help="continue from a checkpoint dir")
    p_res.add_argument("checkpoint")
    p_res.add_argument("--generations", type=int, default=None)
    p_res.set_defaults(fn=_cmd_resume)

    p_ver = sub.add_parser("verify", help="verify the shipped fixtures")
    p_ver.set_defaults(fn=_cmd_verify)

    p_sam = sub.add_parser("sample", help="draw sequences from a checkpoint")
    p_sam.add_argument("model")
    p_sam.add_argument("count", type=int)
    p_sam.add_argument("--seed", type=int, default=0)
    p_sam.set_defaults(fn=_cmd_sample)

    p_his = sub.add_parser("histogram", help="summarize a stats.csv")
    p_his.add_argument("stats")
    p_his.set_defaults(fn=_cmd_histogram)

    p_ora = sub.add_parser("oracle", help="exhaustive optimum for tiny sizes")
    p_ora.add_argument("problem")
    p_ora.add_argument("size", type=int)
    p_ora.add_argument("--k", type=int, default=2)
    p_ora.set_defaults(fn=_cmd_oracle)

    args = ap.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
