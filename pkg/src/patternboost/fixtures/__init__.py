"""Shipped reference constructions and their claimed metrics.

File formats (one object per line):
- cube_81.txt: header ``d=6 edges=81`` then one edge per line as a pair of
  6-bit vertex labels.
- sperner_108.txt: header ``n=12 k=8 size=108`` then one subset mask per
  line (element i -> bit i-1).
- cross_sperner.jsonl: JSON records {n, k, product, families}; families are
  lists of subset masks.
- sphere_points.jsonl: JSON records {n, count, points}; coordinates are kept
  verbatim as published (1-based; the n=10 list has out-of-grid coordinates
  and is checked for the sphere property only).
- boxes_41.jsonl: one JSON record {d, count, boxes}; each box is a list of
  per-axis value lists.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Any


@dataclass(frozen=True)
class Fixture:
    problem_kind: str
    name: str
    payload: Any
    claims: dict


def _read(name: str) -> str:
    return (resources.files(__package__) / name).read_text(encoding="utf-8")


def load_cube() -> Fixture:
    lines = _read("cube_81.txt").splitlines()
    header = dict(kv.split("=") for kv in lines[0].split())
    edges = []
    for ln in lines[1:]:
        a, b = ln.split()
        edges.append((int(a, 2), int(b, 2)))
    return Fixture(
        "cube", "cube_81",
        payload={"d": int(header["d"]), "edges": edges},
        claims={"edges": int(header["edges"]), "diameter": int(header["d"])},
    )


def load_sperner() -> Fixture:
    lines = _read("sperner_108.txt").splitlines()
    header = dict(kv.split("=") for kv in lines[0].split())
    masks = [int(ln) for ln in lines[1:]]
    return Fixture(
        "sperner", "sperner_108",
        payload={"n": int(header["n"]), "k": int(header["k"]), "masks": masks},
        claims={"size": int(header["size"]), "k": int(header["k"])},
    )


def load_cross_sperner() -> list[Fixture]:
    out = []
    for ln in _read("cross_sperner.jsonl").splitlines():
        rec = json.loads(ln)
        out.append(Fixture(
            "cross_sperner", f"cross_sperner_{rec['n']}_{rec['k']}",
            payload={"n": rec["n"], "k": rec["k"],
                     "families": [set(f) for f in rec["families"]]},
            claims={"product": rec["product"]},
        ))
    return out


def load_sphere_points() -> list[Fixture]:
    out = []
    for ln in _read("sphere_points.jsonl").splitlines():
        rec = json.loads(ln)
        points = [tuple(p) for p in rec["points"]]
        out.append(Fixture(
            "sphere", f"sphere_points_{rec['n']}",
            payload={"n": rec["n"], "points": points},
            claims={"count": rec["count"],
                    "grid_checked": rec["n"] <= 9},
        ))
    return out


def load_boxes() -> Fixture:
    rec = json.loads(_read("boxes_41.jsonl").splitlines()[0])
    boxes = [
        tuple(sum(1 << v for v in factor) for factor in box)
        for box in rec["boxes"]
    ]
    return Fixture(
        "boxes", "boxes_41",
        payload={"d": rec["d"], "boxes": boxes},
        claims={"count": rec["count"]},
    )


def all_fixtures() -> list[Fixture]:
    return [
        load_cube(),
        load_sperner(),
        *load_cross_sperner(),
        *load_sphere_points(),
        load_boxes(),
    ]
