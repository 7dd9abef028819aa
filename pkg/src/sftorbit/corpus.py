"""The bundled worked examples: three matrix pairs, the second with an
explicit strongly continuous orbit equivalence ``h`` / ``g``."""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .cocycle import LocFun
from .jsonio import orbit_data_from_json, sft_from_json
from .orbitmap import OrbitMapData
from .sft import Sft


def data_text(name: str) -> str:
    return resources.files("sftorbit").joinpath("data", name).read_text(encoding="utf-8")


def data_json(name: str):
    return json.loads(data_text(name))


def data_path(name: str):
    return resources.files("sftorbit").joinpath("data", name)


def example_pair(number: int) -> tuple:
    """Validated ``(A, B)`` of example 1, 2 or 3."""
    if number == 2:
        return example2().A, example2().B
    obj = data_json(f"example{number}.json")
    return sft_from_json(obj["A"]), sft_from_json(obj["B"])


@dataclass(frozen=True, eq=False)
class Example2:
    A: Sft
    B: Sft
    h: OrbitMapData
    g: OrbitMapData
    b1: LocFun
    b2: LocFun


@lru_cache(maxsize=1)
def example2() -> Example2:
    h, b1 = orbit_data_from_json(data_json("example2_h.json"))
    g, b2 = orbit_data_from_json(data_json("example2_g.json"))
    return Example2(h.source, h.target, h, g, b1, b2)
