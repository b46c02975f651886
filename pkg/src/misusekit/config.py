"""Config file handling: miner + selector + classifier settings in one JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .classify import DEFAULT_LOF_THRESHOLD
from .mining import MinerConfig
from .selection import SelectorConfig


@dataclass(frozen=True)
class ToolConfig:
    miner: MinerConfig
    selector: SelectorConfig
    lof_k: Optional[int] = None  # None = pick from training-set size
    lof_threshold: float = DEFAULT_LOF_THRESHOLD

    @classmethod
    def default(cls) -> "ToolConfig":
        return cls(miner=MinerConfig(), selector=SelectorConfig())

    @classmethod
    def load(cls, path: Optional[str]) -> "ToolConfig":
        if path is None:
            return cls.default()
        with open(path, "r", encoding="utf-8") as fh:
            d = json.load(fh)
        return cls(
            miner=MinerConfig.from_dict(d.get("miner", {})),
            selector=SelectorConfig.from_dict(d.get("selector", {})),
            lof_k=d.get("classifier", {}).get("lof_k"),
            lof_threshold=d.get("classifier", {}).get("lof_threshold", DEFAULT_LOF_THRESHOLD),
        )
