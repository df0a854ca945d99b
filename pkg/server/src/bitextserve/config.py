"""Server configuration from defaults, environment variables, and flags."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Mapping, Optional

#: Environment variables are this prefix plus the upper-cased field name,
#: e.g. BITEXTSERVE_MLM_MODEL, BITEXTSERVE_PORT.
ENV_PREFIX = "BITEXTSERVE_"

DEFAULT_MLM_MODEL = "xlm-roberta-base"
DEFAULT_EMBED_MODEL = "sentence-transformers/LaBSE"


@dataclass(frozen=True)
class ServerConfig:
    """Which models to serve and how to listen.

    Model fields accept hub ids or local directories. qe_model is optional;
    without it the /qe endpoint reports the model as not loaded and /health
    omits the qe_scale field.
    """

    mlm_model: str = DEFAULT_MLM_MODEL
    embed_model: str = DEFAULT_EMBED_MODEL
    qe_model: Optional[str] = None
    host: str = "127.0.0.1"
    port: int = 8500
    max_batch: int = 32
    device: str = "cpu"

    def __post_init__(self) -> None:
        if not 1 <= self.port <= 65535:
            raise ValueError(f"port must be in [1, 65535], got {self.port}")
        if self.max_batch < 1:
            raise ValueError(f"max_batch must be >= 1, got {self.max_batch}")
        if not self.mlm_model:
            raise ValueError("mlm_model must be non-empty")
        if not self.embed_model:
            raise ValueError("embed_model must be non-empty")

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "ServerConfig":
        """Build a config from BITEXTSERVE_* variables, defaulting the rest."""
        env = os.environ if environ is None else environ

        def pick(name: str, fallback):
            raw = env.get(ENV_PREFIX + name)
            return fallback if raw is None else raw

        def pick_int(name: str, fallback: int) -> int:
            raw = env.get(ENV_PREFIX + name)
            if raw is None:
                return fallback
            try:
                return int(raw)
            except ValueError as exc:
                raise ValueError(f"{ENV_PREFIX}{name} must be an integer, got {raw!r}") from exc

        return cls(
            mlm_model=pick("MLM_MODEL", DEFAULT_MLM_MODEL),
            embed_model=pick("EMBED_MODEL", DEFAULT_EMBED_MODEL),
            qe_model=pick("QE_MODEL", None),
            host=pick("HOST", "127.0.0.1"),
            port=pick_int("PORT", 8500),
            max_batch=pick_int("MAX_BATCH", 32),
            device=pick("DEVICE", "cpu"),
        )
