"""Service configuration.

Loaded from a YAML file (see ``config.example.yaml`` at the repo root).
Exactly one retrieval backend must be configured: a local corpus file or
a remote search API. Provider API keys are read from the environment
only; config files never hold secrets.
"""

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..pipeline import DEFAULT_INSUFFICIENCY_PATTERNS, RETRIEVAL_SCORE_FLOOR
from ..verifier import Thresholds


class ConfigError(ValueError):
    pass


@dataclass
class RemoteBackendConfig:
    base_url: str
    api_key_env: str = "SCHOLARQA_API_KEY"
    max_retries: int = 2


@dataclass
class ProviderConfig:
    name: str
    base_url: str
    model: str
    api_key_env: str = "SCHOLARQA_PROVIDER_KEY"
    max_in_flight: int = 4


@dataclass
class ServiceConfig:
    corpus_path: Path | None = None
    remote: RemoteBackendConfig | None = None
    provider: str = "stub"
    providers: list[ProviderConfig] = field(default_factory=list)
    insufficiency_patterns: tuple[str, ...] = DEFAULT_INSUFFICIENCY_PATTERNS
    thresholds: Thresholds = field(default_factory=Thresholds)
    score_floor: float = RETRIEVAL_SCORE_FLOOR
    data_dir: Path = Path("service-data")
    host: str = "127.0.0.1"
    port: int = 8000
    cors_origins: tuple[str, ...] = ()

    def validate(self) -> None:
        if (self.corpus_path is None) == (self.remote is None):
            raise ConfigError(
                "exactly one retrieval backend must be configured "
                "(corpus file or remote base_url)"
            )
        for name, value in (
            ("title_match", self.thresholds.title_match),
            ("title_partial", self.thresholds.title_partial),
            ("author_match", self.thresholds.author_match),
        ):
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"threshold {name} must be in [0, 1], got {value}")
        if self.score_floor < 0:
            raise ConfigError("score_floor must be non-negative")


def load_config(path: str | Path) -> ServiceConfig:
    raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")

    remote = None
    if raw.get("remote"):
        remote = RemoteBackendConfig(
            base_url=str(raw["remote"]["base_url"]),
            api_key_env=str(raw["remote"].get("api_key_env", "SCHOLARQA_API_KEY")),
            max_retries=int(raw["remote"].get("max_retries", 2)),
        )

    providers = []
    for name, spec in (raw.get("providers") or {}).items():
        providers.append(
            ProviderConfig(
                name=str(name),
                base_url=str(spec["base_url"]),
                model=str(spec["model"]),
                api_key_env=str(spec.get("api_key_env", "SCHOLARQA_PROVIDER_KEY")),
                max_in_flight=int(spec.get("max_in_flight", 4)),
            )
        )

    thresholds_raw = raw.get("thresholds") or {}
    config = ServiceConfig(
        corpus_path=Path(raw["corpus"]) if raw.get("corpus") else None,
        remote=remote,
        provider=str(raw.get("provider", "stub")),
        providers=providers,
        insufficiency_patterns=tuple(
            raw.get("insufficiency_patterns") or DEFAULT_INSUFFICIENCY_PATTERNS
        ),
        thresholds=Thresholds(
            title_match=float(thresholds_raw.get("title_match", 0.90)),
            title_partial=float(thresholds_raw.get("title_partial", 0.60)),
            author_match=float(thresholds_raw.get("author_match", 0.50)),
        ),
        score_floor=float(thresholds_raw.get("score_floor", RETRIEVAL_SCORE_FLOOR)),
        data_dir=Path(raw.get("data_dir", "service-data")),
        host=str(raw.get("listen", {}).get("host", "127.0.0.1")),
        port=int(raw.get("listen", {}).get("port", 8000)),
        cors_origins=tuple(raw.get("cors_origins") or ()),
    )
    config.validate()
    return config
