from .app import create_app
from .config import ConfigError, ServiceConfig, load_config
from .store import AnnotationStore, AnswerStore, StoredAnswer

__all__ = [
    "AnnotationStore",
    "AnswerStore",
    "ConfigError",
    "ServiceConfig",
    "StoredAnswer",
    "create_app",
    "load_config",
]
