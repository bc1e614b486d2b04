"""The runnable node daemon: config, single-writer core and async runtime."""

from .config import CONFIG_ENV_VAR, ConfigError, NodeConfig, load_config
from .core import MANUAL_MINING_DIFFICULTY, Event, NodeCore
from .service import NodeRuntime, build_app, run_node

__all__ = [
    "CONFIG_ENV_VAR",
    "ConfigError",
    "Event",
    "MANUAL_MINING_DIFFICULTY",
    "NodeConfig",
    "NodeCore",
    "NodeRuntime",
    "build_app",
    "load_config",
    "run_node",
]
