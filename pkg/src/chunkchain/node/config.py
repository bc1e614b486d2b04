"""Node configuration: JSON file, environment and flag overrides.

Precedence is flags over file over defaults; the file path comes from
--config or the CHUNKCHAIN_CONFIG environment variable.
"""

from __future__ import annotations

import json
import os
import socket
from dataclasses import dataclass, fields

from ..ledger import MAX_DIFFICULTY

CONFIG_ENV_VAR = "CHUNKCHAIN_CONFIG"
DEFAULT_TCP_PORT = 40124
DEFAULT_API_PORT = 40125
MIN_PASSPHRASE_CHARS = 8


class ConfigError(ValueError):
    """Invalid or unreadable node configuration."""


@dataclass(frozen=True)
class NodeConfig:
    classroom_name: str
    classroom_passphrase: str
    listen_tcp: int = DEFAULT_TCP_PORT
    client_api: int = DEFAULT_API_PORT
    discovery: bool = True
    static_peers: tuple[str, ...] = ()
    difficulty: int = 12
    auto_mine_interval_ms: int = 10_000  # 0 disables the auto-miner
    mission_pack_path: str | None = None
    serve_ui_path: str | None = None
    log_level: str = "warning"
    bind_host: str = "0.0.0.0"
    advertise_host: str | None = None  # autodetected when unset

    def validate(self) -> "NodeConfig":
        if not self.classroom_name.strip():
            raise ConfigError("classroom_name must not be empty")
        if len(self.classroom_passphrase) < MIN_PASSPHRASE_CHARS:
            raise ConfigError(
                f"classroom_passphrase must be at least {MIN_PASSPHRASE_CHARS} characters"
            )
        if self.listen_tcp == self.client_api:
            raise ConfigError("listen_tcp and client_api ports must differ")
        for name in ("listen_tcp", "client_api"):
            port = getattr(self, name)
            if not 1 <= port <= 65535:
                raise ConfigError(f"{name} must be a valid port, got {port}")
        if not 0 <= self.difficulty <= MAX_DIFFICULTY:
            raise ConfigError(f"difficulty must be in [0, {MAX_DIFFICULTY}]")
        if self.auto_mine_interval_ms < 0:
            raise ConfigError("auto_mine_interval_ms must be >= 0")
        return self


def detect_lan_ip() -> str:
    """The interface address a LAN peer can dial back; no packet is sent."""
    probe = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    try:
        probe.connect(("10.255.255.255", 1))
        return probe.getsockname()[0]
    except OSError:
        return "127.0.0.1"
    finally:
        probe.close()


def load_config(path: str | None = None, **overrides) -> NodeConfig:
    """Assemble a validated NodeConfig from file values plus overrides.

    ``overrides`` entries that are None are ignored so CLI flags can pass
    through unset options.
    """
    values: dict = {}
    file_path = path or os.environ.get(CONFIG_ENV_VAR)
    if file_path:
        try:
            with open(file_path, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {file_path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {file_path} is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must contain a JSON object")
        known = {f.name for f in fields(NodeConfig)}
        unknown = set(loaded) - known
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        values.update(loaded)

    for key, value in overrides.items():
        if value is not None:
            values[key] = value

    if "static_peers" in values:
        values["static_peers"] = tuple(values["static_peers"])
    missing = {"classroom_name", "classroom_passphrase"} - set(values)
    if missing:
        raise ConfigError(f"missing required setting(s): {', '.join(sorted(missing))}")
    try:
        config = NodeConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return config.validate()
