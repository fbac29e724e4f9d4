"""Content-addressed on-disk cache for CLI results.

Entries are JSON files named by the sha256 of the canonical request.
Writes go to a temp file in the same directory and are renamed into place,
so a reader never sees half an entry.  Anything unreadable or whose digest
does not match is treated as a miss.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

from . import __version__

ENV_VAR = "FFGAMMA_CACHE_DIR"


def default_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "ffgamma"


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    return hashlib.sha256(canonical(obj).encode()).hexdigest()


def make_key(command: str, q: int, modulus: str, params: dict) -> str:
    return digest({"command": command, "q": q, "modulus": modulus, "params": params, "version": __version__})


class Cache:
    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root) if root is not None else default_dir()

    def path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str):
        try:
            entry = json.loads(self.path(key).read_text())
            if entry["key"] != key or entry["digest"] != digest(entry["value"]):
                return None
            return entry["value"]
        except (OSError, ValueError, KeyError, TypeError):
            return None

    def put(self, key: str, value) -> bool:
        """Store value; False if the directory is not writable (the caller just continues)."""
        entry = {"key": key, "meta": {"version": __version__}, "digest": digest(value), "value": value}
        target = self.path(key)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=".tmp-", suffix=".json")
            try:
                with os.fdopen(fd, "w") as fh:
                    # insertion order kept so cached and fresh output print identically
                    fh.write(json.dumps(entry, separators=(",", ":")))
                os.replace(tmp, target)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
        except OSError:
            return False
        return True
