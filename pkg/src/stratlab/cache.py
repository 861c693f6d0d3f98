"""Deterministic point-cloud caching.

Clouds are reproducible from (model, seed, n); caching only avoids recompute.
In-process entries are kept in a small dict; if the environment variable
``STRATLAB_CACHE_DIR`` is set, clouds are also persisted as ``.npz`` files
keyed by the model hash, written atomically (write then rename).
"""

from __future__ import annotations

import os
import tempfile

import numpy as np

_MEMORY = {}
_MEMORY_LIMIT = 48


def _disk_dir():
    return os.environ.get("STRATLAB_CACHE_DIR")


def _disk_path(key: str):
    base = _disk_dir()
    if not base:
        return None
    return os.path.join(base, key + ".npz")


def cloud_key(model, n: int, seed: int) -> str:
    return f"cloud-{model.model_hash()}-n{n}-s{seed}"


def load_cloud(model, n: int, seed: int):
    key = cloud_key(model, n, seed)
    if key in _MEMORY:
        return _MEMORY[key]
    path = _disk_path(key)
    if path and os.path.exists(path):
        with np.load(path) as data:
            pts, w = data["points"], data["weights"]
        _remember(key, (pts, w))
        return pts, w
    return None


def store_cloud(model, n: int, seed: int, points, weights):
    key = cloud_key(model, n, seed)
    _remember(key, (points, weights))
    path = _disk_path(key)
    if path:
        os.makedirs(os.path.dirname(path), exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                np.savez(fh, points=points, weights=weights)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def _remember(key, value):
    if len(_MEMORY) >= _MEMORY_LIMIT:
        _MEMORY.pop(next(iter(_MEMORY)))
    _MEMORY[key] = value


def clear_memory_cache():
    _MEMORY.clear()
