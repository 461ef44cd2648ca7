"""On-disk cache of colength records.

Entries are keyed by a content hash of (p, n, canonical ring string,
canonical ideal string, artifact version), so generator order or ring
respelling never splits the cache, and a version bump invalidates it
wholesale.  Writes go through a temp file plus rename, which keeps
concurrent writers from ever exposing a torn entry.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Optional

from hklab.colength import ColengthRecord, IdealSpec, colength, frobenius_power
from hklab.graded import HypersurfaceRing

__all__ = ["ResultStore", "cached_colength"]

log = logging.getLogger(__name__)


class ResultStore:
    def __init__(self, root):
        self.root = Path(root)

    @staticmethod
    def key(p: int, n, ring_string: str, ideal_string: str, version: str) -> str:
        blob = json.dumps(
            {
                "p": p,
                "n": n,
                "ring": ring_string,
                "ideal": ideal_string,
                "version": version,
            },
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def _path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def get(self, key: str) -> Optional[ColengthRecord]:
        path = self._path(key)
        try:
            with open(path, encoding="utf-8") as fh:
                payload = json.load(fh)
            return ColengthRecord.from_json_dict(payload)
        except FileNotFoundError:
            return None
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            log.warning("discarding corrupt cache entry %s: %s", path.name, exc)
            return None

    def put(self, key: str, record: ColengthRecord) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        payload = json.dumps(record.to_json_dict(), sort_keys=True, indent=2)
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(payload + "\n")
            os.replace(tmp, self._path(key))
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)


def cached_colength(
    store: Optional[ResultStore],
    ring: HypersurfaceRing,
    ideal: IdealSpec,
    p: int,
    n: int,
    max_dim: Optional[int] = None,
    version: Optional[str] = None,
) -> ColengthRecord:
    """Colength of the n-th Frobenius power, served from the store when a
    matching entry exists."""
    from hklab import __version__

    if ring.field.p != p:
        raise ValueError(f"ring characteristic {ring.field.p} != {p}")
    key = ResultStore.key(
        p,
        n,
        ring.canonical_string(),
        ideal.canonical_string(),
        version or __version__,
    )
    if store is not None:
        hit = store.get(key)
        if hit is not None:
            return hit
    q = p**n
    record = colength(ring, frobenius_power(ring, ideal, q), q=q, n=n, max_dim=max_dim)
    if store is not None:
        store.put(key, record)
    return record
