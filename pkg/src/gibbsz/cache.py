"""Insert-once store of mesh coefficient evaluations.

One JSON line per (potential, box, order, width) tuple, values kept as
hex floats so a round trip through disk is bit-exact.  First write
wins: a second put under the same key is ignored, which keeps results
independent of which thread or process got there first.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from typing import Optional, Tuple

from .errors import InputError

_SCHEMA = "coefficient-cache/1"


class CoefficientCache:
    def __init__(self, path):
        self.path = str(path)
        self._lock = threading.Lock()
        self._rows = {}
        if os.path.exists(self.path):
            self._load()

    def _load(self):
        with open(self.path, "r", encoding="utf-8") as fh:
            for ln, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    doc = json.loads(line)
                except json.JSONDecodeError as e:
                    raise InputError(f"{self.path}:{ln}: not a JSON line: {e}") from None
                if doc.get("schema") != _SCHEMA:
                    raise InputError(
                        f"{self.path}:{ln}: unrecognized cache schema "
                        f"{doc.get('schema')!r} (expected {_SCHEMA})")
                key = (str(doc["potential"]), int(doc["n"]), int(doc["dimension"]),
                       int(doc["order"]), str(doc["delta"]))
                row = (float.fromhex(doc["value"]), float.fromhex(doc["bound"]),
                       int(doc["points"]))
                self._rows.setdefault(key, row)

    @staticmethod
    def _key(potential_key: str, n: int, d: int, k: int, delta: float):
        return (str(potential_key), int(n), int(d), int(k), float(delta).hex())

    def get(self, potential_key: str, n: int, d: int, k: int,
            delta: float) -> Optional[Tuple[float, float, int]]:
        with self._lock:
            return self._rows.get(self._key(potential_key, n, d, k, delta))

    def put(self, potential_key: str, n: int, d: int, k: int, delta: float,
            value: float, bound: float, points: int) -> None:
        with self._lock:
            key = self._key(potential_key, n, d, k, delta)
            if key in self._rows:
                return
            self._rows[key] = (float(value), float(bound), int(points))
            self._flush()

    def __len__(self) -> int:
        with self._lock:
            return len(self._rows)

    def _flush(self):
        # full rewrite through a sibling temp file; the rename is atomic
        # and a reader never sees a half-written store
        lines = []
        for (pk, n, d, k, dh), (v, b, pts) in sorted(self._rows.items()):
            lines.append(json.dumps({
                "schema": _SCHEMA, "potential": pk, "n": n, "dimension": d,
                "order": k, "delta": dh, "value": float(v).hex(),
                "bound": float(b).hex(), "points": pts,
            }, sort_keys=True))
        directory = os.path.dirname(os.path.abspath(self.path)) or "."
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".cache-", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write("\n".join(lines) + "\n")
            os.chmod(tmp, 0o644)
            os.replace(tmp, self.path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
