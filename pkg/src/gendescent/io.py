"""Canonical JSON, run manifests, CSV output and the distribution-table cache."""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
import logging
import math
import os
import tempfile
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import IO, Iterable, Mapping

from . import __version__
from .enumeration import DistributionTable
from .errors import InputError
from .stats import as_spec

__all__ = [
    "CACHE_ENV",
    "CacheWarning",
    "canonical_json",
    "RunManifest",
    "with_manifest",
    "write_csv",
    "TableCache",
    "cache_key",
]

log = logging.getLogger(__name__)

CACHE_ENV = "GENDESCENT_CACHE_DIR"


class CacheWarning(UserWarning):
    pass


def _encode(obj) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise InputError(f"cannot serialise non-finite float {obj}")
        text = format(obj, ".17g")
        if "e" not in text and "." not in text:
            text += ".0"
        return text
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, Mapping):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ",".join(json.dumps(k) + ":" + _encode(v) for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    if hasattr(obj, "to_json"):
        return _encode(obj.to_json())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def canonical_json(obj) -> str:
    """Sorted keys, no whitespace, floats with 17 significant digits."""
    return _encode(obj)


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: int | None = None
    tool_version: str = __version__
    timestamp: str = field(
        default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    )

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "tool_version": self.tool_version,
            "timestamp": self.timestamp,
        }


def with_manifest(payload: dict, manifest: RunManifest) -> dict:
    """Embed ``manifest`` under the ``"manifest"`` key of a result document."""
    doc = dict(payload)
    doc["manifest"] = manifest.to_json()
    return doc


def write_csv(rows: Iterable[Mapping], fields: Iterable[str], out: IO[str]) -> None:
    writer = csv.DictWriter(out, fieldnames=list(fields), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (format(v, ".17g") if isinstance(v, float) else v) for k, v in row.items()})


def cache_key(n: int, spec) -> str:
    ident = canonical_json({"n": int(n), "spec": as_spec(spec).to_json()})
    return hashlib.sha256(ident.encode()).hexdigest()[:32]


def _digest(table_json: dict) -> str:
    return hashlib.sha256(canonical_json(table_json).encode()).hexdigest()


class TableCache:
    """Directory of verified distribution tables keyed by ``(n, spec)``.

    Each file stores the table JSON with its SHA-256; anything that fails to
    parse or verify is reported with a :class:`CacheWarning` and treated as a
    miss.
    """

    def __init__(self, directory: str | os.PathLike | None = None):
        directory = directory or os.environ.get(CACHE_ENV)
        if not directory:
            raise InputError(f"no cache directory given and ${CACHE_ENV} is unset")
        self.directory = Path(directory)

    def path(self, n: int, spec) -> Path:
        return self.directory / f"{cache_key(n, spec)}.json"

    def store(self, table: DistributionTable) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        body = table.to_json()
        text = canonical_json({"sha256": _digest(body), "table": body})
        target = self.path(table.n, table.spec)
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, target)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
        return target

    def lookup(self, n: int, spec) -> DistributionTable | None:
        target = self.path(n, spec)
        if not target.exists():
            return None
        try:
            doc = json.loads(target.read_text(encoding="utf-8"))
            body = doc["table"]
            if doc["sha256"] != _digest(body):
                raise ValueError("checksum mismatch")
            table = DistributionTable.from_json(body)
            if table.n != n or table.spec != as_spec(spec):
                raise ValueError("key mismatch")
        except (OSError, ValueError, KeyError, TypeError, InputError) as exc:
            msg = f"ignoring corrupt cache entry {target.name}: {exc}"
            log.warning(msg)
            warnings.warn(msg, CacheWarning, stacklevel=2)
            return None
        return table
