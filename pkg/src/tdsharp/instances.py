"""Instance files: a field, a matrix pair, and optional provenance, as JSON."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .fields import FieldError, FieldSpec
from .linalg import ExactMatrix

FORMAT_VERSION = 1


class InstanceError(ValueError):
    """Malformed or inconsistent instance document; message carries the position."""


@dataclass(frozen=True)
class Instance:
    field: FieldSpec
    A: ExactMatrix
    Astar: ExactMatrix
    provenance: dict | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return self.A.nrows

    def to_json(self) -> dict:
        doc = {
            "version": FORMAT_VERSION,
            "field": self.field.to_json(),
            "A": self.A.to_json(),
            "Astar": self.Astar.to_json(),
        }
        if self.provenance is not None:
            doc["provenance"] = self.provenance
        return doc

    def dumps(self) -> str:
        return canonical_json(self.to_json())

    def digest(self) -> str:
        return hashlib.sha256(self.dumps().encode()).hexdigest()


def _compact(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_json(obj) -> str:
    """Sorted keys, one top-level entry per line, compact values."""
    if isinstance(obj, dict):
        body = ",\n".join(f" {json.dumps(k)}: {_compact(obj[k])}" for k in sorted(obj))
        return "{\n" + body + "\n}\n"
    if isinstance(obj, list):
        return "[\n" + ",\n".join(" " + _compact(x) for x in obj) + "\n]\n"
    return _compact(obj) + "\n"


def _matrix(F: FieldSpec, obj, name: str) -> ExactMatrix:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise InstanceError(f"{name}: expected a non-empty list of rows")
    n = len(obj)
    for i, row in enumerate(obj):
        if len(row) != n:
            raise InstanceError(f"{name} not square: row {i} has {len(row)} entries, expected {n}")
    rows = []
    for i, row in enumerate(obj):
        out = []
        for j, x in enumerate(row):
            try:
                out.append(F.decode(x))
            except FieldError as exc:
                raise InstanceError(f"{name}[{i}][{j}]: {exc}") from None
        rows.append(out)
    return ExactMatrix(F, rows, n)


def instance_from_json(doc) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceError("top level: expected an object")
    if doc.get("version") != FORMAT_VERSION:
        raise InstanceError(f"version: expected {FORMAT_VERSION}, got {doc.get('version')!r}")
    for key in ("field", "A", "Astar"):
        if key not in doc:
            raise InstanceError(f"missing key {key!r}")
    try:
        F = FieldSpec.from_json(doc["field"])
    except (FieldError, AttributeError, TypeError) as exc:
        raise InstanceError(f"field: {exc}") from None
    A = _matrix(F, doc["A"], "A")
    As = _matrix(F, doc["Astar"], "Astar")
    if A.shape != As.shape:
        raise InstanceError(f"A is {A.nrows}x{A.ncols} but Astar is {As.nrows}x{As.ncols}")
    prov = doc.get("provenance")
    if prov is not None and not isinstance(prov, dict):
        raise InstanceError("provenance: expected an object")
    return Instance(F, A, As, prov)


def parse_instance(source) -> Instance:
    """Parse from a path, raw bytes/str document, or an already-loaded dict."""
    if isinstance(source, dict):
        return instance_from_json(source)
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        text = Path(source).read_text()
    elif isinstance(source, bytes):
        text = source.decode()
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return instance_from_json(doc)


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
