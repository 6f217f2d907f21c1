"""Reader for the rbclock CSV artifacts.

The files carry a '#' metadata block (schema id, config hash, optional
geometry decoration) followed by a header row and float data.  Rendering
performs no physics: everything plotted comes from these files.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

SUPPORTED_VERSION = 1


class SchemaError(ValueError):
    """CSV does not match the expected schema."""


@dataclass(frozen=True)
class Table:
    path: Path
    schema: str
    version: int
    meta: dict
    columns: dict[str, np.ndarray]

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise SchemaError(f"{self.path.name}: missing column {name!r}") from None

    @property
    def label(self) -> str:
        return self.path.stem

    def zones_cm(self) -> list[float] | None:
        raw = self.meta.get("zones_cm")
        if raw is None:
            return None
        return [float(x) for x in raw.split(",")]


def read_table(path: Path) -> Table:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    meta = {}
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key.strip()] = value
        elif line.strip():
            body.append(line)
    if "schema" not in meta:
        raise SchemaError(f"{path.name}: missing '# schema=' metadata line")
    schema, _, version = meta["schema"].partition("/v")
    try:
        version = int(version)
    except ValueError:
        raise SchemaError(f"{path.name}: malformed schema tag {meta['schema']!r}")
    if version != SUPPORTED_VERSION:
        raise SchemaError(f"{path.name}: unsupported schema version {version}")
    if not body:
        raise SchemaError(f"{path.name}: no header row")
    header = [h.strip() for h in body[0].split(",")]
    if len(body) < 2:
        raise SchemaError(f"{path.name}: no data rows")
    data = np.array([[float(x) for x in row.split(",")] for row in body[1:]])
    if data.shape[1] != len(header):
        raise SchemaError(f"{path.name}: ragged rows")
    columns = {name: data[:, i] for i, name in enumerate(header)}
    return Table(path=Path(path), schema=schema, version=version, meta=meta,
                 columns=columns)


def expect_schema(table: Table, schema: str, required: list[str]) -> Table:
    if table.schema != schema:
        raise SchemaError(
            f"{table.path.name}: schema {table.schema!r}, expected {schema!r}")
    for name in required:
        if name not in table.columns:
            raise SchemaError(f"{table.path.name}: missing column {name!r}")
    return table
