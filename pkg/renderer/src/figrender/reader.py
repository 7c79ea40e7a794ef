"""Parser for the jcdephase CSV format.

The files are self-describing: `#` comment lines carry `key = value` pairs
echoing the resolved configuration (plus derived scalars such as fitted
rates and inset t_max tables), followed by one header row and numeric data
rows.  Empty fields mark sweep holes and parse as NaN.  This module is the
renderer's only knowledge of the producer; it never recomputes physics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class CsvFormatError(Exception):
    """Raised when a file does not follow the documented CSV schema."""


@dataclass
class CsvTable:
    path: str
    meta: dict
    header: list
    columns: dict

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise CsvFormatError(
                f"{self.path}: required column '{name}' not found "
                f"(have: {', '.join(self.header)})"
            ) from None

    def columns_with_prefix(self, prefix: str) -> dict:
        """All columns whose name starts with `prefix_`, keyed by the rest."""
        out = {}
        for name in self.header:
            if name.startswith(prefix + "_"):
                out[name[len(prefix) + 1:]] = self.columns[name]
        return out

    def run_labels(self) -> list:
        labels = []
        for key in self.meta:
            if key.startswith("run.") and key.endswith(".methods"):
                labels.append(key[len("run."):-len(".methods")])
        return labels

    def temperature_of(self, label: str) -> float | None:
        value = self.meta.get(f"run.{label}.environment.temperature")
        return None if value is None else float(value)


def read_table(path: str) -> CsvTable:
    meta: dict = {}
    header = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if " = " in body:
                    key, _, value = body.partition(" = ")
                    meta[key.strip()] = value.strip()
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(line.split(","))
    if header is None:
        raise CsvFormatError(f"{path}: no header row found (empty or malformed file)")
    if not rows:
        raise CsvFormatError(f"{path}: no data rows found")
    width = len(header)
    data = np.full((len(rows), width), np.nan)
    flags: dict[int, list] = {}
    for i, row in enumerate(rows):
        if len(row) != width:
            raise CsvFormatError(f"{path}: row {i + 1} has {len(row)} fields, expected {width}")
        for j, field in enumerate(row):
            if field == "":
                continue
            try:
                data[i, j] = float(field)
            except ValueError:
                # non-numeric columns (e.g. sweep flags) are kept as strings
                flags.setdefault(j, [""] * len(rows))
                flags[j][i] = field
    columns: dict = {}
    for j, name in enumerate(header):
        if j in flags:
            merged = flags[j]
            for i, row in enumerate(rows):
                if merged[i] == "" and row[j] != "":
                    merged[i] = row[j]
            columns[name] = np.array(merged, dtype=object)
        else:
            columns[name] = data[:, j]
    return CsvTable(path=path, meta=meta, header=header, columns=columns)
