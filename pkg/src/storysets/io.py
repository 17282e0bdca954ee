"""Reading and writing uncertain set systems.

CSV: the header row holds element names (its first cell is ignored), every
following row is a set name followed by one certainty value per element.
Without explicit levels or boundaries, the levels are the distinct values
in the file plus 0 and 1.

JSON: ``{"elements": [...], "sets": [...], "levels": [...] | "boundaries":
[...], "beta": [[...], ...], "distribution": [[...], ...]}`` where ``beta``
has one row per set and the optional ``distribution`` one row of k weights
per element.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .setsystem import BinMatrix, UncertainSetSystem, UncertaintyLevels, bin_from_beta, bin_from_raw


class InputError(ValueError):
    """Malformed input file; the message carries the location."""


@dataclass(frozen=True)
class Dataset:
    element_names: tuple[str, ...]
    set_names: tuple[str, ...]
    values: np.ndarray = field(repr=False)
    levels: tuple[float, ...] | None = None
    boundaries: tuple[float, ...] | None = None
    distribution: np.ndarray | None = field(default=None, repr=False)

    @property
    def system(self) -> UncertainSetSystem | None:
        if self.levels is None:
            return None
        return UncertainSetSystem(self.element_names, self.set_names, UncertaintyLevels(self.levels), self.values)

    @property
    def bins(self) -> BinMatrix:
        if self.levels is not None:
            return bin_from_beta(self.system)
        return bin_from_raw(self.values, self.boundaries)

    @property
    def k(self) -> int:
        return len(self.levels) if self.levels is not None else len(self.boundaries) - 1


def _build(elements, sets, values, levels, boundaries, distribution, where: str) -> Dataset:
    values = np.asarray(values, dtype=float).reshape(len(sets), len(elements))
    if levels is not None and boundaries is not None:
        raise InputError(f"{where}: give either levels or boundaries, not both")
    if levels is None and boundaries is None:
        levels = sorted(set(values.ravel().tolist()) | {0.0, 1.0})
    try:
        ds = Dataset(
            tuple(elements),
            tuple(sets),
            values,
            None if levels is None else tuple(float(v) for v in levels),
            None if boundaries is None else tuple(float(v) for v in boundaries),
            None if distribution is None else np.asarray(distribution, dtype=float),
        )
        ds.bins  # validates levels/boundaries against the values
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from None
    if ds.distribution is not None and ds.distribution.shape != (len(elements), ds.k):
        raise InputError(
            f"{where}: distribution must have one row of {ds.k} weights per element, "
            f"got shape {ds.distribution.shape}"
        )
    return ds


def _parse_value(text: str, where: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise InputError(f"{where}: {text!r} is not a number") from None
    if not math.isfinite(v) or not 0.0 <= v <= 1.0:
        raise InputError(f"{where}: value {text!r} is outside [0, 1]")
    return v


def parse_csv(text: str, source: str = "<csv>", levels=None, boundaries=None) -> Dataset:
    reader = csv.reader(io.StringIO(text))
    rows = [(reader.line_num, row) for row in reader if any(cell.strip() for cell in row)]
    if not rows:
        raise InputError(f"{source}: empty file")
    header_line, header = rows[0]
    elements = [c.strip() for c in header[1:]]
    if not elements:
        raise InputError(f"{source}, line {header_line}: header has no element names")
    sets, values = [], []
    for line, row in rows[1:]:
        if len(row) != len(header):
            raise InputError(
                f"{source}, line {line}: expected {len(header)} columns, found {len(row)}"
            )
        sets.append(row[0].strip())
        for col, cell in enumerate(row[1:], start=2):
            values.append(_parse_value(cell.strip(), f"{source}, line {line}, column {col}"))
    if not sets:
        raise InputError(f"{source}: no set rows below the header")
    return _build(elements, sets, values, levels, boundaries, None, source)


def _require_list(obj, key: str, source: str):
    if key not in obj:
        raise InputError(f"{source}: missing key {key!r}")
    if not isinstance(obj[key], list):
        raise InputError(f"{source}: {key!r} must be a list")
    return obj[key]


def parse_json(text: str, source: str = "<json>") -> Dataset:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}, line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise InputError(f"{source}: top level must be an object")
    elements = [str(e) for e in _require_list(obj, "elements", source)]
    sets = [str(s) for s in _require_list(obj, "sets", source)]
    beta = _require_list(obj, "beta", source)
    if ("levels" in obj) == ("boundaries" in obj):
        raise InputError(f"{source}: exactly one of 'levels' or 'boundaries' is required")
    if len(beta) != len(sets):
        raise InputError(f"{source}: beta has {len(beta)} rows for {len(sets)} sets")
    values = []
    for i, row in enumerate(beta):
        if not isinstance(row, list) or len(row) != len(elements):
            raise InputError(f"{source}: beta[{i}] must be a list of {len(elements)} values")
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise InputError(f"{source}: beta[{i}][{j}] = {v!r} is not a number")
            values.append(_parse_value(repr(float(v)), f"{source}: beta[{i}][{j}]"))
    dist = obj.get("distribution")
    if dist is not None:
        try:
            dist = np.asarray(dist, dtype=float)
        except (TypeError, ValueError):
            raise InputError(f"{source}: distribution must be a numeric matrix") from None
    return _build(elements, sets, values, obj.get("levels"), obj.get("boundaries"), dist, source)


def load(path, levels=None, boundaries=None) -> Dataset:
    """Load a ``.csv`` or ``.json`` file; level/boundary overrides apply to CSV."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    if path.suffix.lower() == ".json":
        return parse_json(text, str(path))
    return parse_csv(text, str(path), levels, boundaries)


def to_json(ds: Dataset) -> str:
    obj: dict = {"elements": list(ds.element_names), "sets": list(ds.set_names)}
    if ds.levels is not None:
        obj["levels"] = list(ds.levels)
    else:
        obj["boundaries"] = list(ds.boundaries)
    obj["beta"] = ds.values.tolist()
    if ds.distribution is not None:
        obj["distribution"] = ds.distribution.tolist()
    return json.dumps(obj, indent=2)


def from_bins(bins: BinMatrix, element_names: Sequence[str] | None = None, set_names: Sequence[str] | None = None) -> Dataset:
    """Dataset whose levels are evenly spaced, one per bin."""
    levels = tuple(float(v) for v in np.linspace(0.0, 1.0, bins.k))
    values = np.asarray(levels)[bins.bins - 1]
    return Dataset(
        tuple(element_names or (f"e{j + 1}" for j in range(bins.n))),
        tuple(set_names or (f"s{i + 1}" for i in range(bins.m))),
        values,
        levels,
    )
