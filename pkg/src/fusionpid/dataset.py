"""Parsing of annotation files and aggregation into weighted (y1, y2, y) triples."""

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, asdict
from itertools import product

from .label_space import encode

CONDITIONS = ("m1", "m2", "both")
ORDERS = ("first-m1", "first-m2")

PARTIAL_FIELDS = ("item_id", "annotator_id", "condition", "label", "confidence")
COUNTERFACTUAL_FIELDS = (
    "item_id",
    "annotator_id",
    "order",
    "label_first",
    "label_both",
    "confidence_first",
    "confidence_both",
)
DECOMPOSITION_FIELDS = (
    "item_id",
    "annotator_id",
    "r",
    "u1",
    "u2",
    "s",
    "conf_r",
    "conf_u1",
    "conf_u2",
    "conf_s",
)


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class PartialRecord:
    item_id: str
    annotator_id: str
    condition: str
    label: str
    confidence: int


@dataclass(frozen=True)
class CounterfactualRecord:
    item_id: str
    annotator_id: str
    order: str
    label_first: str
    label_both: str
    confidence_first: int
    confidence_both: int


@dataclass(frozen=True)
class DecompositionRecord:
    item_id: str
    annotator_id: str
    r: int
    u1: int
    u2: int
    s: int
    conf_r: int
    conf_u1: int
    conf_u2: int
    conf_s: int


@dataclass
class TripleDataset:
    """Weighted samples (y1, y2, y) over a shared label space."""

    space: object
    samples: list

    def __post_init__(self):
        n = self.space.size
        for y1, y2, y, w in self.samples:
            if w <= 0:
                raise SchemaError(f"nonpositive weight {w}")
            if not (0 <= y1 < n and 0 <= y2 < n and 0 <= y < n):
                raise SchemaError(f"index out of range for space of size {n}")

    @property
    def total_weight(self):
        return sum(w for _, _, _, w in self.samples)


def _rows(stream, fmt, fields):
    if fmt == "csv":
        reader = csv.DictReader(stream)
        if reader.fieldnames is None:
            return []
        missing = set(fields) - set(reader.fieldnames)
        if missing:
            raise SchemaError(f"missing columns: {sorted(missing)}")
        return list(reader)
    if fmt == "json":
        rows = json.load(stream)
        if not isinstance(rows, list):
            raise SchemaError("JSON input must be an array of objects")
        return rows
    raise SchemaError(f"unknown format {fmt!r}")


def _field(row, name):
    if name not in row or row[name] is None:
        raise SchemaError(f"missing field {name!r} in row {row!r}")
    return row[name]


def _confidence(row, name):
    try:
        v = int(_field(row, name))
    except (TypeError, ValueError):
        raise SchemaError(f"{name} must be an integer: {row.get(name)!r}")
    if not 0 <= v <= 5:
        raise SchemaError(f"{name}={v} outside [0, 5]")
    return v


def _check_duplicates(records, key):
    seen = set()
    for rec in records:
        k = key(rec)
        if k in seen:
            raise SchemaError(f"duplicate record key {k}")
        seen.add(k)


def parse_partial(stream, fmt="csv"):
    records = []
    for row in _rows(stream, fmt, PARTIAL_FIELDS):
        condition = _field(row, "condition")
        if condition not in CONDITIONS:
            raise SchemaError(f"condition must be one of {CONDITIONS}, got {condition!r}")
        records.append(
            PartialRecord(
                item_id=str(_field(row, "item_id")),
                annotator_id=str(_field(row, "annotator_id")),
                condition=condition,
                label=_field(row, "label"),
                confidence=_confidence(row, "confidence"),
            )
        )
    _check_duplicates(records, lambda r: (r.item_id, r.annotator_id, r.condition))
    if not records:
        warnings.warn("no partial-label records parsed")
    return records


def parse_counterfactual(stream, fmt="csv"):
    records = []
    for row in _rows(stream, fmt, COUNTERFACTUAL_FIELDS):
        order = _field(row, "order")
        if order not in ORDERS:
            raise SchemaError(f"order must be one of {ORDERS}, got {order!r}")
        records.append(
            CounterfactualRecord(
                item_id=str(_field(row, "item_id")),
                annotator_id=str(_field(row, "annotator_id")),
                order=order,
                label_first=_field(row, "label_first"),
                label_both=_field(row, "label_both"),
                confidence_first=_confidence(row, "confidence_first"),
                confidence_both=_confidence(row, "confidence_both"),
            )
        )
    _check_duplicates(records, lambda r: (r.item_id, r.annotator_id, r.order))
    if not records:
        warnings.warn("no counterfactual records parsed")
    return records


def parse_decomposition(stream, fmt="csv"):
    records = []
    for row in _rows(stream, fmt, DECOMPOSITION_FIELDS):
        kwargs = {name: _confidence(row, name) for name in DECOMPOSITION_FIELDS[2:]}
        records.append(
            DecompositionRecord(
                item_id=str(_field(row, "item_id")),
                annotator_id=str(_field(row, "annotator_id")),
                **kwargs,
            )
        )
    _check_duplicates(records, lambda r: (r.item_id, r.annotator_id))
    if not records:
        warnings.warn("no decomposition records parsed")
    return records


def serialize_records(records, fmt="csv"):
    """Inverse of the parsers; round-trips losslessly."""
    rows = [asdict(r) for r in records]
    if fmt == "json":
        return json.dumps(rows, indent=2)
    if not rows:
        return ""
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    writer.writerows(rows)
    return out.getvalue()


def _by_item_condition(records):
    items = {}
    for rec in records:
        items.setdefault(rec.item_id, {}).setdefault(rec.condition, []).append(rec)
    for conds in items.values():
        for recs in conds.values():
            recs.sort(key=lambda r: r.annotator_id)
    return items


def triples_from_partial(records, space, pairing="rotation"):
    """Aggregate partial labels into (y1, y2, y) triples.

    rotation: per item, annotators sorted by id; set r pairs annotator r's m1
    label with annotator r+1's m2 label and annotator r+2's both label
    (cyclically), each triple weight 1.
    all-pairs: every cross-annotator combination, weights summing to 1 per item.
    """
    if pairing not in ("rotation", "all-pairs"):
        raise SchemaError(f"unknown pairing {pairing!r}")
    samples = []
    for item_id, conds in sorted(_by_item_condition(records).items()):
        missing = [c for c in CONDITIONS if c not in conds]
        if missing:
            raise SchemaError(f"item {item_id!r} missing condition(s) {missing}")
        l1, l2, l12 = conds["m1"], conds["m2"], conds["both"]
        if pairing == "rotation":
            k = max(len(l1), len(l2), len(l12))
            for r in range(k):
                samples.append(
                    (
                        encode(space, l1[r % len(l1)].label),
                        encode(space, l2[(r + 1) % len(l2)].label),
                        encode(space, l12[(r + 2) % len(l12)].label),
                        1.0,
                    )
                )
        else:
            combos = list(product(l1, l2, l12))
            w = 1.0 / len(combos)
            for a, b, c in combos:
                samples.append(
                    (encode(space, a.label), encode(space, b.label), encode(space, c.label), w)
                )
    if not samples:
        raise SchemaError("no triples produced")
    return TripleDataset(space=space, samples=samples)


def _round_to_index(mean, size):
    """Round a fractional index to the nearest integer; exact halves move
    away from the ordinal midpoint (size-1)/2 to avoid a neutral bias."""
    lo, hi = math.floor(mean), math.ceil(mean)
    if lo == hi:
        return lo
    if mean - lo != 0.5:
        return lo if mean - lo < 0.5 else hi
    mid = (size - 1) / 2.0
    if abs(hi - mid) == abs(lo - mid):
        return hi
    return hi if abs(hi - mid) > abs(lo - mid) else lo


def triples_from_counterfactual(records, space):
    """Aggregate counterfactual labels into (y1, y2, y) triples.

    y1 and y2 come from the unimodal-first labels of the two orders; y is the
    average of the two revised labels. Ordinal/binned spaces average the
    encoded indices; nominal spaces emit the two revised labels as half-weight
    triples instead, keeping per-item weight 1.
    """
    items = {}
    for rec in records:
        items.setdefault(rec.item_id, {}).setdefault(rec.order, []).append(rec)
    ordinal_like = space.kind in ("ordinal", "binned-continuous")
    samples = []
    for item_id, orders in sorted(items.items()):
        missing = [o for o in ORDERS if o not in orders]
        if missing:
            raise SchemaError(f"item {item_id!r} missing order(s) {missing}")
        first1 = sorted(orders["first-m1"], key=lambda r: r.annotator_id)
        first2 = sorted(orders["first-m2"], key=lambda r: r.annotator_id)
        w = 1.0 / (len(first1) * len(first2))
        for a, b in product(first1, first2):
            y1 = encode(space, a.label_first)
            y2 = encode(space, b.label_first)
            i12 = encode(space, a.label_both)
            i21 = encode(space, b.label_both)
            if ordinal_like:
                y = _round_to_index((i12 + i21) / 2.0, space.size)
                samples.append((y1, y2, y, w))
            else:
                samples.append((y1, y2, i12, w / 2.0))
                samples.append((y1, y2, i21, w / 2.0))
    if not samples:
        raise SchemaError("no triples produced")
    return TripleDataset(space=space, samples=samples)


def summarize_decomposition(records):
    """Mean rating and mean confidence per interaction, over all records."""
    if not records:
        raise SchemaError("empty decomposition record list")
    n = len(records)
    return {
        "ratings": {
            "r": sum(rec.r for rec in records) / n,
            "u1": sum(rec.u1 for rec in records) / n,
            "u2": sum(rec.u2 for rec in records) / n,
            "s": sum(rec.s for rec in records) / n,
        },
        "confidences": {
            "r": sum(rec.conf_r for rec in records) / n,
            "u1": sum(rec.conf_u1 for rec in records) / n,
            "u2": sum(rec.conf_u2 for rec in records) / n,
            "s": sum(rec.conf_s for rec in records) / n,
        },
    }
