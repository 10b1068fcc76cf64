"""Krippendorff's alpha and confidence summaries for annotation quality."""

from dataclasses import dataclass

import numpy as np

METRICS = ("nominal", "ordinal", "interval")


class AgreementError(ValueError):
    pass


@dataclass
class RatingsMatrix:
    """item x annotator grid of values; None marks a missing rating."""

    items: list
    annotators: list
    values: list  # values[i][a], aligned with items/annotators
    metric: str = "nominal"

    def __post_init__(self):
        if self.metric not in METRICS:
            raise AgreementError(f"metric must be one of {METRICS}")
        if len(self.items) < 2:
            raise AgreementError("need at least 2 items")
        if len(self.values) != len(self.items):
            raise AgreementError("values rows must match items")
        pairable = sum(
            1 for row in self.values if sum(v is not None for v in row) >= 2
        )
        if pairable < 1:
            raise AgreementError("no item has 2 or more ratings")


@dataclass
class AlphaResult:
    alpha: float  # None when expected disagreement is zero (undefined)
    n_units: int
    n_pairable: int

    def to_json(self):
        return {
            "alpha": self.alpha if self.alpha is not None else "undefined",
            "n_units": self.n_units,
            "n_pairable": self.n_pairable,
        }


def _distances(cats, totals, metric):
    """Pairwise squared distances delta^2 between category values."""
    k = len(cats)
    d = np.zeros((k, k))
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            if metric == "nominal":
                d[i, j] = 1.0
            elif metric == "interval":
                d[i, j] = (float(cats[i]) - float(cats[j])) ** 2
            else:  # ordinal: cumulative-frequency rank distance
                lo, hi = min(i, j), max(i, j)
                span = totals[lo : hi + 1].sum()
                d[i, j] = (span - (totals[i] + totals[j]) / 2.0) ** 2
    return d


def krippendorff_alpha(m):
    """alpha = 1 - D_o / D_e over the coincidence matrix.

    Units with fewer than 2 ratings are excluded; returns AlphaResult with
    alpha None when every pairable value is identical (D_e = 0, undefined).
    """
    units = [[v for v in row if v is not None] for row in m.values]
    pairable = [u for u in units if len(u) >= 2]
    if not pairable:
        raise AgreementError("no unit has 2 or more ratings")
    cats = sorted({v for u in pairable for v in u})
    index = {v: i for i, v in enumerate(cats)}
    k = len(cats)
    o = np.zeros((k, k))
    for u in pairable:
        w = 1.0 / (len(u) - 1)
        for a in range(len(u)):
            for b in range(len(u)):
                if a != b:
                    o[index[u[a]], index[u[b]]] += w
    totals = o.sum(axis=1)
    n = totals.sum()
    d = _distances(cats, totals, m.metric)
    d_e = float((np.outer(totals, totals) * d).sum()) / (n * (n - 1))
    if d_e == 0.0:
        return AlphaResult(alpha=None, n_units=len(units), n_pairable=len(pairable))
    d_o = float((o * d).sum()) / n
    return AlphaResult(
        alpha=1.0 - d_o / d_e, n_units=len(units), n_pairable=len(pairable)
    )


def mean_confidence(records, selector):
    """Arithmetic mean of a confidence field; selector is a callable or field name."""
    if isinstance(selector, str):
        name = selector
        selector = lambda rec: getattr(rec, name)
    picked = [selector(rec) for rec in records]
    picked = [v for v in picked if v is not None]
    if not picked:
        raise AgreementError("empty confidence selection")
    out = sum(picked) / len(picked)
    if not 0 <= out <= 5:
        raise AgreementError(f"mean confidence {out} outside [0, 5]")
    return out


def matrix_from_records(records, value_of, metric="nominal"):
    """Build a RatingsMatrix from record objects.

    value_of(record) returns the rated value for that record or None to skip;
    records must expose item_id and annotator_id.
    """
    items = sorted({rec.item_id for rec in records})
    annotators = sorted({rec.annotator_id for rec in records})
    pos_i = {it: i for i, it in enumerate(items)}
    pos_a = {an: i for i, an in enumerate(annotators)}
    grid = [[None] * len(annotators) for _ in items]
    for rec in records:
        v = value_of(rec)
        if v is not None:
            grid[pos_i[rec.item_id]][pos_a[rec.annotator_id]] = v
    return RatingsMatrix(items=items, annotators=annotators, values=grid, metric=metric)
