"""Finite label supports and encoding of raw annotation values to indices."""

import bisect
import re
from dataclasses import dataclass, field


SAME = "SAME"
DIFFERENT = "DIFFERENT"

KINDS = ("nominal", "ordinal", "binned-continuous", "qa-binary")


class LabelSpaceError(ValueError):
    pass


@dataclass(frozen=True)
class LabelSpace:
    """Ordered finite support of task labels.

    kind: one of "nominal", "ordinal", "binned-continuous", "qa-binary".
    values: ordered label names (bin names for binned-continuous).
    bin_edges: ascending boundaries, binned-continuous only.
    """

    kind: str
    values: tuple = ()
    bin_edges: tuple = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise LabelSpaceError(f"unknown label-space kind: {self.kind!r}")
        if len(self.values) < 2:
            raise LabelSpaceError("label space needs at least 2 labels")
        if len(set(self.values)) != len(self.values):
            raise LabelSpaceError("duplicate label values")
        if self.kind == "binned-continuous":
            if self.bin_edges is None or len(self.bin_edges) < 3:
                raise LabelSpaceError("binned-continuous needs at least 3 bin edges")
            edges = list(self.bin_edges)
            if any(b <= a for a, b in zip(edges, edges[1:])):
                raise LabelSpaceError("bin edges must be strictly ascending")
            if len(self.values) != len(edges) - 1:
                raise LabelSpaceError("bin count must be edge count minus one")
        elif self.bin_edges is not None:
            raise LabelSpaceError("bin_edges only valid for binned-continuous")
        if self.kind == "qa-binary" and tuple(self.values) != (SAME, DIFFERENT):
            raise LabelSpaceError("qa-binary values must be [SAME, DIFFERENT]")

    @property
    def size(self):
        return len(self.values)

    def to_config(self):
        cfg = {"kind": self.kind, "values": list(self.values)}
        if self.bin_edges is not None:
            cfg["bin_edges"] = list(self.bin_edges)
        return cfg


# Conservative 3-bin preset for continuous sentiment-style scores in [-3, 3].
DEFAULT_CONTINUOUS_EDGES = (-3.0, -1.0, 1.0, 3.0)


def build_label_space(config):
    """Build a validated LabelSpace from a config mapping.

    Accepted shapes:
      {"kind": "nominal", "values": [...]}
      {"kind": "ordinal", "values": [...]} or {"kind": "ordinal", "range": [lo, hi]}
      {"kind": "binned-continuous", "bin_edges": [...]}
      {"kind": "qa-binary"}
    """
    if not isinstance(config, dict) or "kind" not in config:
        raise LabelSpaceError("label-space config must be a mapping with a 'kind'")
    kind = config["kind"]
    if kind == "qa-binary":
        return LabelSpace(kind=kind, values=(SAME, DIFFERENT))
    if kind == "binned-continuous":
        edges = tuple(float(e) for e in config.get("bin_edges", DEFAULT_CONTINUOUS_EDGES))
        names = tuple(f"[{a:g},{b:g}]" for a, b in zip(edges, edges[1:]))
        return LabelSpace(kind=kind, values=names, bin_edges=edges)
    if kind == "ordinal" and "range" in config:
        lo, hi = config["range"]
        lo, hi = int(lo), int(hi)
        if hi <= lo:
            raise LabelSpaceError("ordinal range must be increasing")
        return LabelSpace(kind=kind, values=tuple(range(lo, hi + 1)))
    if kind in ("nominal", "ordinal"):
        return LabelSpace(kind=kind, values=tuple(config.get("values", ())))
    raise LabelSpaceError(f"unknown label-space kind: {kind!r}")


def encode(space, raw):
    """Map a raw label value to its index in [0, space.size)."""
    if space.kind == "binned-continuous":
        try:
            x = float(raw)
        except (TypeError, ValueError):
            raise LabelSpaceError(f"not a real value: {raw!r}")
        edges = space.bin_edges
        if x < edges[0] or x > edges[-1]:
            raise LabelSpaceError(f"value {x} outside [{edges[0]}, {edges[-1]}]")
        # boundary values go to the lower bin; the bottom edge to bin 0
        idx = bisect.bisect_left(edges, x) - 1
        return max(idx, 0)
    try:
        return space.values.index(raw)
    except ValueError:
        pass
    # CSV input arrives as strings; tolerate string forms of numeric labels
    text = {str(v): i for i, v in enumerate(space.values)}
    if str(raw) in text:
        return text[str(raw)]
    raise LabelSpaceError(f"unknown label {raw!r} for {space.kind} space")


def decode(space, index):
    if not 0 <= index < space.size:
        raise LabelSpaceError(f"index {index} out of range [0, {space.size})")
    return space.values[index]


_WS = re.compile(r"\s+")


def _normalize_answer(text):
    return _WS.sub(" ", str(text).strip()).lower()


def qa_binarize(answer, reference):
    """Compare two free-text answers; 0 = SAME, 1 = DIFFERENT.

    Equality is exact match after trimming, lowercasing, and collapsing
    internal whitespace runs. No synonym matching.
    """
    a, b = _normalize_answer(answer), _normalize_answer(reference)
    if not a or not b:
        raise LabelSpaceError("empty answer after normalization")
    return 0 if a == b else 1


def qa_space():
    return LabelSpace(kind="qa-binary", values=(SAME, DIFFERENT))
