import io
import json

import pytest

from fusionpid.dataset import (
    SchemaError,
    parse_counterfactual,
    parse_decomposition,
    parse_partial,
    serialize_records,
    summarize_decomposition,
    triples_from_counterfactual,
    triples_from_partial,
)
from fusionpid.label_space import build_label_space

NOMINAL = build_label_space({"kind": "nominal", "values": ["no", "yes"]})
ORDINAL = build_label_space({"kind": "ordinal", "range": [-3, 3]})

PARTIAL_HEADER = "item_id,annotator_id,condition,label,confidence\n"
CF_HEADER = (
    "item_id,annotator_id,order,label_first,label_both,"
    "confidence_first,confidence_both\n"
)
DECOMP_HEADER = "item_id,annotator_id,r,u1,u2,s,conf_r,conf_u1,conf_u2,conf_s\n"


def partial_csv(rows):
    return io.StringIO(PARTIAL_HEADER + "\n".join(rows))


def test_parse_partial_single_row():
    recs = parse_partial(partial_csv(["i1,a1,m1,yes,4"]))
    assert len(recs) == 1
    assert recs[0].condition == "m1"
    assert recs[0].confidence == 4


def test_parse_partial_confidence_out_of_range():
    with pytest.raises(SchemaError):
        parse_partial(partial_csv(["i1,a1,m1,yes,7"]))


def test_parse_partial_missing_column():
    bad = io.StringIO("item_id,annotator_id,label,confidence\ni1,a1,yes,3")
    with pytest.raises(SchemaError):
        parse_partial(bad)


def test_parse_partial_duplicate_key():
    with pytest.raises(SchemaError):
        parse_partial(partial_csv(["i1,a1,m1,yes,4", "i1,a1,m1,no,2"]))


def test_parse_partial_json():
    rows = [{"item_id": "i1", "annotator_id": "a1", "condition": "both", "label": "no", "confidence": 0}]
    recs = parse_partial(io.StringIO(json.dumps(rows)), "json")
    assert recs[0].label == "no"


def test_parse_counterfactual_bad_order():
    with pytest.raises(SchemaError):
        parse_counterfactual(io.StringIO(CF_HEADER + "i1,a1,first-m3,yes,yes,4,4"))


def test_parse_counterfactual_empty_warns():
    with pytest.warns(UserWarning):
        recs = parse_counterfactual(io.StringIO(CF_HEADER))
    assert recs == []


def test_parse_decomposition_values():
    recs = parse_decomposition(io.StringIO(DECOMP_HEADER + "i1,a1,0,0,0,5,4,4,4,4"))
    assert recs[0].s == 5


def test_parse_decomposition_negative_rating():
    with pytest.raises(SchemaError):
        parse_decomposition(io.StringIO(DECOMP_HEADER + "i1,a1,-1,0,0,5,4,4,4,4"))


def test_parse_decomposition_duplicate():
    rows = "i1,a1,0,0,0,5,4,4,4,4\ni1,a1,1,0,0,4,4,4,4,4"
    with pytest.raises(SchemaError):
        parse_decomposition(io.StringIO(DECOMP_HEADER + rows))


def test_records_roundtrip_csv_and_json():
    recs = parse_partial(partial_csv(["i1,a1,m1,yes,4", "i1,a2,m2,no,3", "i1,a3,both,yes,5"]))
    for fmt in ("csv", "json"):
        text = serialize_records(recs, fmt)
        again = parse_partial(io.StringIO(text), fmt)
        assert again == recs


def three_annotator_item(item="i1"):
    rows = []
    for ann, labels in (("a", "yes,no,yes"), ("b", "no,no,yes"), ("c", "yes,yes,no")):
        l1, l2, l12 = labels.split(",")
        rows += [f"{item},{ann},m1,{l1},3", f"{item},{ann},m2,{l2},3", f"{item},{ann},both,{l12},3"]
    return rows


def test_rotation_pairing_three_annotators():
    recs = parse_partial(partial_csv(three_annotator_item()))
    data = triples_from_partial(recs, NOMINAL, pairing="rotation")
    assert len(data.samples) == 3
    assert all(w == 1.0 for _, _, _, w in data.samples)
    # (a.m1, b.m2, c.both), (b.m1, c.m2, a.both), (c.m1, a.m2, b.both)
    yes, no = 1, 0
    assert data.samples == [(yes, no, no, 1.0), (no, yes, yes, 1.0), (yes, no, yes, 1.0)]


def test_rotation_single_annotator_gives_one_triple():
    recs = parse_partial(partial_csv(["i1,a,m1,yes,3", "i1,a,m2,no,3", "i1,a,both,yes,3"]))
    data = triples_from_partial(recs, NOMINAL)
    assert data.samples == [(1, 0, 1, 1.0)]


def test_missing_condition_is_error():
    recs = parse_partial(partial_csv(["i1,a,m1,yes,3", "i1,b,m1,no,3"]))
    with pytest.raises(SchemaError):
        triples_from_partial(recs, NOMINAL)


def test_all_pairs_weights_sum_to_one_per_item():
    recs = parse_partial(partial_csv(three_annotator_item() + three_annotator_item("i2")))
    data = triples_from_partial(recs, NOMINAL, pairing="all-pairs")
    assert len(data.samples) == 2 * 27
    assert data.total_weight == pytest.approx(2.0)


def test_rotation_total_weight_three_per_item():
    recs = parse_partial(partial_csv(three_annotator_item() + three_annotator_item("i2")))
    data = triples_from_partial(recs, NOMINAL, pairing="rotation")
    assert data.total_weight == pytest.approx(3 * 2)


def cf_csv(rows):
    return io.StringIO(CF_HEADER + "\n".join(rows))


def test_counterfactual_equal_revisions_average_to_self():
    recs = parse_counterfactual(cf_csv(["i1,a,first-m1,1,2,4,4", "i1,b,first-m2,-1,2,3,3"]))
    data = triples_from_counterfactual(recs, ORDINAL)
    assert data.samples == [(4, 2, 5, 1.0)]


def test_counterfactual_half_step_rounds_away_from_midpoint():
    # revisions +2 (index 5) and +1 (index 4): mean 4.5 -> index 5
    recs = parse_counterfactual(cf_csv(["i1,a,first-m1,0,2,4,4", "i1,b,first-m2,0,1,3,3"]))
    data = triples_from_counterfactual(recs, ORDINAL)
    assert data.samples[0][2] == 5
    # mirrored on the negative side: -2 and -1 -> mean 1.5 -> index 1
    recs = parse_counterfactual(cf_csv(["i1,a,first-m1,0,-2,4,4", "i1,b,first-m2,0,-1,3,3"]))
    data = triples_from_counterfactual(recs, ORDINAL)
    assert data.samples[0][2] == 1


def test_counterfactual_nominal_emits_half_weight_pair():
    recs = parse_counterfactual(cf_csv(["i1,a,first-m1,yes,yes,4,4", "i1,b,first-m2,no,no,3,3"]))
    data = triples_from_counterfactual(recs, NOMINAL)
    assert data.samples == [(1, 0, 1, 0.5), (1, 0, 0, 0.5)]
    assert data.total_weight == pytest.approx(1.0)


def test_counterfactual_missing_order_is_error():
    recs = parse_counterfactual(cf_csv(["i1,a,first-m1,yes,yes,4,4"]))
    with pytest.raises(SchemaError):
        triples_from_counterfactual(recs, NOMINAL)


def test_summarize_single_record():
    recs = parse_decomposition(io.StringIO(DECOMP_HEADER + "i1,a1,1,2,3,4,5,5,5,5"))
    summary = summarize_decomposition(recs)
    assert summary["ratings"] == {"r": 1, "u1": 2, "u2": 3, "s": 4}


def test_summarize_midpoint():
    rows = "i1,a1,0,0,0,0,0,0,0,0\ni2,a1,5,5,5,5,5,5,5,5"
    summary = summarize_decomposition(parse_decomposition(io.StringIO(DECOMP_HEADER + rows)))
    assert all(v == 2.5 for v in summary["ratings"].values())


def test_summarize_pure_synergy_pattern():
    rows = "\n".join(f"i{i},a1,0,0,0,5,4,4,4,5" for i in range(10))
    summary = summarize_decomposition(parse_decomposition(io.StringIO(DECOMP_HEADER + rows)))
    assert summary["ratings"] == {"r": 0, "u1": 0, "u2": 0, "s": 5}


def test_summarize_empty_is_error():
    with pytest.raises(SchemaError):
        summarize_decomposition([])
