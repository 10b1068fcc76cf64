"""Krippendorff's alpha on annotation matrices.

Shows perfect agreement, a hand-checkable partial-agreement case, the
undefined all-constant case, and how the metric choice changes the score on
ordinal confidence-style ratings.
"""

from fusionpid.agreement import RatingsMatrix, krippendorff_alpha

perfect = RatingsMatrix(
    items=["i0", "i1", "i2", "i3"],
    annotators=["a", "b"],
    values=[["yes", "yes"], ["no", "no"], ["yes", "yes"], ["no", "no"]],
    metric="nominal",
)
print(f"unanimous ratings           alpha = {krippendorff_alpha(perfect).alpha}")

partial = RatingsMatrix(
    items=["i0", "i1", "i2", "i3"],
    annotators=["a", "b"],
    values=[["a", "a"], ["a", "a"], ["b", "b"], ["b", "a"]],
    metric="nominal",
)
print(f"one disagreement in four    alpha = {krippendorff_alpha(partial).alpha:.4f}")

constant = RatingsMatrix(
    items=["i0", "i1"],
    annotators=["a", "b"],
    values=[["x", "x"], ["x", "x"]],
    metric="nominal",
)
print(f"all-constant data           alpha = {krippendorff_alpha(constant).to_json()['alpha']}")

print()
print("metric sensitivity on 0-5 ratings that differ by one step:")
rows = [[3, 4], [4, 4], [2, 3], [5, 5]]
for metric in ("nominal", "ordinal", "interval"):
    m = RatingsMatrix(
        items=[f"i{k}" for k in range(4)],
        annotators=["a", "b"],
        values=[list(r) for r in rows],
        metric=metric,
    )
    print(f"  {metric:<9} alpha = {krippendorff_alpha(m).alpha:.4f}")
