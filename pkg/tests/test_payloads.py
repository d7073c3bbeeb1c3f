import pytest

from agreekit.dataset import AnnotationRecord, Dataset, validate_dataset
from agreekit.errors import DataError
from agreekit.payloads import (
    Box,
    BoxSet,
    KeypointObject,
    NumericVector,
    OrderedTree,
    Ranking,
    Span,
    SpanSet,
    TokenSequence,
    payload_kind,
    tree_from_nested,
    tree_to_nested,
)


def test_vector_coerces_to_floats():
    v = NumericVector(values=(1, 2.5))
    assert v.values == (1.0, 2.5)
    assert all(isinstance(x, float) for x in v.values)


def test_box_orders_corners():
    with pytest.raises(DataError):
        Box(3.0, 0.0, 1.0, 2.0)
    assert Box(0.0, 0.0, 2.0, 3.0).area() == 6.0


def test_span_bounds():
    with pytest.raises(DataError):
        Span(start=4, end=4, tag="PER")
    with pytest.raises(DataError):
        Span(start=-1, end=2, tag="PER")
    assert tuple(Span(start=1, end=4, tag="PER").tokens()) == (1, 2, 3)


def test_object_sets_deduplicate_and_sort():
    b = Box(0.0, 0.0, 1.0, 1.0)
    s = BoxSet(boxes=(b, Box(0.0, 0.0, 1.0, 1.0), Box(2.0, 2.0, 3.0, 3.0)))
    assert len(s.boxes) == 2
    assert s.boxes[0] == b
    spans = SpanSet(spans=(Span(5, 7, "ORG"), Span(1, 3, "PER"), Span(5, 7, "ORG")))
    assert [sp.start for sp in spans.spans] == [1, 5]


def test_ranking_rejects_repeats():
    with pytest.raises(DataError):
        Ranking(order=("a", "b", "a"))


def test_keypoint_validation():
    with pytest.raises(DataError):
        KeypointObject(points=())
    with pytest.raises(DataError):
        KeypointObject(points=((0.0, 0.0),), scale=-1.0)
    with pytest.raises(DataError):
        KeypointObject(points=((0.0, 0.0), (1.0, 1.0)), per_point_constant=(0.5,))


def test_tree_nested_round_trip():
    nested = ["S", [["NP", ["a"]], ["VP", [["V", ["b", "c"]]]]]]
    tree = tree_from_nested(nested)
    assert tree.label == "S"
    assert tree.size() == 7
    assert tree.n_leaves() == 3
    back = tree_to_nested(tree)
    assert tree_from_nested(back) == tree


def test_tree_from_nested_rejects_junk():
    with pytest.raises(DataError):
        tree_from_nested(["label", ["child"], "extra"])
    with pytest.raises(DataError):
        tree_from_nested(42)


def test_payload_kind_names():
    assert payload_kind(NumericVector(values=(1.0,))) == "vector"
    assert payload_kind(TokenSequence(tokens=("x",))) == "tokens"
    assert payload_kind(OrderedTree(label="r", children=())) == "tree"


def _vec_records(values_by_cell):
    return tuple(
        AnnotationRecord(item_id=i, annotator_id=a, payload=NumericVector(values=v))
        for (i, a), v in values_by_cell.items()
    )


def test_validate_counts_and_ok():
    recs = _vec_records(
        {
            ("i1", "a1"): (0.5,),
            ("i1", "a2"): (0.6,),
            ("i2", "a1"): (0.1,),
            ("i2", "a2"): (0.2,),
        }
    )
    summary = validate_dataset(recs, {})
    assert summary.items == 2
    assert summary.annotators == 2
    assert summary.annotations == 4
    assert summary.kind == "vector"
    assert summary.ok
    assert summary.violations == ()


def test_validate_flags_duplicates_and_singletons():
    recs = _vec_records({("i1", "a1"): (0.5,), ("i2", "a1"): (0.1,)})
    recs = recs + (AnnotationRecord("i1", "a1", NumericVector(values=(0.7,))),)
    summary = validate_dataset(recs, {})
    assert not summary.ok
    text = " ".join(summary.violations)
    assert "duplicate" in text
    assert "1 annotation" in text


def test_validate_vector_ranges():
    recs = _vec_records({("i1", "a1"): (1.5,), ("i1", "a2"): (0.5,)})
    summary = validate_dataset(recs, {"ranges": [[0.0, 1.0]]})
    assert any("range" in v for v in summary.violations)
    # without declared ranges the same data passes
    assert validate_dataset(recs, {}).ok


def test_validate_ranking_universe():
    recs = (
        AnnotationRecord("i1", "a1", Ranking(order=("x", "y"))),
        AnnotationRecord("i1", "a2", Ranking(order=("x", "z"))),
    )
    summary = validate_dataset(recs, {"universe": ["x", "y"]})
    assert any("universe" in v for v in summary.violations)


def test_validate_rejects_mixed_kinds():
    recs = (
        AnnotationRecord("i1", "a1", NumericVector(values=(0.5,))),
        AnnotationRecord("i1", "a2", TokenSequence(tokens=("x",))),
    )
    with pytest.raises(DataError):
        validate_dataset(recs, {})


def test_dataset_sorts_records():
    recs = _vec_records({("i2", "a1"): (0.1,), ("i1", "a2"): (0.2,), ("i1", "a1"): (0.3,)})
    ds = Dataset(records=recs, meta={})
    keys = [(r.item_id, r.annotator_id) for r in ds.records]
    assert keys == sorted(keys)
    assert ds.kind == "vector"
