import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fuzzyseg.config import Widths
from fuzzyseg.descriptors import SegmentDescriptor, shape_coefficient
from fuzzyseg.errors import DegenerateModelSegment, ParseError
from fuzzyseg.fuzzy import Trapezoid, membership
from fuzzyseg.model import ClassModel
from fuzzyseg.rulebase import RuleBase, induct, load_rulebase

from . import strategies


def seg(area, cx, cy, w, h):
    return SegmentDescriptor(area, cx, cy, cx - w / 2, cx + w / 2, cy - h / 2, cy + h / 2)


def two_segment_model():
    return ClassModel("van", [seg(200, 0, 0, 25, 10), seg(50, 10, -4, 5, 5)])


def test_shape_trapezoid_arithmetic():
    rb = induct(two_segment_model(), Widths(0.15, 0.40, 0.05, 0.15))
    rule = rb.shape_rules[0]
    assert rule.area_set.as_list() == pytest.approx([120, 170, 230, 280])
    assert rule.q_set.as_list() == pytest.approx([1.5, 2.125, 2.875, 3.5])


def test_placement_centers_are_anchor_minus_partner():
    rb = induct(two_segment_model())
    (rule,) = rb.placement_rules
    assert rule.j2 == 1
    assert rule.dx_set.center == pytest.approx(-10)
    assert rule.dy_set.center == pytest.approx(4)
    half = 0.15 * rb.diagonal
    assert rule.dx_set.d - rule.dx_set.center == pytest.approx(half)


def test_rule_counts(class_models, rulebase_by_class):
    for c, cm in class_models.items():
        rb = rulebase_by_class[c]
        assert len(rb.shape_rules) == cm.n
        assert len(rb.placement_rules) == cm.n - 1
        assert [r.j2 for r in rb.placement_rules] == list(range(1, cm.n))


def test_self_match_identity(class_models, rulebase_by_class):
    for c, cm in class_models.items():
        rb = rulebase_by_class[c]
        a = cm.segments[0]
        for rule, s in zip(rb.shape_rules, cm.segments):
            assert membership(rule.area_set, s.area) == 1.0
            assert membership(rule.q_set, shape_coefficient(s)) == 1.0
        for rule in rb.placement_rules:
            s = cm.segments[rule.j2]
            assert membership(rule.dx_set, a.cx - s.cx) == 1.0
            assert membership(rule.dy_set, a.cy - s.cy) == 1.0


def test_degenerate_model_segment_rejected():
    flat = SegmentDescriptor(5, 0, 0, -1, 1, 0, 0)
    with pytest.raises(DegenerateModelSegment):
        induct(ClassModel("bus", [seg(10, 0, 0, 2, 2), flat]))


@given(
    st.floats(1, 1e4),
    st.floats(0.1, 10),
    st.floats(0, 0.5),
    st.floats(0, 0.5),
    st.floats(1.0, 3.0),
    st.floats(0, 2e4),
)
def test_width_monotonicity(area, q, alpha, extra, k, x):
    narrow = Widths(alpha, alpha + extra, alpha, alpha + extra)
    cm = ClassModel("truck", [seg(area, 0, 0, q * 10, 10), seg(area / 2, 3, 1, 4, 4)])
    small, wide = induct(cm, narrow), induct(cm, narrow.scaled(k))
    for r0, r1 in zip(small.shape_rules, wide.shape_rules):
        assert membership(r1.area_set, x) >= membership(r0.area_set, x)
        assert membership(r1.q_set, x / 1e3) >= membership(r0.q_set, x / 1e3)
    for r0, r1 in zip(small.placement_rules, wide.placement_rules):
        assert membership(r1.dx_set, x / 1e3 - 3) >= membership(r0.dx_set, x / 1e3 - 3)


@given(st.floats(0, 0.5), st.floats(0, 1.0), strategies.coords)
def test_support_growth_alone_is_monotone(beta, extra, x):
    cm = two_segment_model()
    rb0 = induct(cm, Widths(0.1, max(beta, 0.1), 0.02, max(beta, 0.02)))
    rb1 = induct(cm, Widths(0.1, max(beta, 0.1) + extra, 0.02, max(beta, 0.02) + extra))
    for r0, r1 in zip(rb0.placement_rules, rb1.placement_rules):
        assert membership(r1.dx_set, x) >= membership(r0.dx_set, x)
        assert membership(r1.dy_set, x) >= membership(r0.dy_set, x)


def test_json_roundtrip(tmp_path, rulebases):
    for rb in rulebases:
        path = tmp_path / f"{rb.class_id}.json"
        path.write_text(rb.dumps())
        back = load_rulebase(path)
        assert back == rb
        assert back.dumps() == rb.dumps()


def test_rulebase_file_errors(tmp_path, rulebases):
    data = rulebases[0].to_dict()
    del data["shape_rules"][1]["q"]
    with pytest.raises(ParseError, match=r"shape_rules\[1\].*'q'"):
        RuleBase.from_dict(data)
    data = rulebases[0].to_dict()
    data["shape_rules"][0]["area"] = [3, 2, 1, 0]
    with pytest.raises(ParseError):
        RuleBase.from_dict(data)
    data = rulebases[0].to_dict()
    del data["placement_rules"][0]
    with pytest.raises(ValueError, match="1..n-1"):
        RuleBase.from_dict(data)
    p = tmp_path / "bad.json"
    p.write_text("[1, 2")
    with pytest.raises(ParseError, match="invalid JSON"):
        load_rulebase(p)


def test_widths_are_stored(rulebases):
    data = json.loads(rulebases[0].dumps())
    assert data["widths"] == {"alpha": 0.15, "beta": 0.4, "alpha_d": 0.05, "beta_d": 0.15}


def test_trapezoid_list_roundtrip():
    t = Trapezoid(-1.0, 0.0, 0.5, 2.0)
    assert Trapezoid.from_list(t.as_list()) == t
