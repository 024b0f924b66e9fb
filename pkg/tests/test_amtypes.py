import pickle

import pytest
from hypothesis import given, settings, strategies as st

from amparser.amtypes import (
    APP,
    BOTTOM,
    EMPTY,
    IGNORE,
    MOD,
    AmType,
    EdgeOp,
    TypeSyntaxError,
    apply_type,
    candidate_ops,
    modify_type,
    op_result,
    open_source_count,
    parse_type,
    render_type,
)

T = parse_type


def test_parse_want_type():
    t = T("(o(s), s)")
    assert set(t) == {"o", "s"}
    assert t["o"] is T("(s)")
    assert t["s"] is EMPTY
    assert render_type(t) == "(o(s), s)"


def test_render_is_sorted_and_canonical():
    assert render_type(T("(s, o(s))")) == "(o(s), s)"
    assert T("(s, o(s))") is T("(o(s), s)")


def test_empty_and_bottom():
    assert T("()") is EMPTY
    assert T("_|_") is BOTTOM
    assert render_type(BOTTOM) == "_|_"
    assert BOTTOM is not EMPTY
    assert len(BOTTOM) == 0


@pytest.mark.parametrize("bad", ["(s, s)", "(s", "s)", "(S)", "(root)", "(s,)", "(o(s) s)"])
def test_parse_errors(bad):
    with pytest.raises(TypeSyntaxError):
        T(bad)


def test_interning_survives_pickle():
    t = T("(o(s), s)")
    assert pickle.loads(pickle.dumps(t)) is t
    assert pickle.loads(pickle.dumps(BOTTOM)) is BOTTOM


def test_apply_type_examples():
    assert apply_type(T("(o(s), s)"), "o", T("(s)")) is T("(s)")
    assert apply_type(T("(s)"), "s", EMPTY) is EMPTY
    assert apply_type(T("(o(s), s)"), "o", EMPTY) is None


def test_apply_type_unions_argument_sources():
    # the argument's own open sources join the head's
    assert apply_type(T("(o)"), "o", T("(s)")) is None  # annotation is (), not (s)
    assert apply_type(T("(o(s))"), "o", T("(s)")) is T("(s)")
    assert apply_type(T("(o(s), s(o2))"), "o", T("(s)")) is None  # s annotations clash


def test_apply_respects_pending_requests():
    # s is still requested by o's annotation, so it cannot be filled yet
    assert apply_type(T("(o(s), s)"), "s", EMPTY) is None


def test_apply_with_bottom_or_missing_source():
    assert apply_type(BOTTOM, "s", EMPTY) is None
    assert apply_type(T("(s)"), "s", BOTTOM) is None
    assert apply_type(T("(s)"), "o", EMPTY) is None


def test_modify_type_examples():
    assert modify_type(T("(s)"), "m", T("(m)")) is T("(s)")
    assert modify_type(EMPTY, "m", T("(m, s)")) is None
    assert modify_type(T("(s)"), "m", T("(m, s)")) is T("(s)")


def test_modify_requires_empty_annotation_on_target():
    assert modify_type(T("(s)"), "m", T("(m(s))")) is None
    assert modify_type(T("(o)"), "m", T("(m, o(s))")) is None


def test_op_result_dispatch():
    assert op_result(IGNORE, T("(s)"), BOTTOM) is T("(s)")
    assert op_result(IGNORE, T("(s)"), EMPTY) is None
    assert op_result(APP("s"), BOTTOM, EMPTY) is None
    assert op_result(MOD("m"), T("(s)"), T("(m)")) is T("(s)")


def test_open_source_count():
    assert open_source_count(EMPTY) == 0
    assert open_source_count(T("(o(s), s)")) == 2
    assert open_source_count(T("(s)")) == 1
    with pytest.raises(ValueError):
        open_source_count(BOTTOM)


def test_edge_op_rendering():
    assert str(APP("o2")) == "APP_o2"
    assert str(MOD("m")) == "MOD_m"
    assert str(IGNORE) == "IGNORE"
    for text in ("APP_o2", "MOD_m", "IGNORE"):
        assert str(EdgeOp.parse(text)) == text
    with pytest.raises(ValueError):
        EdgeOp.parse("APP_")


def test_candidate_ops():
    ops = set(candidate_ops(T("(o(s), s)"), T("(s)")))
    assert ops == {APP("o"), MOD("s")}  # an (s) dependent can also modify through s
    assert list(candidate_ops(T("(s)"), BOTTOM)) == [IGNORE]
    assert set(candidate_ops(T("(s)"), T("(m)"))) == {MOD("m")}


# --- properties -----------------------------------------------------------------

names = st.sampled_from(["s", "o", "o2", "m"])


def _type_or_none(entries):
    try:
        return AmType(entries)
    except ValueError:  # a source inside its own annotation
        return None


def types():
    return st.recursive(
        st.just(EMPTY),
        lambda inner: st.dictionaries(names, inner, max_size=3).map(_type_or_none).filter(lambda t: t is not None),
        max_leaves=6,
    )


@given(types())
def test_render_parse_roundtrip(t):
    assert parse_type(render_type(t)) is t


@given(types(), names, types())
def test_apply_removes_source(t1, a, t2):
    res = apply_type(t1, a, t2)
    if res is not None:
        assert a not in res or a in t2
        for name in t1:
            if name != a:
                assert name in res


@given(types(), names, types())
def test_modify_is_identity_on_head(th, a, tm):
    res = modify_type(th, a, tm)
    assert res is None or res is th


@settings(max_examples=200)
@given(st.sampled_from([APP("s"), APP("o"), MOD("m"), IGNORE]), types(), types() | st.just(BOTTOM))
def test_op_result_never_returns_bottom_for_typed_head(op, t1, t2):
    assert op_result(op, t1, t2) is not BOTTOM


@given(types(), types())
def test_candidate_ops_agree_with_op_result(head, dep):
    found = set(candidate_ops(head, dep))
    for op in [APP(n) for n in ("s", "o", "o2", "m")] + [MOD(n) for n in ("s", "o", "o2", "m")]:
        assert (op in found) == (op_result(op, head, dep) is not None)
