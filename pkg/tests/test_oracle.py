import random

import pytest
from hypothesis import given, settings, strategies as st

from skytrees import Axis, Dominance, build_index, parse_query
from skytrees.errors import OracleBoundExceeded
from skytrees.generate import random_document, random_query
from skytrees.oracle import (enumerate_embeddings, make_variant, skytrees_oracle, variants,
                             verify_answer)
from skytrees.skyline import Answer, bits

from conftest import FIX1, FIX2, FIX3, TRACE_DOC


def ids(query, *labels):
    return frozenset(n.id for n in query.nodes if n.label in labels)


def test_variant_contraction(q1):
    v = make_variant(q1, frozenset())
    steps = {q1.node(n).label: (q1.node(a).label if a is not None else None, ax)
             for n, a, ax in v.steps}
    assert steps == {"a": (None, None), "b": ("a", Axis.CHILD), "c": ("b", Axis.CHILD),
                     "f": ("b", Axis.DESCENDANT)}
    assert len(variants(q1)) == 4


def test_variant_counts(q1):
    fix2 = build_index(FIX2)
    assert len(enumerate_embeddings(make_variant(q1, frozenset()), fix2)) == 1
    assert enumerate_embeddings(make_variant(q1, ids(q1, "d", "e")), fix2) == []
    # f is a child of d in this query, and FIX1 has f beside d, not inside it
    assert enumerate_embeddings(make_variant(q1, ids(q1, "d", "e")), build_index(FIX1)) == []
    assert len(enumerate_embeddings(make_variant(q1, ids(q1, "d", "e")), build_index(TRACE_DOC))) == 1


def test_fix3_oracle(q1):
    index = build_index(FIX3)
    for mode in Dominance:
        answers = skytrees_oracle(q1, index, mode)
        assert sorted(bits(q1, a.dimension) for a in answers) == ["10", "10"]


def test_exact_query_is_plain_match_set():
    q = parse_query("a//c")
    index = build_index("<a><b><c/></b><c/></a>")
    answers = skytrees_oracle(q, index)
    assert len(answers) == 2 and all(a.dimension == frozenset() for a in answers)


def test_bound_exceeded():
    index = build_index("<a>" + "<b/>" * 20 + "</a>")
    with pytest.raises(OracleBoundExceeded) as info:
        skytrees_oracle(parse_query("a[/b][/b]/b"), index, bound=1000)
    assert info.value.product == 8000


def test_verify_answer_flags_problems(q1):
    index = build_index(FIX1)
    a, b, c, d, e, f = index.nodes
    good = Answer((a, b, c, None, e, f), ids(q1, "e"))
    assert verify_answer(q1, good) == []
    assert verify_answer(q1, Answer((a, b, c, d, e, f), ids(q1, "d", "e")))  # f not under d
    assert verify_answer(q1, Answer((a, c, c, None, e, f), ids(q1, "e")))
    assert verify_answer(q1, Answer((a, b, c, None, e, f), frozenset()))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9), st.integers(0, 3))
def test_oracle_answers_verify(seed, n_pref):
    rng = random.Random(seed)
    index = build_index(random_document(rng, max_nodes=30))
    query = parse_query(random_query(rng, index, n_pref=n_pref))
    try:
        everything = {v.keep: enumerate_embeddings(v, index, 20000) for v in variants(query)}
    except OracleBoundExceeded:
        return
    exact = {a.required_part(query) for a in everything[frozenset()]}
    for keep, found in everything.items():
        for answer in found:
            assert verify_answer(query, answer) == []
            assert answer.dimension == keep
            # dropping the preference bindings leaves a match of the bare query
            assert answer.required_part(query) in exact
