"""Acceptance criteria, one test per criterion (criterion 3 is split by fixture).

The summary printed at the end of the run has one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import random
import time

import pytest

from skytrees import Dominance, Matcher, build_index, parse_query, skytrees, validate_query
from skytrees.cli import main
from skytrees.errors import OracleBoundExceeded
from skytrees.generate import default_alphabet, random_document, random_query
from skytrees.oracle import DEFAULT_BOUND, all_embeddings, skytrees_oracle
from skytrees.query import has_errors, serialize_query
from skytrees.skyline import bits

from conftest import FIX1, FIX2, FIX3, Q1, SEC41_QUERIES

INSTANCES = 500


def instances(n_pref_range, count=INSTANCES, *, need_prefs=False):
    """Seeded (seed, query, index) triples: <= 40 nodes, <= 6 tags, <= 6 query nodes."""
    alphabet = default_alphabet(6)
    seed = 0
    produced = 0
    while produced < count:
        rng = random.Random(seed)
        index = build_index(random_document(rng, max_nodes=40, alphabet=alphabet))
        query = parse_query(random_query(rng, index, max_nodes=6,
                                         n_pref=rng.randint(*n_pref_range), alphabet=alphabet))
        seed += 1
        if need_prefs and not query.pref_nodes:
            continue
        produced += 1
        yield seed - 1, query, index


_PREF_CASES = None


def preference_cases():
    global _PREF_CASES
    if _PREF_CASES is None:
        _PREF_CASES = list(instances((1, 3), need_prefs=True))
    return _PREF_CASES


@pytest.mark.criterion(1, "exact-query oracle equivalence over 500 random instances, < 30 s")
def test_exact_query_equivalence(note):
    start = time.perf_counter()
    mismatches, skipped, nonempty = [], 0, 0
    for seed, query, index in instances((0, 0)):
        try:
            expected = set(all_embeddings(query, index, DEFAULT_BOUND))
        except OracleBoundExceeded:
            skipped += 1
            continue
        got = skytrees(query, index)
        nonempty += bool(expected)
        if set(got) != expected or len(got) != len(expected):
            mismatches.append(seed)
    elapsed = time.perf_counter() - start
    note(f"{INSTANCES} instances ({nonempty} with matches, {skipped} over the bound), "
         f"{len(mismatches)} mismatches, {elapsed:.1f} s")
    assert skipped == 0
    assert mismatches == []
    assert elapsed < 30


@pytest.mark.criterion(2, "preference oracle equivalence, both dominance modes, < 60 s")
def test_preference_equivalence(note):
    start = time.perf_counter()
    mismatches, skipped, partial = [], 0, 0
    for seed, query, index in preference_cases():
        for mode in Dominance:
            try:
                expected = skytrees_oracle(query, index, mode, DEFAULT_BOUND)
            except OracleBoundExceeded:
                skipped += 1
                continue
            got = skytrees(query, index, mode)
            partial += any(len(a.dimension) < len(query.pref_nodes) for a in got)
            if set(got) != set(expected) or len(got) != len(set(got)):
                mismatches.append((seed, mode.value))
    elapsed = time.perf_counter() - start
    note(f"{INSTANCES} instances x 2 modes ({partial} runs with a partly unbound answer, "
         f"{skipped} over the bound), {len(mismatches)} mismatches, {elapsed:.1f} s")
    assert skipped == 0
    assert mismatches == []
    assert elapsed < 60


_C3 = "behavioral fixtures: FIX1 (1,1); FIX2 one answer, d unbound; FIX3 global 1 {d,e}, per-binding 2"


@pytest.mark.criterion(3, _C3)
def test_fixture_fix1(note):
    q = parse_query(Q1)
    answers = skytrees(q, build_index(FIX1))
    note(f"FIX1: {len(answers)} answer(s), bits {[bits(q, a.dimension) for a in answers]} "
         f"(expected one answer with bits '11')")
    assert len(answers) == 1
    assert bits(q, answers[0].dimension) == "11"


@pytest.mark.criterion(3, _C3)
def test_fixture_fix2(note):
    q = parse_query(Q1)
    answers = skytrees(q, build_index(FIX2))
    d = next(n.id for n in q.nodes if n.label == "d")
    note(f"FIX2: {len(answers)} answer(s), d unbound: {[a.binding(d) is None for a in answers]}")
    assert len(answers) == 1
    assert answers[0].binding(d) is None


@pytest.mark.criterion(3, _C3)
def test_fixture_fix3_global(note):
    q = parse_query(Q1)
    answers = skytrees(q, build_index(FIX3), Dominance.GLOBAL)
    dims = [sorted(q.node(i).label for i in a.dimension) for a in answers]
    note(f"FIX3 global: {len(answers)} answer(s), dimensions {dims} (expected one, ['d', 'e'])")
    assert len(answers) == 1
    assert dims == [["d", "e"]]


@pytest.mark.criterion(3, _C3)
def test_fixture_fix3_per_binding(note):
    q = parse_query(Q1)
    answers = skytrees(q, build_index(FIX3), Dominance.PER_BINDING)
    note(f"FIX3 per-binding: {len(answers)} answer(s)")
    assert len(answers) == 2


class _Snapshots:
    def __init__(self):
        self.matcher = None
        self.open: list[str] = []
        self.failures = 0
        self.diverged = 0

    def attempt_started(self, node, current, absent):
        self.open.append(self.matcher.stacks.serialize())

    def attempt_finished(self, node, current, absent, ok):
        before = self.open.pop()
        if not ok:
            self.failures += 1
            self.diverged += self.matcher.stacks.serialize() != before


@pytest.mark.criterion(4, "rollback exactness at every failed find attempt")
def test_rollback_exactness(note):
    listener = _Snapshots()
    cases = [(None, parse_query(Q1), build_index(x)) for x in (FIX1, FIX2, FIX3)]
    for _, query, index in cases + preference_cases():
        listener.matcher = Matcher(query, index, listener=listener)
        listener.matcher.run()
    note(f"{listener.failures} failed attempts checked, {listener.diverged} left stacks changed")
    assert listener.failures > 0
    assert listener.diverged == 0


@pytest.mark.criterion(5, "antichain and maximality of returned dimensions")
def test_antichain_and_maximality(note):
    violations, full_cases = [], 0
    for seed, query, index in preference_cases():
        full = frozenset(query.pref_nodes)
        for mode in Dominance:
            scopes: dict[tuple, set] = {}
            for a in skytrees(query, index, mode):
                scope = () if mode is Dominance.GLOBAL else a.required_part(query)
                scopes.setdefault(scope, set()).add(a.dimension)
            if any(x < y for dims in scopes.values() for x in dims for y in dims):
                violations.append((seed, mode.value, "antichain"))
        if any(e.dimension == full for e in all_embeddings(query, index, DEFAULT_BOUND)):
            full_cases += 1
            if any(a.dimension != full for a in skytrees(query, index, Dominance.GLOBAL)):
                violations.append((seed, "global", "maximality"))
    note(f"{len(preference_cases())} instances, {full_cases} with a full-dimension embedding, "
         f"{len(violations)} violations")
    assert violations == []


@pytest.mark.criterion(6, "listed query strings parse, validate, and round-trip")
def test_listed_queries(note):
    warnings = []
    for text, n_pref in SEC41_QUERIES:
        q = parse_query(text)
        issues = validate_query(q)
        assert not has_errors(issues), text
        assert len(q.pref_nodes) == n_pref, text
        assert parse_query(serialize_query(q)).shape() == q.shape(), text
        warnings += [(text, i.message) for i in issues]
    note(f"{len(SEC41_QUERIES)} queries, warnings: {[m.split(chr(39))[1] for _, m in warnings]}")
    assert len(warnings) == 1
    assert warnings[0][0].startswith("/authors") and "'author'" in warnings[0][1]


def library(n_nodes: int, seed: int = 0) -> str:
    rng = random.Random(seed)
    parts, count = ["<lib>"], 1
    while count < n_nodes:
        pub = rng.random() < 0.5
        parts.append("<book><title/><author><name/></author><year/>"
                     + ("<pub/>" if pub else "") + "</book>")
        count += 6 if pub else 5
    parts.append("</lib>")
    return "".join(parts)


@pytest.mark.criterion(7, "scaling: 100k/50k time ratio in [1.5, 3.0], 100k run < 2 s")
def test_scaling(note):
    query = parse_query("book[/title][/author/name][/year]/pub?")
    assert len(query) == 6
    timings = {}
    for n in (50_000, 100_000):
        index = build_index(library(n))
        runs = []
        for _ in range(5):
            start = time.perf_counter()
            answers = skytrees(query, index)
            runs.append(time.perf_counter() - start)
        assert answers
        timings[n] = min(runs)
    ratio = timings[100_000] / timings[50_000]
    note(f"50k: {timings[50_000]:.3f} s, 100k: {timings[100_000]:.3f} s, ratio {ratio:.2f}")
    assert 1.5 <= ratio <= 3.0
    assert timings[100_000] < 2.0


@pytest.mark.criterion(8, "self-containment gate in check and query")
def test_nsc_gate(tmp_path, capsys, note):
    bad = tmp_path / "bad.xml"
    bad.write_text("<a><a/></a>")
    good = tmp_path / "fix1.xml"
    good.write_text(FIX1)
    codes = (main(["check", str(bad)]), main(["check", str(good)]),
             main(["query", "-f", str(bad), "a"]))
    out = capsys.readouterr().out
    note(f"check bad -> {codes[0]}, check FIX1 -> {codes[1]}, query bad -> {codes[2]}")
    assert codes == (1, 0, 1)
    assert "a(1,4,0) contains a(2,3,1)" in out
