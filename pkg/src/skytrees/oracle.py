"""Brute-force reference answers for differential testing.

Every subset of preference nodes defines a variant of the query: skipped nodes
are removed and their children re-attached to the nearest kept ancestor with
a descendant edge.  Each variant is matched by plain backtracking, using the
documents' parent pointers rather than region labels, and the union is then
filtered by dominance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod

from .document import DocNode, DocumentIndex
from .errors import OracleBoundExceeded
from .query import Axis, QueryTree
from .skyline import Answer, Dominance

DEFAULT_BOUND = 10**7


@dataclass(frozen=True)
class QueryVariant:
    query: QueryTree
    keep: frozenset[int]
    # (node id, kept anchor id or None for the root, axis to the anchor), pre-order
    steps: tuple[tuple[int, int | None, Axis | None], ...]


def make_variant(query: QueryTree, keep: frozenset[int] | set[int]) -> QueryVariant:
    keep = frozenset(keep)
    steps = []
    for node in query.nodes:
        if node.is_pref and node.id not in keep:
            continue
        if node.parent is None:
            steps.append((node.id, None, None))
            continue
        anchor = node.parent
        edge = node.edge
        while anchor.is_pref and anchor.id not in keep:
            anchor = anchor.parent
            edge = Axis.DESCENDANT
        steps.append((node.id, anchor.id, edge))
    return QueryVariant(query, keep, tuple(steps))


def variants(query: QueryTree) -> list[QueryVariant]:
    prefs = query.pref_nodes
    out = []
    for r in range(len(prefs) + 1):
        for keep in itertools.combinations(prefs, r):
            out.append(make_variant(query, frozenset(keep)))
    return out


def _is_ancestor(a: DocNode, n: DocNode) -> bool:
    p = n.parent
    while p is not None:
        if p is a:
            return True
        p = p.parent
    return False


def _related(axis: Axis, anchor: DocNode, node: DocNode) -> bool:
    if axis is Axis.CHILD:
        return node.parent is anchor
    return _is_ancestor(anchor, node)


def enumerate_embeddings(variant: QueryVariant, index: DocumentIndex,
                         bound: int = DEFAULT_BOUND) -> list[Answer]:
    query = variant.query
    candidates = [[n for n in index.nodes if n.tag == query.node(qid).label]
                  for qid, _, _ in variant.steps]
    product = prod(len(c) for c in candidates)
    if product > bound:
        raise OracleBoundExceeded(product, bound)
    found: list[Answer] = []
    binding: dict[int, DocNode] = {}
    used: set[int] = set()

    def extend(i: int) -> None:
        if i == len(variant.steps):
            found.append(Answer(
                tuple(binding.get(n.id) for n in query.nodes),
                frozenset(q for q in binding if query.node(q).is_pref),
            ))
            return
        qid, anchor, axis = variant.steps[i]
        for cand in candidates[i]:
            if id(cand) in used:
                continue
            if anchor is not None and not _related(axis, binding[anchor], cand):
                continue
            binding[qid] = cand
            used.add(id(cand))
            extend(i + 1)
            used.discard(id(cand))
            del binding[qid]

    extend(0)
    return found


def all_embeddings(query: QueryTree, index: DocumentIndex, bound: int = DEFAULT_BOUND) -> list[Answer]:
    seen: dict[Answer, None] = {}
    for variant in variants(query):
        for answer in enumerate_embeddings(variant, index, bound):
            seen[answer] = None
    return list(seen)


def skytrees_oracle(query: QueryTree, index: DocumentIndex, mode: Dominance = Dominance.GLOBAL,
                    bound: int = DEFAULT_BOUND) -> list[Answer]:
    answers = all_embeddings(query, index, bound)
    per_binding = Dominance(mode) is Dominance.PER_BINDING
    required = query.exact_nodes

    def scope(a: Answer) -> tuple:
        return tuple(id(a.bindings[i]) for i in required) if per_binding else ()

    # comparing against distinct (scope, dimension) pairs is enough
    signatures = {(scope(a), a.dimension) for a in answers}
    kept = []
    for a in answers:
        mine = scope(a)
        if not any(s == mine and a.dimension < d for s, d in signatures):
            kept.append(a)
    return kept


def verify_answer(query: QueryTree, answer: Answer) -> list[str]:
    """Re-check one answer against the matching conditions; returns problems found."""
    problems = []
    bound = [b for b in answer.bindings if b is not None]
    if len(bound) != len({id(b) for b in bound}):
        problems.append("two query nodes share a document node")
    for node in query.nodes:
        b = answer.bindings[node.id]
        if b is None:
            if not node.is_pref:
                problems.append(f"required node {node.key} is unbound")
            continue
        if b.tag != node.label:
            problems.append(f"{node.key} bound to a {b.tag!r} node")
        if node.parent is None:
            continue
        anchor, axis = node.parent, node.edge
        while answer.bindings[anchor.id] is None:
            anchor, axis = anchor.parent, Axis.DESCENDANT
        if not _related(axis, answer.bindings[anchor.id], b):
            problems.append(f"{node.key} is not {'a child' if axis is Axis.CHILD else 'a descendant'} "
                            f"of {anchor.key}'s binding")
    if answer.dimension != frozenset(i for i in query.pref_nodes if answer.bindings[i] is not None):
        problems.append("dimension does not match the bound preference nodes")
    return problems
