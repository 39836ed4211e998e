"""Joining the stacks into answers and keeping the non-dominated ones.

A tuple's dimension is the set of preference nodes it actually binds; one
tuple dominates another when its dimension is a strict superset.  Pruning
happens while the stacks are joined bottom-up, but only among tuples whose
remaining joins are provably identical:

* during a join, tuples that share ``(self, parent)``;
* once every child of a node is joined, tuples that share ``parent``.

Pruning across different join keys could drop an answer that is
incomparable at the root.  Pruning is skipped entirely when the query repeats
a label, since a dominating tuple may later fail the injectivity check that
its dominated sibling would pass.  The root-level
answer set is always filtered again after injectivity.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from ._gc import without_gc
from .document import DocNode
from .engine import ABSENT, MatchTuple, Stacks
from .query import QueryNode, QueryTree


class Dominance(str, enum.Enum):
    GLOBAL = "global"
    PER_BINDING = "per_binding"


def dim(t: MatchTuple) -> frozenset[int]:
    return t.bound_prefs


def dominates(t1: MatchTuple, t2: MatchTuple, mode: Dominance = Dominance.GLOBAL) -> bool:
    if Dominance(mode) is Dominance.PER_BINDING and t1.exactnode != t2.exactnode:
        return False
    return dim(t2) < dim(t1)


def filter_skyline(stack: Iterable[MatchTuple], mode: Dominance = Dominance.GLOBAL, *,
                   by_self: bool = False) -> list[MatchTuple]:
    """Drop duplicates and every tuple dominated by another of its group.

    Groups share ``parent`` (and ``self`` when ``by_self``); under
    per-binding dominance they also share the required-node slots.
    """
    stack = list(dict.fromkeys(stack))
    if len({t.bound_prefs for t in stack}) <= 1:
        return stack
    per_binding = Dominance(mode) is Dominance.PER_BINDING
    groups: dict[tuple, dict[MatchTuple, None]] = {}
    for t in stack:
        key = (t.parent, t.occurrence if by_self else None, t.exactnode if per_binding else None)
        groups.setdefault(key, {})[t] = None
    out = []
    for members in groups.values():
        dims = {t.bound_prefs for t in members}
        if len(dims) == 1:
            out.extend(members)
            continue
        out.extend(t for t in members if not any(t.bound_prefs < d for d in dims))
    return out


def join_and_filter(parent_stack: Iterable[MatchTuple], child_stack: Iterable[MatchTuple],
                    mode: Dominance = Dominance.GLOBAL, *, prune: bool = True) -> list[MatchTuple]:
    """Hash equijoin of a node's tuples with one child's tuples.

    A parent tuple joins the child tuples whose ``parent`` is its own
    occurrence, or, when it is a skipped (``Φ``) tuple, its anchor.
    """
    by_parent: dict[object, list[MatchTuple]] = {}
    for tc in child_stack:
        by_parent.setdefault(tc.parent, []).append(tc)
    joined = []
    for tp in parent_stack:
        key = tp.parent if tp.occurrence is ABSENT else tp.occurrence
        for tc in by_parent.get(key, ()):
            joined.append(MatchTuple(tp.occurrence, tp.parent,
                                     tp.exactnode + tc.exactnode,
                                     tp.prefnode + tc.prefnode,
                                     bound=tp.bound_prefs | tc.bound_prefs))
    if prune:
        return filter_skyline(joined, mode, by_self=True)
    return list(dict.fromkeys(joined))


@dataclass(frozen=True)
class Answer:
    """One match: ``bindings[i]`` is the document node bound to query node ``i``
    (``None`` for an unbound preference node)."""

    bindings: tuple[DocNode | None, ...]
    dimension: frozenset[int]

    def binding(self, node_id: int) -> DocNode | None:
        return self.bindings[node_id]

    def required_part(self, query: QueryTree) -> tuple[DocNode | None, ...]:
        return tuple(self.bindings[i] for i in query.exact_nodes)

    def is_injective(self) -> bool:
        bound = [b for b in self.bindings if b is not None]
        return len(bound) == len(set(bound))

    def sort_key(self):
        return (-len(self.dimension),
                tuple(b.start if b is not None else 0 for b in self.bindings))


def materialize(query: QueryTree, t: MatchTuple) -> Answer:
    bindings: list[DocNode | None] = [None] * len(query)
    for qid, occ in t.exactnode + t.prefnode:
        bindings[qid] = None if occ is ABSENT else occ
    return Answer(tuple(bindings), dim(t))


def select_skytrees(answers: Sequence[Answer], query: QueryTree,
                    mode: Dominance = Dominance.GLOBAL) -> list[Answer]:
    per_binding = Dominance(mode) is Dominance.PER_BINDING
    groups: dict[tuple, list[Answer]] = {}
    for a in answers:
        groups.setdefault(a.required_part(query) if per_binding else (), []).append(a)
    out = []
    for members in groups.values():
        dims = {a.dimension for a in members}
        out.extend(a for a in members if not any(a.dimension < d for d in dims))
    return out


@without_gc
def generate_solution(query: QueryTree, stacks: Stacks, mode: Dominance = Dominance.GLOBAL, *,
                      skyline: bool = True) -> list[Answer]:
    """Join the stacks bottom-up and return the answers, best first.

    With ``skyline=False`` every match is returned (no dominance filtering).
    """
    prune = skyline and not query.has_duplicate_labels

    def resolve(q: QueryNode) -> list[MatchTuple]:
        tuples = list(dict.fromkeys(stacks[q]))
        for child in q.children:
            tuples = join_and_filter(tuples, resolve(child), mode, prune=prune)
        if prune and q.children:
            tuples = filter_skyline(tuples, mode)
        return tuples

    answers = list(dict.fromkeys(materialize(query, t) for t in resolve(query.root)))
    answers = [a for a in answers if a.is_injective()]
    if skyline:
        answers = select_skytrees(answers, query, mode)
    return sorted(answers, key=Answer.sort_key)


def bits(query: QueryTree, dimension: frozenset[int]) -> str:
    return "".join("1" if qid in dimension else "0" for qid in query.bit_order)


def _node_json(node: DocNode | None):
    if node is None:
        return None
    return {"start": node.start, "end": node.end, "level": node.level, "tag": node.tag}


def answer_to_json(query: QueryTree, answer: Answer) -> dict:
    return {
        "query": str(query),
        "bindings": {query.node(i).key: _node_json(b) for i, b in enumerate(answer.bindings)},
        "dimension": [query.node(i).key for i in query.bit_order if i in answer.dimension],
        "bits": bits(query, answer.dimension),
    }


def answer_to_text(query: QueryTree, answer: Answer, number: int = 1) -> str:
    dims = ",".join(query.node(i).key for i in query.bit_order if i in answer.dimension)
    lines = [f"answer {number} bits={bits(query, answer.dimension)} dimension={{{dims}}}"]

    def emit(q: QueryNode, depth: int) -> None:
        bound = answer.bindings[q.id]
        mark = "?" if q.is_pref else ""
        where = str(bound.region) if bound is not None else "-"
        lines.append(f"{'  ' * depth}{q.key}{mark} {where}")
        for child in q.children:
            emit(child, depth + 1)

    emit(query.root, 1)
    return "\n".join(lines)
