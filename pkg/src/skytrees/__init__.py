"""Structural-preference twig queries over XML, answered as non-dominated match trees."""

from .document import (DocNode, DocumentIndex, RegionLabel, TextMode, assign_region_labels,
                       build_index, check_no_self_containment, covers, is_child, parse_document)
from .engine import ABSENT, ROOT, MatchTuple, Matcher, Stacks, evaluate
from .query import Axis, NodeKind, QueryNode, QueryTree, parse_query, serialize_query, validate_query
from .skyline import Answer, Dominance, generate_solution

__all__ = [
    "ABSENT", "ROOT", "Answer", "Axis", "DocNode", "DocumentIndex", "Dominance", "MatchTuple",
    "Matcher", "NodeKind", "QueryNode", "QueryTree", "RegionLabel", "Stacks", "TextMode",
    "assign_region_labels", "build_index", "check_no_self_containment", "covers", "evaluate",
    "generate_solution", "is_child", "parse_document", "parse_query", "serialize_query",
    "skytrees", "validate_query",
]


def skytrees(query: QueryTree | str, index: DocumentIndex,
             mode: Dominance | str = Dominance.GLOBAL, *, skyline: bool = True) -> list[Answer]:
    """Evaluate ``query`` on ``index`` and return its answers, best first."""
    if isinstance(query, str):
        query = parse_query(query)
    return generate_solution(query, evaluate(query, index), Dominance(mode), skyline=skyline)
