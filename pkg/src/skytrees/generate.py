"""Seeded random documents and queries for differential testing.

Documents never nest a tag inside itself.  Queries are either sampled from a
document (so at least one exact match usually exists) or drawn blind from
the alphabet; their labels never repeat along a root-to-leaf path.
"""

from __future__ import annotations

import random
import string

from .document import DocNode, DocumentIndex, covers
from .query import Axis, NodeKind, QueryNode, QueryTree, serialize_query


def default_alphabet(size: int) -> str:
    return string.ascii_lowercase[:size]


def random_document(rng: random.Random, *, max_nodes: int = 40, alphabet: str = "abcdef",
                    max_fanout: int = 4, max_depth: int = 6) -> str:
    target = rng.randint(1, max_nodes)
    root_tag = rng.choice(alphabet)
    # each entry: [tag, children, path tags]
    root = [root_tag, [], {root_tag}]
    frontier = [root]
    count = 1
    while frontier and count < target:
        node = frontier.pop(rng.randrange(len(frontier)))
        tag, children, path = node
        if len(path) > max_depth:
            continue
        allowed = [t for t in alphabet if t not in path]
        if not allowed:
            continue
        for _ in range(rng.randint(1, max_fanout)):
            if count >= target:
                break
            t = rng.choice(allowed)
            child = [t, [], path | {t}]
            children.append(child)
            frontier.append(child)
            count += 1

    def emit(node) -> str:
        tag, children, _ = node
        if not children:
            return f"<{tag}/>"
        return f"<{tag}>" + "".join(emit(c) for c in children) + f"</{tag}>"

    return emit(root)


def _descendants(index: DocumentIndex, node: DocNode) -> list[DocNode]:
    return [n for n in index.nodes if covers(node.region, n.region)]


def _path_ok(node: QueryNode, label: str) -> bool:
    if any(a.label == label for a in node.ancestors()):
        return False
    return all(d.label != label for d in node.walk() if d is not node)


def random_query(rng: random.Random, index: DocumentIndex | None = None, *,
                 max_nodes: int = 6, n_pref: int = 0, alphabet: str = "abcdef",
                 p_descendant: float = 0.3, p_mutate: float = 0.15,
                 p_blind: float = 0.2) -> str:
    size = rng.randint(max(1, n_pref + 1), max(max_nodes, n_pref + 1))
    if index is None or rng.random() < p_blind:
        root = _blind_tree(rng, size, alphabet, p_descendant)
    else:
        root = _sampled_tree(rng, index, size, p_descendant)
        for node in list(root.walk()):
            if rng.random() < p_mutate:
                label = rng.choice(alphabet)
                if _path_ok(node, label):
                    node.label = label
    tree = QueryTree(root)
    candidates = [n for n in tree.nodes if n.parent is not None]
    for node in rng.sample(candidates, min(n_pref, len(candidates))):
        node.kind = NodeKind.PREFERENCE
    return serialize_query(QueryTree(root))


def _blind_tree(rng: random.Random, size: int, alphabet: str, p_descendant: float) -> QueryNode:
    root = QueryNode(rng.choice(alphabet))
    nodes = [root]
    attempts = 0
    while len(nodes) < size and attempts < 50:
        attempts += 1
        parent = rng.choice(nodes)
        used = {parent.label} | {a.label for a in parent.ancestors()}
        allowed = [t for t in alphabet if t not in used]
        if not allowed:
            continue
        axis = Axis.DESCENDANT if rng.random() < p_descendant else Axis.CHILD
        nodes.append(parent.add(QueryNode(rng.choice(allowed)), axis))
    return root


def _sampled_tree(rng: random.Random, index: DocumentIndex, size: int,
                  p_descendant: float) -> QueryNode:
    doc_root = rng.choice(index.nodes)
    root = QueryNode(doc_root.tag)
    chosen: list[tuple[DocNode, QueryNode]] = [(doc_root, root)]
    taken = {id(doc_root)}
    attempts = 0
    while len(chosen) < size and attempts < 50:
        attempts += 1
        doc_parent, q_parent = rng.choice(chosen)
        options = [n for n in _descendants(index, doc_parent) if id(n) not in taken]
        if not options:
            continue
        pick = rng.choice(options)
        direct = pick.parent is doc_parent
        axis = Axis.CHILD if direct and rng.random() >= p_descendant else Axis.DESCENDANT
        # tags along a document path are distinct, so sampled query paths are too
        child = q_parent.add(QueryNode(pick.tag), axis)
        chosen.append((pick, child))
        taken.add(id(pick))
    return root
