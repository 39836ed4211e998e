"""Twig queries with ``?`` preference markers.

Grammar (whitespace inside names is significant, around tokens it is not)::

    query        := ('/' | '//')? node
    node         := NAME '?'? branch* continuation?
    branch       := axis? '[' axis? node ']'
    continuation := axis node
    axis         := '//' | '/'

A branch and the continuation both hang off the node in front of them, so
``a[/b[/c]/d?[/e?]/f]`` gives ``a -> b``, ``b -> {c, d?}``, ``d? -> {e?, f}``.
A branch without an axis defaults to ``/``; an axis written in front of the
bracket (``T[/x]/[y]``) is accepted as the branch axis.  A leading ``/`` is
accepted and ignored: the root matches wherever its tag occurs.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field

from .errors import QuerySyntaxError

_STOP = "/[]"


class NodeKind(str, enum.Enum):
    REQUIRED = "required"
    PREFERENCE = "preference"


class Axis(str, enum.Enum):
    CHILD = "/"
    DESCENDANT = "//"


@dataclass(eq=False)
class QueryNode:
    label: str
    kind: NodeKind = NodeKind.REQUIRED
    edge: Axis | None = None
    children: list[QueryNode] = field(default_factory=list)
    id: int = -1
    key: str = ""
    parent: QueryNode | None = field(default=None, repr=False)

    @property
    def is_pref(self) -> bool:
        return self.kind is NodeKind.PREFERENCE

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def add(self, child: QueryNode, edge: Axis = Axis.CHILD) -> QueryNode:
        child.edge = edge
        child.parent = self
        self.children.append(child)
        return child

    def walk(self):
        """Pre-order iterator over the subtree."""
        todo = [self]
        while todo:
            node = todo.pop()
            yield node
            todo.extend(reversed(node.children))

    def ancestors(self):
        node = self.parent
        while node is not None:
            yield node
            node = node.parent

    def __repr__(self) -> str:
        return f"QueryNode({self.key or self.label!r})"


class QueryTree:
    """A numbered query tree.

    Node ids are pre-order positions.  ``pref_nodes`` and ``exact_nodes`` are
    in pre-order; ``bit_order`` lists preference nodes in post-order, the
    order in which the bottom-up join accumulates them (``e, d`` for
    ``a/b[/c]/d?[/e?]/f``), and fixes the character order of answer bit
    strings.
    """

    def __init__(self, root: QueryNode):
        root.edge = None
        root.parent = None
        self.root = root
        self.nodes: list[QueryNode] = list(root.walk())
        counts = Counter(n.label for n in self.nodes)
        seen: Counter[str] = Counter()
        for i, node in enumerate(self.nodes):
            node.id = i
            for child in node.children:
                child.parent = node
            seen[node.label] += 1
            node.key = node.label if counts[node.label] == 1 else f"{node.label}[{seen[node.label]}]"
        self.pref_nodes = tuple(n.id for n in self.nodes if n.is_pref)
        self.exact_nodes = tuple(n.id for n in self.nodes if not n.is_pref)
        self.bit_order = tuple(n.id for n in _postorder(root) if n.is_pref)
        self.has_duplicate_labels = any(c > 1 for c in counts.values())

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, node_id: int) -> QueryNode:
        return self.nodes[node_id]

    def shape(self):
        """Hashable structural signature, for isomorphism checks."""
        def sig(n: QueryNode):
            return (n.label, n.kind.value, n.edge.value if n.edge else None,
                    tuple(sig(c) for c in n.children))
        return sig(self.root)

    def __str__(self) -> str:
        return serialize_query(self)


def _postorder(root: QueryNode) -> list[QueryNode]:
    out: list[QueryNode] = []
    todo: list[tuple[QueryNode, bool]] = [(root, False)]
    while todo:
        node, done = todo.pop()
        if done:
            out.append(node)
            continue
        todo.append((node, True))
        todo.extend((c, False) for c in reversed(node.children))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def axis(self) -> Axis | None:
        if self.peek() != "/":
            return None
        if self.text.startswith("//", self.pos):
            self.pos += 2
            return Axis.DESCENDANT
        self.pos += 1
        return Axis.CHILD

    def name(self) -> tuple[str, bool]:
        self.skip_ws()
        begin = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in _STOP:
            self.pos += 1
        raw = self.text[begin:self.pos].strip()
        pref = raw.endswith("?")
        if pref:
            raw = raw[:-1].rstrip()
        if not raw:
            found = self.text[self.pos] if self.pos < len(self.text) else "end of query"
            raise QuerySyntaxError(f"expected a node name, found {found!r}", begin)
        return raw, pref

    def branch(self, outer: Axis | None) -> QueryNode:
        self.pos += 1  # '['
        inner = self.axis()
        child = self.node()
        child.edge = inner or outer or Axis.CHILD
        if self.peek() != "]":
            raise QuerySyntaxError("expected ']'", self.pos)
        self.pos += 1
        return child

    def node(self) -> QueryNode:
        label, pref = self.name()
        node = QueryNode(label, NodeKind.PREFERENCE if pref else NodeKind.REQUIRED)
        while True:
            ch = self.peek()
            if ch == "[":
                child = self.branch(None)
                node.add(child, child.edge)
                continue
            if ch != "/":
                return node
            mark = self.pos
            axis = self.axis()
            if self.peek() == "[":
                child = self.branch(axis)
                node.add(child, child.edge)
                continue
            if self.peek() in ("", "]"):
                raise QuerySyntaxError("axis must be followed by a node", mark)
            child = self.node()
            node.add(child, axis)
            return node


def parse_query(text: str) -> QueryTree:
    parser = _Parser(text)
    if not parser.peek():
        raise QuerySyntaxError("empty query", 0)
    parser.axis()
    root = parser.node()
    if parser.peek():
        raise QuerySyntaxError(f"unexpected {parser.peek()!r}", parser.pos)
    return QueryTree(root)


def serialize_query(query: QueryTree | QueryNode) -> str:
    """Canonical form: all children but the last as branches, the last as continuation."""
    root = query.root if isinstance(query, QueryTree) else query

    def emit(node: QueryNode) -> str:
        out = node.label + ("?" if node.is_pref else "")
        for child in node.children[:-1]:
            out += f"[{child.edge.value}{emit(child)}]"
        if node.children:
            last = node.children[-1]
            out += last.edge.value + emit(last)
        return out

    return emit(root)


@dataclass(frozen=True)
class Issue:
    severity: str  # "error" | "warning"
    message: str

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def __str__(self) -> str:
        return f"{self.severity}: {self.message}"


def validate_query(query: QueryTree) -> list[Issue]:
    issues: list[Issue] = []
    if query.root.is_pref:
        issues.append(Issue("error", f"root {query.root.label!r} cannot be a preference node"))
    for node in query.nodes:
        for anc in node.ancestors():
            if anc.label == node.label:
                issues.append(Issue(
                    "error",
                    f"label {node.label!r} repeats on a root-to-leaf path "
                    "(queries must be non-recursive)",
                ))
                break
    by_label: dict[str, list[QueryNode]] = {}
    for node in query.nodes:
        by_label.setdefault(node.label, []).append(node)
    for label, group in by_label.items():
        if len(group) < 2:
            continue
        unrelated = any(
            a is not b and a not in b.ancestors() and b not in a.ancestors()
            for a in group for b in group
        )
        if unrelated:
            issues.append(Issue(
                "warning",
                f"label {label!r} is used by {len(group)} query nodes; answers binding "
                "them to the same document node are discarded",
            ))
    return issues


def has_errors(issues: list[Issue]) -> bool:
    return any(i.is_error for i in issues)
