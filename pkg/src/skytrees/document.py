"""XML ingestion and the region-coded document index.

Every element gets a ``(start, end, level)`` label from one counter that ticks
on entry and on exit of a depth-first walk, so ancestorship reduces to integer
interval containment.  Occurrences of each tag are kept in a list sorted by
``start`` (the per-tag occurrence list the matcher walks).
"""

from __future__ import annotations

import bisect
import enum
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

from ._gc import without_gc
from .errors import EmptyDocumentError, IndexDumpError, XmlSyntaxError

_WS = re.compile(r"\s+")


class TextMode(str, enum.Enum):
    IGNORE = "ignore"
    AS_LEAF = "as_leaf"


class RegionLabel(NamedTuple):
    start: int
    end: int
    level: int

    def __str__(self) -> str:
        return f"({self.start},{self.end},{self.level})"


@dataclass(eq=False)
class TreeNode:
    """Plain ordered element tree produced by :func:`parse_document`."""

    tag: str
    children: list[TreeNode] = field(default_factory=list)
    text: str | None = None

    def size(self) -> int:
        total, todo = 0, [self]
        while todo:
            node = todo.pop()
            total += 1
            todo.extend(node.children)
        return total


class DocNode:
    """One labelled document node.  Compared and hashed by identity."""

    __slots__ = ("tag", "region", "parent", "text", "order")

    def __init__(self, tag: str, region: RegionLabel, parent: DocNode | None,
                 text: str | None = None, order: int = 0):
        self.tag = tag
        self.region = region
        self.parent = parent
        self.text = text
        self.order = order

    @property
    def start(self) -> int:
        return self.region.start

    @property
    def end(self) -> int:
        return self.region.end

    @property
    def level(self) -> int:
        return self.region.level

    def __repr__(self) -> str:
        return f"{self.tag}{self.region}"


def covers(r: RegionLabel, n: RegionLabel) -> bool:
    """True iff ``r`` is a proper ancestor of ``n``."""
    return r.start < n.start and n.end < r.end


def is_child(p: RegionLabel, c: RegionLabel) -> bool:
    return covers(p, c) and c.level == p.level + 1


def parse_document(xml_text: str | bytes, text_mode: TextMode | str = TextMode.AS_LEAF) -> TreeNode:
    """Parse XML into a :class:`TreeNode` tree.

    Attributes, comments and processing instructions are dropped.  With
    ``text_mode="as_leaf"`` every non-blank text run becomes a leaf whose tag
    is the text with surrounding blanks trimmed and inner blank runs collapsed
    to one space, so ``<author>Sophie Cluet</author>`` yields a child tagged
    ``Sophie Cluet``.
    """
    text_mode = TextMode(text_mode)
    raw = xml_text.decode("utf-8", errors="replace") if isinstance(xml_text, bytes) else xml_text
    if not raw.strip():
        raise EmptyDocumentError()
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        line, column = getattr(exc, "position", (None, None))
        if "no element found" in str(exc) and not re.search(r"<[^?!]", raw):
            raise EmptyDocumentError() from exc
        raise XmlSyntaxError(str(exc).split(":")[0], line, column) from exc

    def text_leaf(run: str | None) -> TreeNode | None:
        if text_mode is TextMode.IGNORE or run is None:
            return None
        value = _WS.sub(" ", run).strip()
        return TreeNode(value, text=value) if value else None

    out = TreeNode(root.tag)
    todo = [(root, out)]
    while todo:
        elem, node = todo.pop()
        if elem.text and elem.text.strip():
            node.text = _WS.sub(" ", elem.text).strip()
        leaf = text_leaf(elem.text)
        if leaf is not None:
            node.children.append(leaf)
        for sub in elem:
            child = TreeNode(sub.tag)
            node.children.append(child)
            todo.append((sub, child))
            leaf = text_leaf(sub.tail)
            if leaf is not None:
                node.children.append(leaf)
    return out


class DocumentIndex:
    """Region-labelled nodes plus the per-tag occurrence lists.

    Treat as immutable once built; one index can serve many evaluations.
    """

    def __init__(self, nodes: list[DocNode]):
        self.nodes = nodes
        self.tq_lists: dict[str, list[DocNode]] = {}
        for node in nodes:
            self.tq_lists.setdefault(node.tag, []).append(node)
        self._starts = {tag: [n.start for n in occ] for tag, occ in self.tq_lists.items()}

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self) -> Iterator[DocNode]:
        return iter(self.nodes)

    @property
    def root(self) -> DocNode:
        return self.nodes[0]

    def tq(self, tag: str) -> list[DocNode]:
        return self.tq_lists.get(tag, [])

    def starts(self, tag: str) -> list[int]:
        return self._starts.get(tag, [])

    def occurrences_within(self, tag: str, region: RegionLabel) -> list[DocNode]:
        starts = self.starts(tag)
        lo = bisect.bisect_right(starts, region.start)
        hi = bisect.bisect_left(starts, region.end, lo)
        return self.tq(tag)[lo:hi]

    def dump(self) -> str:
        """``start end level tag`` per node, sorted by start."""
        return "".join(f"{n.start} {n.end} {n.level} {n.tag}\n" for n in self.nodes)

    @classmethod
    def from_dump(cls, text: str) -> DocumentIndex:
        rows = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            parts = line.split(" ", 3)
            if len(parts) != 4:
                raise IndexDumpError(f"line {lineno}: expected 'start end level tag'")
            try:
                region = RegionLabel(int(parts[0]), int(parts[1]), int(parts[2]))
            except ValueError:
                raise IndexDumpError(f"line {lineno}: non-integer label") from None
            rows.append((region, parts[3]))
        if not rows:
            raise EmptyDocumentError("index dump is empty")
        rows.sort(key=lambda row: row[0].start)
        nodes: list[DocNode] = []
        open_nodes: list[DocNode] = []
        for order, (region, tag) in enumerate(rows):
            while open_nodes and open_nodes[-1].end < region.start:
                open_nodes.pop()
            parent = open_nodes[-1] if open_nodes else None
            if parent is None and nodes:
                raise IndexDumpError(f"node {tag}{region} lies outside the root interval")
            if parent is not None and not is_child(parent.region, region):
                raise IndexDumpError(f"node {tag}{region} is not nested under {parent!r}")
            node = DocNode(tag, region, parent, order=order)
            nodes.append(node)
            open_nodes.append(node)
        return cls(nodes)


def assign_region_labels(root: TreeNode) -> DocumentIndex:
    counter = 1
    nodes: list[DocNode] = []
    # frames: (tree node, parent DocNode, level, entered?)
    todo: list[tuple[TreeNode, DocNode | None, int, bool]] = [(root, None, 0, False)]
    pending: list[DocNode] = []
    while todo:
        tree, parent, level, entered = todo.pop()
        if not entered:
            node = DocNode(tree.tag, RegionLabel(counter, 0, level), parent, tree.text, len(nodes))
            counter += 1
            nodes.append(node)
            pending.append(node)
            todo.append((tree, parent, level, True))
            for child in reversed(tree.children):
                todo.append((child, node, level + 1, False))
        else:
            node = pending.pop()
            node.region = RegionLabel(node.start, counter, level)
            counter += 1
    return DocumentIndex(nodes)


@without_gc
def build_index(xml_text: str | bytes, text_mode: TextMode | str = TextMode.AS_LEAF) -> DocumentIndex:
    return assign_region_labels(parse_document(xml_text, text_mode))


def check_no_self_containment(index: DocumentIndex) -> list[tuple[DocNode, DocNode]]:
    """Every (ancestor, descendant) pair sharing a tag; empty means admissible."""
    violations = []
    path: list[DocNode] = []
    for node in index.nodes:
        while path and path[-1].end < node.start:
            path.pop()
        for anc in path:
            if anc.tag == node.tag:
                violations.append((anc, node))
        path.append(node)
    return violations
