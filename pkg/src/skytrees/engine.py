"""Stack-encoded matching of preference twig queries.

``evaluate`` walks the root's occurrence list and calls :meth:`Matcher.find`
on each occurrence.  ``find`` processes the children of a query node one at a
time; for a preference child it first looks for partial solutions that skip
the child (its own children anchored to the current occurrence) and then for
solutions at each occurrence of the child covered by the current
occurrence.  Successful candidates are pushed as ``<self, parent>`` tuples
onto per-node stacks; when a required child has no solution at all, every
tuple pushed since the attempt began is rolled back.

Skipping a preference node contracts its children onto the nearest matched
ancestor: they only need to be covered by that ancestor's occurrence, whatever
the edge kind was.
"""

from __future__ import annotations

import bisect
import enum
from typing import Callable, Iterator, Protocol

from ._gc import without_gc
from .document import DocNode, DocumentIndex, covers, is_child
from .query import Axis, QueryNode, QueryTree


class Marker(enum.Enum):
    ABSENT = "Φ"
    ROOT = "root"

    # identity hashing; Enum's default hashes the name in Python code
    __hash__ = object.__hash__

    def __repr__(self) -> str:
        return self.value


ABSENT = Marker.ABSENT
ROOT = Marker.ROOT
_EMPTY: frozenset[int] = frozenset()

Occurrence = DocNode | Marker
Slots = tuple[tuple[int, Occurrence], ...]


def format_occurrence(occ: Occurrence) -> str:
    return occ.value if isinstance(occ, Marker) else f"{occ.tag}{occ.region}"


class MatchTuple:
    """Stack entry.  ``exactnode``/``prefnode`` hold ``(query node id, occurrence)``
    slots in query pre-order; the matcher fills only the owner's own slot and
    the join concatenates the rest.  ``push_count`` is not part of equality."""

    __slots__ = ("occurrence", "parent", "exactnode", "prefnode", "push_count", "_hash", "_bound")

    def __init__(self, occurrence: Occurrence, parent: Occurrence, exactnode: Slots = (),
                 prefnode: Slots = (), push_count: int = 0, bound: frozenset[int] | None = None):
        self.occurrence = occurrence
        self.parent = parent
        self.exactnode = exactnode
        self.prefnode = prefnode
        self.push_count = push_count
        self._hash = None
        self._bound = bound

    @property
    def bound_prefs(self) -> frozenset[int]:
        """Ids of the preference nodes this tuple actually binds."""
        if self._bound is None:
            self._bound = frozenset(qid for qid, occ in self.prefnode if occ is not ABSENT)
        return self._bound

    def _key(self):
        return (self.occurrence, self.parent, self.exactnode, self.prefnode)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatchTuple):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self) -> str:
        return (f"MatchTuple({self.occurrence!r}, {self.parent!r}, {self.exactnode!r}, "
                f"{self.prefnode!r}, push_count={self.push_count})")

    def __str__(self) -> str:
        return f"<{format_occurrence(self.occurrence)}, {format_occurrence(self.parent)}>"


class SolutionStack:
    def __init__(self, node: QueryNode):
        self.node = node
        self.items: list[MatchTuple] = []

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[MatchTuple]:
        return iter(self.items)

    @property
    def top(self) -> MatchTuple | None:
        return self.items[-1] if self.items else None


class Stacks:
    """One stack per query node plus a push journal for checkpoint rollback."""

    def __init__(self, query: QueryTree, trace: Callable[[str], None] | None = None):
        self.query = query
        self.by_id = [SolutionStack(n) for n in query.nodes]
        self._is_pref = [n.is_pref for n in query.nodes]
        self._journal: list[int] = []
        self._pushes = 0
        self._trace = trace

    def __getitem__(self, node: QueryNode | int) -> SolutionStack:
        return self.by_id[node if isinstance(node, int) else node.id]

    def push(self, node: QueryNode, occurrence: Occurrence, parent: Occurrence) -> MatchTuple:
        self._pushes += 1
        nid = node.id
        slot = ((nid, occurrence),)
        if self._is_pref[nid]:
            tup = MatchTuple(occurrence, parent, (), slot, self._pushes,
                             _EMPTY if occurrence is ABSENT else frozenset((nid,)))
        else:
            tup = MatchTuple(occurrence, parent, slot, (), self._pushes, _EMPTY)
        self.by_id[nid].items.append(tup)
        self._journal.append(nid)
        if self._trace:
            self._trace(f"PUSH {node.key} {tup}")
        return tup

    def checkpoint(self) -> int:
        return len(self._journal)

    def clean_stack(self, node: QueryNode, checkpoint: int) -> int:
        """Pop every tuple pushed since ``checkpoint``; they all belong to the
        stacks of ``node``'s strict descendants.  Returns the number popped."""
        popped: dict[int, int] = {}
        while len(self._journal) > checkpoint:
            node_id = self._journal.pop()
            self.by_id[node_id].items.pop()
            popped[node_id] = popped.get(node_id, 0) + 1
        if self._trace:
            for node_id, count in sorted(popped.items()):
                self._trace(f"POP {self.query.node(node_id).key} {count}")
        return sum(popped.values())

    def serialize(self) -> str:
        lines = []
        for stack in self.by_id:
            body = " ".join(str(t) for t in stack)
            lines.append(f"{stack.node.key}: {body}")
        return "\n".join(lines)

    def total(self) -> int:
        return sum(len(s) for s in self.by_id)


class Cursor:
    """Position into one node's occurrence list.

    ``seek`` moves to the first occurrence starting after a given position.
    Moving backwards is allowed (contraction re-enters regions already
    walked) and counted in ``rewinds``; ``advances`` counts forward steps.
    """

    def __init__(self, occurrences: list[DocNode], starts: list[int]):
        self.items = occurrences
        self.starts = starts
        self.pos = 0
        self.advances = 0
        self.rewinds = 0

    @property
    def head(self) -> DocNode | None:
        return self.items[self.pos] if self.pos < len(self.items) else None

    def advance(self) -> None:
        self.pos += 1
        self.advances += 1

    def seek(self, after_start: int) -> None:
        target = bisect.bisect_right(self.starts, after_start)
        if target < self.pos:
            self.rewinds += 1
        else:
            self.advances += target - self.pos
        self.pos = target


class AttemptListener(Protocol):
    def attempt_started(self, node: QueryNode, current: DocNode, absent: bool) -> None: ...

    def attempt_finished(self, node: QueryNode, current: DocNode, absent: bool, ok: bool) -> None: ...


class Matcher:
    def __init__(self, query: QueryTree, index: DocumentIndex, *,
                 trace: Callable[[str], None] | None = None,
                 listener: AttemptListener | None = None):
        if query.root.is_pref:
            raise ValueError("the query root must be a required node")
        self.query = query
        self.index = index
        self.trace = trace
        self.listener = listener
        self.stacks = Stacks(query, trace)
        self.cursors = [Cursor(index.tq(n.label), index.starts(n.label)) for n in query.nodes]

    def run(self) -> Stacks:
        root = self.query.root
        if any(not self.index.tq(self.query.node(i).label) for i in self.query.exact_nodes):
            return self.stacks
        cursor = self.cursors[root.id]
        while (occ := cursor.head) is not None:
            if self.trace:
                self.trace(f"PHASE 2 {root.key} {format_occurrence(occ)}")
            if self.find(root, occ, occ.end):
                self.stacks.push(root, occ, ROOT)
            cursor.advance()
        return self.stacks

    def find(self, q: QueryNode, current: DocNode, max_position: int, absent: bool = False) -> bool:
        """Does the subquery at ``q`` have a partial solution here?

        ``current`` is an occurrence of ``q`` or, with ``absent=True``, the
        occurrence of the nearest matched ancestor while ``q`` is skipped.
        Only occurrences starting before ``max_position`` are considered.
        """
        if q.is_leaf:
            return True
        if self.listener:
            self.listener.attempt_started(q, current, absent)
        mark = self.stacks.checkpoint()
        ok = True
        for child in q.children:
            if not self._match_child(child, current, max_position, absent):
                self.stacks.clean_stack(q, mark)
                ok = False
                break
        if self.listener:
            self.listener.attempt_finished(q, current, absent, ok)
        return ok

    def _match_child(self, child: QueryNode, current: DocNode, max_position: int, absent: bool) -> bool:
        found = False
        if child.is_pref:
            # Phase 1: the child skipped.  The whole region of ``current`` is
            # searched, because the skipped child's own children may sit in
            # different gaps between (or inside) occurrences of the child.
            if self.trace:
                self.trace(f"PHASE 1 {child.key} {format_occurrence(current)}")
            if self.find(child, current, max_position, absent=True):
                self.stacks.push(child, ABSENT, current)
                found = True
        # Phase 2: occurrences of the child covered by ``current``.
        cursor = self.cursors[child.id]
        cursor.seek(current.start)
        parent_region = current.region
        contracted = absent or child.edge is Axis.DESCENDANT
        while (occ := cursor.head) is not None and occ.start < max_position:
            if contracted:
                edge_ok = covers(parent_region, occ.region)
            else:
                edge_ok = is_child(parent_region, occ.region)
            if edge_ok:
                if self.trace:
                    self.trace(f"PHASE 2 {child.key} {format_occurrence(occ)}")
                if self.find(child, occ, occ.end):
                    self.stacks.push(child, occ, current)
                    found = True
            cursor.advance()
        return found

    def cursor_stats(self) -> tuple[int, int]:
        """(total forward advances, total rewinds) over all cursors."""
        return (sum(c.advances for c in self.cursors), sum(c.rewinds for c in self.cursors))


@without_gc
def evaluate(query: QueryTree, index: DocumentIndex, *,
             trace: Callable[[str], None] | None = None,
             listener: AttemptListener | None = None) -> Stacks:
    return Matcher(query, index, trace=trace, listener=listener).run()
