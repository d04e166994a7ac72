"""Distributed alphabets, process trees, architectures, and trace machinery.

Letters and processes are interned string tokens with a stable order (the
order they were declared in), so every derived structure iterates
deterministically. All values are immutable after construction and safe for
concurrent read-only use.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import InputError, TraceClassTooLarge

# Safety bound for trace_closure; it is a test oracle, not a production path.
MAX_TRACE_CLASS = 10 ** 6


@dataclass(frozen=True)
class DistributedAlphabet:
    """An alphabet together with the set of processes reading each letter.

    ``domain`` maps every letter to the nonempty set of participating
    processes. ``controllable`` letters must be local (single-process
    domain): the system can only decide local actions.
    """

    letters: tuple[str, ...]
    processes: tuple[str, ...]
    domain: dict[str, frozenset[str]]
    controllable: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        object.__setattr__(self, "processes", tuple(self.processes))
        object.__setattr__(
            self, "domain", {a: frozenset(ps) for a, ps in self.domain.items()}
        )
        object.__setattr__(self, "controllable", frozenset(self.controllable))
        if len(set(self.letters)) != len(self.letters):
            raise InputError("duplicate letters")
        if len(set(self.processes)) != len(self.processes):
            raise InputError("duplicate processes")
        procs = set(self.processes)
        for a in self.letters:
            dom = self.domain.get(a)
            if not dom:
                raise InputError(f"letter {a!r} has an empty or missing domain")
            if not dom <= procs:
                raise InputError(f"domain of {a!r} mentions unknown processes")
        if set(self.domain) != set(self.letters):
            raise InputError("domain map does not match the letter set")
        for a in self.controllable:
            if a not in self.domain:
                raise InputError(f"controllable letter {a!r} is not in the alphabet")
            if len(self.domain[a]) != 1:
                raise InputError(f"controllable letter {a!r} is not local")
        object.__setattr__(
            self, "_pindex", {p: i for i, p in enumerate(self.processes)}
        )

    def check_letter(self, a):
        if a not in self.domain:
            raise InputError(f"unknown letter {a!r}")

    def check_process(self, p):
        if p not in self._pindex:
            raise InputError(f"unknown process {p!r}")

    def process_index(self, p):
        return self._pindex[p]

    def participants(self, a):
        """Domain of ``a`` as a tuple in declared process order."""
        dom = self.domain[a]
        return tuple(p for p in self.processes if p in dom)

    def is_local(self, a):
        return len(self.domain[a]) == 1

    def restrict(self, letters):
        """Sub-alphabet over ``letters``; processes shrink to the used ones."""
        letters = [a for a in self.letters if a in set(letters)]
        used = set().union(*(self.domain[a] for a in letters)) if letters else set()
        return DistributedAlphabet(
            letters=tuple(letters),
            processes=tuple(p for p in self.processes if p in used),
            domain={a: self.domain[a] for a in letters},
            controllable=self.controllable & set(letters),
        )


@dataclass(frozen=True)
class ProcessTree:
    """Rooted tree over process identifiers, stored as a parent map."""

    root: str
    parent: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "parent", dict(self.parent))
        if self.root in self.parent:
            raise InputError("root must not have a parent")
        nodes = {self.root} | set(self.parent) | set(self.parent.values())
        children = {p: [] for p in nodes}
        for child, par in self.parent.items():
            if par not in nodes:
                raise InputError(f"parent {par!r} of {child!r} is not a node")
            children[par].append(child)
        for p in children:
            children[p].sort()
        # every node must reach the root without cycles
        depth = {self.root: 0}
        order = [self.root]
        queue = deque([self.root])
        while queue:
            p = queue.popleft()
            for c in children[p]:
                depth[c] = depth[p] + 1
                order.append(c)
                queue.append(c)
        if set(order) != nodes:
            raise InputError("parent map contains a cycle or unreachable nodes")
        object.__setattr__(self, "_nodes", frozenset(nodes))
        object.__setattr__(self, "_children", {p: tuple(cs) for p, cs in children.items()})
        object.__setattr__(self, "_depth", depth)

    @property
    def nodes(self):
        return self._nodes

    def children(self, p):
        return self._children[p]

    def depth(self, p):
        return self._depth[p]

    def is_leaf(self, p):
        return not self._children[p]

    def edges(self):
        """Tree edges as (parent, child) pairs, in BFS order from the root."""
        out = []
        queue = deque([self.root])
        while queue:
            p = queue.popleft()
            for c in self._children[p]:
                out.append((p, c))
                queue.append(c)
        return out

    def ancestors(self, p):
        """Path from ``p`` up to the root, inclusive."""
        out = [p]
        while p != self.root:
            p = self.parent[p]
            out.append(p)
        return out

    def path(self, p, q):
        """The unique tree path from ``p`` to ``q``, inclusive."""
        up_p = self.ancestors(p)
        up_q = self.ancestors(q)
        seen = set(up_p)
        meet = next(x for x in up_q if x in seen)
        left = up_p[: up_p.index(meet) + 1]
        right = up_q[: up_q.index(meet)]
        return left + list(reversed(right))

    def subtree(self, p):
        """All nodes in the subtree rooted at ``p``."""
        out = set()
        queue = deque([p])
        while queue:
            q = queue.popleft()
            out.add(q)
            queue.extend(self._children[q])
        return frozenset(out)

    def remove_leaf(self, leaf):
        if not self.is_leaf(leaf):
            raise InputError(f"{leaf!r} is not a leaf")
        if leaf == self.root:
            raise InputError("cannot remove the root")
        parent = {c: p for c, p in self.parent.items() if c != leaf}
        return ProcessTree(root=self.root, parent=parent)


@dataclass(frozen=True)
class TreeLikeArchitecture:
    """A distributed alphabet paired with a rooted process tree.

    Construction only checks that tree nodes and alphabet processes agree;
    the two tree-likeness conditions (connected domains, covered edges) are
    checked by :func:`validate_tca`.
    """

    alphabet: DistributedAlphabet
    tree: ProcessTree

    def __post_init__(self):
        if set(self.alphabet.processes) != set(self.tree.nodes):
            raise InputError("tree nodes differ from alphabet processes")


@dataclass(frozen=True)
class DependenceGraph:
    """Letters as vertices, an edge between letters with intersecting domains."""

    vertices: tuple[str, ...]
    edges: frozenset[frozenset[str]]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(
            self, "edges", frozenset(frozenset(e) for e in self.edges)
        )
        vs = set(self.vertices)
        for e in self.edges:
            if len(e) != 2 or not e <= vs:
                raise InputError(f"bad edge {set(e)!r}")

    def neighbors(self, v):
        return sorted(u for e in self.edges for u in e if v in e and u != v)

    def has_edge(self, u, v):
        return frozenset((u, v)) in self.edges


def independent(alphabet, a, b):
    """True iff ``a`` and ``b`` have disjoint domains (can run in parallel)."""
    alphabet.check_letter(a)
    alphabet.check_letter(b)
    return not (alphabet.domain[a] & alphabet.domain[b])


def dependence_graph(alphabet):
    """The graph connecting letters whose domains intersect."""
    edges = set()
    for i, a in enumerate(alphabet.letters):
        for b in alphabet.letters[i + 1 :]:
            if alphabet.domain[a] & alphabet.domain[b]:
                edges.add(frozenset((a, b)))
    return DependenceGraph(vertices=alphabet.letters, edges=frozenset(edges))


def local_letters(alphabet, p):
    """Letters whose domain is exactly ``{p}``."""
    alphabet.check_process(p)
    return {a for a in alphabet.letters if alphabet.domain[a] == frozenset((p,))}


@dataclass
class TcaReport:
    """Outcome of checking the two tree-likeness conditions."""

    ok: bool
    connectivity: dict  # letter -> None if fine, else the broken tree path
    coverage: dict  # (parent, child) edge -> covering letter or None
    problems: list

    def __bool__(self):
        return self.ok


def validate_tca(arch):
    """Check that every domain is tree-connected and every edge is covered.

    For a letter whose domain is not connected, the report carries a tree
    path between two domain processes that leaves the domain.
    """
    alphabet, tree = arch.alphabet, arch.tree
    connectivity = {}
    problems = []
    for a in alphabet.letters:
        dom = alphabet.domain[a]
        witness = None
        for p in sorted(dom):
            for q in sorted(dom):
                if p >= q:
                    continue
                path = tree.path(p, q)
                if any(x not in dom for x in path):
                    witness = path
                    break
            if witness:
                break
        connectivity[a] = witness
        if witness:
            problems.append(
                f"domain of {a!r} is not connected: path {'-'.join(witness)} leaves it"
            )
    coverage = {}
    for p, c in tree.edges():
        cover = next(
            (a for a in alphabet.letters if {p, c} <= alphabet.domain[a]), None
        )
        coverage[(p, c)] = cover
        if cover is None:
            problems.append(f"tree edge ({p!r}, {c!r}) is not covered by any letter")
    ok = all(w is None for w in connectivity.values()) and all(
        v is not None for v in coverage.values()
    )
    return TcaReport(ok=ok, connectivity=connectivity, coverage=coverage, problems=problems)


def trace_closure(alphabet, word, max_len, max_class=MAX_TRACE_CLASS):
    """The equivalence class of ``word`` under swaps of adjacent independent letters.

    Computed by breadth-first saturation. Guarded by ``max_len`` on the input
    and ``max_class`` on the class size; this is an oracle for tests, not a
    production path.
    """
    word = tuple(word)
    for a in word:
        alphabet.check_letter(a)
    if len(word) > max_len:
        raise InputError(f"word longer than max_len={max_len}")
    seen = {word}
    queue = deque([word])
    while queue:
        u = queue.popleft()
        for i in range(len(u) - 1):
            a, b = u[i], u[i + 1]
            if a != b and not (alphabet.domain[a] & alphabet.domain[b]):
                v = u[:i] + (b, a) + u[i + 2 :]
                if v not in seen:
                    if len(seen) >= max_class:
                        raise TraceClassTooLarge(
                            f"class of {word!r} exceeds {max_class} words"
                        )
                    seen.add(v)
                    queue.append(v)
    return seen
