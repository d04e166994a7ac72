"""Chordality recognition and the bridge from dependence graphs to architectures.

A dependence alphabet admits a tree-like architecture exactly when its
dependence graph is chordal and connected. Recognition runs lexicographic
BFS and verifies the candidate elimination ordering; the architecture is
read off a clique tree (maximum-weight spanning tree of the clique
intersection graph, deterministically tie-broken).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import InputError
from .model import (
    DependenceGraph,
    DistributedAlphabet,
    ProcessTree,
    TreeLikeArchitecture,
)


@dataclass
class ChordalityResult:
    chordal: bool
    elimination_order: tuple | None  # perfect elimination ordering when chordal
    chordless_cycle: tuple | None  # a cycle of length >= 4 without chords otherwise

    def __bool__(self):
        return self.chordal


def _adjacency(g):
    adj = {v: set() for v in g.vertices}
    for e in g.edges:
        u, v = sorted(e)
        adj[u].add(v)
        adj[v].add(u)
    return adj


def lex_bfs(g):
    """Lexicographic BFS order (ties broken by vertex name)."""
    adj = _adjacency(g)
    labels = {v: [] for v in g.vertices}
    unvisited = set(g.vertices)
    order = []
    while unvisited:
        v = max(sorted(unvisited), key=lambda u: labels[u])
        order.append(v)
        unvisited.discard(v)
        rank = len(g.vertices) - len(order)
        for u in adj[v]:
            if u in unvisited:
                labels[u].append(rank)
    return order


def find_chordless_cycle(g):
    """Some chordless cycle of length >= 4, or None if the graph is chordal.

    For every vertex v and non-adjacent pair of its neighbors x, z, a
    shortest x-z path avoiding the closed neighborhood of v (except the
    endpoints) closes an induced cycle through v. This is independent of
    the elimination-ordering machinery and doubles as its cross-check.
    """
    adj = _adjacency(g)
    for v in sorted(g.vertices):
        neigh = sorted(adj[v])
        for i, x in enumerate(neigh):
            for z in neigh[i + 1 :]:
                if z in adj[x]:
                    continue
                blocked = (adj[v] | {v}) - {x, z}
                path = _shortest_path(adj, x, z, blocked)
                if path is not None:
                    return tuple([v] + path)
    return None


def _shortest_path(adj, src, dst, blocked):
    if src in blocked or dst in blocked:
        return None
    prev = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for w in sorted(adj[u]):
            if w in blocked or w in prev:
                continue
            prev[w] = u
            if w == dst:
                path = [w]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return list(reversed(path))
            queue.append(w)
    return None


def is_chordal(g):
    """Recognize chordality, producing an ordering or a chordless cycle.

    The candidate ordering from lexicographic BFS is verified directly: in
    the reversed order, each vertex's later neighbors must form a clique
    (it suffices to check the earliest later neighbor against the rest).
    """
    order = list(reversed(lex_bfs(g)))
    pos = {v: i for i, v in enumerate(order)}
    adj = _adjacency(g)
    for v in order:
        later = [u for u in adj[v] if pos[u] > pos[v]]
        if not later:
            continue
        first = min(later, key=lambda u: pos[u])
        for u in later:
            if u != first and u not in adj[first]:
                cycle = find_chordless_cycle(g)
                if cycle is None:
                    raise RuntimeError("ordering check failed on a chordal graph")
                return ChordalityResult(False, None, cycle)
    return ChordalityResult(True, tuple(order), None)


def is_connected(g):
    if not g.vertices:
        return True
    adj = _adjacency(g)
    seen = {g.vertices[0]}
    queue = deque([g.vertices[0]])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(g.vertices)


def maximal_cliques(g, elimination_order):
    """Maximal cliques of a chordal graph from its elimination ordering."""
    pos = {v: i for i, v in enumerate(elimination_order)}
    adj = _adjacency(g)
    candidates = []
    for v in elimination_order:
        clique = frozenset({v} | {u for u in adj[v] if pos[u] > pos[v]})
        candidates.append(clique)
    cliques = []
    for c in candidates:
        if not any(c < d for d in candidates):
            if c not in cliques:
                cliques.append(c)
    return sorted(cliques, key=lambda c: sorted(c))


def clique_tree(cliques):
    """Maximum-weight spanning tree of the clique intersection graph.

    Weights are separator sizes; ties pick the lexicographically smallest
    clique pair, so the result is deterministic. For a connected chordal
    graph this yields a junction tree: for every vertex, the cliques
    containing it induce a connected subtree.
    """
    n = len(cliques)
    if n == 0:
        raise InputError("no cliques")
    keys = [tuple(sorted(c)) for c in cliques]
    candidates = []
    for i in range(n):
        for j in range(i + 1, n):
            sep = cliques[i] & cliques[j]
            if sep:
                candidates.append((-len(sep), keys[i], keys[j], i, j))
    candidates.sort()
    parent_uf = list(range(n))

    def find(x):
        while parent_uf[x] != x:
            parent_uf[x] = parent_uf[parent_uf[x]]
            x = parent_uf[x]
        return x

    edges = []
    for _, _, _, i, j in candidates:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent_uf[ri] = rj
            edges.append((i, j))
    if len(edges) != n - 1:
        raise InputError("clique intersection graph is not connected; decompose first")
    return edges


def tca_from_dependence(g, controllable=frozenset()):
    """Architecture whose processes are the maximal cliques of ``g``.

    Each letter's domain becomes the set of cliques containing it; the
    process tree is the clique tree rooted at the first clique in the
    deterministic order. Fails when the graph is not chordal or not
    connected. Controllable letters must end up local, i.e. lie in exactly
    one maximal clique.
    """
    result = is_chordal(g)
    if not result.chordal:
        raise InputError(f"not triangulated: chordless cycle {result.chordless_cycle!r}")
    if not is_connected(g):
        raise InputError("dependence graph is not connected; use forest_decompose first")
    cliques = maximal_cliques(g, result.elimination_order)
    names = [f"k{i}" for i in range(len(cliques))]
    if len(cliques) == 1:
        tree = ProcessTree(root=names[0], parent={})
    else:
        edges = clique_tree(cliques)
        adj = {i: [] for i in range(len(cliques))}
        for i, j in edges:
            adj[i].append(j)
            adj[j].append(i)
        parent = {}
        seen = {0}
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for j in sorted(adj[i]):
                if j not in seen:
                    seen.add(j)
                    parent[names[j]] = names[i]
                    queue.append(j)
        tree = ProcessTree(root=names[0], parent=parent)
    domain = {}
    for a in g.vertices:
        domain[a] = frozenset(
            names[i] for i, c in enumerate(cliques) if a in c
        )
    for a in controllable:
        if len(domain.get(a, ())) != 1:
            raise InputError(f"controllable letter {a!r} would not be local")
    alphabet = DistributedAlphabet(
        letters=g.vertices,
        processes=tuple(names),
        domain=domain,
        controllable=frozenset(controllable),
    )
    return TreeLikeArchitecture(alphabet=alphabet, tree=tree)


def forest_decompose(alphabet):
    """Split an alphabet along the connected components of its dependence graph.

    Components are returned as restricted alphabets in deterministic order
    (by smallest letter). Processes touched by no letter are dropped.
    """
    from .model import dependence_graph

    g = dependence_graph(alphabet)
    adj = _adjacency(g)
    seen = set()
    components = []
    for v in alphabet.letters:
        if v in seen:
            continue
        comp = {v}
        queue = deque([v])
        seen.add(v)
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    queue.append(w)
        components.append(comp)
    return [alphabet.restrict(comp) for comp in components]
