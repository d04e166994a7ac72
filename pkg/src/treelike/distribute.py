"""Distributing a diamond DFA into an asynchronous automaton over a tree.

Each process keeps a pair of source-automaton states: the last state it
shared with its parent and the most recent state it knows. A joint
transition on a letter recombines the participants' pairs bottom-up along
the letter's subtree, steps the source automaton once, and redistributes
the result. Acceptance recombines the full tree and tests membership in
the source acceptance set; it is a predicate, never a materialized set,
because the global state space is a product.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import DiamondViolation, InputError
from .model import validate_tca


@dataclass(frozen=True)
class LabeledNode:
    """Node of a process tree labeled for recombination.

    ``shared``/``latest`` are source-automaton states (last state shared
    with the parent, most recent state known here); ``below`` is the set of
    letters whose domain lies within this node's subtree.
    """

    process: str
    shared: object
    latest: object
    below: frozenset
    children: tuple


@dataclass(frozen=True)
class GlobalAcceptance:
    """Acceptance as a predicate over global states."""

    predicate: object  # callable global-state tuple -> bool
    description: str = "predicate"

    def accepts(self, gstate):
        return self.predicate(gstate)


@dataclass(frozen=True)
class LocalAcceptance:
    """Per-process acceptance: final sets for finite runs, priorities for cycles.

    ``priority`` must be total on each process's state set; the max-parity
    convention is even-accepting.
    """

    final: dict  # process -> frozenset of local states
    priority: dict  # process -> {local state: int}

    def __post_init__(self):
        object.__setattr__(self, "final", {p: frozenset(v) for p, v in self.final.items()})
        object.__setattr__(self, "priority", {p: dict(v) for p, v in self.priority.items()})


class AsyncAutomaton:
    """Deterministic automaton distributed over processes.

    ``delta`` may be an explicit table ``{letter: {args: result}}`` over
    tuples indexed by the letter's participants (in declared process
    order), or a callable ``(letter, args) -> result or None`` for
    constructions whose tables would be too large to materialize. The
    automaton is immutable after construction; the transition cache fills
    idempotently, so concurrent simulations agree with sequential ones.
    """

    def __init__(self, alphabet, local_states, initials, delta, acceptance=None, tree=None):
        self.alphabet = alphabet
        self.processes = alphabet.processes
        self._pindex = {p: i for i, p in enumerate(self.processes)}
        self.local_states = {p: tuple(local_states[p]) for p in self.processes}
        self.initials = dict(initials)
        for p in self.processes:
            if self.initials[p] not in set(self.local_states[p]):
                raise InputError(f"initial state of {p!r} is not a state of {p!r}")
        if callable(delta):
            self._table = None
            self._fn = delta
        else:
            self._table = {a: dict(rows) for a, rows in delta.items()}
            self._fn = None
        self._cache = {}
        self.acceptance = acceptance
        self.tree = tree

    # -- structure ----------------------------------------------------------

    def process_index(self, p):
        return self._pindex[p]

    def participants(self, a):
        return self.alphabet.participants(a)

    @property
    def global_initial(self):
        return tuple(self.initials[p] for p in self.processes)

    @property
    def is_explicit(self):
        return self._table is not None

    def transition_table(self, a):
        if self._table is None:
            raise InputError("automaton has a computed transition function, not tables")
        return self._table.get(a, {})

    # -- semantics ----------------------------------------------------------

    def joint(self, a, args):
        """Joint successor for the participant tuple of ``a``, or None."""
        if self._table is not None:
            return self._table.get(a, {}).get(args)
        key = (a, args)
        if key in self._cache:
            return self._cache[key]
        result = self._fn(a, args)
        self._cache[key] = result
        return result

    def step(self, gstate, a):
        """Apply ``a`` to a global state; coordinates outside its domain keep."""
        self.alphabet.check_letter(a)
        parts = self.participants(a)
        idx = tuple(self._pindex[p] for p in parts)
        args = tuple(gstate[i] for i in idx)
        result = self.joint(a, args)
        if result is None:
            return None
        out = list(gstate)
        for i, v in zip(idx, result):
            out[i] = v
        return tuple(out)

    def run(self, word):
        gstate, _ = self.run_prefix(word)
        return gstate

    def run_prefix(self, word):
        """Pair (global state or None, index of the first undefined step or None)."""
        gstate = self.global_initial
        for k, a in enumerate(word):
            gstate = self.step(gstate, a)
            if gstate is None:
                return None, k
        return gstate, None

    def accepts_state(self, gstate):
        if isinstance(self.acceptance, GlobalAcceptance):
            return self.acceptance.accepts(gstate)
        if isinstance(self.acceptance, LocalAcceptance):
            return all(
                gstate[self._pindex[p]] in self.acceptance.final[p]
                for p in self.processes
            )
        raise InputError("automaton has no acceptance condition")

    def accepts(self, word):
        gstate = self.run(word)
        return gstate is not None and self.accepts_state(gstate)

    def enabled(self, gstate):
        """Letters with a defined joint transition at ``gstate``."""
        return [a for a in self.alphabet.letters if self.step(gstate, a) is not None]


def aa_step(aa, gstate, a):
    return aa.step(gstate, a)


def aa_run(aa, word):
    return aa.run_prefix(word)


def aa_accepts(aa, word):
    return aa.accepts(word)


# -- tree machinery ----------------------------------------------------------


def down_letters(arch, p):
    """Letters whose whole domain lies in the subtree rooted at ``p``."""
    arch.alphabet.check_process(p)
    sub = arch.tree.subtree(p)
    return {a for a in arch.alphabet.letters if arch.alphabet.domain[a] <= sub}


def letter_tree(arch, a):
    """The subtree induced by the domain of ``a``, rooted at its shallowest node.

    Returns (root process, children map restricted to the domain). Valid
    architectures make the domain connected, so the shallowest node is
    unique and the structure is a tree.
    """
    arch.alphabet.check_letter(a)
    dom = arch.alphabet.domain[a]
    tree = arch.tree
    root = min(dom, key=lambda p: (tree.depth(p), p))
    children = {p: tuple(c for c in tree.children(p) if c in dom) for p in dom}
    reached = set()
    queue = deque([root])
    while queue:
        p = queue.popleft()
        reached.add(p)
        queue.extend(children[p])
    if reached != set(dom):
        raise InputError(f"domain of {a!r} is not connected in the tree")
    return root, children


def tdiam(dfa, node):
    """Recombine a labeled tree bottom-up into one source-automaton state.

    A single node contributes its latest state; each child is folded into
    the accumulated state through the recombination step, keyed by the
    child's shared state and its set of below-letters. Children are folded
    in the node's fixed order; the value does not depend on that order.
    """
    acc = node.latest
    for child in node.children:
        acc = dfa.diam(child.shared, acc, tdiam(dfa, child), child.below)
    return acc


def _label_tree(root, children, pairs, below):
    s, t = pairs[root]
    return LabeledNode(
        process=root,
        shared=s,
        latest=t,
        below=below[root],
        children=tuple(
            _label_tree(c, children, pairs, below) for c in children[root]
        ),
    )


def distribute(dfa, arch):
    """Build the asynchronous automaton recognizing the language of ``dfa``.

    Requires a valid tree-like architecture and a diamond DFA (both are
    checked). Every process is given the full pair-state table ``S x S`` as
    its declared state space, which is what the quadratic size bound counts;
    the reachable part is discovered lazily during simulation.
    """
    report = validate_tca(arch)
    if not report.ok:
        raise InputError("invalid architecture: " + "; ".join(report.problems))
    witness = dfa.diamond_counterexample()
    if witness is not None:
        raise DiamondViolation(witness)

    alphabet, tree = arch.alphabet, arch.tree
    below = {p: frozenset(down_letters(arch, p)) for p in alphabet.processes}
    trees = {a: letter_tree(arch, a) for a in alphabet.letters}

    pair_states = tuple((s, t) for s in dfa.states for t in dfa.states)

    def joint(a, args):
        root, children = trees[a]
        parts = alphabet.participants(a)
        pairs = dict(zip(parts, args))
        labeled = _label_tree(root, children, pairs, below)
        s_a = tdiam(dfa, labeled)
        s_next = dfa.step(s_a, a)
        if s_next is None:
            return None
        out = []
        for p in parts:
            shared = pairs[p][0] if p == root else s_next
            out.append((shared, s_next))
        return tuple(out)

    def accepts(gstate):
        pairs = dict(zip(alphabet.processes, gstate))
        labeled = _label_tree(tree.root, {p: tree.children(p) for p in tree.nodes}, pairs, below)
        return tdiam(dfa, labeled) in dfa.accepting

    aa = AsyncAutomaton(
        alphabet=alphabet,
        local_states={p: pair_states for p in alphabet.processes},
        initials={p: (dfa.initial, dfa.initial) for p in alphabet.processes},
        delta=joint,
        acceptance=GlobalAcceptance(predicate=accepts, description="recombined-tree membership"),
        tree=tree,
    )

    def recombine(gstate):
        pairs = dict(zip(alphabet.processes, gstate))
        labeled = _label_tree(tree.root, {p: tree.children(p) for p in tree.nodes}, pairs, below)
        return tdiam(dfa, labeled)

    aa.recombine = recombine
    return aa


def parallel_compose(parts, dfa):
    """Run automata over pairwise independent sub-alphabets side by side.

    Each part must expose ``recombine`` mapping its global states to the
    state the source automaton reaches on the projected input. Acceptance
    folds the parts' recombined states left to right through the
    recombination step and tests the source acceptance set.
    """
    if not parts:
        raise InputError("nothing to compose")
    if len(parts) == 1:
        return parts[0][0]
    seen_letters = set()
    seen_processes = set()
    for aa, sub in parts:
        if seen_letters & set(sub.letters):
            raise InputError("sub-alphabets share letters")
        if seen_processes & set(sub.processes):
            raise InputError("sub-alphabets share processes, so they are not independent")
        seen_letters |= set(sub.letters)
        seen_processes |= set(sub.processes)

    from .model import DistributedAlphabet

    letters, processes, domain, controllable = [], [], {}, set()
    for aa, sub in parts:
        letters.extend(sub.letters)
        processes.extend(sub.processes)
        domain.update(sub.domain)
        controllable |= set(sub.controllable)
    alphabet = DistributedAlphabet(
        letters=tuple(letters),
        processes=tuple(processes),
        domain=domain,
        controllable=frozenset(controllable),
    )

    owner = {}
    offsets = []
    offset = 0
    for k, (aa, sub) in enumerate(parts):
        offsets.append(offset)
        offset += len(sub.processes)
        for a in sub.letters:
            owner[a] = k

    def split(gstate):
        out = []
        for k, (aa, sub) in enumerate(parts):
            lo = offsets[k]
            out.append(tuple(gstate[lo : lo + len(sub.processes)]))
        return out

    def joint(a, args):
        k = owner[a]
        return parts[k][0].joint(a, args)

    def recombine(gstate):
        pieces = split(gstate)
        acc = parts[0][0].recombine(pieces[0])
        for k in range(1, len(parts)):
            aa_k, sub_k = parts[k]
            s_k = aa_k.recombine(pieces[k])
            acc = dfa.diam(dfa.initial, acc, s_k, frozenset(sub_k.letters))
        return acc

    def accepts(gstate):
        return recombine(gstate) in dfa.accepting

    local_states = {}
    initials = {}
    for aa, sub in parts:
        for p in sub.processes:
            local_states[p] = aa.local_states[p]
            initials[p] = aa.initials[p]

    composed = AsyncAutomaton(
        alphabet=alphabet,
        local_states=local_states,
        initials=initials,
        delta=joint,
        acceptance=GlobalAcceptance(predicate=accepts, description="folded composition"),
        tree=None,
    )
    composed.recombine = recombine
    return composed


# -- bounded equivalence oracle ----------------------------------------------


def bounded_language_equal(dfa, aa, max_len):
    """Compare the two languages on every word of length at most ``max_len``.

    Walks the deterministic product of the two machines, memoizing the
    depth already verified from each product state, which makes the check
    exact yet far cheaper than enumerating words. Returns None when the
    languages agree, otherwise the shortest-first counterexample word found.
    """
    memo = {}

    def acc_dfa(sd):
        return sd is not None and sd in dfa.accepting

    def acc_aa(sg):
        return sg is not None and aa.accepts_state(sg)

    root = (dfa.initial, aa.global_initial)
    stack = [(root, (), max_len)]
    while stack:
        (sd, sg), word, depth = stack.pop()
        if acc_dfa(sd) != acc_aa(sg):
            return word
        if depth == 0:
            continue
        key = (sd, sg)
        if memo.get(key, -1) >= depth:
            continue
        memo[key] = depth
        for a in reversed(aa.alphabet.letters):
            nd = dfa.step(sd, a) if sd is not None else None
            ng = aa.step(sg, a) if sg is not None else None
            if nd is None and ng is None:
                continue
            stack.append(((nd, ng), word + (a,), depth - 1))
    return None


def reachable_global_states(aa, max_len=None, cap=1_000_000):
    """Breadth-first set of reachable global states, optionally depth-bounded."""
    seen = {aa.global_initial}
    frontier = deque([(aa.global_initial, 0)])
    while frontier:
        gstate, d = frontier.popleft()
        if max_len is not None and d >= max_len:
            continue
        for a in aa.alphabet.letters:
            nxt = aa.step(gstate, a)
            if nxt is not None and nxt not in seen:
                if len(seen) >= cap:
                    raise InputError(f"reachable state space exceeds cap {cap}")
                seen.add(nxt)
                frontier.append((nxt, d + 1))
    return seen
