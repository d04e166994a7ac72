"""Sequential DFA with partial transitions and the diamond recombination step.

The recombination function ``diam`` answers: from state ``s``, one run over
letters independent of ``C2`` reached ``s1`` and another over ``C2`` reached
``s2``; where does their concatenation lead? On diamond automata the answer
does not depend on the witness words, so it can be computed from the four
arguments alone.
"""

from __future__ import annotations

from collections import deque

from .errors import DiamUndefined, InputError
from .model import independent


class Dfa:
    """Deterministic automaton with a partial transition map.

    States are arbitrary string tokens externally; internally they are dense
    integers over array-indexed transition tables. Immutable after
    construction; the recombination memo is filled idempotently, so
    concurrent queries return the same results as sequential ones.
    """

    def __init__(self, alphabet, states, initial, accepting, transitions):
        self.alphabet = alphabet
        self.states = tuple(states)
        if len(set(self.states)) != len(self.states):
            raise InputError("duplicate states")
        self._index = {s: i for i, s in enumerate(self.states)}
        if initial not in self._index:
            raise InputError(f"initial state {initial!r} not in the state set")
        self.initial = initial
        self.accepting = frozenset(accepting)
        for s in self.accepting:
            if s not in self._index:
                raise InputError(f"accepting state {s!r} not in the state set")
        self._delta = [dict() for _ in self.states]
        for (src, letter), dst in dict(transitions).items():
            alphabet.check_letter(letter)
            if src not in self._index or dst not in self._index:
                raise InputError(f"transition ({src!r}, {letter!r}, {dst!r}) uses unknown states")
            row = self._delta[self._index[src]]
            if letter in row:
                raise InputError(f"nondeterministic on ({src!r}, {letter!r})")
            row[letter] = self._index[dst]
        self._diam_memo = {}
        self._diamond_witness_cached = False
        self._diamond_witness = None

    # -- basic queries ----------------------------------------------------

    def step(self, state, letter):
        """Successor state or None when the transition is undefined."""
        self.alphabet.check_letter(letter)
        i = self._delta[self._index[state]].get(letter)
        return None if i is None else self.states[i]

    def run(self, word, start=None):
        """State reached from ``start`` (default: initial) or None if undefined."""
        state, _ = self.run_prefix(word, start=start)
        return state

    def run_prefix(self, word, start=None):
        """Pair (state or None, index of the first undefined step or None)."""
        i = self._index[start if start is not None else self.initial]
        for k, a in enumerate(word):
            self.alphabet.check_letter(a)
            j = self._delta[i].get(a)
            if j is None:
                return None, k
            i = j
        return self.states[i], None

    def accepts(self, word):
        state = self.run(word)
        return state is not None and state in self.accepting

    def transitions(self):
        for i, row in enumerate(self._delta):
            for letter, j in sorted(row.items()):
                yield self.states[i], letter, self.states[j]

    def enabled(self, state):
        return sorted(self._delta[self._index[state]])

    # -- diamond property --------------------------------------------------

    def diamond_counterexample(self):
        """First (state, a, b) violating commutation of independent letters.

        Both definedness and target must agree: requiring definedness to be
        symmetric is what makes languages of diamond automata trace-closed.
        """
        if self._diamond_witness_cached:
            return self._diamond_witness
        witness = None
        letters = self.alphabet.letters
        pairs = [
            (a, b)
            for i, a in enumerate(letters)
            for b in letters[i + 1 :]
            if independent(self.alphabet, a, b)
        ]
        for s in self.states:
            for a, b in pairs:
                t_ab = self._two_step(s, a, b)
                t_ba = self._two_step(s, b, a)
                if t_ab != t_ba:
                    witness = (s, a, b)
                    break
            if witness:
                break
        self._diamond_witness = witness
        self._diamond_witness_cached = True
        return witness

    def is_diamond(self):
        return self.diamond_counterexample() is None

    def _two_step(self, s, a, b):
        i = self._delta[self._index[s]].get(a)
        if i is None:
            return None
        j = self._delta[i].get(b)
        return None if j is None else j

    # -- recombination -----------------------------------------------------

    def diam(self, s, s1, s2, c2):
        """State reached by any witness pair ``w1 in C1'*, w2 in C2*``.

        ``C1'`` is the maximal letter set independent of ``c2``. Requires an
        existing witness for each of ``s1`` (within C1') and ``s2`` (within
        C2); shortest witnesses are found by breadth-first search and the
        result is memoized per (s, s1, s2, C2).
        """
        c2_key = frozenset(c2)
        key = (s, s1, s2, c2_key)
        hit = self._diam_memo.get(key)
        if hit is not None:
            kind, value = hit
            if kind == "ok":
                return value
            raise DiamUndefined(value)
        c1 = frozenset(max_independent_letters(self.alphabet, c2_key))
        try:
            w1 = self._witness(s, s1, c1)
            if w1 is None:
                raise DiamUndefined(
                    f"no witness within C1' from {s!r} to {s1!r}"
                )
            w2 = self._witness(s, s2, c2_key)
            if w2 is None:
                raise DiamUndefined(
                    f"no witness within C2 from {s!r} to {s2!r}"
                )
            target = self.run(w2, start=s1)
            if target is None:
                raise DiamUndefined(
                    f"target undefined: no run on the combined witness from {s!r}"
                )
        except DiamUndefined as exc:
            self._diam_memo[key] = ("err", str(exc))
            raise
        self._diam_memo[key] = ("ok", target)
        return target

    def _witness(self, src, dst, letters):
        """Shortest word over ``letters`` from ``src`` to ``dst``, or None."""
        if src == dst:
            return ()
        i0, goal = self._index[src], self._index[dst]
        prev = {i0: None}
        queue = deque([i0])
        while queue:
            i = queue.popleft()
            for a, j in sorted(self._delta[i].items()):
                if a in letters and j not in prev:
                    prev[j] = (i, a)
                    if j == goal:
                        word = []
                        k = j
                        while prev[k] is not None:
                            k, letter = prev[k]
                            word.append(letter)
                        return tuple(reversed(word))
                    queue.append(j)
        return None

    def restrict(self, letters):
        """The same automaton over a sub-alphabet (transitions filtered)."""
        letters = set(letters)
        sub = self.alphabet.restrict(letters)
        return Dfa(
            alphabet=sub,
            states=self.states,
            initial=self.initial,
            accepting=self.accepting,
            transitions={
                (src, a): dst for src, a, dst in self.transitions() if a in letters
            },
        )


def run(dfa, word):
    """Module-level convenience wrapper over :meth:`Dfa.run_prefix`."""
    return dfa.run_prefix(word)


def is_diamond(dfa):
    """(bool, first counterexample or None)."""
    witness = dfa.diamond_counterexample()
    return witness is None, witness


def max_independent_letters(alphabet, c2):
    """All letters whose domain avoids every domain in ``c2``."""
    for b in c2:
        alphabet.check_letter(b)
    blocked = set()
    for b in c2:
        blocked |= alphabet.domain[b]
    return {a for a in alphabet.letters if not (alphabet.domain[a] & blocked)}


def diam(dfa, s, s1, s2, c2):
    return dfa.diam(s, s1, s2, c2)
