"""Causal views of process sets on words, used as independent oracles.

The view of a process set X on a word is the subsequence X can know about
through shared actions. It is computed by the literal backward recursion
(drop the last letter if its domain is disjoint from X, otherwise keep it
and enlarge X), never by forward projection, because X grows as the
recursion walks back. These functions double as the reference semantics
against which the distributed construction is property-tested.
"""

from __future__ import annotations

from dataclasses import dataclass


def view(alphabet, x, word):
    """Subsequence of ``word`` visible to the process set ``x``."""
    for p in x:
        alphabet.check_process(p)
    known = set(x)
    out = []
    for a in reversed(tuple(word)):
        dom = alphabet.domain[a]
        if dom & known:
            out.append(a)
            known |= dom
    return tuple(reversed(out))


def state_view(dfa, x, word):
    """State the processes in ``x`` can compute: the run on their view."""
    state, pos = dfa.run_prefix(view(dfa.alphabet, x, word))
    if state is None:
        raise RuntimeError(f"run on the view is undefined at position {pos}")
    return state


def parent_view(arch, p, word):
    """What ``p`` saw up to its last communication with its parent.

    The root never shares with a parent, so its parent view is empty. For
    other processes, take the minimal prefix of ``word`` containing all
    occurrences of letters shared by ``p`` and its parent; the parent view
    is the view of ``{p}`` on that prefix.
    """
    arch.alphabet.check_process(p)
    if p == arch.tree.root:
        return ()
    q = arch.tree.parent[p]
    shared = {
        a for a in arch.alphabet.letters if {p, q} <= arch.alphabet.domain[a]
    }
    word = tuple(word)
    last = max((i for i, a in enumerate(word) if a in shared), default=-1)
    return view(arch.alphabet, {p}, word[: last + 1])


def state_parent_view(dfa, arch, p, word):
    state, pos = dfa.run_prefix(parent_view(arch, p, word))
    if state is None:
        raise RuntimeError(f"run on the parent view is undefined at position {pos}")
    return state


@dataclass
class InvariantViolation:
    prefix_len: int
    kind: str  # "definedness", "shared", or "latest"
    process: str | None
    expected: object
    got: object


@dataclass
class InvariantReport:
    ok: bool
    checked_prefixes: int
    violations: list

    def __bool__(self):
        return self.ok

    def first(self):
        return self.violations[0] if self.violations else None


def check_invariants(dfa, arch, aa, word):
    """Re-derive every per-process pair state of ``aa`` from view semantics.

    For every prefix of ``word``: the sequential run and the distributed run
    must be defined together, and when defined each process must hold
    exactly (state on its parent view, state on its own view). Violations
    are findings, not errors; the report lists them in prefix order.
    """
    word = tuple(word)
    violations = []
    gstate = aa.global_initial
    checked = 0
    for k in range(len(word) + 1):
        prefix = word[:k]
        if k > 0 and gstate is not None:
            gstate = aa.step(gstate, word[k - 1])
        dstate = dfa.run(prefix)
        checked += 1
        if (dstate is None) != (gstate is None):
            violations.append(
                InvariantViolation(
                    prefix_len=k,
                    kind="definedness",
                    process=None,
                    expected="defined" if dstate is not None else "undefined",
                    got="defined" if gstate is not None else "undefined",
                )
            )
            break
        if dstate is None:
            break
        for p in arch.alphabet.processes:
            s_p, t_p = gstate[aa.process_index(p)]
            want_s = state_parent_view(dfa, arch, p, prefix)
            want_t = state_view(dfa, {p}, prefix)
            if s_p != want_s:
                violations.append(
                    InvariantViolation(k, "shared", p, want_s, s_p)
                )
            if t_p != want_t:
                violations.append(
                    InvariantViolation(k, "latest", p, want_t, t_p)
                )
        if violations:
            break
    return InvariantReport(ok=not violations, checked_prefixes=checked, violations=violations)
