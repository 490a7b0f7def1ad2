"""Finite labeled transition systems: construction, traversal, composition."""

from __future__ import annotations

import re
import sys
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Union

State = Union[str, int, tuple]
Word = tuple[str, ...]
Transition = tuple[State, str, State]

EPSILON: Word = ()

_LABEL_FORBIDDEN = set('<>[]!&|()"')


class AutParseError(ValueError):
    """Raised when an AUT document cannot be parsed."""


def valid_label(label: str) -> bool:
    """A label is a nonempty run of non-whitespace characters outside the
    reserved formula punctuation."""
    if not label:
        return False
    return all(not ch.isspace() and ch not in _LABEL_FORBIDDEN for ch in label)


def format_state(s: State) -> str:
    """Human-readable rendering; pair states from interleavings nest as (l,r)."""
    if isinstance(s, tuple):
        return "(" + ",".join(format_state(part) for part in s) + ")"
    return str(s)


def state_key(s: State) -> str:
    return format_state(s)


def _state_to_json(s: State):
    if isinstance(s, tuple):
        return [_state_to_json(part) for part in s]
    return s


def _state_from_json(obj) -> State:
    if isinstance(obj, list):
        return tuple(_state_from_json(part) for part in obj)
    return obj


@dataclass(frozen=True)
class Lts:
    """Immutable LTS: a finite state set, one initial state, a finite label
    alphabet and a set of labeled transitions.

    The alphabet may strictly contain the labels used by transitions; the
    converse is an error.  Successor indexes are precomputed once since every
    analysis in this package is traversal-heavy.
    """

    states: frozenset
    initial: State
    alphabet: frozenset
    transitions: frozenset

    def __post_init__(self) -> None:
        if self.initial not in self.states:
            raise ValueError(f"initial state {format_state(self.initial)!r} not a state")
        for label in self.alphabet:
            if not valid_label(label):
                raise ValueError(f"invalid label {label!r}")
        succ: dict[tuple[State, str], set] = {}
        out: dict[State, set] = {s: set() for s in self.states}
        for src, label, dst in self.transitions:
            if src not in self.states or dst not in self.states:
                raise ValueError("transition endpoint is not a state")
            if label not in self.alphabet:
                raise ValueError(f"transition label {label!r} not in alphabet")
            succ.setdefault((src, label), set()).add(dst)
            out[src].add((label, dst))
        frozen_succ = {key: frozenset(v) for key, v in succ.items()}
        frozen_out = {
            s: tuple(sorted(v, key=lambda e: (e[0], state_key(e[1]))))
            for s, v in out.items()
        }
        object.__setattr__(self, "_succ", frozen_succ)
        object.__setattr__(self, "_out", frozen_out)

    def successors(self, s: State, label: str) -> frozenset:
        return self._succ.get((s, label), frozenset())

    def outgoing(self, s: State) -> tuple:
        """Sorted (label, target) pairs leaving s."""
        try:
            return self._out[s]
        except KeyError:
            raise ValueError(f"unknown state {format_state(s)!r}") from None


def make_lts(
    initial: State,
    transitions: Iterable[Transition],
    extra_labels: Iterable[str] = (),
    extra_states: Iterable[State] = (),
) -> Lts:
    """Build an Lts from a transition list, deriving states and alphabet."""
    transitions = frozenset(transitions)
    states = {initial} | set(extra_states)
    labels = set(extra_labels)
    for src, label, dst in transitions:
        states.add(src)
        states.add(dst)
        labels.add(label)
    return Lts(frozenset(states), initial, frozenset(labels), transitions)


def step(lts: Lts, sources: frozenset, label: str) -> frozenset:
    """One-step successor set of a state set under a single label."""
    acc: set = set()
    for s in sources:
        acc |= lts.successors(s, label)
    return frozenset(acc)


def reach(lts: Lts, source: State, word: Word) -> frozenset:
    """States reachable from source by executing exactly the given word.

    The empty word reaches the source itself; each further letter extends
    every execution by one enabled transition.
    """
    if source not in lts.states:
        raise ValueError(f"unknown state {format_state(source)!r}")
    current = frozenset({source})
    for label in word:
        current = step(lts, current, label)
        if not current:
            return frozenset()
    return current


def reachable_states(lts: Lts) -> frozenset:
    """All states reachable from the initial state by any word."""
    seen = {lts.initial}
    queue = deque([lts.initial])
    while queue:
        s = queue.popleft()
        for _, dst in lts.outgoing(s):
            if dst not in seen:
                seen.add(dst)
                queue.append(dst)
    return frozenset(seen)


def init_actions(lts: Lts, s: State) -> frozenset:
    """Labels enabled as a first step from s."""
    return frozenset(label for label, _ in lts.outgoing(s))


def subwords(word: Word) -> frozenset:
    """All words obtained by deleting at least one letter from word.

    Contains the empty word for any nonempty input and never contains the
    input itself; the empty word has no subwords.
    """
    result: set = set()
    n = len(word)
    indices = range(n)
    for keep in range(n):
        for positions in combinations(indices, keep):
            result.add(tuple(word[i] for i in positions))
    return frozenset(result)


def project_word(word: Word, alphabet: Iterable[str]) -> Word:
    """Subsequence of word consisting of the letters inside alphabet."""
    allowed = frozenset(alphabet)
    return tuple(label for label in word if label in allowed)


def interleave(left: Lts, right: Lts) -> Lts:
    """Parallel composition without communication, restricted to the
    reachable part.

    States are (left, right) pairs; either side moves alone.  A label shared
    by both alphabets moves either side nondeterministically.
    """
    initial = (left.initial, right.initial)
    states = {initial}
    transitions: set = set()
    queue = deque([initial])
    while queue:
        l, r = queue.popleft()
        for label, dst in left.outgoing(l):
            nxt = (dst, r)
            transitions.add(((l, r), label, nxt))
            if nxt not in states:
                states.add(nxt)
                queue.append(nxt)
        for label, dst in right.outgoing(r):
            nxt = (l, dst)
            transitions.add(((l, r), label, nxt))
            if nxt not in states:
                states.add(nxt)
                queue.append(nxt)
    return Lts(
        frozenset(states),
        initial,
        left.alphabet | right.alphabet,
        frozenset(transitions),
    )


CHOICE_INITIAL = "+"


def choice(left: Lts, right: Lts) -> Lts:
    """Nondeterministic choice with a fresh initial state, restricted to the
    reachable part.

    The fresh initial offers the first steps of both operands; afterwards the
    chosen side runs alone.  Operand states are namespaced L:/R: so equal ids
    on the two sides never clash.
    """

    def lid(s: State) -> str:
        return "L:" + format_state(s)

    def rid(s: State) -> str:
        return "R:" + format_state(s)

    transitions: set = set()
    for label, dst in left.outgoing(left.initial):
        transitions.add((CHOICE_INITIAL, label, lid(dst)))
    for label, dst in right.outgoing(right.initial):
        transitions.add((CHOICE_INITIAL, label, rid(dst)))
    for src, label, dst in left.transitions:
        transitions.add((lid(src), label, lid(dst)))
    for src, label, dst in right.transitions:
        transitions.add((rid(src), label, rid(dst)))

    full = make_lts(
        CHOICE_INITIAL,
        transitions,
        extra_labels=left.alphabet | right.alphabet,
    )
    keep = reachable_states(full)
    return Lts(
        keep,
        CHOICE_INITIAL,
        full.alphabet,
        frozenset(t for t in full.transitions if t[0] in keep and t[2] in keep),
    )


def restrict_to_reachable(lts: Lts) -> Lts:
    keep = reachable_states(lts)
    return Lts(
        keep,
        lts.initial,
        lts.alphabet,
        frozenset(t for t in lts.transitions if t[0] in keep and t[2] in keep),
    )


def is_acyclic(lts: Lts) -> bool:
    """True when the reachable part has no directed cycle."""
    return longest_acyclic_path(lts) is not None


def longest_acyclic_path(lts: Lts) -> Optional[int]:
    """Transition count of the longest path in the reachable part, or None
    when the reachable part contains a cycle."""
    keep = reachable_states(lts)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {s: WHITE for s in keep}
    depth: dict[State, int] = {}

    def visit(s: State) -> Optional[int]:
        color[s] = GRAY
        best = 0
        for _, dst in lts.outgoing(s):
            if color[dst] == GRAY:
                return None
            if color[dst] == WHITE:
                if visit(dst) is None:
                    return None
            best = max(best, 1 + depth[dst])
        color[s] = BLACK
        depth[s] = best
        return best

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, len(keep) * 4 + 100))
    try:
        return visit(lts.initial)
    finally:
        sys.setrecursionlimit(old_limit)


# ---------------------------------------------------------------------------
# AUT parsing and serialization

_HEADER_RE = re.compile(r"^des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")
_TRANS_RE = re.compile(r'^\(\s*(\d+)\s*,\s*"([^"]*)"\s*,\s*(\d+)\s*\)\s*$')
_ALPHABET_DIRECTIVE = "#alphabet:"


def parse_aut(text: str) -> Lts:
    """Parse an AUT document.

    The header `des (I,T,N)` gives the initial state index, the transition
    count and the state count; states are the indices 0..N-1.  Each
    transition line reads `(src,"label",dst)`.  Lines starting with `#` are
    comments, except `#alphabet: a b c` which declares extra labels beyond
    those used by transitions.
    """
    lines = text.splitlines()
    header: Optional[tuple[int, int, int]] = None
    transitions: list[Transition] = []
    extra_labels: list[str] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith(_ALPHABET_DIRECTIVE):
                for label in line[len(_ALPHABET_DIRECTIVE):].split():
                    if not valid_label(label):
                        raise AutParseError(
                            f"line {lineno}: invalid label {label!r} in alphabet directive"
                        )
                    extra_labels.append(label)
            continue
        if header is None:
            m = _HEADER_RE.match(line)
            if not m:
                raise AutParseError(f"line {lineno}: malformed header {line!r}")
            header = (int(m.group(1)), int(m.group(2)), int(m.group(3)))
            continue
        m = _TRANS_RE.match(line)
        if not m:
            if line.count('"') % 2 == 1:
                raise AutParseError(f"line {lineno}: unterminated quoted label")
            raise AutParseError(f"line {lineno}: malformed transition {line!r}")
        src, label, dst = int(m.group(1)), m.group(2), int(m.group(3))
        if not valid_label(label):
            raise AutParseError(f"line {lineno}: invalid label {label!r}")
        transitions.append((src, label, dst))
    if header is None:
        raise AutParseError("missing `des (initial,transitions,states)` header")
    initial, declared_count, state_count = header
    if state_count < 1 or initial >= state_count:
        raise AutParseError("malformed header: initial state index out of range")
    if len(transitions) != declared_count:
        raise AutParseError(
            f"header declares {declared_count} transitions, found {len(transitions)}"
        )
    for src, label, dst in transitions:
        if src >= state_count or dst >= state_count:
            raise AutParseError(
                f"transition ({src},\"{label}\",{dst}): state index out of range"
            )
    return Lts(
        frozenset(range(state_count)),
        initial,
        frozenset(label for _, label, _ in transitions) | frozenset(extra_labels),
        frozenset(transitions),
    )


def emit_aut(lts: Lts) -> str:
    """Serialize the reachable part back to AUT.

    States are reindexed in deterministic breadth-first order with the
    initial state at index 0; alphabet labels unused by any reachable
    transition are kept via an `#alphabet:` directive.
    """
    order: dict[State, int] = {lts.initial: 0}
    queue = deque([lts.initial])
    while queue:
        s = queue.popleft()
        for _, dst in lts.outgoing(s):
            if dst not in order:
                order[dst] = len(order)
                queue.append(dst)
    transitions = sorted(
        (
            (order[src], label, order[dst])
            for src, label, dst in lts.transitions
            if src in order and dst in order
        ),
    )
    used = {label for _, label, _ in transitions}
    unused = sorted(lts.alphabet - used)
    lines = [f"des (0,{len(transitions)},{len(order)})"]
    lines.extend(f'({src},"{label}",{dst})' for src, label, dst in transitions)
    if unused:
        lines.append(f"{_ALPHABET_DIRECTIVE} {' '.join(unused)}")
    return "\n".join(lines) + "\n"


def emit_dot(lts: Lts, highlight: Iterable[Transition] = ()) -> str:
    """Render to DOT with the initial state double-circled; highlighted
    transitions are drawn dashed and must exist in the system."""
    highlight = set(highlight)
    missing = highlight - set(lts.transitions)
    if missing:
        src, label, dst = next(iter(missing))
        raise ValueError(
            f"highlighted transition ({format_state(src)},{label},{format_state(dst)})"
            " is not in the system"
        )
    lines = ["digraph lts {", "  rankdir=LR;", '  node [shape=circle];']
    for s in sorted(lts.states, key=state_key):
        shape = "doublecircle" if s == lts.initial else "circle"
        lines.append(f'  "{format_state(s)}" [shape={shape}];')
    for src, label, dst in sorted(
        lts.transitions, key=lambda t: (state_key(t[0]), t[1], state_key(t[2]))
    ):
        style = ', style=dashed' if (src, label, dst) in highlight else ""
        lines.append(
            f'  "{format_state(src)}" -> "{format_state(dst)}" [label="{label}"{style}];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Isomorphism

def _signatures(lts: Lts, rounds: int = 2) -> dict:
    incoming: dict[State, list] = {s: [] for s in lts.states}
    for src, label, dst in lts.transitions:
        incoming[dst].append((label, src))
    sig = {
        s: (
            s == lts.initial,
            tuple(sorted(label for label, _ in lts.outgoing(s))),
            tuple(sorted(label for label, _ in incoming[s])),
        )
        for s in lts.states
    }
    for _ in range(rounds):
        sig = {
            s: (
                sig[s],
                tuple(sorted((label, sig[t]) for label, t in lts.outgoing(s))),
                tuple(sorted((label, sig[t]) for label, t in incoming[s])),
            )
            for s in lts.states
        }
    return {s: hash(v) for s, v in sig.items()}


def isomorphic(left: Lts, right: Lts) -> Optional[dict]:
    """Search for a label-preserving bijection between the reachable parts.

    Returns a state mapping from left to right, or None.  Backtracking is
    pruned by iterated degree/label signatures; initial must map to initial.
    """
    left = restrict_to_reachable(left)
    right = restrict_to_reachable(right)
    if len(left.states) != len(right.states):
        return None
    if len(left.transitions) != len(right.transitions):
        return None
    lsig = _signatures(left)
    rsig = _signatures(right)
    if sorted(lsig.values()) != sorted(rsig.values()):
        return None
    if lsig[left.initial] != rsig[right.initial]:
        return None

    by_sig: dict[int, list] = {}
    for s in right.states:
        by_sig.setdefault(rsig[s], []).append(s)
    for group in by_sig.values():
        group.sort(key=state_key)

    lin: dict[State, list] = {s: [] for s in left.states}
    for src, label, dst in left.transitions:
        lin[dst].append((label, src))
    rin: dict[State, list] = {s: [] for s in right.states}
    for src, label, dst in right.transitions:
        rin[dst].append((label, src))
    rtrans = set(right.transitions)

    order = sorted(left.states, key=lambda s: (len(by_sig[lsig[s]]), state_key(s)))
    mapping: dict = {}
    used: set = set()

    def consistent(s: State, t: State) -> bool:
        for label, dst in left.outgoing(s):
            if dst in mapping and (t, label, mapping[dst]) not in rtrans:
                return False
        for label, src in lin[s]:
            if src in mapping and (mapping[src], label, t) not in rtrans:
                return False
        return True

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        s = order[i]
        candidates = (
            [right.initial]
            if s == left.initial
            else [t for t in by_sig[lsig[s]] if t not in used]
        )
        for t in candidates:
            if t in used or rsig[t] != lsig[s]:
                continue
            if not consistent(s, t):
                continue
            mapping[s] = t
            used.add(t)
            if extend(i + 1):
                return True
            del mapping[s]
            used.discard(t)
        return False

    if not extend(0):
        return None
    for src, label, dst in left.transitions:
        if (mapping[src], label, mapping[dst]) not in rtrans:
            return None
    return dict(mapping)
