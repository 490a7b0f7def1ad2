"""Bounded cause analysis: which minimal executions make an effect unavoidable.

A cause is a computation whose core always leads into the effect, whose
extension lists enumerate exactly the bounded continuations that escape it,
and which is minimal among its sub-cores.  All word quantifiers are explored
up to a per-gap extension bound k; on acyclic systems a large enough k makes
the analysis exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional

from .computation import (
    Computation,
    Core,
    computation_traces,
    size_compatible,
    trivial_computation,
)
from .hml import EffectContext, format_formula, satisfies, states_satisfying
from .lts import (
    Lts,
    State,
    Word,
    _state_to_json,
    format_state,
    longest_acyclic_path,
    reach,
    reachable_states,
    state_key,
    step,
    subwords,
)


class Classification(Enum):
    """How the states reached by one word relate to the effect."""

    ALL_SATISFY = "AllSatisfy"
    ALL_VIOLATE = "AllViolate"
    MIXED = "Mixed"
    NOT_EXECUTABLE = "NotExecutable"


class Exactness(Enum):
    EXACT = "exact"
    BOUNDED_APPROX = "bounded"


@dataclass(frozen=True)
class ConditionReport:
    """Outcome per condition; None marks a condition that was never reached
    because an earlier one already failed."""

    ac1: Optional[bool] = None
    ac2a: Optional[bool] = None
    ac2b: Optional[bool] = None
    ac2c: Optional[bool] = None
    ac3: Optional[bool] = None

    @property
    def first_failed(self) -> Optional[str]:
        for name in ("ac1", "ac2a", "ac2b", "ac2c", "ac3"):
            if getattr(self, name) is False:
                return name.upper()
        return None

    @property
    def all_passed(self) -> bool:
        return all(
            getattr(self, name) is True
            for name in ("ac1", "ac2a", "ac2b", "ac2c", "ac3")
        )


@dataclass(frozen=True)
class CauseReport:
    computation: Computation
    kill_traces: frozenset
    diagnostics: ConditionReport
    bound: int

    def sort_key(self):
        return self.computation.core.sort_key()

    def to_json(self) -> dict:
        return {
            "core": {
                "states": [_state_to_json(s) for s in self.computation.states],
                "labels": list(self.computation.labels),
            },
            "kill_traces": [list(w) for w in sorted(self.kill_traces)],
            "dlists": [[list(w) for w in dl] for dl in self.computation.dlists],
        }


@dataclass(frozen=True)
class CauseSet:
    causes: tuple
    effect: EffectContext
    bound: int
    exactness: Exactness
    immediate: bool = False

    def to_json(self) -> dict:
        return {
            "effect": format_formula(self.effect.formula),
            "bound": self.bound,
            "exactness": self.exactness.value,
            "causes": [c.to_json() for c in self.causes],
        }


def exploration_is_exact(lts: Lts, k: int) -> bool:
    """Bounded exploration loses nothing on an acyclic system once k covers
    its longest path."""
    longest = longest_acyclic_path(lts)
    return longest is not None and k >= longest


def default_bound(lts: Lts) -> int:
    return len(lts.states)


def classify_word(ctx: EffectContext, word: Word) -> Classification:
    """Classify a word by the effect status of every state it can reach."""
    reached = reach(ctx.lts, ctx.lts.initial, tuple(word))
    return _classify(reached, states_satisfying(ctx.lts, ctx.formula))


def _classify(reached: frozenset, sat: frozenset) -> Classification:
    if not reached:
        return Classification.NOT_EXECUTABLE
    if reached <= sat:
        return Classification.ALL_SATISFY
    if not (reached & sat):
        return Classification.ALL_VIOLATE
    return Classification.MIXED


def _shaped_words(lts: Lts, core_labels: Word, k: int) -> dict:
    """All executable words that interleave the core labels, in order, with
    a gap of at most k extra letters after each core letter.  Maps each word
    to the full set of states it reaches from the initial state.

    There is no gap before the first core letter: every word starts with it.
    """
    m = len(core_labels)
    alphabet = sorted(lts.alphabet)
    result: dict[Word, frozenset] = {}
    seen: set = set()
    stack: list[tuple[Word, frozenset, int, int]] = [
        ((), frozenset({lts.initial}), 0, 0)
    ]
    while stack:
        word, reached, consumed, gap = stack.pop()
        key = (word, consumed, gap)
        if key in seen:
            continue
        seen.add(key)
        if consumed == m:
            result.setdefault(word, reached)
        if consumed < m:
            nxt = step(lts, reached, core_labels[consumed])
            if nxt:
                stack.append(
                    (word + (core_labels[consumed],), nxt, consumed + 1, 0)
                )
        if consumed >= 1 and gap < k:
            for label in alphabet:
                nxt = step(lts, reached, label)
                if nxt:
                    stack.append((word + (label,), nxt, consumed, gap + 1))
    return result


def extension_universe(lts: Lts, core: Core, k: int) -> frozenset:
    """The bounded word universe a candidate for this core is judged on."""
    _require_valid_core(lts, core)
    return frozenset(_shaped_words(lts, core.labels, k))


def _decompose_greedy(core_labels: Word, word: Word) -> Optional[tuple]:
    """Split word as core letters with interleaved gaps, matching every core
    letter at its leftmost possible position.  None when word lacks the
    shape."""
    m = len(core_labels)
    positions: list[int] = []
    i = 0
    for letter in core_labels:
        j = i
        while j < len(word) and word[j] != letter:
            j += 1
        if j == len(word):
            return None
        positions.append(j)
        i = j + 1
    if m and positions[0] != 0:
        return None
    gaps = []
    for t in range(m):
        lo = positions[t] + 1
        hi = positions[t + 1] if t + 1 < m else len(word)
        gaps.append(tuple(word[lo:hi]))
    return tuple(gaps)


def _require_valid_core(lts: Lts, core: Core) -> None:
    if core.first != lts.initial:
        raise ValueError("cores are anchored at the initial state")
    for i, label in enumerate(core.labels):
        if (core.states[i], label, core.states[i + 1]) not in lts.transitions:
            raise ValueError(
                f"core step ({format_state(core.states[i])},{label},"
                f"{format_state(core.states[i + 1])}) is not a transition"
            )


def _universe_verdict(lts: Lts, sat: frozenset, core_labels: Word, k: int):
    """(clean, kill): kill collects the bounded words that always escape the
    effect; clean is False when the core or any remaining word can reach
    both effect and non-effect states."""
    kill: list[Word] = []
    clean = True
    for word, reached in _shaped_words(lts, core_labels, k).items():
        if word == core_labels:
            # the bare core is judged with the complement: it must always satisfy
            if not reached <= sat:
                clean = False
            continue
        if reached <= sat:
            continue
        if reached & sat:
            clean = False
            continue
        kill.append(word)
    return clean, frozenset(kill)


def _dlists_from_kill(core_labels: Word, kill: frozenset) -> tuple:
    ordered = sorted(kill)
    per_trace = []
    for word in ordered:
        gaps = _decompose_greedy(core_labels, word)
        if gaps is None:
            raise RuntimeError(f"escape trace {word!r} does not embed the core")
        per_trace.append(gaps)
    return tuple(
        tuple(gaps[i] for gaps in per_trace) for i in range(len(core_labels))
    )


def cause_candidate(
    ctx: EffectContext, core: Core, k: int
) -> tuple[Optional[Computation], ConditionReport]:
    """Evaluate one core against the occurrence and non-occurrence
    conditions, constructing its extension lists when they hold.

    Minimality is the caller's concern; the returned diagnostics leave it
    unset.  The computation is absent when some condition fails, and the
    report shows the first failure.
    """
    _require_valid_core(ctx.lts, core)
    lts, formula = ctx.lts, ctx.formula
    sat = states_satisfying(lts, formula)
    ac1 = core.final in sat
    if not ac1:
        return None, ConditionReport(ac1=False)
    ac2a = bool(reachable_states(lts) - sat)
    if not ac2a:
        return None, ConditionReport(ac1=True, ac2a=False)
    clean, kill = _universe_verdict(lts, sat, core.labels, k)
    if not clean:
        return None, ConditionReport(ac1=True, ac2a=True, ac2b=False)
    truncated = False
    if not exploration_is_exact(lts, k):
        clean_next, kill_next = _universe_verdict(lts, sat, core.labels, k + 1)
        truncated = (not clean_next) or kill_next != kill
    computation = Computation(
        states=core.states,
        labels=core.labels,
        dlists=_dlists_from_kill(core.labels, kill),
        truncated=truncated,
    )
    ac2c = _recheck_literal(lts, sat, computation, kill)
    if not ac2c:
        return None, ConditionReport(ac1=True, ac2a=True, ac2b=True, ac2c=False)
    return computation, ConditionReport(
        ac1=True, ac2a=True, ac2b=True, ac2c=True
    )


def _recheck_literal(
    lts: Lts, sat: frozenset, computation: Computation, kill: frozenset
) -> bool:
    """Re-derive the traces from the built extension lists and confirm each
    escape trace really avoids the effect everywhere it can land."""
    expanded = computation_traces(computation)
    expected = kill if kill else {computation.labels}
    if expanded != frozenset(expected):
        raise RuntimeError("extension lists do not flatten back to the escape traces")
    for word in kill:
        reached = reach(lts, computation.states[0], word)
        if not reached or reached & sat:
            return False
    return True


def _is_proper_subsequence(shorter: Word, longer: Word) -> bool:
    if len(shorter) >= len(longer):
        return False
    i = 0
    for letter in longer:
        if i < len(shorter) and shorter[i] == letter:
            i += 1
    return i == len(shorter)


def causes(ctx: EffectContext, k: Optional[int] = None) -> CauseSet:
    """All minimal causes of the effect, explored up to bound k.

    Cores of every length up to k are enumerated breadth-first; a core is
    dropped as soon as any strictly smaller label word already admits a
    candidate, which is exactly the minimality condition.  When the effect
    already holds initially the only possible cause is the trivial
    single-state computation, emitted when some reachable state escapes the
    effect and omitted otherwise.
    """
    if k is None:
        k = default_bound(ctx.lts)
    if k < 0:
        raise ValueError("bound must be nonnegative")
    return _causes_cached(ctx, k)


@lru_cache(maxsize=512)
def _causes_cached(ctx: EffectContext, k: int) -> CauseSet:
    lts, formula = ctx.lts, ctx.formula
    sat = states_satisfying(lts, formula)
    exactness = (
        Exactness.EXACT if exploration_is_exact(lts, k) else Exactness.BOUNDED_APPROX
    )
    reachable = reachable_states(lts)
    has_escape = bool(reachable - sat)

    if lts.initial in sat:
        reports: tuple = ()
        if has_escape:
            reports = (
                CauseReport(
                    computation=trivial_computation(lts.initial),
                    kill_traces=frozenset(),
                    diagnostics=ConditionReport(True, True, True, True, True),
                    bound=k,
                ),
            )
        return CauseSet(reports, ctx, k, exactness, immediate=True)

    exact = exactness is Exactness.EXACT
    successful_words: set[Word] = set()
    word_verdicts: dict[Word, tuple[bool, frozenset]] = {}
    accepted: list[CauseReport] = []

    level: list[tuple[tuple, Word]] = [((lts.initial,), ())]
    for _ in range(k):
        grown: list[tuple[tuple, Word]] = []
        for states, labels in level:
            for label, dst in lts.outgoing(states[-1]):
                grown.append((states + (dst,), labels + (label,)))
        grown.sort(key=lambda p: (p[1], tuple(state_key(s) for s in p[0])))
        survivors: list[tuple[tuple, Word]] = []
        for states, labels in grown:
            if any(_is_proper_subsequence(w, labels) for w in successful_words):
                continue
            survivors.append((states, labels))
            if states[-1] not in sat:
                continue
            # has_escape guarantees the counterfactual condition here: the
            # initial state itself escapes the effect in this branch.
            verdict = word_verdicts.get(labels)
            if verdict is None:
                verdict = _universe_verdict(lts, sat, labels, k)
                word_verdicts[labels] = verdict
            clean, kill = verdict
            if not clean:
                continue
            successful_words.add(labels)
            truncated = False
            if not exact:
                clean_next, kill_next = _universe_verdict(lts, sat, labels, k + 1)
                truncated = (not clean_next) or kill_next != kill
            accepted.append(
                CauseReport(
                    computation=Computation(
                        states=states,
                        labels=labels,
                        dlists=_dlists_from_kill(labels, kill),
                        truncated=truncated,
                    ),
                    kill_traces=kill,
                    diagnostics=ConditionReport(True, True, True, True, True),
                    bound=k,
                )
            )
        level = survivors

    accepted.sort(key=CauseReport.sort_key)
    return CauseSet(tuple(accepted), ctx, k, exactness, immediate=False)


def causal_projection(ctx: EffectContext, k: Optional[int] = None) -> Lts:
    """The sub-system spanned by the causal cores: their states and the
    transitions they step through, always keeping the initial state."""
    cause_set = causes(ctx, k)
    states = {ctx.lts.initial}
    transitions: set = set()
    for report in cause_set.causes:
        comp = report.computation
        states.update(comp.states)
        for i, label in enumerate(comp.labels):
            transitions.add((comp.states[i], label, comp.states[i + 1]))
    return Lts(
        frozenset(states), ctx.lts.initial, ctx.lts.alphabet, frozenset(transitions)
    )


# ---------------------------------------------------------------------------
# Independent re-verification
#
# The checks below share no search machinery with the constructive path
# above: words come from a breadth-first walk of all executable words, shape
# membership is decided by a small dynamic program, traces are re-expanded
# by head/tail recursion, and satisfaction is evaluated per state.


@lru_cache(maxsize=8)
def _executable_words(lts: Lts, maxlen: int) -> tuple:
    """Every executable word up to maxlen with the states it reaches."""
    rows: list[tuple[Word, frozenset]] = []
    frontier: list[tuple[Word, frozenset]] = [((), frozenset({lts.initial}))]
    rows.extend(frontier)
    labels = sorted(lts.alphabet)
    for _ in range(maxlen):
        if not frontier:
            break
        nxt: list[tuple[Word, frozenset]] = []
        for word, reached in frontier:
            for label in labels:
                stepped = step(lts, reached, label)
                if stepped:
                    nxt.append((word + (label,), stepped))
        rows.extend(nxt)
        frontier = nxt
    return tuple(rows)


def _matches_shape_bounded(word: Word, core_labels: Word, k: int) -> bool:
    """Dynamic program deciding whether word embeds the core letters in
    order with every inter-letter gap at most k."""
    m = len(core_labels)
    if m == 0:
        return word == ()
    if not word or word[0] != core_labels[0]:
        return False
    states = {(1, 0)}
    for letter in word[1:]:
        nxt = set()
        for consumed, gap in states:
            if consumed < m and letter == core_labels[consumed]:
                nxt.add((consumed + 1, 0))
            if gap < k:
                nxt.add((consumed, gap + 1))
        states = nxt
        if not states:
            return False
    return any(consumed == m for consumed, _ in states)


def _expand_traces_rec(labels: Word, dlists: tuple) -> frozenset:
    """Head/tail expansion of the extension lists."""
    if all(len(dl) == 0 for dl in dlists):
        return frozenset({labels})
    heads = tuple(dl[0] for dl in dlists)
    tails = tuple(dl[1:] for dl in dlists)
    first: list[str] = []
    for label, gap in zip(labels, heads):
        first.append(label)
        first.extend(gap)
    out = {tuple(first)}
    if any(len(dl) > 0 for dl in tails):
        out |= _expand_traces_rec(labels, tails)
    return frozenset(out)


def oracle_check_details(ctx: EffectContext, c: Computation, k: int) -> dict:
    """Per-condition outcome of the naive re-verification of a computation."""
    lts, formula = ctx.lts, ctx.formula
    details = {
        "valid_path": True,
        "valid_sizes": True,
        "valid_traces": True,
        "ac1": False,
        "ac2a": False,
        "ac2b": False,
        "ac2c": False,
        "ac3": False,
    }
    for s in c.states:
        if s not in lts.states:
            details["valid_path"] = False
            return details
    for i, label in enumerate(c.labels):
        if (c.states[i], label, c.states[i + 1]) not in lts.transitions:
            details["valid_path"] = False
            return details
    if c.states[0] != lts.initial:
        details["valid_path"] = False
        return details
    if not size_compatible(c.dlists):
        details["valid_sizes"] = False
        return details

    traced = _expand_traces_rec(c.labels, c.dlists)
    for word in traced:
        if not reach(lts, lts.initial, word):
            details["valid_traces"] = False
            return details

    sat_map = {s: satisfies(lts, s, formula) for s in lts.states}
    details["ac1"] = sat_map[c.states[-1]]
    details["ac2a"] = any(not sat_map[s] for s in reachable_states(lts))

    m = len(c.labels)
    maxlen = m + m * k
    longest = longest_acyclic_path(lts)
    if longest is not None:
        # nothing executes past the longest path; clamping keeps one shared
        # word table per system regardless of core length
        maxlen = min(maxlen, longest)
    table = _executable_words(lts, maxlen)
    core_word = c.labels

    ac2b = True
    for word, reached in table:
        if not _matches_shape_bounded(word, core_word, k):
            continue
        if word != core_word and word in traced:
            continue
        if any(not sat_map[s] for s in reached):
            ac2b = False
            break
    details["ac2b"] = ac2b

    ac2c = True
    for word in traced:
        if word == core_word:
            continue
        reached = reach(lts, lts.initial, word)
        if any(sat_map[s] for s in reached):
            ac2c = False
            break
    details["ac2c"] = ac2c

    ac3 = True
    if details["ac2a"]:
        for smaller in sorted(subwords(core_word)):
            if not any(
                sat_map[path[-1]]
                for path in _paths_from(lts, lts.initial, smaller)
            ):
                continue
            if _admits_candidate(lts, sat_map, table, smaller, k):
                ac3 = False
                break
    details["ac3"] = ac3
    return details


def _admits_candidate(
    lts: Lts, sat_map: dict, table: tuple, core_word: Word, k: int
) -> bool:
    """Extension lists for this label word exist exactly when no bounded
    shaped word straddles the effect boundary and the word itself always
    satisfies the effect."""
    for word, reached in table:
        if not _matches_shape_bounded(word, core_word, k):
            continue
        flags = {sat_map[s] for s in reached}
        if word == core_word:
            if False in flags:
                return False
        elif len(flags) == 2:
            return False
    return True


def _paths_from(lts: Lts, start: State, word: Word) -> list:
    paths = []

    def walk(prefix: tuple, i: int) -> None:
        if i == len(word):
            paths.append(prefix)
            return
        for nxt in sorted(lts.successors(prefix[-1], word[i]), key=state_key):
            walk(prefix + (nxt,), i + 1)

    walk((start,), 0)
    return paths


def oracle_check_cause(ctx: EffectContext, c: Computation, k: int) -> bool:
    """Naive re-verification of a claimed cause; True only when the
    computation is well-formed and every condition holds at bound k."""
    details = oracle_check_details(ctx, c, k)
    return all(bool(v) for v in details.values())
