"""Transition-system core: parsing, reachability, composition, isomorphism."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import seeded_lts, w, words
from hmlcause import (
    AutParseError,
    CHOICE_INITIAL,
    choice,
    emit_aut,
    emit_dot,
    init_actions,
    interleave,
    is_acyclic,
    isomorphic,
    longest_acyclic_path,
    make_lts,
    parse_aut,
    project_word,
    reach,
    reachable_states,
    restrict_to_reachable,
    subwords,
)
from hmlcause.testkit import fixtures

FIX = fixtures()

T1_AUT = 'des (0,2,3)\n(0,"a",1)\n(1,"h",2)\n'


# ---------------------------------------------------------------- parsing


def test_parse_aut_linear():
    lts = parse_aut(T1_AUT)
    assert lts.states == frozenset({0, 1, 2})
    assert lts.initial == 0
    assert lts.alphabet == frozenset({"a", "h"})
    assert lts.transitions == frozenset({(0, "a", 1), (1, "h", 2)})


def test_parse_aut_single_state():
    lts = parse_aut("des (0,0,1)\n")
    assert lts.states == frozenset({0})
    assert lts.alphabet == frozenset()
    assert lts.transitions == frozenset()


def test_parse_aut_index_out_of_range():
    with pytest.raises(AutParseError, match="out of range"):
        parse_aut('des (0,1,1)\n(0,"a",5)\n')


def test_parse_aut_malformed_header():
    with pytest.raises(AutParseError, match="header"):
        parse_aut('desx (0,1,2)\n(0,"a",1)\n')


def test_parse_aut_unterminated_label():
    with pytest.raises(AutParseError, match="unterminated"):
        parse_aut('des (0,1,2)\n(0,"a,1)\n')


def test_parse_aut_alphabet_directive():
    lts = parse_aut('des (0,1,2)\n(0,"a",1)\n#alphabet: h x\n')
    assert lts.alphabet == frozenset({"a", "h", "x"})


def test_emit_parse_round_trip_on_fixture():
    t4 = FIX["t4"][0]
    back = parse_aut(emit_aut(t4))
    assert isomorphic(back, t4) is not None
    assert len(back.transitions) == len(t4.transitions)


# ---------------------------------------------------------------- dot


def test_emit_dot_plain():
    t1 = FIX["t1"][0]
    dot = emit_dot(t1)
    assert dot.startswith("digraph")
    assert "doublecircle" in dot
    assert dot.count("->") == len(t1.transitions)


def test_emit_dot_highlight():
    t1 = FIX["t1"][0]
    dot = emit_dot(t1, highlight={("s10", "a", "s11")})
    assert "dashed" in dot


def test_emit_dot_foreign_highlight_rejected():
    t1 = FIX["t1"][0]
    with pytest.raises(ValueError):
        emit_dot(t1, highlight={("s10", "z", "s11")})


# ---------------------------------------------------------------- words


def test_reach_examples():
    t1 = FIX["t1"][0]
    t3 = FIX["t3"][0]
    assert reach(t1, "s10", w("ah")) == frozenset({"s12"})
    assert reach(t3, "s30", w("a")) == frozenset({"s31", "s32"})
    assert reach(t1, "s10", w("hh")) == frozenset()


def test_reach_epsilon_reflexive():
    t4 = FIX["t4"][0]
    for s in t4.states:
        assert reach(t4, s, ()) == frozenset({s})


def test_reach_unknown_state():
    with pytest.raises(ValueError):
        reach(FIX["t1"][0], "nope", ())


def test_init_actions_examples():
    t1 = FIX["t1"][0]
    t4 = FIX["t4"][0]
    assert init_actions(t1, "s10") == frozenset({"a"})
    assert init_actions(t1, "s12") == frozenset()
    assert init_actions(t4, "s42") == frozenset({"h", "b"})


def test_subwords_examples():
    assert subwords(w("ab")) == frozenset({(), w("a"), w("b")})
    assert subwords(w("a")) == frozenset({()})
    assert subwords(w("aba")) == words("", "a", "b", "ab", "ba", "aa")
    # the word itself is never a subword, and the empty word has none
    assert subwords(()) == frozenset()


def test_project_word_examples():
    assert project_word(w("adbe"), {"a", "b"}) == w("ab")
    assert project_word((), {"a"}) == ()
    assert project_word(w("ddd"), {"a"}) == ()


# ---------------------------------------------------------------- composition


def test_interleave_frozen_right_component():
    t1 = FIX["t1"][0]
    unit = make_lts("u", [])
    prod = interleave(t1, unit)
    assert len(prod.states) == len(t1.states)
    assert isomorphic(prod, t1) is not None


def test_interleave_fig3_transitions():
    left = FIX["fig3_t"][0]
    right = FIX["fig3_tp"][0]
    prod = interleave(left, right)
    assert (("s0", "p0"), "a", ("s1", "p0")) in prod.transitions
    assert (("s0", "p0"), "d", ("s0", "p1")) in prod.transitions
    assert prod.initial == ("s0", "p0")
    assert prod.alphabet == left.alphabet | right.alphabet


def test_interleave_reachable_count():
    t1 = FIX["t1"][0]
    copy = make_lts("x10", [("x10", "c", "x11"), ("x11", "k", "x12")])
    assert len(interleave(t1, copy).states) == 9


def test_choice_initial_actions_union():
    t1 = FIX["t1"][0]
    other = make_lts("x10", [("x10", "c", "x11"), ("x11", "k", "x12")])
    sum_lts = choice(t1, other)
    assert sum_lts.initial == CHOICE_INITIAL
    assert init_actions(sum_lts, CHOICE_INITIAL) == init_actions(
        t1, "s10"
    ) | init_actions(other, "x10")
    outgoing = [t for t in sum_lts.transitions if t[0] == CHOICE_INITIAL]
    assert len(outgoing) == 2


def test_choice_preserves_tail_behavior():
    t1 = FIX["t1"][0]
    other = make_lts("x10", [("x10", "c", "x11"), ("x11", "k", "x12")])
    sum_lts = choice(t1, other)
    assert ("L:s11", "h", "L:s12") in sum_lts.transitions
    assert ("R:x11", "k", "R:x12") in sum_lts.transitions


# ---------------------------------------------------------------- isomorphism


def test_isomorphic_identity():
    t1 = FIX["t1"][0]
    mapping = isomorphic(t1, t1)
    assert mapping == {s: s for s in t1.states}


def test_isomorphic_renaming():
    t1 = FIX["t1"][0]
    renamed = make_lts("r0", [("r0", "a", "r1"), ("r1", "h", "r2")])
    mapping = isomorphic(t1, renamed)
    assert mapping == {"s10": "r0", "s11": "r1", "s12": "r2"}


def test_isomorphic_distinguishes_branching():
    assert isomorphic(FIX["t1"][0], FIX["t3"][0]) is None


def test_isomorphic_mismatched_alphabets():
    t1 = FIX["t1"][0]
    relabeled = make_lts("r0", [("r0", "c", "r1"), ("r1", "k", "r2")])
    assert isomorphic(t1, relabeled) is None


# ---------------------------------------------------------------- shape


def test_acyclicity_and_longest_path():
    t1 = FIX["t1"][0]
    t2 = FIX["t2"][0]
    t5 = FIX["t5"][0]
    assert is_acyclic(t1) and longest_acyclic_path(t1) == 2
    assert not is_acyclic(t2) and longest_acyclic_path(t2) is None
    assert not is_acyclic(t5)


def test_restrict_to_reachable_drops_orphans():
    lts = make_lts(
        "a0",
        [("a0", "x", "a1"), ("b0", "x", "b1")],
    )
    trimmed = restrict_to_reachable(lts)
    assert trimmed.states == frozenset({"a0", "a1"})


# ---------------------------------------------------------------- properties

short_words = st.lists(
    st.sampled_from(["La", "Lb", "Lc"]), max_size=4
).map(tuple)


@settings(max_examples=40, deadline=None, derandomize=True)
@given(seed=st.integers(0, 400), word=short_words)
def test_reach_step_rule(seed, word):
    """Appending one letter to the word composes with a single step."""
    lts = seeded_lts(seed, namespace="L")
    for label in sorted(lts.alphabet):
        direct = reach(lts, lts.initial, word + (label,))
        prefix = reach(lts, lts.initial, word)
        stepped = frozenset(
            t for s in prefix for t in lts.successors(s, label)
        )
        assert direct == stepped


@settings(max_examples=30, deadline=None, derandomize=True)
@given(seed=st.integers(0, 400))
def test_interleave_commutes_under_pair_swap(seed):
    left = seeded_lts(seed, namespace="L")
    right = seeded_lts(seed, namespace="R")
    ab = interleave(left, right)
    ba = interleave(right, left)
    swap = {s: (s[1], s[0]) for s in ab.states}
    assert set(swap.values()) == set(ba.states)
    assert {(swap[s], a, swap[t]) for (s, a, t) in ab.transitions} == set(
        ba.transitions
    )
    assert isomorphic(ab, ba) is not None


@settings(max_examples=30, deadline=None, derandomize=True)
@given(seed=st.integers(0, 400))
def test_interleave_moves_one_component(seed):
    left = seeded_lts(seed, namespace="L")
    right = seeded_lts(seed, namespace="R")
    for (src, _label, dst) in interleave(left, right).transitions:
        changed = (src[0] != dst[0]) + (src[1] != dst[1])
        assert changed == 1


@settings(max_examples=60, deadline=None, derandomize=True)
@given(u=short_words, v=short_words)
def test_project_word_concatenation(u, v):
    alpha = {"La", "Lc"}
    assert project_word(u + v, alpha) == project_word(u, alpha) + project_word(
        v, alpha
    )
    assert len(u) == len(project_word(u, {"La", "Lb", "Lc"}))


@settings(max_examples=30, deadline=None, derandomize=True)
@given(seed=st.integers(0, 400))
def test_parse_emit_identity(seed):
    lts = seeded_lts(seed)
    back = parse_aut(emit_aut(lts))
    trimmed = restrict_to_reachable(lts)
    assert len(back.states) == len(trimmed.states)
    assert len(back.transitions) == len(trimmed.transitions)
    assert isomorphic(back, trimmed) is not None


@settings(max_examples=20, deadline=None, derandomize=True)
@given(seed=st.integers(0, 400))
def test_isomorphic_equivalence_on_renamed_copies(seed):
    lts = seeded_lts(seed)

    def renamed(prefix):
        table = {s: f"{prefix}{s}" for s in lts.states}
        return make_lts(
            table[lts.initial],
            [(table[s], a, table[t]) for (s, a, t) in lts.transitions],
            extra_labels=lts.alphabet,
            extra_states=[table[s] for s in lts.states],
        )

    a, b, c = lts, renamed("m_"), renamed("n_")
    ab = isomorphic(a, b)
    bc = isomorphic(b, c)
    assert ab is not None and bc is not None
    # symmetry: the inverse of a witness is a witness
    ba = {v: k for k, v in ab.items()}
    assert isomorphic(b, a) is not None
    assert ba[ab[a.initial]] == a.initial
    # transitivity along the composed map
    ac = isomorphic(a, c)
    assert ac is not None


@settings(max_examples=60, deadline=None, derandomize=True)
@given(word=short_words)
def test_subwords_are_proper_subsequences(word):
    from helpers import is_subsequence

    subs = subwords(word)
    assert word not in subs
    if word:
        assert () in subs
    for sub in subs:
        assert len(sub) < len(word)
        assert is_subsequence(sub, word)
