"""Hennessy-Milner logic: formulas, parsing, and satisfaction over an Lts."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .lts import Lts, State, format_state, valid_label


class Formula:
    """Base class for formula nodes; all nodes are frozen and hashable."""

    __slots__ = ()


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Diamond(Formula):
    label: str
    body: Formula


@dataclass(frozen=True)
class Box(Formula):
    label: str
    body: Formula


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


TT = Top()
FF = Not(TT)


class FormulaParseError(ValueError):
    """Raised with a position when a formula text cannot be parsed."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


_PUNCT = set("<>[]!&|()")


class _Tokenizer:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def _skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> tuple[str, str, int]:
        """(kind, value, position); kind is 'punct', 'word' or 'end'."""
        self._skip_ws()
        start = self.pos
        if start >= len(self.text):
            return ("end", "", start)
        ch = self.text[start]
        if ch in _PUNCT:
            return ("punct", ch, start)
        if ch == '"':
            raise FormulaParseError("unexpected quote character", start)
        end = start
        while end < len(self.text):
            c = self.text[end]
            if c.isspace() or c in _PUNCT or c == '"':
                break
            end += 1
        return ("word", self.text[start:end], start)

    def take(self) -> tuple[str, str, int]:
        kind, value, start = self.peek()
        self.pos = start + (len(value) if value else 0)
        return (kind, value, start)


def parse_formula(text: str) -> Formula:
    """Parse a formula.

    Grammar: tt, ff, <label>F, [label]F, !F, F & F, F | F and parentheses.
    Negation and the modalities bind tighter than conjunction, which binds
    tighter than disjunction; the binary operators associate to the left.
    `ff` is shorthand for `!tt` and has no node of its own.
    """
    tok = _Tokenizer(text)
    formula = _parse_or(tok)
    kind, value, pos = tok.peek()
    if kind != "end":
        raise FormulaParseError(f"unexpected {value!r} after formula", pos)
    return formula


def _parse_or(tok: _Tokenizer) -> Formula:
    node = _parse_and(tok)
    while True:
        kind, value, _ = tok.peek()
        if kind == "punct" and value == "|":
            tok.take()
            node = Or(node, _parse_and(tok))
        else:
            return node


def _parse_and(tok: _Tokenizer) -> Formula:
    node = _parse_unary(tok)
    while True:
        kind, value, _ = tok.peek()
        if kind == "punct" and value == "&":
            tok.take()
            node = And(node, _parse_unary(tok))
        else:
            return node


def _parse_modality_label(tok: _Tokenizer, closing: str) -> str:
    kind, value, pos = tok.take()
    if kind == "punct" and value == closing:
        raise FormulaParseError("empty label inside a modality", pos)
    if kind != "word":
        raise FormulaParseError("expected a label inside the modality", pos)
    if not valid_label(value):
        raise FormulaParseError(f"invalid label {value!r}", pos)
    kind, close, pos = tok.take()
    if kind != "punct" or close != closing:
        raise FormulaParseError(f"expected {closing!r} to close the modality", pos)
    return value


def _parse_unary(tok: _Tokenizer) -> Formula:
    kind, value, pos = tok.peek()
    if kind == "punct":
        if value == "!":
            tok.take()
            return Not(_parse_unary(tok))
        if value == "<":
            tok.take()
            label = _parse_modality_label(tok, ">")
            return Diamond(label, _parse_unary(tok))
        if value == "[":
            tok.take()
            label = _parse_modality_label(tok, "]")
            return Box(label, _parse_unary(tok))
        if value == "(":
            tok.take()
            node = _parse_or(tok)
            kind, close, cpos = tok.take()
            if kind != "punct" or close != ")":
                raise FormulaParseError("expected ')'", cpos)
            return node
        raise FormulaParseError(f"unexpected {value!r}", pos)
    if kind == "word":
        tok.take()
        if value == "tt":
            return TT
        if value == "ff":
            return FF
        raise FormulaParseError(f"unexpected {value!r}", pos)
    raise FormulaParseError("unexpected end of input", pos)


def _prec(f: Formula) -> int:
    match f:
        case Or():
            return 1
        case And():
            return 2
        case _:
            return 3


def format_formula(f: Formula) -> str:
    """Render a formula so that parsing the text yields the same tree."""
    match f:
        case Top():
            return "tt"
        case Diamond(label, body):
            inner = format_formula(body)
            if _prec(body) < 3:
                inner = f"({inner})"
            return f"<{label}>{inner}"
        case Box(label, body):
            inner = format_formula(body)
            if _prec(body) < 3:
                inner = f"({inner})"
            return f"[{label}]{inner}"
        case Not(body):
            inner = format_formula(body)
            if _prec(body) < 3:
                inner = f"({inner})"
            return f"!{inner}"
        case And(left, right):
            lt = format_formula(left)
            rt = format_formula(right)
            if _prec(left) < 2:
                lt = f"({lt})"
            if _prec(right) <= 2:
                rt = f"({rt})"
            return f"{lt} & {rt}"
        case Or(left, right):
            lt = format_formula(left)
            rt = format_formula(right)
            if _prec(left) < 1:
                lt = f"({lt})"
            if _prec(right) <= 1:
                rt = f"({rt})"
            return f"{lt} | {rt}"
    raise TypeError(f"not a formula: {f!r}")


def formula_alphabet(f: Formula) -> frozenset:
    """Labels appearing in modalities."""
    match f:
        case Top():
            return frozenset()
        case Diamond(label, body) | Box(label, body):
            return frozenset({label}) | formula_alphabet(body)
        case Not(body):
            return formula_alphabet(body)
        case And(left, right) | Or(left, right):
            return formula_alphabet(left) | formula_alphabet(right)
    raise TypeError(f"not a formula: {f!r}")


def satisfies(lts: Lts, s: State, f: Formula) -> bool:
    """Satisfaction at a single state, by direct recursion on the formula."""
    if s not in lts.states:
        raise ValueError(f"unknown state {format_state(s)!r}")
    match f:
        case Top():
            return True
        case Diamond(label, body):
            return any(satisfies(lts, t, body) for t in lts.successors(s, label))
        case Box(label, body):
            return all(satisfies(lts, t, body) for t in lts.successors(s, label))
        case Not(body):
            return not satisfies(lts, s, body)
        case And(left, right):
            return satisfies(lts, s, left) and satisfies(lts, s, right)
        case Or(left, right):
            return satisfies(lts, s, left) or satisfies(lts, s, right)
    raise TypeError(f"not a formula: {f!r}")


@lru_cache(maxsize=4096)
def states_satisfying(lts: Lts, f: Formula) -> frozenset:
    """The set of states satisfying f, computed bottom-up over the formula."""
    match f:
        case Top():
            return frozenset(lts.states)
        case Diamond(label, body):
            sat = states_satisfying(lts, body)
            return frozenset(
                s for s in lts.states if lts.successors(s, label) & sat
            )
        case Box(label, body):
            sat = states_satisfying(lts, body)
            return frozenset(
                s for s in lts.states if lts.successors(s, label) <= sat
            )
        case Not(body):
            return frozenset(lts.states) - states_satisfying(lts, body)
        case And(left, right):
            return states_satisfying(lts, left) & states_satisfying(lts, right)
        case Or(left, right):
            return states_satisfying(lts, left) | states_satisfying(lts, right)
    raise TypeError(f"not a formula: {f!r}")


@dataclass(frozen=True)
class EffectContext:
    """An effect formula paired with the system it is interpreted over.

    Every label of the formula must be declared in the system's alphabet;
    AUT inputs can extend the alphabet with an `#alphabet:` directive.
    """

    lts: Lts
    formula: Formula

    def __post_init__(self) -> None:
        missing = formula_alphabet(self.formula) - self.lts.alphabet
        if missing:
            raise ValueError(
                "formula uses labels outside the system alphabet: "
                + ", ".join(sorted(missing))
            )


def is_immediate_effect(ctx: EffectContext) -> bool:
    """True when the effect already holds at the initial state."""
    return satisfies(ctx.lts, ctx.lts.initial, ctx.formula)
