"""Compositional laws for causes in interleaved, non-communicating systems.

Two components with disjoint alphabets run side by side.  For a disjunctive
effect the causal projection of the product is, up to a fixed renaming, the
choice of the component projections; for a conjunctive effect it is their
product, literally.  The verifiers here check both laws on concrete
instances and produce witnesses or counterexamples.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Callable, Optional

from .causality import Classification, causal_projection, causes, classify_word
from .hml import (
    And,
    EffectContext,
    Or,
    format_formula,
    formula_alphabet,
    is_immediate_effect,
)
from .lts import (
    CHOICE_INITIAL,
    Lts,
    choice,
    emit_aut,
    format_state,
    interleave,
    isomorphic,
    project_word,
)


@dataclass(frozen=True)
class PreconditionReport:
    ok: bool
    issues: tuple


def check_preconditions(left_lts, right_lts, left_formula, right_formula) -> PreconditionReport:
    """The laws assume disjoint alphabets, effects stated over their own
    component's alphabet, and effects that have not already occurred
    initially."""
    issues = []
    shared = left_lts.alphabet & right_lts.alphabet
    if shared:
        issues.append("alphabets share labels: " + ", ".join(sorted(shared)))
    stray_left = formula_alphabet(left_formula) - left_lts.alphabet
    if stray_left:
        issues.append(
            "left effect uses labels outside its component: "
            + ", ".join(sorted(stray_left))
        )
    stray_right = formula_alphabet(right_formula) - right_lts.alphabet
    if stray_right:
        issues.append(
            "right effect uses labels outside its component: "
            + ", ".join(sorted(stray_right))
        )
    if not stray_left and is_immediate_effect(
        EffectContext(left_lts, left_formula)
    ):
        issues.append("left effect already holds at the initial state")
    if not stray_right and is_immediate_effect(
        EffectContext(right_lts, right_formula)
    ):
        issues.append("right effect already holds at the initial state")
    return PreconditionReport(not issues, tuple(issues))


def _check_ctx_preconditions(
    left: EffectContext, right: EffectContext
) -> PreconditionReport:
    return check_preconditions(
        left.lts, right.lts, left.formula, right.formula
    )


@dataclass(frozen=True)
class TheoremReport:
    theorem: str
    verdict: str
    witness: Optional[dict]
    counterexample: Optional[dict]
    bound: int

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem,
            "verdict": self.verdict,
            "witness": self.witness,
            "counterexample": self.counterexample,
            "bound": self.bound,
        }


def _is_isomorphism(a: Lts, b: Lts, mapping: dict) -> bool:
    if a.alphabet != b.alphabet:
        return False
    if set(mapping.keys()) != set(a.states):
        return False
    if len(set(mapping.values())) != len(mapping) or set(
        mapping.values()
    ) != set(b.states):
        return False
    if mapping[a.initial] != b.initial:
        return False
    mapped = {(mapping[s], label, mapping[t]) for s, label, t in a.transitions}
    return mapped == set(b.transitions)


def _renaming_witness(lhs: Lts, left_init, right_init) -> Optional[dict]:
    """The expected disjunction renaming: the joint initial state becomes the
    fresh choice initial, pairs that kept the right side at rest go to the
    left branch, and symmetrically."""
    mapping = {}
    for s in lhs.states:
        if not (isinstance(s, tuple) and len(s) == 2):
            return None
        l, r = s
        if l == left_init and r == right_init:
            mapping[s] = CHOICE_INITIAL
        elif r == right_init:
            mapping[s] = "L:" + format_state(l)
        elif l == left_init:
            mapping[s] = "R:" + format_state(r)
        else:
            return None
    return mapping


def _counterexample_payload(
    left: EffectContext, right: EffectContext, lhs: Lts, rhs: Lts, reason: str
) -> dict:
    return {
        "reason": reason,
        "left": {
            "aut": emit_aut(left.lts),
            "formula": format_formula(left.formula),
        },
        "right": {
            "aut": emit_aut(right.lts),
            "formula": format_formula(right.formula),
        },
        "lhs": emit_aut(lhs),
        "rhs": emit_aut(rhs),
    }


def _witness_json(mapping: dict) -> dict:
    return {
        format_state(s): format_state(t)
        for s, t in sorted(mapping.items(), key=lambda kv: format_state(kv[0]))
    }


def _precondition_report(theorem: str, pre: PreconditionReport, k: int) -> TheoremReport:
    return TheoremReport(
        theorem=theorem,
        verdict="precondition",
        witness=None,
        counterexample={"preconditions": list(pre.issues)},
        bound=k,
    )


def _resolve_bound(left: EffectContext, right: EffectContext, k: Optional[int]) -> tuple:
    composite = interleave(left.lts, right.lts)
    if k is None:
        k = len(composite.states)
    return composite, k


def verify_disjunction_theorem(
    left: EffectContext, right: EffectContext, k: Optional[int] = None
) -> TheoremReport:
    """Causal projection of the product under "either effect" should be the
    choice of the component projections, up to the branch renaming."""
    composite, k = _resolve_bound(left, right, k)
    pre = _check_ctx_preconditions(left, right)
    if not pre.ok:
        return _precondition_report("disjunction", pre, k)
    lhs = causal_projection(
        EffectContext(composite, Or(left.formula, right.formula)), k
    )
    rhs = choice(causal_projection(left, k), causal_projection(right, k))
    mapping = _renaming_witness(lhs, left.lts.initial, right.lts.initial)
    if mapping is not None and _is_isomorphism(lhs, rhs, mapping):
        return TheoremReport(
            "disjunction", "holds", _witness_json(mapping), None, k
        )
    fallback = isomorphic(lhs, rhs)
    if fallback is not None:
        return TheoremReport(
            "disjunction", "holds", _witness_json(fallback), None, k
        )
    return TheoremReport(
        "disjunction",
        "fails",
        None,
        _counterexample_payload(
            left, right, lhs, rhs, "projections are not isomorphic"
        ),
        k,
    )


def verify_conjunction_theorem(
    left: EffectContext, right: EffectContext, k: Optional[int] = None
) -> TheoremReport:
    """Causal projection of the product under "both effects" should equal the
    product of the component projections, state for state."""
    composite, k = _resolve_bound(left, right, k)
    pre = _check_ctx_preconditions(left, right)
    if not pre.ok:
        return _precondition_report("conjunction", pre, k)
    lhs = causal_projection(
        EffectContext(composite, And(left.formula, right.formula)), k
    )
    left_causes = causes(left, k)
    right_causes = causes(right, k)
    if not left_causes.causes or not right_causes.causes:
        # one side can never be caused, so nothing is causal on the product
        # side either: both projections collapse to the bare initial state
        pair = (left.lts.initial, right.lts.initial)
        rhs = Lts(
            frozenset({pair}),
            pair,
            left.lts.alphabet | right.lts.alphabet,
            frozenset(),
        )
    else:
        rhs = interleave(causal_projection(left, k), causal_projection(right, k))
    if lhs == rhs:
        return TheoremReport("conjunction", "holds", None, None, k)
    reason = "projections differ"
    if isomorphic(lhs, rhs) is not None:
        reason = "projections are isomorphic but not equal"
    return TheoremReport(
        "conjunction",
        "fails",
        None,
        _counterexample_payload(left, right, lhs, rhs, reason),
        k,
    )


def verify_both(
    left: EffectContext, right: EffectContext, k: Optional[int] = None
) -> tuple:
    return (
        verify_disjunction_theorem(left, right, k),
        verify_conjunction_theorem(left, right, k),
    )


@dataclass(frozen=True)
class CrossCheckReport:
    ok: bool
    detail: str


def cross_check_single_component(
    left: EffectContext, right: EffectContext, k: Optional[int] = None
) -> CrossCheckReport:
    """Every cause of "either effect" on the product must move only one
    component, and its first label tells which one."""
    composite, k = _resolve_bound(left, right, k)
    pre = _check_ctx_preconditions(left, right)
    if not pre.ok:
        return CrossCheckReport(False, "; ".join(pre.issues))
    ctx = EffectContext(composite, Or(left.formula, right.formula))
    for report in causes(ctx, k).causes:
        labels = report.computation.labels
        if not labels:
            continue
        sides = {
            "left" if label in left.lts.alphabet else "right"
            for label in labels
        }
        if len(sides) > 1:
            return CrossCheckReport(
                False, f"core {labels} moves both components"
            )
        # corollary: the first label identifies the moving component, and
        # projecting the core onto that alphabet lands on one of the
        # component's own cause cores
        if labels[0] in left.lts.alphabet:
            side_ctx, alpha, name = left, left.lts.alphabet, "left"
        else:
            side_ctx, alpha, name = right, right.lts.alphabet, "right"
        projected = project_word(labels, alpha)
        side_cores = {
            r.computation.labels for r in causes(side_ctx, k).causes
        }
        if projected not in side_cores:
            return CrossCheckReport(
                False,
                f"core {labels} projects to {projected}, which is not a "
                f"cause core of the {name} component",
            )
    return CrossCheckReport(True, "all cores single-component")


def cross_check_disjunction_lifting(
    left: EffectContext, right: EffectContext, k: Optional[int] = None
) -> CrossCheckReport:
    """Causes of "either effect" on the product must be exactly the component
    causes run while the other component stays at rest, and every escape
    trace must still escape when projected onto the moving component."""
    composite, k = _resolve_bound(left, right, k)
    pre = _check_ctx_preconditions(left, right)
    if not pre.ok:
        return CrossCheckReport(False, "; ".join(pre.issues))
    ctx = EffectContext(composite, Or(left.formula, right.formula))
    composite_causes = causes(ctx, k).causes

    expected = set()
    for side, side_ctx, partner_init, on_left in (
        ("left", left, right.lts.initial, True),
        ("right", right, left.lts.initial, False),
    ):
        for report in causes(side_ctx, k).causes:
            comp = report.computation
            if on_left:
                lifted = tuple((s, partner_init) for s in comp.states)
            else:
                lifted = tuple((partner_init, s) for s in comp.states)
            expected.add((lifted, comp.labels))

    actual = {
        (r.computation.states, r.computation.labels) for r in composite_causes
    }
    if actual != expected:
        missing = expected - actual
        extra = actual - expected
        return CrossCheckReport(
            False,
            f"lifting mismatch: {len(missing)} expected lifts missing, "
            f"{len(extra)} unexpected causes",
        )

    for report in composite_causes:
        labels = report.computation.labels
        if not labels:
            continue
        if labels[0] in left.lts.alphabet:
            moving, moving_alpha = left, left.lts.alphabet
        else:
            moving, moving_alpha = right, right.lts.alphabet
        for trace in report.kill_traces:
            projected = project_word(trace, moving_alpha)
            if (
                classify_word(moving, projected)
                is not Classification.ALL_VIOLATE
            ):
                return CrossCheckReport(
                    False,
                    f"escape trace {trace} projects to {projected}, which "
                    "does not always escape in its own component",
                )
    return CrossCheckReport(True, "composite causes are exactly the lifts")


def _context_still_fails(
    left: EffectContext,
    right: EffectContext,
    k: int,
    verify: Callable[[EffectContext, EffectContext, int], TheoremReport],
) -> bool:
    if not _check_ctx_preconditions(left, right).ok:
        return False
    try:
        return verify(left, right, k).verdict == "fails"
    except ValueError:
        return False


def shrink_counterexample(
    left: EffectContext,
    right: EffectContext,
    k: int,
    verify: Callable[[EffectContext, EffectContext, int], TheoremReport],
) -> tuple:
    """Greedily drop transitions, then states, from either component while
    the law still fails and the preconditions still hold."""
    current = (left, right)

    def rebuild(lts: Lts, ctx: EffectContext) -> Optional[EffectContext]:
        try:
            return EffectContext(lts, ctx.formula)
        except ValueError:
            return None

    changed = True
    while changed:
        changed = False
        for side in (0, 1):
            ctx = current[side]
            for tr in sorted(
                ctx.lts.transitions, key=lambda t: (t[1], format_state(t[0]))
            ):
                smaller = Lts(
                    ctx.lts.states,
                    ctx.lts.initial,
                    ctx.lts.alphabet,
                    ctx.lts.transitions - {tr},
                )
                candidate = rebuild(smaller, ctx)
                if candidate is None:
                    continue
                trial = (
                    (candidate, current[1])
                    if side == 0
                    else (current[0], candidate)
                )
                if _context_still_fails(trial[0], trial[1], k, verify):
                    current = trial
                    changed = True
                    break
            if changed:
                break
        if changed:
            continue
        for side in (0, 1):
            ctx = current[side]
            for s in sorted(ctx.lts.states, key=format_state):
                if s == ctx.lts.initial:
                    continue
                smaller = Lts(
                    ctx.lts.states - {s},
                    ctx.lts.initial,
                    ctx.lts.alphabet,
                    frozenset(
                        t
                        for t in ctx.lts.transitions
                        if t[0] != s and t[2] != s
                    ),
                )
                candidate = rebuild(smaller, ctx)
                if candidate is None:
                    continue
                trial = (
                    (candidate, current[1])
                    if side == 0
                    else (current[0], candidate)
                )
                if _context_still_fails(trial[0], trial[1], k, verify):
                    current = trial
                    changed = True
                    break
            if changed:
                break
    return current


def write_counterexample_bundle(
    directory: str,
    left: EffectContext,
    right: EffectContext,
    k: int,
    report: TheoremReport,
) -> None:
    """Persist a failing instance as a directory of plain files."""
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, "left.aut"), "w") as fh:
        fh.write(emit_aut(left.lts))
    with open(os.path.join(directory, "right.aut"), "w") as fh:
        fh.write(emit_aut(right.lts))
    with open(os.path.join(directory, "left.formula"), "w") as fh:
        fh.write(format_formula(left.formula) + "\n")
    with open(os.path.join(directory, "right.formula"), "w") as fh:
        fh.write(format_formula(right.formula) + "\n")
    with open(os.path.join(directory, "manifest.json"), "w") as fh:
        json.dump(report.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")
