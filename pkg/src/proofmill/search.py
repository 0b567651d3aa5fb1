"""Bounded backward proof search.

The engine works goal-down over the cut-free rules.  Entropy is never
emitted as an explicit proof step: rule matching already folds every
structural preimage of the goal antecedent (see ``apply_rule``), so a
proof found here mentions only logical rules and axioms.

Invertible rules are tried first and committed to: when one matches,
only its first premise list is explored and no other rule is tried at
that goal.  The remaining rules backtrack over every premise list.

Every searched rule strictly decreases the premise total complexity,
which has two useful consequences.  First, a goal can never recur on
its own branch, so the per-branch repeat check never fires (it is kept
as a guard).  Second, once the remaining depth at a goal is at least
its total complexity, depth can never be the reason a subtree fails;
failures found under that condition are final and are memoized.

``Exhausted`` therefore means every candidate collapsed for a final
reason, while ``BudgetExceeded`` means some branch was cut by depth or
by the structural preimage bound and a deeper run might still succeed.
For the multiset systems the default depth already clears the
memoization threshold, so a default-budget run never returns
``BudgetExceeded``: the verdict is a decision procedure there.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .calculus import (
    AX,
    BOX_RE,
    BRINGS_ODOT,
    BRINGS_RE,
    BRINGS_REFL,
    BRINGS_TENSOR,
    BRINGS_WITH,
    LIMP_L,
    LIMP_R,
    LRES_L,
    LRES_R,
    NOT_NEC,
    ODOT_L,
    ODOT_R,
    ONE_L,
    ONE_R,
    RRES_L,
    RRES_R,
    TENSOR_L,
    TENSOR_R,
    WITH_L1,
    WITH_L2,
    WITH_R,
    AGENT_RULES,
    SYSTEM_RULES,
    Proof,
    Rule,
    _Matcher,
    proof_nodes,
)
from .context import Sequent, context_formulas, total_complexity
from .syntax import Formula, subformulas

INVERTIBLE_RULES: tuple[str, ...] = (
    TENSOR_L,
    ODOT_L,
    ONE_L,
    LIMP_R,
    LRES_R,
    RRES_R,
    WITH_R,
)

DEFAULT_RULE_ORDER: tuple[str, ...] = INVERTIBLE_RULES + (
    AX,
    ONE_R,
    BOX_RE,
    BRINGS_RE,
    NOT_NEC,
    BRINGS_REFL,
    WITH_L1,
    WITH_L2,
    LIMP_L,
    LRES_L,
    RRES_L,
    TENSOR_R,
    ODOT_R,
    BRINGS_TENSOR,
    BRINGS_ODOT,
    BRINGS_WITH,
)

DEFAULT_DEPTH_FACTOR = 4


@dataclass(frozen=True)
class SearchBudget:
    """Limits for one search run.

    ``max_depth=None`` resolves to ``4 * total_complexity(goal)``.
    ``rule_order`` lists rule names; names that are unavailable in the
    goal's system (or Cut/Ent, which are never searched) are skipped.
    """

    max_depth: int | None = None
    max_structural: int = 4096
    rule_order: tuple[str, ...] = DEFAULT_RULE_ORDER


@dataclass(frozen=True)
class Proved:
    proof: Proof
    explored: int = 0
    peak_depth: int = 0


@dataclass(frozen=True)
class Exhausted:
    explored: int
    peak_depth: int = 0


@dataclass(frozen=True)
class BudgetExceeded:
    explored: int
    peak_depth: int = 0


SearchResult = Proved | Exhausted | BudgetExceeded


@dataclass
class SearchStats:
    explored: int = 0
    peak_depth: int = 0
    memo_hits: int = 0
    max_depth: int = 0
    truncated: bool = False


class _Engine:
    def __init__(self, goal: Sequent, budget: SearchBudget):
        self.system = goal.system
        self.budget = budget
        self.max_depth = (
            budget.max_depth
            if budget.max_depth is not None
            else DEFAULT_DEPTH_FACTOR * total_complexity(goal)
        )
        avail = SYSTEM_RULES[self.system.ident]
        inv: list[Rule] = []
        rest: list[Rule] = []
        for name in budget.rule_order:
            if name not in avail or name in ("Cut", "Ent"):
                continue
            bucket = inv if name in INVERTIBLE_RULES else rest
            if name in AGENT_RULES:
                bucket.extend(Rule(name, a) for a in self.system.agents)
            else:
                bucket.append(Rule(name))
        self.invertible = tuple(inv)
        self.choice = tuple(rest)
        self.success: dict[Sequent, Proof] = {}
        self.failed: set[Sequent] = set()
        # non-final failures, keyed by the remaining depth they were seen
        # at; anything that failed with more room fails with less
        self.fail_depth: dict[Sequent, int] = {}
        self.stats = SearchStats(max_depth=self.max_depth)
        self.visited: set[Sequent] = set()

    # returns (proof or None, final) where ``final`` marks a failure that
    # no larger budget could turn into a proof
    def search(self, goal: Sequent, depth: int) -> tuple[Proof | None, bool]:
        hit = self.success.get(goal)
        if hit is not None:
            return hit, True
        if goal in self.failed:
            self.stats.memo_hits += 1
            return None, True
        if goal in self.visited:
            return None, False
        if depth >= self.max_depth:
            self.stats.truncated = True
            return None, False
        remaining = self.max_depth - depth
        if self.fail_depth.get(goal, -1) >= remaining:
            self.stats.memo_hits += 1
            return None, False
        self.stats.explored += 1
        if depth > self.stats.peak_depth:
            self.stats.peak_depth = depth
        matcher = _Matcher(goal, self.budget.max_structural)
        if matcher.overflow:
            self.stats.truncated = True
        deep_enough = self.max_depth - depth >= total_complexity(goal)

        self.visited.add(goal)
        try:
            proof, final = self._expand(goal, depth, matcher)
        finally:
            self.visited.discard(goal)

        if proof is not None:
            self.success[goal] = proof
            return proof, True
        final = final and not matcher.overflow
        if final and deep_enough:
            self.failed.add(goal)
        elif remaining > self.fail_depth.get(goal, -1):
            self.fail_depth[goal] = remaining
        return None, final

    def _try_list(
        self, premises: list[Sequent], depth: int
    ) -> tuple[list[Proof] | None, bool]:
        subs: list[Proof] = []
        for prem in premises:
            sub, final = self.search(prem, depth + 1)
            if sub is None:
                return None, final
            subs.append(sub)
        return subs, True

    def _expand(
        self, goal: Sequent, depth: int, matcher: _Matcher
    ) -> tuple[Proof | None, bool]:
        for rule in self.invertible:
            lists = matcher.run(rule)
            if not lists:
                continue
            subs, final = self._try_list(lists[0], depth)
            if subs is None:
                return None, final
            return Proof(goal, rule, tuple(subs)), True
        final = True
        for rule in self.choice:
            for premises in matcher.run(rule):
                subs, sub_final = self._try_list(premises, depth)
                if subs is not None:
                    return Proof(goal, rule, tuple(subs)), True
                final = final and sub_final
        return None, final


def prove_with_stats(
    goal: Sequent, budget: SearchBudget | None = None
) -> tuple[SearchResult, SearchStats]:
    budget = budget or SearchBudget()
    engine = _Engine(goal, budget)
    proof, final = engine.search(goal, 0)
    st = engine.stats
    if proof is not None:
        return Proved(proof, st.explored, st.peak_depth), st
    if final:
        return Exhausted(st.explored, st.peak_depth), st
    return BudgetExceeded(st.explored, st.peak_depth), st


def prove(goal: Sequent, budget: SearchBudget | None = None) -> SearchResult:
    return prove_with_stats(goal, budget)[0]


# ---------------------------------------------------------------------------


def subformula_audit(p: Proof) -> tuple[bool, list[tuple[tuple[int, ...], Formula]]]:
    """Check that every formula in the proof is a subformula of the end
    sequent.  Cut-free proofs produced by the search pass this; proofs
    with cuts may not."""
    universe: set[Formula] = set()
    root = p.conclusion
    for f in context_formulas(root.ctx) + [root.succ]:
        universe |= subformulas(f)
    offenders: list[tuple[tuple[int, ...], Formula]] = []
    for path, node in proof_nodes(p):
        seen: set[Formula] = set()
        for f in context_formulas(node.conclusion.ctx) + [node.conclusion.succ]:
            if f not in universe and f not in seen:
                seen.add(f)
                offenders.append((path, f))
    return (not offenders, offenders)
