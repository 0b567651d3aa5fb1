"""Independent provability oracle for small MILL sequents.

Derivable sequents are enumerated by breadth-first forward closure
inside the finite universe of multiset sequents whose total complexity
(sum of formula sizes on both sides) stays within a bound.  Read
bottom-up, every rule of the multiset calculus strictly shrinks total
complexity, so a sequent inside the universe is derivable exactly when
the closure reaches it: restricting premises to the universe loses
nothing.

The rules are restated here directly from first principles; nothing
from the search or calculus modules is imported, so agreement with
``prove`` is a genuine cross-check rather than the same code run twice.
"""

from __future__ import annotations

from collections import deque

from proofmill.syntax import (
    Formula,
    atom,
    box,
    complexity,
    limp,
    tensor,
    unit,
    with_,
)

Ants = tuple[Formula, ...]
Seq = tuple[Ants, Formula]


def formula_layers(
    limit: int,
    atoms: tuple[str, ...] = ("p", "q"),
    unary=box,
    binaries=(tensor, with_, limp),
) -> list[list[Formula]]:
    """``layers[c]`` = every formula of complexity exactly c over the
    given atoms, the unit, one unary connective and the binaries."""
    layers: list[list[Formula]] = [[] for _ in range(limit + 1)]
    if limit >= 1:
        layers[1] = [atom(a) for a in atoms] + [unit()]
    for c in range(2, limit + 1):
        layer = [unary(f) for f in layers[c - 1]] if unary else []
        for a in range(1, c - 1):
            for left in layers[a]:
                for right in layers[c - 1 - a]:
                    for make in binaries:
                        layer.append(make(left, right))
        layers[c] = layer
    return layers


def _canon(ants) -> Ants:
    return tuple(sorted(ants, key=lambda f: f.key))


class MillOracle:
    """Forward closure of MILL derivability up to a total-complexity
    bound.  ``provable`` answers membership for any sequent whose total
    complexity is within the bound."""

    def __init__(self, bound: int = 8, atoms: tuple[str, ...] = ("p", "q")):
        self.bound = bound
        self.atoms = atoms
        self.layers = formula_layers(bound, atoms)
        # formulas of complexity <= c, for the &L side pick
        self.upto: list[list[Formula]] = [[]]
        acc: list[Formula] = []
        for c in range(1, bound + 1):
            acc = acc + self.layers[c]
            self.upto.append(list(acc))
        self.known: set[Seq] = set()
        self._build()

    # -- closure -----------------------------------------------------------

    def _build(self) -> None:
        bound = self.bound
        one = unit()
        queue: deque[Seq] = deque()
        known = self.known
        # join indexes over everything already dequeued
        by_total: list[list[Seq]] = [[] for _ in range(bound + 1)]
        by_ants: dict[Ants, list[Seq]] = {}
        singletons: set[tuple[Formula, Formula]] = set()

        def total(s: Seq) -> int:
            ants, succ = s
            return sum(complexity(f) for f in ants) + complexity(succ)

        def add(ants, succ: Formula) -> None:
            s = (_canon(ants), succ)
            if s not in known:
                known.add(s)
                queue.append(s)

        # axioms: identity at every formula that fits, and the unit
        add((), one)
        for f in self.upto[bound // 2]:
            add((f,), f)

        while queue:
            s = queue.popleft()
            ants, succ = s
            t = total(s)
            budget = bound - t

            # -- unary consequences
            if budget >= 1:
                add(ants + (one,), succ)                       # 1L
                for i, a in enumerate(ants):
                    rest = ants[:i] + ants[i + 1:]
                    add(rest, limp(a, succ))                   # -oR
                    for j, b in enumerate(rest):               # *L
                        rem = rest[:j] + rest[j + 1:]
                        add(rem + (tensor(a, b),), succ)
                    for b in self.upto[budget - 1]:            # &L1/&L2
                        add(rest + (with_(a, b),), succ)
                        add(rest + (with_(b, a),), succ)

            # -- binary consequences, joined against everything dequeued
            # earlier (this sequent is indexed first, so self-joins work)
            by_total[t].append(s)
            by_ants.setdefault(ants, []).append(s)
            if len(ants) == 1:
                singletons.add((ants[0], succ))

            # conclusion total for *R and -oL is t(x) + t(y) + 1
            for ty in range(1, bound - t):
                for r in by_total[ty]:
                    for x, y in ((s, r), (r, s)):
                        xa, xs = x
                        ya, ysucc = y
                        add(xa + ya, tensor(xs, ysucc))        # *R
                        for k, b in enumerate(ya):             # -oL
                            if k and b is ya[k - 1]:
                                continue
                            add(xa + ya[:k] + ya[k + 1:]
                                + (limp(xs, b),), ysucc)

            for r in by_ants[ants]:                            # &R
                rsucc = r[1]
                if t + complexity(rsucc) + 1 <= bound:
                    add(ants, with_(succ, rsucc))
                    add(ants, with_(rsucc, succ))

            if len(ants) == 1 and (succ, ants[0]) in singletons:
                a, b = ants[0], succ                           # BoxRe
                if complexity(a) + complexity(b) + 2 <= bound:
                    add((box(a),), box(b))
                    add((box(b),), box(a))

    # -- queries -------------------------------------------------------------

    def provable(self, ants, succ: Formula) -> bool:
        s = (_canon(ants), succ)
        ants_c, _ = s
        t = sum(complexity(f) for f in ants_c) + complexity(succ)
        if t > self.bound:
            raise ValueError(f"total complexity {t} above bound {self.bound}")
        return s in self.known

    def goals(self, max_antecedent: int = 2):
        """Every (antecedent, succedent) with at most ``max_antecedent``
        antecedent formulas and total complexity within the bound."""
        bound = self.bound
        for succ in self.upto[bound]:
            yield (), succ
        if max_antecedent < 1:
            return
        for a_c in range(1, bound):
            for a in self.layers[a_c]:
                for succ in self.upto[bound - a_c]:
                    yield (a,), succ
        if max_antecedent < 2:
            return
        for a_c in range(1, bound - 1):
            for b_c in range(a_c, bound - a_c):
                for a in self.layers[a_c]:
                    for b in self.layers[b_c]:
                        if b_c == a_c and b.key < a.key:
                            continue
                        for succ in self.upto[bound - a_c - b_c]:
                            yield (a, b), succ
