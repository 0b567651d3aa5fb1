"""Antecedent structures and sequents.

MILL and RSBIAT read antecedents as finite multisets.  PCMILL and
SRSBIAT read them as trees built from parallel composition (written
``,``) and serial composition (written ``;``) over formula leaves and
the empty context ``()``.

Trees are kept in a normal form: nested compositions of the same kind
are flattened, empty contexts are dropped, and the children of a
parallel node are sorted by printed form (``,`` is commutative).  The
smart constructors ``par`` and ``ser`` establish the normal form, so
every Context in the system is normalized by construction.

``structural_preimages`` enumerates the contexts reachable backward
through the entropy rule (turning some parallel grouping serial), the
only structural rule that is not absorbed by the normal form.
"""
from __future__ import annotations

from itertools import combinations
from typing import Iterable, Union

from .syntax import (
    Formula,
    ParseError,
    System,
    UnexpectedTokenError,
    _Parser,
    _show,
    validate_formula,
    tensor,
    odot,
    unit,
)

Path = tuple[int, ...]


class Context:
    __slots__ = ("key",)
    key: str

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, Context)
            and self.key == other.key
            and isinstance(self, MSet) == isinstance(other, MSet)
        )

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return self.key or "<empty mset>"


class MSet(Context):
    """Multiset antecedent; ``formulas`` is sorted by printed form."""

    __slots__ = ("formulas",)

    def __init__(self, formulas: tuple[Formula, ...], key: str):
        self.formulas = formulas
        self.key = key


class TreeContext(Context):
    __slots__ = ()


class Leaf(TreeContext):
    __slots__ = ("formula",)

    def __init__(self, formula: Formula):
        self.formula = formula
        self.key = formula.key


class EmptyCtx(TreeContext):
    __slots__ = ()

    def __init__(self) -> None:
        self.key = "()"


EMPTY = EmptyCtx()


class Par(TreeContext):
    __slots__ = ("children",)

    def __init__(self, children: tuple[TreeContext, ...], key: str):
        self.children = children
        self.key = key


class Ser(TreeContext):
    __slots__ = ("children",)

    def __init__(self, children: tuple[TreeContext, ...], key: str):
        self.children = children
        self.key = key


_MSET_INTERN: dict[str, MSet] = {}
_TREE_INTERN: dict[str, TreeContext] = {"()": EMPTY}


def mset(formulas: Iterable[Formula]) -> MSet:
    fs = tuple(sorted(formulas, key=lambda f: f.key))
    key = ", ".join(f.key for f in fs)
    got = _MSET_INTERN.get(key)
    if got is None:
        got = MSet(fs, key)
        _MSET_INTERN[key] = got
    return got


def leaf(f: Formula) -> Leaf:
    got = _TREE_INTERN.get(f.key)
    if got is None:
        got = Leaf(f)
        _TREE_INTERN[f.key] = got
    return got  # type: ignore[return-value]


def _bracket(child: TreeContext) -> str:
    if isinstance(child, (Par, Ser)):
        return f"[{child.key}]"
    return child.key


def par(children: Iterable[TreeContext]) -> TreeContext:
    flat: list[TreeContext] = []
    for c in children:
        if isinstance(c, Par):
            flat.extend(c.children)
        elif not isinstance(c, EmptyCtx):
            flat.append(c)
    if not flat:
        return EMPTY
    if len(flat) == 1:
        return flat[0]
    flat.sort(key=lambda c: c.key)
    key = ", ".join(_bracket(c) for c in flat)
    got = _TREE_INTERN.get(key)
    if got is None:
        got = Par(tuple(flat), key)
        _TREE_INTERN[key] = got
    return got


def ser(children: Iterable[TreeContext]) -> TreeContext:
    flat: list[TreeContext] = []
    for c in children:
        if isinstance(c, Ser):
            flat.extend(c.children)
        elif not isinstance(c, EmptyCtx):
            flat.append(c)
    if not flat:
        return EMPTY
    if len(flat) == 1:
        return flat[0]
    key = " ; ".join(_bracket(c) for c in flat)
    got = _TREE_INTERN.get(key)
    if got is None:
        got = Ser(tuple(flat), key)
        _TREE_INTERN[key] = got
    return got


def normalize(c: Context) -> Context:
    """Rebuild through the smart constructors (idempotent)."""
    if isinstance(c, MSet):
        return mset(c.formulas)
    if isinstance(c, Par):
        return par(normalize(ch) for ch in c.children)
    if isinstance(c, Ser):
        return ser(normalize(ch) for ch in c.children)
    return c


def context_formulas(c: Context) -> list[Formula]:
    """The leaf formulas, left to right (multiset order for MSet)."""
    if isinstance(c, MSet):
        return list(c.formulas)
    out: list[Formula] = []

    def walk(n: TreeContext) -> None:
        if isinstance(n, Leaf):
            out.append(n.formula)
        elif isinstance(n, (Par, Ser)):
            for ch in n.children:
                walk(ch)

    walk(c)
    return out


def context_complexity(c: Context) -> int:
    return sum(f.size for f in context_formulas(c))


def to_formula(c: Context) -> Formula:
    """Fold a context to a formula: ``,`` as *, ``;`` as @, () as 1."""
    if isinstance(c, MSet):
        if not c.formulas:
            return unit()
        acc = c.formulas[0]
        for f in c.formulas[1:]:
            acc = tensor(acc, f)
        return acc
    if isinstance(c, Leaf):
        return c.formula
    if isinstance(c, EmptyCtx):
        return unit()
    parts = [to_formula(ch) for ch in c.children]
    acc = parts[0]
    for f in parts[1:]:
        acc = tensor(acc, f) if isinstance(c, Par) else odot(acc, f)
    return acc


def positions(c: Context) -> list[tuple[Path, object]]:
    """Preorder list of (path, node).  For an MSet the entries below the
    root are the formula occurrences, indexed into the sorted tuple."""
    if isinstance(c, MSet):
        entries: list[tuple[Path, object]] = [((), c)]
        entries.extend(((i,), f) for i, f in enumerate(c.formulas))
        return entries
    out: list[tuple[Path, object]] = []

    def walk(n: TreeContext, path: Path) -> None:
        out.append((path, n))
        if isinstance(n, (Par, Ser)):
            for i, ch in enumerate(n.children):
                walk(ch, path + (i,))

    walk(c, ())
    return out


def fill(c: Context, path: Path, replacement: Context) -> Context:
    """Replace the node at ``path`` and renormalize.

    For an MSet, ``path`` is a single index and the replacement MSet is
    spliced in place of that occurrence.
    """
    if not path:
        return normalize(replacement)
    if isinstance(c, MSet):
        if not isinstance(replacement, MSet):
            raise TypeError("multiset fill needs an MSet replacement")
        (i,) = path
        rest = c.formulas[:i] + c.formulas[i + 1 :]
        return mset(rest + replacement.formulas)
    if not isinstance(c, (Par, Ser)):
        raise IndexError(f"no child {path} under {c.key!r}")
    if not isinstance(replacement, TreeContext):
        raise TypeError("tree fill needs a tree replacement")
    i = path[0]
    kids = list(c.children)
    kids[i] = fill(kids[i], path[1:], replacement)  # type: ignore[assignment]
    return par(kids) if isinstance(c, Par) else ser(kids)


def split_parallel(c: Context) -> list[tuple[Context, Context]]:
    """Every two-part split of the top-level parallel structure, as
    ordered pairs.  Multisets split by sub-multiset; a Par root splits
    by any subset of children; other tree roots admit only the trivial
    splits against the empty context."""
    out: list[tuple[Context, Context]] = []
    seen: set[tuple[str, str]] = set()

    def push(a: Context, b: Context) -> None:
        k = (a.key, b.key)
        if k not in seen:
            seen.add(k)
            out.append((a, b))

    if isinstance(c, MSet):
        fs = c.formulas
        n = len(fs)
        for mask in range(1 << n):
            sel = tuple(fs[i] for i in range(n) if mask >> i & 1)
            rest = tuple(fs[i] for i in range(n) if not mask >> i & 1)
            push(mset(sel), mset(rest))
        return out
    if isinstance(c, Par):
        kids = c.children
        n = len(kids)
        for mask in range(1 << n):
            sel = [kids[i] for i in range(n) if mask >> i & 1]
            rest = [kids[i] for i in range(n) if not mask >> i & 1]
            push(par(sel), par(rest))
        return out
    push(EMPTY, c)
    push(c, EMPTY)
    return out


def split_serial(c: Context) -> list[tuple[Context, Context]]:
    """Every order-respecting two-part cut of the top-level serial
    structure (k+1 cuts for a Ser node with k children)."""
    if isinstance(c, MSet):
        raise TypeError("serial split is only defined on tree contexts")
    out: list[tuple[Context, Context]] = []
    seen: set[tuple[str, str]] = set()

    def push(a: Context, b: Context) -> None:
        k = (a.key, b.key)
        if k not in seen:
            seen.add(k)
            out.append((a, b))

    if isinstance(c, Ser):
        kids = c.children
        for i in range(len(kids) + 1):
            push(ser(kids[:i]), ser(kids[i:]))
        return out
    push(EMPTY, c)
    push(c, EMPTY)
    return out


DEFAULT_STRUCTURAL_BOUND = 4096


def _ent_steps(c: TreeContext) -> list[TreeContext]:
    """Single backward entropy steps: somewhere in ``c``, group part of
    a parallel node and make the grouping serial."""
    out: list[TreeContext] = []
    for path, node in positions(c):
        if not isinstance(node, Par):
            continue
        kids = node.children
        n = len(kids)
        for size in range(2, n + 1):
            for group in combinations(range(n), size):
                rest = [kids[i] for i in range(n) if i not in group]
                members = [kids[i] for i in group]
                m = len(members)
                for mask in range(1, (1 << m) - 1):
                    first = [members[i] for i in range(m) if mask >> i & 1]
                    second = [members[i] for i in range(m) if not mask >> i & 1]
                    grouped = ser([par(first), par(second)])
                    out.append(fill(c, path, par(rest + [grouped])))  # type: ignore[arg-type]
    return out


def structural_preimages(
    c: Context, bound: int = DEFAULT_STRUCTURAL_BOUND
) -> tuple[list[Context], bool]:
    """Close ``c`` backward under entropy.  Returns the reachable
    contexts in discovery order (``c`` first) and an overflow flag set
    when the closure was truncated at ``bound`` contexts."""
    if isinstance(c, MSet):
        return [c], False
    seen = {c}
    order: list[Context] = [c]
    queue = [c]
    overflow = False
    while queue:
        cur = queue.pop(0)
        for nxt in _ent_steps(cur):  # type: ignore[arg-type]
            if nxt in seen:
                continue
            if len(seen) >= bound:
                overflow = True
                return order, overflow
            seen.add(nxt)
            order.append(nxt)
            queue.append(nxt)
    return order, overflow


# ---------------------------------------------------------------------------
# Sequents


class Sequent:
    __slots__ = ("ctx", "succ", "system", "key")

    def __init__(self, ctx: Context, succ: Formula, system: System):
        if system.is_tree:
            if not isinstance(ctx, TreeContext):
                raise TypeError(f"{system} wants a tree antecedent")
        elif not isinstance(ctx, MSet):
            raise TypeError(f"{system} wants a multiset antecedent")
        self.ctx = ctx
        self.succ = succ
        self.system = system
        self.key = f"{ctx.key} |- {succ.key}" if ctx.key else f"|- {succ.key}"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Sequent)
            and self.key == other.key
            and self.system == other.system
        )

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"<{self.system} {self.key}>"


def sequent(ctx: Context, succ: Formula, system: System) -> Sequent:
    return Sequent(normalize(ctx), succ, system)


def total_complexity(s: Sequent) -> int:
    return context_complexity(s.ctx) + s.succ.size


def validate_sequent(s: Sequent) -> None:
    for f in context_formulas(s.ctx):
        validate_formula(f, s.system)
    validate_formula(s.succ, s.system)


def print_sequent(s: Sequent) -> str:
    return s.key


class MixedSeparatorError(ParseError):
    def __init__(self, text: str, pos: int):
        super().__init__(
            "cannot mix ',' and ';' at one level, bracket the groups", text, pos
        )


def _parse_group(p: _Parser, system: System, closer: str) -> Context:
    items: list[Context] = []
    sep: str | None = None
    while not p.at(closer):
        items.append(_parse_item(p, system))
        t = p.peek()
        if t[0] in (",", ";"):
            if t[0] == ";" and not system.is_tree:
                raise UnexpectedTokenError(p.text, t[2], _show(t), ("','",))
            if sep is None:
                sep = t[0]
            elif sep != t[0]:
                raise MixedSeparatorError(p.text, t[2])
            p.next()
        elif t[0] != closer:
            raise UnexpectedTokenError(p.text, t[2], _show(t), (f"{closer!r}", "','"))
    if not system.is_tree:
        return mset(c.formula for c in items)  # type: ignore[union-attr]
    if len(items) == 1:
        return items[0]
    return ser(items) if sep == ";" else par(items)  # type: ignore[arg-type]


def _parse_item(p: _Parser, system: System) -> Context:
    t = p.peek()
    if system.is_tree:
        if t[0] == "(" and p.peek(1)[0] == ")":
            p.next()
            p.next()
            return EMPTY
        # "[" starts a grouped subcontext unless it is the box prefix "[]"
        if t[0] == "[" and p.peek(1)[0] != "]":
            p.next()
            sub = _parse_group(p, system, "]")
            p.expect("]")
            return sub
    f = p.formula()
    validate_formula(f, system)
    return leaf(f)


def parse_sequent(text: str, system: System) -> Sequent:
    p = _Parser(text)
    ctx = _parse_group(p, system, "|-")
    p.expect("|-")
    succ = p.formula()
    t = p.peek()
    if t[0] != "EOF":
        raise UnexpectedTokenError(text, t[2], _show(t), ("end of input",))
    validate_formula(succ, system)
    return sequent(ctx, succ, system)
