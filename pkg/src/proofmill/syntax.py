r"""Formula syntax: AST, parser, printer, complexity.

Connectives, loosest to tightest binding:

    -o  \  /        implications, mutually non-mixable without parentheses
                    (-o and \ associate right, / associates left)
    &               additive conjunction, left associative
    *               multiplicative conjunction, left associative
    @               serial conjunction, left associative
    [] E[a] ~       prefix operators, tightest

Atoms are ``[A-Za-z0-9_]+``; the bare token ``1`` is the multiplicative
unit and ``bot`` is an ordinary atom that the ``~`` sugar targets:
``~A`` parses to ``A -o bot``.  The printer emits fully parenthesized
text, so ``parse_formula(print_formula(f)) == f`` always holds.

Formulas are interned: constructing the same shape twice returns the
same object, and equality/hashing go through the cached printed form.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator


class SystemId(Enum):
    MILL = "MILL"
    PCMILL = "PCMILL"
    RSBIAT = "RSBIAT"
    SRSBIAT = "SRSBIAT"


# Which systems read antecedents as multisets vs ordered trees, and
# which modality (if any) their language admits.
MSET_SYSTEMS = (SystemId.MILL, SystemId.RSBIAT)
TREE_SYSTEMS = (SystemId.PCMILL, SystemId.SRSBIAT)
BOX_SYSTEMS = (SystemId.MILL, SystemId.PCMILL)
AGENT_SYSTEMS = (SystemId.RSBIAT, SystemId.SRSBIAT)
SERIAL_SYSTEMS = TREE_SYSTEMS

_NAME_RE = re.compile(r"[A-Za-z0-9_]+")


@dataclass(frozen=True)
class System:
    """A system identifier plus, for the agent systems, its alphabet."""

    ident: SystemId
    agents: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.ident in AGENT_SYSTEMS:
            if not self.agents:
                raise ValueError(f"{self.ident.value} needs a nonempty agent alphabet")
            for a in self.agents:
                if not _NAME_RE.fullmatch(a):
                    raise ValueError(f"bad agent name {a!r}")
            if len(set(self.agents)) != len(self.agents):
                raise ValueError("duplicate agent names")
        elif self.agents:
            raise ValueError(f"{self.ident.value} does not take agents")

    @property
    def is_tree(self) -> bool:
        return self.ident in TREE_SYSTEMS

    @property
    def has_box(self) -> bool:
        return self.ident in BOX_SYSTEMS

    @property
    def has_serial(self) -> bool:
        return self.ident in SERIAL_SYSTEMS

    def __str__(self) -> str:
        if self.agents:
            return f"{self.ident.value}:{','.join(self.agents)}"
        return self.ident.value


def parse_system(text: str) -> System:
    """Parse ``MILL`` or ``RSBIAT:i,s`` style system descriptors."""
    name, _, agents = text.partition(":")
    try:
        ident = SystemId(name.strip())
    except ValueError:
        raise ValueError(f"unknown system {name.strip()!r}") from None
    if agents.strip():
        return System(ident, tuple(a.strip() for a in agents.split(",")))
    if ident in AGENT_SYSTEMS:
        raise ValueError(f"{ident.value} needs agents, e.g. {ident.value}:a,b")
    return System(ident)


# ---------------------------------------------------------------------------
# Formula AST


class Formula:
    """Base class.  ``key`` is the fully parenthesized printed form and
    doubles as the identity used for equality, hashing and ordering;
    ``size`` is the complexity measure (connective/atom count)."""

    __slots__ = ("key", "size")
    key: str
    size: int

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return isinstance(other, Formula) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return self.key


class Atom(Formula):
    __slots__ = ("name",)

    def __init__(self, name: str, key: str):
        self.name = name
        self.key = key
        self.size = 1


class Unit(Formula):
    __slots__ = ()

    def __init__(self) -> None:
        self.key = "1"
        self.size = 1


class BinOp(Formula):
    __slots__ = ("left", "right")
    op: str = ""

    def __init__(self, left: Formula, right: Formula, key: str):
        self.left = left
        self.right = right
        self.key = key
        self.size = 1 + left.size + right.size


class Tensor(BinOp):
    __slots__ = ()
    op = "*"


class With(BinOp):
    __slots__ = ()
    op = "&"


class Limp(BinOp):
    __slots__ = ()
    op = "-o"


class Odot(BinOp):
    __slots__ = ()
    op = "@"


class Lres(BinOp):
    """Left residual ``A \\ B``: consume an A on the left to yield B."""

    __slots__ = ()
    op = "\\"


class Rres(BinOp):
    """Right residual ``B / A``: yields B when an A follows on the right."""

    __slots__ = ()
    op = "/"


class Box(Formula):
    __slots__ = ("body",)

    def __init__(self, body: Formula, key: str):
        self.body = body
        self.key = key
        self.size = 1 + body.size


class Brings(Formula):
    __slots__ = ("agent", "body")

    def __init__(self, agent: str, body: Formula, key: str):
        self.agent = agent
        self.body = body
        self.key = key
        self.size = 1 + body.size


_INTERN: dict[str, Formula] = {}


def _interned(key: str, build) -> Formula:
    f = _INTERN.get(key)
    if f is None:
        f = build()
        _INTERN[key] = f
    return f


def atom(name: str) -> Formula:
    if name == "1" or not _NAME_RE.fullmatch(name):
        raise ValueError(f"bad atom name {name!r}")
    return _interned(name, lambda: Atom(name, name))


def unit() -> Formula:
    return _interned("1", Unit)


def _binary(cls, left: Formula, right: Formula) -> Formula:
    key = f"({left.key} {cls.op} {right.key})"
    return _interned(key, lambda: cls(left, right, key))


def tensor(l: Formula, r: Formula) -> Formula:
    return _binary(Tensor, l, r)


def with_(l: Formula, r: Formula) -> Formula:
    return _binary(With, l, r)


def limp(l: Formula, r: Formula) -> Formula:
    return _binary(Limp, l, r)


def odot(l: Formula, r: Formula) -> Formula:
    return _binary(Odot, l, r)


def lres(l: Formula, r: Formula) -> Formula:
    return _binary(Lres, l, r)


def rres(l: Formula, r: Formula) -> Formula:
    return _binary(Rres, l, r)


def box(body: Formula) -> Formula:
    key = f"[]({body.key})"
    return _interned(key, lambda: Box(body, key))


def brings(agent: str, body: Formula) -> Formula:
    if not _NAME_RE.fullmatch(agent):
        raise ValueError(f"bad agent name {agent!r}")
    key = f"E[{agent}]({body.key})"
    return _interned(key, lambda: Brings(agent, body, key))


BOT = atom("bot")


def neg(f: Formula) -> Formula:
    """``~A`` desugars to ``A -o bot``."""
    return limp(f, BOT)


def complexity(f: Formula) -> int:
    return f.size


def subformulas(f: Formula) -> set[Formula]:
    out: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        if isinstance(g, BinOp):
            stack.append(g.left)
            stack.append(g.right)
        elif isinstance(g, (Box, Brings)):
            stack.append(g.body)
    return out


def formula_atoms(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Atom)}


def formula_agents(f: Formula) -> set[str]:
    return {g.agent for g in subformulas(f) if isinstance(g, Brings)}


class SystemMismatchError(ValueError):
    """A formula uses a connective outside the given system's language."""


def validate_formula(f: Formula, system: System) -> None:
    for g in subformulas(f):
        if isinstance(g, Box) and system.ident not in BOX_SYSTEMS:
            raise SystemMismatchError(f"[] not available in {system}: {g.key}")
        if isinstance(g, Brings):
            if system.ident not in AGENT_SYSTEMS:
                raise SystemMismatchError(f"E[_] not available in {system}: {g.key}")
            if g.agent not in system.agents:
                raise SystemMismatchError(
                    f"agent {g.agent!r} not in alphabet {list(system.agents)}: {g.key}"
                )
        if isinstance(g, (Odot, Lres, Rres)) and system.ident not in SERIAL_SYSTEMS:
            raise SystemMismatchError(
                f"{type(g).op} not available in {system}: {g.key}"
            )


def print_formula(f: Formula) -> str:
    return f.key


# ---------------------------------------------------------------------------
# Lexer


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        self.bare_message = message
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}: {_excerpt(text, pos)}")


def _excerpt(text: str, pos: int) -> str:
    lo = max(0, pos - 15)
    hi = min(len(text), pos + 15)
    marker = "..." if lo > 0 else ""
    return f"{marker}{text[lo:pos]}<HERE>{text[pos:hi]}"


class LexError(ParseError):
    pass


class UnexpectedTokenError(ParseError):
    def __init__(self, text: str, pos: int, found: str, expected: tuple[str, ...]):
        self.found = found
        self.expected = expected
        want = " or ".join(expected)
        super().__init__(f"expected {want}, found {found}", text, pos)


class MixedImplicationError(ParseError):
    def __init__(self, text: str, pos: int, first: str, second: str):
        self.first = first
        self.second = second
        super().__init__(
            f"cannot mix {first!r} and {second!r} without parentheses", text, pos
        )


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<name>[A-Za-z0-9_]+)
  | (?P<turnstile>\|-)
  | (?P<limp>-o)
  | (?P<sym>[()\[\]*&@~\\/,;])
    """,
    re.VERBOSE,
)

#: token kinds: NAME, plus literal text for every symbol token
Token = tuple[str, str, int]  # (kind, text, position)


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise LexError(f"unexpected character {text[pos]!r}", text, pos)
        if m.lastgroup != "ws":
            kind = "NAME" if m.lastgroup == "name" else m.group()
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("EOF", "", n))
    return out


# ---------------------------------------------------------------------------
# Parser

_IMP_OPS = ("-o", "\\", "/")


class _Parser:
    """Recursive-descent parser over the token list, shared by the
    formula and sequent grammars (the latter lives in context.py)."""

    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, ahead: int = 0) -> Token:
        j = min(self.i + ahead, len(self.toks) - 1)
        return self.toks[j]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t[0] != "EOF":
            self.i += 1
        return t

    def expect(self, kind: str) -> Token:
        t = self.peek()
        if t[0] != kind:
            raise UnexpectedTokenError(self.text, t[2], _show(t), (repr(kind),))
        return self.next()

    def at(self, kind: str) -> bool:
        return self.peek()[0] == kind

    def formula(self) -> Formula:
        first = self.additive()
        if self.peek()[0] not in _IMP_OPS:
            return first
        items = [first]
        ops: list[tuple[str, int]] = []
        while self.peek()[0] in _IMP_OPS:
            op, _, pos = self.next()
            if ops and op != ops[0][0]:
                raise MixedImplicationError(self.text, pos, ops[0][0], op)
            ops.append((op, pos))
            items.append(self.additive())
        op = ops[0][0]
        if op == "-o":
            acc = items[-1]
            for f in reversed(items[:-1]):
                acc = limp(f, acc)
            return acc
        if op == "\\":
            acc = items[-1]
            for f in reversed(items[:-1]):
                acc = lres(f, acc)
            return acc
        acc = items[0]
        for f in items[1:]:
            acc = rres(acc, f)
        return acc

    def additive(self) -> Formula:
        f = self.tensor()
        while self.at("&"):
            self.next()
            f = with_(f, self.tensor())
        return f

    def tensor(self) -> Formula:
        f = self.serial()
        while self.at("*"):
            self.next()
            f = tensor(f, self.serial())
        return f

    def serial(self) -> Formula:
        f = self.unary()
        while self.at("@"):
            self.next()
            f = odot(f, self.unary())
        return f

    def unary(self) -> Formula:
        t = self.peek()
        if t[0] == "[":
            self.next()
            self.expect("]")
            return box(self.unary())
        if t[0] == "NAME" and t[1] == "E" and self.peek(1)[0] == "[":
            self.next()
            self.next()
            agent = self.expect("NAME")[1]
            self.expect("]")
            return brings(agent, self.unary())
        if t[0] == "~":
            self.next()
            return neg(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        t = self.peek()
        if t[0] == "NAME":
            self.next()
            return unit() if t[1] == "1" else atom(t[1])
        if t[0] == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        raise UnexpectedTokenError(
            self.text, t[2], _show(t), ("an atom", "'1'", "'('", "a prefix operator")
        )


def _show(t: Token) -> str:
    return "end of input" if t[0] == "EOF" else repr(t[1])


def parse_formula(text: str, system: System | None = None) -> Formula:
    p = _Parser(text)
    f = p.formula()
    t = p.peek()
    if t[0] != "EOF":
        raise UnexpectedTokenError(text, t[2], _show(t), ("end of input",))
    if system is not None:
        validate_formula(f, system)
    return f


def iter_binops(f: Formula) -> Iterator[BinOp]:
    for g in subformulas(f):
        if isinstance(g, BinOp):
            yield g
