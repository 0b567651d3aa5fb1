"""Line-oriented sequent corpora and their macros.

A corpus file holds one entry per line:

    id | system | sequent | expected | source

Fields are separated by space-pipe-space; the turnstile ``|-`` inside
the sequent is never followed by a space-pipe pair, so it survives the
split.  Blank lines and ``#`` comments are skipped.  ``expected`` is
``provable``, ``unprovable`` (multiset systems only, where exhausted
search decides), or ``bounded-unknown`` (tree systems, where a failed
bounded search is not an unprovability verdict).

Two macros are expanded in the sequent text before parsing:

* ``pow<=(F, n)`` (also spelled ``pow≤``): the &-chain of the first n
  serial powers of F, where the k-th power replaces every atom in F by
  its k-fold ``@`` chain.  n is capped at 5; the expansion grows
  quadratically.
* ``bigwith[x](F)`` (also spelled ``⋀[x](F)``): the &-chain of F with
  the agent variable x instantiated to each declared agent in turn.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .context import Sequent, parse_sequent
from .search import (
    BudgetExceeded,
    Exhausted,
    Proved,
    SearchBudget,
    SearchResult,
    prove,
)
from .syntax import (
    Atom,
    Box,
    Brings,
    Formula,
    Limp,
    Lres,
    Odot,
    Rres,
    System,
    Tensor,
    With,
    box,
    brings,
    limp,
    lres,
    odot,
    parse_formula,
    parse_system,
    print_formula,
    rres,
    tensor,
    with_,
)

EXPECTED_VERDICTS = ("provable", "unprovable", "bounded-unknown")

POW_CAP = 5

_FIELD_SEP = re.compile(r" \| ")
_MACRO_HEAD = re.compile(r"pow<=\(|pow≤\(|bigwith\[|⋀\[")


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    entry_id: str
    system: System
    text: str        # sequent text after macro expansion
    raw_text: str    # sequent text as written
    expected: str
    source: str
    sequent: Sequent


@dataclass(frozen=True)
class EntryResult:
    entry: CorpusEntry
    outcome: SearchResult
    verdict: str
    passed: bool


# ---------------------------------------------------------------------------
# macros

_BINARY = {
    Tensor: tensor, With: with_, Limp: limp,
    Odot: odot, Lres: lres, Rres: rres,
}


def _atom_power(f: Formula, k: int) -> Formula:
    """Replace every atom by its k-fold serial chain."""

    def walk(g: Formula) -> Formula:
        if isinstance(g, Atom):
            out: Formula = g
            for _ in range(k - 1):
                out = odot(out, g)
            return out
        make = _BINARY.get(type(g))
        if make is not None:
            return make(walk(g.left), walk(g.right))
        if isinstance(g, Box):
            return box(walk(g.body))
        if isinstance(g, Brings):
            return brings(g.agent, walk(g.body))
        return g  # unit

    return walk(f)


def _matching_paren(text: str, open_idx: int) -> int:
    depth = 0
    for i in range(open_idx, len(text)):
        if text[i] == "(":
            depth += 1
        elif text[i] == ")":
            depth -= 1
            if depth == 0:
                return i
    raise CorpusError(f"unbalanced parentheses after position {open_idx}")


def _substitute_agent(f: Formula, var: str, agent: str) -> Formula:
    def walk(g: Formula) -> Formula:
        make = _BINARY.get(type(g))
        if make is not None:
            return make(walk(g.left), walk(g.right))
        if isinstance(g, Box):
            return box(walk(g.body))
        if isinstance(g, Brings):
            return brings(agent if g.agent == var else g.agent,
                          walk(g.body))
        return g

    return walk(f)


def _expand_pow(
    text: str, head: re.Match, system: System,
    outer_vars: tuple[str, ...] = (),
) -> str:
    open_idx = head.end() - 1
    close = _matching_paren(text, open_idx)
    arg = text[open_idx + 1:close]
    comma = arg.rfind(",")
    if comma < 0:
        raise CorpusError("pow macro wants a formula and an exponent")
    body, n_text = arg[:comma].strip(), arg[comma + 1:].strip()
    try:
        n = int(n_text)
    except ValueError:
        raise CorpusError(f"bad pow exponent {n_text!r}") from None
    if n < 1:
        raise CorpusError("pow exponent must be at least 1")
    if n > POW_CAP:
        raise CorpusError(f"pow exponent capped at {POW_CAP}, got {n}")
    scope = System(system.ident, system.agents + outer_vars) \
        if outer_vars else system
    base = parse_formula(body, scope)
    chain = _atom_power(base, 1)
    for k in range(2, n + 1):
        chain = with_(chain, _atom_power(base, k))
    return text[:head.start()] + "(" + print_formula(chain) + ")" \
        + text[close + 1:]


def _expand_bigwith(
    text: str, head: re.Match, system: System,
    outer_vars: tuple[str, ...] = (),
) -> str:
    var_close = text.find("]", head.end())
    if var_close < 0:
        raise CorpusError("bigwith macro wants a [variable]")
    var = text[head.end():var_close].strip()
    if not var:
        raise CorpusError("bigwith macro wants a [variable]")
    if var in system.agents or var in outer_vars:
        raise CorpusError(
            f"bigwith variable {var!r} shadows a declared agent"
        )
    if not system.agents:
        raise CorpusError("bigwith macro needs declared agents")
    open_idx = var_close + 1
    if open_idx >= len(text) or text[open_idx] != "(":
        raise CorpusError("bigwith macro wants a parenthesised formula")
    close = _matching_paren(text, open_idx)
    body = text[open_idx + 1:close]
    extended = System(system.ident, system.agents + outer_vars + (var,))
    f = parse_formula(body, extended)
    parts = [_substitute_agent(f, var, a) for a in system.agents]
    chain = parts[0]
    for p in parts[1:]:
        chain = with_(chain, p)
    return text[:head.start()] + "(" + print_formula(chain) + ")" \
        + text[close + 1:]


def _enclosing_vars(text: str, pos: int) -> tuple[str, ...]:
    """Variables of every bigwith whose body spans position ``pos``."""
    found: list[str] = []
    for m in re.finditer(r"bigwith\[|⋀\[", text):
        var_close = text.find("]", m.end())
        if var_close < 0 or var_close >= pos:
            continue
        open_idx = var_close + 1
        if open_idx >= len(text) or text[open_idx] != "(":
            continue
        try:
            close = _matching_paren(text, open_idx)
        except CorpusError:
            continue
        if open_idx < pos <= close:
            var = text[m.end():var_close].strip()
            if var and var not in found:
                found.append(var)
    return tuple(found)


def expand_macros(text: str, system: System) -> str:
    """Expand pow and bigwith macros, innermost first."""
    while True:
        heads = list(_MACRO_HEAD.finditer(text))
        if not heads:
            return text
        head = heads[-1]  # rightmost occurrence has no macros inside it
        outer = _enclosing_vars(text, head.start())
        if head.group().startswith("pow"):
            text = _expand_pow(text, head, system, outer)
        else:
            text = _expand_bigwith(text, head, system, outer)


# ---------------------------------------------------------------------------
# files


def parse_corpus_line(line: str, where: str = "corpus") -> CorpusEntry | None:
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    fields = _FIELD_SEP.split(stripped)
    if len(fields) != 5:
        raise CorpusError(
            f"{where}: want 'id | system | sequent | expected | source', "
            f"got {len(fields)} fields"
        )
    entry_id, system_text, raw_text, expected, source = \
        (f.strip() for f in fields)
    try:
        system = parse_system(system_text)
    except ValueError as exc:
        raise CorpusError(f"{where}: {exc}") from None
    if expected not in EXPECTED_VERDICTS:
        raise CorpusError(
            f"{where}: expected verdict must be one of "
            f"{', '.join(EXPECTED_VERDICTS)}, got {expected!r}"
        )
    if expected == "unprovable" and system.is_tree:
        raise CorpusError(
            f"{where}: bounded search cannot certify unprovability in "
            f"{system.ident.value}; use bounded-unknown"
        )
    try:
        text = expand_macros(raw_text, system)
        sequent = parse_sequent(text, system)
    except ValueError as exc:
        raise CorpusError(f"{where}: {exc}") from None
    return CorpusEntry(entry_id, system, text, raw_text, expected, source,
                       sequent)


def load_corpus_file(path: str | Path) -> list[CorpusEntry]:
    path = Path(path)
    out: list[CorpusEntry] = []
    for i, line in enumerate(path.read_text().splitlines(), start=1):
        entry = parse_corpus_line(line, where=f"{path.name}:{i}")
        if entry is not None:
            out.append(entry)
    return out


def load_corpus_dir(path: str | Path) -> list[CorpusEntry]:
    path = Path(path)
    if not path.is_dir():
        raise CorpusError(f"{path} is not a directory")
    files = sorted(path.glob("*.corpus"))
    if not files:
        raise CorpusError(f"no .corpus files in {path}")
    out: list[CorpusEntry] = []
    for f in files:
        out.extend(load_corpus_file(f))
    ids = [e.entry_id for e in out]
    dupes = {i for i in ids if ids.count(i) > 1}
    if dupes:
        raise CorpusError(f"duplicate corpus ids: {', '.join(sorted(dupes))}")
    return out


# ---------------------------------------------------------------------------
# running


def verdict_word(outcome: SearchResult, system: System) -> str:
    if isinstance(outcome, Proved):
        return "Proved"
    if system.is_tree:
        return "not proved (bounded)"
    if isinstance(outcome, Exhausted):
        return "Exhausted (unprovable)"
    return "budget exceeded"


def outcome_matches(outcome: SearchResult, entry: CorpusEntry) -> bool:
    if entry.expected == "provable":
        return isinstance(outcome, Proved)
    if entry.expected == "unprovable":
        return isinstance(outcome, Exhausted)
    return not isinstance(outcome, Proved)  # bounded-unknown


def run_entry(entry: CorpusEntry,
              budget: SearchBudget | None = None) -> EntryResult:
    outcome = prove(entry.sequent, budget)
    return EntryResult(
        entry=entry,
        outcome=outcome,
        verdict=verdict_word(outcome, entry.system),
        passed=outcome_matches(outcome, entry),
    )


def run_corpus(entries: list[CorpusEntry],
               budget: SearchBudget | None = None) -> list[EntryResult]:
    return [run_entry(e, budget) for e in entries]
