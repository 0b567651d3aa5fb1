"""Finite modal Kripke resource models.

A :class:`Model` is a finite commutative monoid of worlds ``(worlds,
unit, op)`` with a preorder (stored as generator pairs ``(m, n)``
meaning ``m >= n``; the reflexive-transitive closure is computed), a
hereditary valuation, and neighbourhood tables mapping ``"box"`` or an
agent id to world-indexed families of world sets.  Serial systems add a
second, possibly non-commutative monoid operation ``serial_op``.

Truth at a world:

* ``p``       : world in valuation(p)
* ``1``       : world >= unit
* ``A * B``   : world >= w1 op w2 for some w1 in ||A||, w2 in ||B||
* ``A & B``   : both hold
* ``A -o B``  : for every n in ||A||, n op world in ||B||
* ``A @ B``   : as * with serial_op
* ``A \\ B``  : for every n in ||A||, n serial_op world in ||B||
* ``B / A``   : for every n in ||A||, world serial_op n in ||B||
* ``[] A``    : ||A|| is a member of the box neighbourhood of world
* ``E[a] A``  : ||A|| is a member of agent a's neighbourhood of world

A sequent is valid in a model when the implication from its folded
antecedent to its succedent holds at the unit.

:func:`validate_model` checks the monoid laws, bifunctoriality,
heredity of valuation and neighbourhoods, and the per-system
neighbourhood conditions named after the sequent rules they support
(``NotNec``, ``BringsRefl``, ``BringsTensor``, ``BringsWith``,
``BringsOdot``).  :func:`random_model` is a seeded generator whose
output always validates; :func:`find_countermodel` searches generated
models for one falsifying a sequent.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .context import Sequent, to_formula
from .syntax import (
    AGENT_SYSTEMS,
    BOX_SYSTEMS,
    SERIAL_SYSTEMS,
    Atom,
    Box,
    Brings,
    Formula,
    Limp,
    Lres,
    Odot,
    Rres,
    System,
    SystemId,
    Tensor,
    Unit,
    With,
    limp,
    subformulas,
)

WorldPair = tuple[str, str]
OpTable = dict[WorldPair, str]
NbhdTable = dict[str, dict[str, tuple[tuple[str, ...], ...]]]


@dataclass(frozen=True)
class Model:
    """Plain data; list orderings are preserved for exact JSON round trips."""

    worlds: tuple[str, ...]
    unit: str
    op: OpTable
    serial_op: OpTable | None
    order: tuple[WorldPair, ...]
    valuation: dict[str, tuple[str, ...]]
    neighbourhoods: NbhdTable


@dataclass(frozen=True)
class ModelReport:
    ok: bool
    failures: tuple[str, ...]


FRAME_CONDITIONS: dict[SystemId, tuple[str, ...]] = {
    SystemId.MILL: (),
    SystemId.PCMILL: (),
    SystemId.RSBIAT: ("NotNec", "BringsRefl", "BringsTensor", "BringsWith"),
    SystemId.SRSBIAT: (
        "NotNec", "BringsRefl", "BringsTensor", "BringsWith", "BringsOdot",
    ),
}


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _Frame:
    """Index tables for one model; world sets are int bitmasks."""

    def __init__(self, m: Model):
        self.names = list(m.worlds)
        self.idx = {w: i for i, w in enumerate(m.worlds)}
        self.n = len(self.names)
        self.e = self.idx[m.unit]
        self.op = self._table(m.op)
        self.ser = self._table(m.serial_op) if m.serial_op is not None \
            else None
        pairs = [(self.idx[a], self.idx[b]) for a, b in m.order]
        self.above = _closure(self.n, pairs)

    def _table(self, op: OpTable) -> list[list[int]]:
        t = [[0] * self.n for _ in range(self.n)]
        for i, w in enumerate(self.names):
            for j, v in enumerate(self.names):
                t[i][j] = self.idx[op[(w, v)]]
        return t

    def ge(self, i: int, j: int) -> bool:
        return bool(self.above[j] >> i & 1)

    def up(self, mask: int) -> int:
        out = 0
        for j in _bits(mask):
            out |= self.above[j]
        return out

    def set_name(self, mask: int) -> str:
        return "{" + ",".join(self.names[i] for i in _bits(mask)) + "}"


def _closure(n: int, pairs: list[tuple[int, int]]) -> list[int]:
    """above[j] = bitmask of worlds >= j, reflexive-transitive closure."""
    above = [1 << j for j in range(n)]
    for a, b in pairs:
        above[b] |= 1 << a
    changed = True
    while changed:
        changed = False
        for j in range(n):
            acc = above[j]
            for i in _bits(acc):
                acc |= above[i]
            if acc != above[j]:
                above[j] = acc
                changed = True
    return above


def _mask_of(frame: _Frame, worlds) -> int:
    out = 0
    for w in worlds:
        out |= 1 << frame.idx[w]
    return out


def _nbhd_masks(frame: _Frame, m: Model) -> dict[str, list[set[int]]]:
    out: dict[str, list[set[int]]] = {}
    for key, per_world in m.neighbourhoods.items():
        table: list[set[int]] = [set() for _ in range(frame.n)]
        for w, sets in per_world.items():
            table[frame.idx[w]] = {_mask_of(frame, s) for s in sets}
        out[key] = table
    return out


# ---------------------------------------------------------------------------
# evaluation


class Evaluator:
    """Reusable evaluator; caches extensions per formula."""

    def __init__(self, model: Model):
        self.model = model
        self._fr = _Frame(model)
        self._val = {
            p: _mask_of(self._fr, ws) for p, ws in model.valuation.items()
        }
        self._nbhd = _nbhd_masks(self._fr, model)
        self._memo: dict[Formula, int] = {}

    # -- public surface

    def eval(self, world: str, f: Formula) -> bool:
        return bool(self.extension_mask(f) >> self._fr.idx[world] & 1)

    def extension(self, f: Formula) -> frozenset[str]:
        mask = self.extension_mask(f)
        return frozenset(self._fr.names[i] for i in _bits(mask))

    def upward(self, worlds) -> frozenset[str]:
        mask = self._fr.up(_mask_of(self._fr, worlds))
        return frozenset(self._fr.names[i] for i in _bits(mask))

    def sequent_valid(self, s: Sequent) -> bool:
        goal = limp(to_formula(s.ctx), s.succ)
        return self.eval(self.model.unit, goal)

    def extension_upward_closed(self, f: Formula) -> bool:
        mask = self.extension_mask(f)
        return self._fr.up(mask) == mask

    def falsifying_world(self, s: Sequent) -> str | None:
        """A world satisfying the folded antecedent but not the succedent."""
        bad = self.extension_mask(to_formula(s.ctx)) \
            & ~self.extension_mask(s.succ)
        for i in _bits(bad):
            return self._fr.names[i]
        return None

    # -- clauses

    def extension_mask(self, f: Formula) -> int:
        got = self._memo.get(f)
        if got is None:
            got = self._memo[f] = self._compute(f)
        return got

    def _compute(self, f: Formula) -> int:
        fr = self._fr
        if isinstance(f, Atom):
            return self._val.get(f.name, 0)
        if isinstance(f, Unit):
            return fr.above[fr.e]
        if isinstance(f, With):
            return self.extension_mask(f.left) & self.extension_mask(f.right)
        if isinstance(f, Tensor):
            return self._product(f, fr.op)
        if isinstance(f, Odot):
            return self._product(f, self._serial(f))
        if isinstance(f, Limp):
            return self._arrow(f, fr.op, flip=False)
        if isinstance(f, Lres):
            return self._arrow(f, self._serial(f), flip=False)
        if isinstance(f, Rres):
            return self._arrow(f, self._serial(f), flip=True)
        if isinstance(f, Box):
            table = self._nbhd.get("box")
            body = self.extension_mask(f.body)
            out = 0
            for m in range(fr.n):
                if table is not None and body in table[m]:
                    out |= 1 << m
            return out
        if isinstance(f, Brings):
            table = self._nbhd.get(f.agent)
            if table is None:
                raise ValueError(
                    f"model has no neighbourhood table for agent {f.agent!r}"
                )
            body = self.extension_mask(f.body)
            out = 0
            for m in range(fr.n):
                if body in table[m]:
                    out |= 1 << m
            return out
        raise AssertionError(f.key)

    def _serial(self, f: Formula) -> list[list[int]]:
        if self._fr.ser is None:
            raise ValueError(
                f"model has no serial operation, needed for {f.key}"
            )
        return self._fr.ser

    def _product(self, f, table: list[list[int]]) -> int:
        a = self.extension_mask(f.left)
        b = self.extension_mask(f.right)
        prods = 0
        for i in _bits(a):
            row = table[i]
            for j in _bits(b):
                prods |= 1 << row[j]
        return self._fr.up(prods)

    def _arrow(self, f, table: list[list[int]], flip: bool) -> int:
        # flip=False: require n . m in ||right|| for all n in ||left||
        # flip=True (B / A): require m . n in ||right||; f.right holds the
        # argument side for / per the parser convention
        if flip:
            arg = self.extension_mask(f.right)
            res = self.extension_mask(f.left)
        else:
            arg = self.extension_mask(f.left)
            res = self.extension_mask(f.right)
        out = 0
        for m in range(self._fr.n):
            if all(
                res >> (table[m][i] if flip else table[i][m]) & 1
                for i in _bits(arg)
            ):
                out |= 1 << m
        return out


def eval_formula(m: Model, world: str, f: Formula) -> bool:
    return Evaluator(m).eval(world, f)


def extension(m: Model, f: Formula) -> frozenset[str]:
    return Evaluator(m).extension(f)


def sequent_valid(m: Model, s: Sequent) -> bool:
    return Evaluator(m).sequent_valid(s)


# ---------------------------------------------------------------------------
# validation


def _structure_failures(m: Model, system: System) -> list[str]:
    bad: list[str] = []
    if not m.worlds:
        return ["no worlds"]
    seen = set()
    for w in m.worlds:
        if not w or "," in w:
            bad.append(f"bad world name {w!r}")
        if w in seen:
            bad.append(f"duplicate world {w!r}")
        seen.add(w)
    if m.unit not in seen:
        bad.append(f"unit {m.unit!r} is not a world")

    def check_table(op: OpTable, label: str) -> None:
        for (a, b), c in op.items():
            if a not in seen or b not in seen or c not in seen:
                bad.append(f"{label} entry {a},{b} -> {c} leaves the worlds")
        for a in m.worlds:
            for b in m.worlds:
                if (a, b) not in op:
                    bad.append(f"{label} missing entry {a},{b}")

    check_table(m.op, "op")
    if m.serial_op is not None:
        check_table(m.serial_op, "serial_op")
    elif system.ident in SERIAL_SYSTEMS:
        bad.append(f"serial_op required for {system.ident.value}")
    for a, b in m.order:
        if a not in seen or b not in seen:
            bad.append(f"order pair {a} >= {b} names unknown worlds")
    for p, ws in m.valuation.items():
        for w in ws:
            if w not in seen:
                bad.append(f"valuation of {p!r} names unknown world {w!r}")
    box_ok = system.ident in BOX_SYSTEMS
    for key, per_world in m.neighbourhoods.items():
        if key == "box":
            if not box_ok:
                bad.append(f"box neighbourhood not meaningful in "
                           f"{system.ident.value}")
        elif key not in system.agents:
            bad.append(f"neighbourhood key {key!r} is not an agent of "
                       f"{system}")
        for w, sets in per_world.items():
            if w not in seen:
                bad.append(f"neighbourhood of {key!r} names unknown world "
                           f"{w!r}")
                continue
            for x in sets:
                for v in x:
                    if v not in seen:
                        bad.append(f"neighbourhood set of {key!r} at {w} "
                                   f"names unknown world {v!r}")
    for agent in system.agents:
        if agent not in m.neighbourhoods:
            bad.append(f"missing neighbourhood table for agent {agent!r}")
    return bad


def validate_model(m: Model, system: System) -> ModelReport:
    """Check all laws and the frame conditions selected by the system."""
    bad = _structure_failures(m, system)
    if bad:
        return ModelReport(False, tuple(bad))

    fr = _Frame(m)
    n, e = fr.n, fr.e
    names = fr.names

    def law_table(t: list[list[int]], label: str, commutative: bool) -> None:
        for i in range(n):
            if t[e][i] != i or t[i][e] != i:
                bad.append(f"{label}: {m.unit} is not neutral at {names[i]}")
            for j in range(n):
                if commutative and t[i][j] != t[j][i]:
                    bad.append(f"{label} not commutative at "
                               f"{names[i]},{names[j]}")
                for k in range(n):
                    if t[t[i][j]][k] != t[i][t[j][k]]:
                        bad.append(f"{label} not associative at "
                                   f"{names[i]},{names[j]},{names[k]}")

    def bifunctorial(t: list[list[int]], label: str) -> None:
        for low1 in range(n):
            for hi1 in _bits(fr.above[low1]):
                for low2 in range(n):
                    for hi2 in _bits(fr.above[low2]):
                        if not fr.ge(t[hi1][hi2], t[low1][low2]):
                            bad.append(
                                f"{label} not bifunctorial: "
                                f"{names[hi1]} >= {names[low1]}, "
                                f"{names[hi2]} >= {names[low2]}, but "
                                f"{names[t[hi1][hi2]]} !>= "
                                f"{names[t[low1][low2]]}"
                            )

    law_table(fr.op, "op", commutative=True)
    bifunctorial(fr.op, "op")
    if fr.ser is not None:
        law_table(fr.ser, "serial_op", commutative=False)
        bifunctorial(fr.ser, "serial_op")
        for i in range(n):
            for j in range(n):
                if not fr.ge(fr.op[i][j], fr.ser[i][j]):
                    bad.append(
                        f"entropy fails: {names[i]} op {names[j]} !>= "
                        f"{names[i]} serial_op {names[j]}"
                    )

    for p, ws in m.valuation.items():
        mask = _mask_of(fr, ws)
        if fr.up(mask) != mask:
            bad.append(f"valuation of {p!r} is not upward closed")

    nbhd = _nbhd_masks(fr, m)
    for key, table in nbhd.items():
        for w in range(n):
            for x in table[w]:
                for above_w in _bits(fr.above[w]):
                    if above_w != w and x not in table[above_w]:
                        bad.append(
                            f"neighbourhood of {key!r} not hereditary: "
                            f"{fr.set_name(x)} at {names[w]} missing at "
                            f"{names[above_w]}"
                        )

    conditions = FRAME_CONDITIONS[system.ident]
    if conditions:
        bot = _mask_of(fr, m.valuation.get("bot", ()))
        for agent in system.agents:
            table = nbhd.get(agent)
            if table is None:
                continue
            for w in range(n):
                for x in table[w]:
                    if "NotNec" in conditions and x >> e & 1 \
                            and not bot >> w & 1:
                        bad.append(
                            f"agent {agent!r} at {names[w]}: neighbourhood "
                            f"{fr.set_name(x)} contains the unit but the "
                            f"world does not satisfy bot"
                        )
                    if "BringsRefl" in conditions and not x >> w & 1:
                        bad.append(
                            f"agent {agent!r} at {names[w]}: neighbourhood "
                            f"{fr.set_name(x)} does not contain its world"
                        )
                    if "BringsWith" in conditions:
                        for y in table[w]:
                            if x & y not in table[w]:
                                bad.append(
                                    f"agent {agent!r} at {names[w]}: "
                                    f"intersection {fr.set_name(x & y)} "
                                    f"missing"
                                )
            for name, t in (("BringsTensor", fr.op),
                            ("BringsOdot", fr.ser)):
                if name not in conditions:
                    continue
                for w1 in range(n):
                    for x in table[w1]:
                        for w2 in range(n):
                            for y in table[w2]:
                                prod = 0
                                for i in _bits(x):
                                    for j in _bits(y):
                                        prod |= 1 << t[i][j]
                                want = fr.up(prod)
                                home = t[w1][w2]
                                if want not in table[home]:
                                    bad.append(
                                        f"agent {agent!r}: combined "
                                        f"neighbourhood "
                                        f"{fr.set_name(want)} missing at "
                                        f"{names[home]} "
                                        f"({name.lower()} closure)"
                                    )
    return ModelReport(not bad, tuple(bad))


# ---------------------------------------------------------------------------
# serialization


def model_to_json(m: Model) -> dict:
    obj: dict = {
        "worlds": list(m.worlds),
        "unit": m.unit,
        "op": {f"{a},{b}": c for (a, b), c in m.op.items()},
    }
    if m.serial_op is not None:
        obj["serial_op"] = {f"{a},{b}": c
                            for (a, b), c in m.serial_op.items()}
    obj["order"] = [[a, b] for a, b in m.order]
    obj["valuation"] = {p: list(ws) for p, ws in m.valuation.items()}
    obj["neighbourhoods"] = {
        key: {w: [list(x) for x in sets] for w, sets in per_world.items()}
        for key, per_world in m.neighbourhoods.items()
    }
    return obj


def _parse_op(obj: dict, label: str) -> OpTable:
    out: OpTable = {}
    for key, val in obj.items():
        a, sep, b = key.partition(",")
        if not sep or not a or not b or "," in b:
            raise ValueError(f"bad {label} key {key!r}, want 'w,v'")
        out[(a, b)] = val
    return out


def model_from_json(obj: dict) -> Model:
    try:
        worlds = tuple(obj["worlds"])
        unit = obj["unit"]
        op = _parse_op(obj["op"], "op")
        serial = _parse_op(obj["serial_op"], "serial_op") \
            if "serial_op" in obj else None
        order = tuple((a, b) for a, b in obj.get("order", ()))
        valuation = {p: tuple(ws)
                     for p, ws in obj.get("valuation", {}).items()}
        neighbourhoods = {
            key: {w: tuple(tuple(x) for x in sets)
                  for w, sets in per_world.items()}
            for key, per_world in obj.get("neighbourhoods", {}).items()
        }
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed model object: {exc}") from None
    return Model(worlds, unit, op, serial, order, valuation, neighbourhoods)


# ---------------------------------------------------------------------------
# random generation

_FAMILY_ATOMS = ("p", "q", "r", "s")


def _family_tables(family: str, n: int):
    """(op, serial_op or None, base order pairs as (greater, lesser))."""
    sink = n - 1

    if family == "addcap":
        op = [[min(i + j, sink) for j in range(n)] for i in range(n)]
    elif family == "maxchain":
        op = [[max(i, j) for j in range(n)] for i in range(n)]
    elif family == "collapse":
        op = [[j if i == 0 else (i if j == 0 else sink) for j in range(n)]
              for i in range(n)]
    elif family == "cyclic":
        op = [[(i + j) % n for j in range(n)] for i in range(n)]
    elif family == "leftproj":
        # serial op projects to its left argument away from the unit;
        # parallel products all land on a top world sitting above the
        # middle worlds, which keeps entropy and bifunctoriality
        assert n >= 3
        op = [[sink] * n for _ in range(n)]
        ser = [[i if i else j for j in range(n)] for i in range(n)]
        for i in range(n):
            op[0][i] = op[i][0] = i
        return op, ser, [(sink, i) for i in range(1, sink)]
    elif family == "diamond":
        # worlds 0..5 play unit, two generators, their two serial
        # products, and the parallel product sitting above both
        assert n == 6
        op = [[sink] * n for _ in range(n)]
        ser = [[sink] * n for _ in range(n)]
        for i in range(n):
            op[0][i] = op[i][0] = i
            ser[0][i] = ser[i][0] = i
        ser[1][2] = 3  # a . b
        ser[2][1] = 4  # b . a
        return op, ser, [(5, 3), (5, 4)]
    else:
        raise AssertionError(family)

    if family == "cyclic":
        pairs: list[tuple[int, int]] = []
    else:
        pairs = [(i + 1, i) for i in range(n - 1)]
    return op, None, pairs


def _repair_order(n: int, op, ser, pairs: set[tuple[int, int]]):
    """Grow the order until bifunctoriality and entropy hold; returns
    the closure masks."""
    while True:
        above = _closure(n, list(pairs))

        def ge(i, j):
            return bool(above[j] >> i & 1)

        added = False
        for t in (op, ser):
            if t is None:
                continue
            for low1 in range(n):
                for hi1 in _bits(above[low1]):
                    for low2 in range(n):
                        for hi2 in _bits(above[low2]):
                            a, b = t[hi1][hi2], t[low1][low2]
                            if not ge(a, b):
                                pairs.add((a, b))
                                added = True
        if ser is not None:
            for i in range(n):
                for j in range(n):
                    if not ge(op[i][j], ser[i][j]):
                        pairs.add((op[i][j], ser[i][j]))
                        added = True
        if not added:
            return above


def _close_neighbourhoods(
    n: int, above, op, ser, nbhd: dict[str, list[set[int]]],
    conditions: tuple[str, ...], bot_mask: int,
) -> int:
    """Close each agent table under heredity and the selected
    conditions; returns the (possibly grown) bot mask."""

    def up(mask: int) -> int:
        out = 0
        for j in _bits(mask):
            out |= above[j]
        return out

    changed = True
    while changed:
        changed = False
        for table in nbhd.values():
            # heredity: propagate sets upward
            for w in range(n):
                for hi in _bits(above[w]):
                    if hi == w:
                        continue
                    missing = table[w] - table[hi]
                    if missing:
                        table[hi] |= missing
                        changed = True
            if "BringsWith" in conditions:
                for w in range(n):
                    inter = {x & y for x in table[w] for y in table[w]}
                    missing = inter - table[w]
                    if missing:
                        table[w] |= missing
                        changed = True
            for name, t in (("BringsTensor", op), ("BringsOdot", ser)):
                if name not in conditions or t is None:
                    continue
                for w1 in range(n):
                    for x in list(table[w1]):
                        for w2 in range(n):
                            for y in list(table[w2]):
                                prod = 0
                                for i in _bits(x):
                                    for j in _bits(y):
                                        prod |= 1 << t[i][j]
                                z = up(prod)
                                home = t[w1][w2]
                                if z not in table[home]:
                                    table[home].add(z)
                                    changed = True
    if "NotNec" in conditions:
        for table in nbhd.values():
            for w in range(n):
                for x in table[w]:
                    if x & 1 and not bot_mask >> w & 1:  # unit is world 0
                        bot_mask |= above[w]
    return bot_mask


def _random_upset(rng: random.Random, n: int, above, within: int = -1) -> int:
    base = 0
    for i in range(n):
        if within >> i & 1 and rng.random() < 0.35:
            base |= 1 << i
    if not base:
        base = 1 << rng.randrange(n)
    out = 0
    for j in _bits(base):
        out |= above[j]
    return out


def random_model(seed: int, size: int, system: System) -> Model:
    """Deterministic-in-seed model that always passes validate_model."""
    if size < 1:
        raise ValueError("size must be at least 1")
    tag = system.ident.value + ":" + ",".join(system.agents)
    rng = random.Random(f"{seed}|{size}|{tag}")

    serial = system.ident in SERIAL_SYSTEMS
    families = ["addcap", "maxchain", "collapse", "cyclic"]
    if serial and size >= 3:
        families += ["leftproj", "leftproj"]
    if serial and size >= 6:
        families.append("diamond")
    family = rng.choice(families)

    n = 6 if family == "diamond" else size
    op, ser, base_pairs = _family_tables(family, n)
    if ser is None and serial:
        ser = [row[:] for row in op]

    pairs = set(base_pairs)
    if family in ("addcap", "maxchain", "collapse", "cyclic") \
            and n > 1 and rng.random() < 0.25:
        pairs.add((rng.randrange(n), rng.randrange(n)))
    above = _repair_order(n, op, ser, pairs)

    def up(mask: int) -> int:
        out = 0
        for j in _bits(mask):
            out |= above[j]
        return out

    # valuation: random upward closed sets; diamond biases the two
    # generator worlds so serial order becomes observable
    val_masks: dict[str, int] = {}
    for k, p in enumerate(_FAMILY_ATOMS):
        if rng.random() < 0.8:
            if family in ("diamond", "leftproj") and rng.random() < 0.7:
                val_masks[p] = up(1 << (1 + k % 2))
            else:
                val_masks[p] = _random_upset(rng, n, above)
    bot_mask = 0
    if rng.random() < 0.15:
        bot_mask = _random_upset(rng, n, above)

    conditions = FRAME_CONDITIONS[system.ident]
    nbhd: dict[str, list[set[int]]] = {}
    if system.ident in BOX_SYSTEMS:
        table: list[set[int]] = [set() for _ in range(n)]
        for w in range(n):
            if rng.random() < 0.5:
                for _ in range(rng.randrange(1, 3)):
                    raw = _random_upset(rng, n, above) \
                        if rng.random() < 0.6 else \
                        rng.randrange(1, 1 << n)
                    table[w].add(raw)
        nbhd["box"] = table
    for agent in system.agents:
        table = [set() for _ in range(n)]
        for w in range(n):
            if rng.random() < 0.45:
                extra = 1 << rng.randrange(n) if rng.random() < 0.5 else 0
                x = up((1 << w) | extra)
                table[w].add(x)
        nbhd[agent] = table
    bot_mask = _close_neighbourhoods(
        n, above, op, ser, nbhd, conditions, bot_mask
    )

    names = tuple(f"w{i}" for i in range(n))

    def set_names(mask: int) -> tuple[str, ...]:
        return tuple(names[i] for i in _bits(mask))

    op_table: OpTable = {
        (names[i], names[j]): names[op[i][j]]
        for i in range(n) for j in range(n)
    }
    ser_table = None
    if ser is not None:
        ser_table = {
            (names[i], names[j]): names[ser[i][j]]
            for i in range(n) for j in range(n)
        }
    valuation = {p: set_names(mask) for p, mask in sorted(val_masks.items())}
    if bot_mask:
        valuation["bot"] = set_names(bot_mask)
    nbhd_out: NbhdTable = {}
    for key, table in nbhd.items():
        nbhd_out[key] = {
            names[w]: tuple(set_names(x) for x in sorted(table[w]))
            for w in range(n)
        }
    return Model(
        worlds=names,
        unit=names[0],
        op=op_table,
        serial_op=ser_table,
        order=tuple((names[a], names[b]) for a, b in sorted(pairs)),
        valuation=valuation,
        neighbourhoods=nbhd_out,
    )


# ---------------------------------------------------------------------------
# countermodel search


@dataclass(frozen=True)
class Countermodel:
    """A validated model plus a world where the antecedent holds and the
    succedent fails."""

    model: Model
    world: str


def _atom_variant(m: Model, atoms: list[str], rng: random.Random) -> Model:
    fr = _Frame(m)
    valuation = dict(m.valuation)
    for p in atoms:
        if p == "bot":
            continue
        if rng.random() < 0.3:
            valuation.pop(p, None)
            continue
        mask = _random_upset(rng, fr.n, fr.above)
        valuation[p] = tuple(fr.names[i] for i in _bits(mask))
    return replace(m, valuation=valuation)


def _hint_variant(
    m: Model, s: Sequent, rng: random.Random
) -> Model | None:
    """Plant extensions of modal subformula bodies as neighbourhood sets,
    then re-close the frame conditions."""
    bodies: list[tuple[str, Formula]] = []
    for f in subformulas(to_formula(s.ctx)) | subformulas(s.succ):
        if isinstance(f, Box):
            bodies.append(("box", f.body))
        elif isinstance(f, Brings):
            bodies.append((f.agent, f.body))
    if not bodies:
        return None
    fr = _Frame(m)
    ev = Evaluator(m)
    nbhd = _nbhd_masks(fr, m)
    conditions = FRAME_CONDITIONS[s.system.ident]
    agent_conditions = bool(conditions)
    added = False
    for key, body in bodies:
        table = nbhd.setdefault(key, [set() for _ in range(fr.n)])
        ext = ev.extension_mask(body)
        for w in _bits(ext if agent_conditions else (1 << fr.n) - 1):
            if rng.random() < 0.5:
                continue
            if agent_conditions and ext >> fr.e & 1:
                continue  # would force bot; not useful as a hint
            if ext not in table[w]:
                table[w].add(ext)
                added = True
    if not added:
        return None
    bot_mask = _mask_of(fr, m.valuation.get("bot", ()))
    bot_mask = _close_neighbourhoods(
        fr.n, fr.above, fr.op, fr.ser, nbhd, conditions, bot_mask
    )
    valuation = dict(m.valuation)
    if bot_mask:
        valuation["bot"] = tuple(fr.names[i] for i in _bits(bot_mask))
    nbhd_out: NbhdTable = {}
    for key, table in nbhd.items():
        nbhd_out[key] = {
            fr.names[w]: tuple(
                tuple(fr.names[i] for i in _bits(x)) for x in sorted(table[w])
            )
            for w in range(fr.n)
        }
    return replace(m, valuation=valuation, neighbourhoods=nbhd_out)


def find_countermodel(
    s: Sequent, max_size: int, seed: int = 0, attempts: int = 25
) -> Countermodel | None:
    """Search seeded random models (plus sequent-guided variants) for one
    falsifying the sequent.  ``None`` is not a provability claim."""
    atoms = sorted(
        {f.name for g in (to_formula(s.ctx), s.succ)
         for f in subformulas(g) if isinstance(f, Atom)}
    )
    rng = random.Random(f"countermodel|{seed}|{s.key}")
    for size in range(1, max_size + 1):
        for t in range(attempts):
            base = random_model(rng.randrange(1 << 30), size, s.system)
            variants = [base]
            variants.append(_atom_variant(base, atoms, rng))
            hinted = _hint_variant(variants[-1], s, rng)
            if hinted is not None:
                variants.append(hinted)
            hinted = _hint_variant(base, s, rng)
            if hinted is not None:
                variants.append(hinted)
            for cand in variants:
                ev = Evaluator(cand)
                if not ev.sequent_valid(s):
                    witness = ev.falsifying_world(s)
                    if witness is None:
                        continue
                    return Countermodel(cand, witness)
    return None
