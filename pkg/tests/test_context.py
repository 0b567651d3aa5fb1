"""Antecedent structure: multisets, trees, splits, entropy preimages."""
from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from proofmill.context import (
    DEFAULT_STRUCTURAL_BOUND,
    EMPTY,
    Leaf,
    MSet,
    MixedSeparatorError,
    Par,
    Sequent,
    Ser,
    context_complexity,
    context_formulas,
    fill,
    leaf,
    mset,
    normalize,
    par,
    parse_sequent,
    positions,
    print_sequent,
    sequent,
    ser,
    split_parallel,
    split_serial,
    structural_preimages,
    to_formula,
    total_complexity,
    validate_sequent,
)
from proofmill.syntax import atom, odot, parse_formula, parse_system, tensor, unit

MILL = parse_system("MILL")
PCMILL = parse_system("PCMILL")
SRS = parse_system("SRSBIAT:i,s")

p, q, r = atom("p"), atom("q"), atom("r")


# -- multisets ----------------------------------------------------------------


def test_mset_is_order_insensitive():
    assert mset([p, q]) == mset([q, p])
    assert mset([p, q]).key == "p, q"


def test_mset_keeps_duplicates():
    assert mset([p, p]).formulas == (p, p)
    assert mset([p, p]) != mset([p])


def test_mset_differs_from_leaf():
    assert mset([p]) != leaf(p)


# -- trees --------------------------------------------------------------------


def test_par_flattens_and_sorts():
    t = par([leaf(q), par([leaf(p), EMPTY])])
    assert isinstance(t, Par)
    assert t.key == "p, q"
    assert par([leaf(p)]) is leaf(p)
    assert par([]) is EMPTY


def test_ser_flattens_in_order():
    t = ser([leaf(q), ser([leaf(p), leaf(r)])])
    assert isinstance(t, Ser)
    assert t.key == "q ; p ; r"
    assert ser([EMPTY, leaf(p)]) is leaf(p)


def test_brackets_around_mixed_nesting():
    t = par([ser([leaf(p), leaf(q)]), leaf(r)])
    assert t.key == "[p ; q], r"
    u = ser([par([leaf(p), leaf(q)]), leaf(r)])
    assert u.key == "[p, q] ; r"


def test_normalize_idempotent():
    t = ser([par([leaf(p), par([leaf(q), EMPTY])]), leaf(r)])
    assert normalize(t) is t


def test_to_formula():
    assert to_formula(mset([p, q])) == tensor(p, q)
    assert to_formula(mset([])) is unit()
    assert to_formula(EMPTY) is unit()
    assert to_formula(ser([leaf(p), leaf(q)])) == odot(p, q)


def test_positions_and_fill_tree():
    t = ser([leaf(p), par([leaf(q), leaf(r)])])
    paths = {pt: n for pt, n in positions(t)}
    assert paths[()] is t
    assert paths[(0,)] == leaf(p)
    got = fill(t, (1,), leaf(q))
    assert got.key == "p ; q"


def test_fill_mset_splices():
    ms = mset([p, q])
    out = fill(ms, (0,), mset([r, r]))
    assert out == mset([q, r, r])


# -- splits -------------------------------------------------------------------


def test_split_parallel_mset():
    pairs = {(a.key, b.key) for a, b in split_parallel(mset([p, q]))}
    assert pairs == {("", "p, q"), ("p", "q"), ("q", "p"), ("p, q", "")}


def test_split_parallel_par_tree():
    t = par([leaf(p), leaf(q)])
    pairs = {(a.key, b.key) for a, b in split_parallel(t)}
    assert pairs == {("()", "p, q"), ("p", "q"), ("q", "p"), ("p, q", "()")}


def test_split_parallel_non_par_is_trivial():
    t = ser([leaf(p), leaf(q)])
    pairs = [(a.key, b.key) for a, b in split_parallel(t)]
    assert pairs == [("()", "p ; q"), ("p ; q", "()")]


def test_split_serial_cuts():
    t = ser([leaf(p), leaf(q), leaf(r)])
    pairs = [(a.key, b.key) for a, b in split_serial(t)]
    assert pairs == [
        ("()", "p ; q ; r"),
        ("p", "q ; r"),
        ("p ; q", "r"),
        ("p ; q ; r", "()"),
    ]


def test_split_serial_rejects_mset():
    with pytest.raises(TypeError):
        split_serial(mset([p]))


# -- entropy preimages ----------------------------------------------------------


def test_preimages_of_par_pair():
    t = par([leaf(p), leaf(q)])
    pres, overflow = structural_preimages(t)
    assert not overflow
    assert [c.key for c in pres] == ["p, q", "p ; q", "q ; p"]


def test_preimages_of_ser_are_trivial():
    t = ser([leaf(p), leaf(q)])
    pres, overflow = structural_preimages(t)
    assert not overflow
    assert pres == [t]


def test_preimages_start_with_input_and_close_recursively():
    t = par([leaf(p), leaf(q), leaf(r)])
    pres, overflow = structural_preimages(t)
    assert pres[0] is t
    keys = {c.key for c in pres}
    # total serializations of three items: 1 par + 3*2 pair groupings
    # + 6 full chains + partial groupings
    assert "p ; q ; r" in keys
    assert "[p, q] ; r" in keys
    assert "r ; [p, q]" in keys
    assert not overflow
    # every preimage keeps the same leaf multiset
    base = sorted(f.key for f in context_formulas(t))
    for c in pres:
        assert sorted(f.key for f in context_formulas(c)) == base


def test_preimage_overflow_flag():
    big = par([leaf(atom(f"a{i}")) for i in range(7)])
    pres, overflow = structural_preimages(big, 64)
    assert overflow
    assert len(pres) <= 64


def test_preimages_of_mset_trivial():
    pres, overflow = structural_preimages(mset([p, q]))
    assert pres == [mset([p, q])] and not overflow


# -- sequents -------------------------------------------------------------------


def test_sequent_keys():
    s = parse_sequent("p, q |- p * q", MILL)
    assert print_sequent(s) == "p, q |- (p * q)"
    assert total_complexity(s) == 5
    s2 = parse_sequent("|- 1", MILL)
    assert s2.key == "|- 1"


def test_sequent_system_part_of_identity():
    a = parse_sequent("p |- p", MILL)
    b = parse_sequent("p |- p", parse_system("PCMILL"))
    assert a != b


def test_sequent_kind_enforced():
    with pytest.raises(TypeError):
        Sequent(mset([p]), p, SRS)
    with pytest.raises(TypeError):
        Sequent(leaf(p), p, MILL)


def test_parse_tree_sequent():
    s = parse_sequent("S ; E[i]F ; E[s](S @ F \\ T) |- T", SRS)
    assert s.key == "S ; E[i](F) ; E[s](((S @ F) \\ T)) |- T"
    t = parse_sequent(s.key, SRS)
    assert t == s


def test_parse_groups_and_boxes():
    s = parse_sequent("[ [](p) ; q ] |- 1", PCMILL)
    assert isinstance(s.ctx, Ser)
    s2 = parse_sequent("[]p, q |- 1", PCMILL)
    assert isinstance(s2.ctx, Par)
    assert s2.ctx.key == "[](p), q"


def test_parse_empty_antecedents():
    assert parse_sequent("|- p", MILL).ctx == mset([])
    assert parse_sequent("() |- p", PCMILL).ctx is EMPTY


def test_mixed_separators_rejected():
    with pytest.raises(MixedSeparatorError):
        parse_sequent("p, q ; r |- p", SRS)


def test_semicolon_rejected_in_multiset_systems():
    from proofmill.syntax import ParseError

    with pytest.raises(ParseError):
        parse_sequent("p ; q |- p", MILL)


def test_sequent_round_trip_property():
    texts = [
        "p, q, p -o q |- q * q",
        "[p ; q], r |- (p @ q) * r",
        "() |- 1",
        "[p, q] ; r |- (p * q) @ r",
    ]
    for t in texts:
        s = parse_sequent(t, SRS if ";" in t or "@" in t or "()" in t else MILL)
        assert parse_sequent(s.key, s.system) == s


# -- context properties -----------------------------------------------------------

_leafs = st.sampled_from([p, q, r]).map(leaf)


def _trees():
    return st.recursive(
        _leafs,
        lambda kids: st.one_of(
            st.lists(kids, min_size=2, max_size=3).map(par),
            st.lists(kids, min_size=2, max_size=3).map(ser),
        ),
        max_leaves=5,
    )


@given(_trees())
def test_normalize_idempotent_property(t):
    assert normalize(t) is t


@given(_trees())
def test_preimages_preserve_leaves_property(t):
    pres, overflow = structural_preimages(t, 512)
    base = sorted(f.key for f in context_formulas(t))
    assert pres[0] is t
    for c in pres:
        assert sorted(f.key for f in context_formulas(c)) == base
    assert len(set(pres)) == len(pres)


@given(_trees())
def test_split_parallel_reassembles_property(t):
    for a, b in split_parallel(t):
        assert par([a, b]) == t or (a is EMPTY and b == t) or (b is EMPTY and a == t)


@given(_trees())
def test_context_complexity_matches_formulas(t):
    assert context_complexity(t) == sum(f.size for f in context_formulas(t))
