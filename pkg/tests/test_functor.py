import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from coarsesigma.dirseq import check_morphism, compose_morphisms, identity_morphism
from coarsesigma.examples import random_spider_model, random_tree_model
from coarsesigma.functor import (BUILTIN_MAPS, ControlError, ControlFunction, ControlledMap, induced_morphism,
                                 interleave, rebase, validate_controlled, verify_coarse_equivalence)
from coarsesigma.rips import ThinTruncationError, TruncationMismatchError, TruncationParams
from coarsesigma.sigma import ind_sigma
from coarsesigma.space import Line, discrete_open_book, integer_line, open_book

F = Fraction
HALF_NET = Line(F(1, 2))
INTS = integer_line()


def floor_map(k=1):
    return ControlledMap(HALF_NET, INTS, lambda a: BUILTIN_MAPS["floor"](HALF_NET, a), "N+1", k, "floor")


def ceil_map(k=1):
    return ControlledMap(HALF_NET, INTS, lambda a: F(math.ceil(a)), "N+1", k, "ceil")


def int_inclusion(k=1):
    return ControlledMap(INTS, HALF_NET, lambda a: a, "N", k, "inclusion")


@pytest.fixture(scope="module")
def line_windows():
    trunc = TruncationParams(60)
    return ind_sigma(HALF_NET, (1, 6), trunc), ind_sigma(INTS, (1, 6), trunc)


# -- control functions ------------------------------------------------------------------

@pytest.mark.parametrize("text,values", [("N", [1, 2, 3]), ("N+1", [2, 3, 4]), ("2N+3", [5, 7, 9]),
                                         ("3*N", [3, 6, 9])])
def test_control_formulas(text, values):
    c = ControlFunction.parse(text)
    assert [c(n) for n in (1, 2, 3)] == values
    assert ControlFunction.parse(c.to_json()) == c


def test_control_tables():
    c = ControlFunction.parse({"1": 2, "2": 2, "3": 5})
    assert [c(n) for n in (1, 2, 3)] == [2, 2, 5]
    assert c.for_distance(F(1, 2)) == 2 and c.for_distance(F(5, 2)) == 5
    with pytest.raises(ControlError):
        c(4)


@pytest.mark.parametrize("bad", ["N-1", "0N", {"1": 0}, {"1": 3, "2": 2}, {}, "M"])
def test_invalid_controls(bad):
    with pytest.raises(ControlError):
        ControlFunction.parse(bad)


def test_index_map_respects_closeness():
    assert floor_map(1).index_map(3) == 4
    assert floor_map(F(7, 2)).index_map(1) == 5
    plain = ControlledMap(INTS, INTS, lambda a: a, "N")
    assert plain.index_map(4) == 5


def test_negative_closeness_rejected():
    with pytest.raises(ControlError):
        ControlledMap(INTS, INTS, lambda a: a, "N", -1)


def test_map_from_json_table():
    fmap = ControlledMap.from_json({"map": [["0", "0"], ["1", "1"]], "control": "N"}, INTS, INTS)
    assert fmap(F(1)) == F(1)
    from coarsesigma.space import SpaceError
    with pytest.raises(SpaceError):
        fmap(F(2))
    with pytest.raises(SpaceError):
        ControlledMap.from_json({"map": "teleport"}, INTS, INTS)


# -- validation ---------------------------------------------------------------------------

def test_floor_and_inclusion_are_controlled_and_close():
    assert validate_controlled(floor_map(), 20, int_inclusion()).ok
    assert validate_controlled(int_inclusion(), 20, floor_map()).ok


def test_identity_is_controlled():
    book = open_book(3)
    ident = ControlledMap(book, book, lambda a: a, "N", 0)
    report = validate_controlled(ident, 10, ident)
    assert report.ok and report.closeness_ok and not report.violations


def test_discrete_book_includes_into_open_book():
    d, b = discrete_open_book(6), open_book(6, F(1, 2))
    inc = ControlledMap(d, b, lambda a: a, "N")
    report = validate_controlled(inc, 30)
    assert report.ok and report.closeness_ok is None


def test_doubling_breaks_the_declared_control():
    double = ControlledMap(INTS, INTS, lambda a: 2 * a, "N")
    report = validate_controlled(double, 10)
    assert not report.control_ok
    assert all(v[0] == "control" for v in report.violations)
    assert ControlledMap(INTS, INTS, lambda a: 2 * a, "2N").control(3) == 6
    assert validate_controlled(ControlledMap(INTS, INTS, lambda a: 2 * a, "2N"), 10).control_ok


def test_collapse_is_not_proper():
    collapse = ControlledMap(INTS, INTS, lambda a: F(0), "N")
    report = validate_controlled(collapse, 12)
    assert report.control_ok and not report.proper_ok and not report.ok


def test_far_partner_breaks_closeness():
    shift = ControlledMap(INTS, INTS, lambda a: a + 2, "N")
    report = validate_controlled(ControlledMap(INTS, INTS, lambda a: a, "N", 1), 6, shift)
    assert report.closeness_ok is False
    assert report.violations[0][0] == "closeness" and report.violations[0][3] == 2


def test_partner_needs_closeness():
    ident = ControlledMap(INTS, INTS, lambda a: a, "N")
    with pytest.raises(ControlError):
        validate_controlled(ident, 4, ident)


# -- induced morphisms -------------------------------------------------------------------

def test_integers_into_the_net(line_windows):
    net_w, int_w = line_windows
    m = induced_morphism(int_inclusion(), int_w, net_w)
    assert check_morphism(m, int_w.to_direct_sequence(), net_w.to_direct_sequence()).ok
    for n in m.levels:
        assert m.u(n) == n + 1
        table = m.maps[n]
        assert len(table) == 2 and len(set(table.values())) == 2


def test_identity_induces_the_bonding():
    book = discrete_open_book(8)
    window = ind_sigma(book, (1, 6), TruncationParams(80))
    seq = window.to_direct_sequence()
    m = induced_morphism(ControlledMap(book, book, lambda a: a, "N"), window, window)
    assert m.levels == [1, 2, 3, 4, 5]
    for n in m.levels:
        assert m.maps[n] == seq.bond(n, n + 1).table


def test_discrete_book_into_open_book_is_injective():
    d, b = discrete_open_book(25), open_book(25, F(1, 2))
    trunc = TruncationParams(200)
    wd, wb = ind_sigma(d, (1, 6), trunc), ind_sigma(b, (1, 6), trunc)
    m = induced_morphism(ControlledMap(d, b, lambda a: a, "N"), wd, wb)
    assert check_morphism(m, wd.to_direct_sequence(), wb.to_direct_sequence()).ok
    for n in m.levels:
        values = list(m.maps[n].values())
        assert len(values) == n == len(set(values))
        assert len(wb.levels[m.u(n)]) == 25


def test_partner_direction_prepends_the_basepoint(line_windows):
    net_w, int_w = line_windows
    m = induced_morphism(floor_map(), net_w, int_w, "partner")
    assert check_morphism(m, net_w.to_direct_sequence(), int_w.to_direct_sequence()).ok
    with pytest.raises(ValueError):
        induced_morphism(floor_map(), net_w, int_w, "sideways")


def test_uncontrolled_image_is_reported(line_windows):
    net_w, int_w = line_windows
    spread = ControlledMap(HALF_NET, INTS, lambda a: F(4 * math.floor(a)), "N")
    with pytest.raises(TruncationMismatchError):
        induced_morphism(spread, net_w, int_w)


def test_interleave():
    assert interleave(["a", "b"], lambda x: x.upper()) == ("a", "A", "a", "b", "B", "b")
    assert interleave([], lambda x: x) == ()


# -- coarse equivalence ----------------------------------------------------------------

def test_line_and_integers_verify():
    report = verify_coarse_equivalence(floor_map(), int_inclusion(), (1, 5), TruncationParams(60),
                                       TruncationParams(60))
    assert report.passed and not report.witness_failures
    assert report.source_window.sizes()[0] == 2
    assert report.to_json()["status"] == "pass"


def test_identity_verifies():
    book = discrete_open_book(10)
    ident = ControlledMap(book, book, lambda a: a, "N", 0)
    report = verify_coarse_equivalence(ident, ident, (1, 4), TruncationParams(100), TruncationParams(100))
    assert report.passed


def test_verification_without_extension_is_inconclusive():
    trunc = TruncationParams(60)
    report = verify_coarse_equivalence(floor_map(), int_inclusion(), (1, 5), trunc, trunc, extend=False)
    assert report.status == "inconclusive"


def test_verification_needs_closeness():
    with pytest.raises(ControlError):
        verify_coarse_equivalence(ControlledMap(INTS, HALF_NET, lambda a: a, "N"), floor_map(), (1, 3),
                                  TruncationParams(40), TruncationParams(40))


# -- basepoint change -------------------------------------------------------------------

def test_rebase_to_the_same_basepoint():
    book = discrete_open_book(8)
    res = rebase(book, (0,), (1, 5), TruncationParams(80))
    assert res.shift == 0
    assert res.old_window.sizes() == res.new_window.sizes()
    assert res.equivalence.status == "pass"
    for n in res.forward.levels:
        assert res.forward.u(n) == n
        assert len(set(res.forward.maps[n].values())) == len(res.forward.maps[n])


def test_rebase_discrete_book():
    res = rebase(discrete_open_book(25), (3, F(9)), (1, 12), TruncationParams(200))
    assert res.shift == 9
    assert res.old_window.sizes() == tuple(range(1, 13))
    # ray 3 has step 3, so the new basepoint is isolated below scale 3
    assert res.new_window.sizes() == (0, 0) + tuple(range(3, 13))
    assert res.equivalence.status == "pass"
    assert all(res.forward.u(n) == max(n, 9) for n in res.forward.levels)


def test_rebase_refuses_thin_truncations():
    with pytest.raises(ThinTruncationError):
        rebase(discrete_open_book(25), (3, F(9)), (1, 5), TruncationParams(200))
    with pytest.raises(ThinTruncationError):
        rebase(discrete_open_book(25), (3, F(9)), (1, 12), TruncationParams(30))


@given(st.integers(0, 10 ** 6))
def test_rebase_on_random_spiders(seed):
    # legs run past R by more than M, so each leg stays an end after the move
    rng = random.Random(seed)
    legs = rng.randint(1, 4)
    space = random_spider_model(rng, legs, 30)
    res = rebase(space, rng.choice(space.ball(3)), (1, 4), TruncationParams(24))
    assert res.equivalence.status == "pass"
    assert res.old_window.sizes()[-1] == res.new_window.sizes()[-1] == legs


def test_rebase_on_a_thin_model_reports_the_mismatch():
    # a finite tree: the leg through the new basepoint ends inside the moved shell
    space = random_spider_model(random.Random(0), 3, 24)
    with pytest.raises(TruncationMismatchError):
        rebase(space, 18, (1, 4), TruncationParams(max(space.matrix[space.basepoint])))


# -- properties --------------------------------------------------------------------------

@given(st.integers(0, 10 ** 6))
def test_identity_maps_induce_morphisms_on_random_models(seed):
    rng = random.Random(seed)
    space = random_tree_model(rng, rng.randint(3, 12))
    radius = max(space.matrix[space.basepoint])
    trunc = TruncationParams(radius, F(1), F(1)) if radius > 2 else TruncationParams(20)
    try:
        window = ind_sigma(space, (1, 3), trunc)
    except ThinTruncationError:
        return
    seq = window.to_direct_sequence()
    m = induced_morphism(ControlledMap(space, space, lambda a: a, "N"), window, window)
    assert check_morphism(m, seq, seq).ok
    assert check_morphism(identity_morphism(seq), seq, seq).ok


def test_induced_morphisms_compose(line_windows):
    net_w, int_w = line_windows
    seq = int_w.to_direct_sequence()
    f, g = int_inclusion(None), floor_map(None)
    composed = compose_morphisms(induced_morphism(f, int_w, net_w), induced_morphism(g, net_w, int_w))
    direct = induced_morphism(f.then(g), int_w, int_w)
    assert composed.levels
    for n in composed.levels:
        top = composed.u(n)
        push = seq.bond(direct.u(n), top)
        assert {x: push(y) for x, y in direct.maps[n].items()} == composed.maps[n]


def test_close_maps_induce_the_same_morphism(line_windows):
    net_w, int_w = line_windows
    seq = int_w.to_direct_sequence()
    lower = induced_morphism(floor_map(), net_w, int_w)
    upper = induced_morphism(ceil_map(), net_w, int_w)
    assert lower.index_map == upper.index_map
    assert lower.maps == upper.maps
    assert check_morphism(upper, net_w.to_direct_sequence(), seq).ok
