import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from coarsesigma.dirseq import (OMEGA, ConcreteSequence, DirectSequenceError, Morphism, NatMap, SetMap,
                                SizeFormula, SymbolicSequence, WindowError, cardinality_obstruction,
                                check_equivalence, check_morphism, compose_bonding, compose_morphisms,
                                direct_limit, identity_morphism, induced_limit_map, limit_maps_inverse,
                                normalize_morphism, sequence_from_json)
from coarsesigma.examples import random_concrete_sequence, random_equivalent_pair
from coarsesigma.rips import TruncationParams
from coarsesigma.sigma import ind_sigma
from coarsesigma.space import discrete_open_book, open_book

F = Fraction
SEEDS = st.integers(0, 10 ** 6)


def chain(sizes, start=1):
    """Levels {0..n-1} with inclusion bondings."""
    levels = [list(range(n)) for n in sizes]
    return ConcreteSequence(start, levels, [{x: x for x in lv} for lv in levels[:-1]])


@pytest.fixture(scope="module")
def book_windows():
    d = ind_sigma(discrete_open_book(10), (1, 5), TruncationParams(80)).to_direct_sequence()
    b = ind_sigma(open_book(10, F(1, 2)), (1, 5), TruncationParams(80)).to_direct_sequence()
    return d, b


def ray_morphism(d, b):
    """Class of ray k in one window to the class of ray k in the other."""
    maps = {}
    for i in d.indices:
        by_ray = {y[0]: y for y in b.level(i)}
        maps[i] = {x: by_ray[x[0]] for x in d.level(i)}
    return Morphism({i: i for i in d.indices}, maps)


# -- bondings -----------------------------------------------------------------------

def test_composite_at_equal_indices_is_identity():
    seq = random_concrete_sequence(random.Random(3))
    for i in seq.indices:
        assert compose_bonding(seq, i, i) == SetMap.identity(seq.level(i))


def test_symbolic_discrete_book_composite_is_inclusion():
    phi = compose_bonding(SymbolicSequence("N", "inclusion"), 2, 5)
    assert phi == NatMap(2, 5)
    assert [phi(x) for x in (1, 2)] == [1, 2]
    assert phi.is_injective() and not phi.is_surjective()
    with pytest.raises(DirectSequenceError):
        phi(3)


def test_two_step_composite_elementwise():
    seq = random_concrete_sequence(random.Random(11))
    first, second = seq.bondings[0], seq.bondings[1]
    assert all(compose_bonding(seq, 1, 3)(x) == second(first(x)) for x in seq.level(1))


def test_composite_outside_window():
    seq = chain([1, 2, 3])
    with pytest.raises(WindowError):
        compose_bonding(seq, 2, 4)
    with pytest.raises(WindowError):
        compose_bonding(seq, 3, 2)


def test_bonding_must_be_total():
    with pytest.raises(DirectSequenceError):
        ConcreteSequence(1, [[1, 2], [1]], [{1: 1}])


# -- morphisms ----------------------------------------------------------------------

def test_constant_index_map_is_pushed_up():
    x = chain([2, 3, 3])
    y = ConcreteSequence(1, [["p", "q"], ["p", "q", "r"], ["s"]],
                         [{"p": "q", "q": "r"}, {"p": "s", "q": "s", "r": "s"}])
    top = {0: "p", 1: "q", 2: "p"}
    maps = {3: top, 2: {k: top[k] for k in range(3)}, 1: {k: top[k] for k in range(2)}}
    m = Morphism({1: 1, 2: 1, 3: 1}, maps)
    assert check_morphism(m, x, y).ok
    norm = normalize_morphism(m, x, y)
    assert [norm.u(i) for i in norm.levels] == [1, 2, 3]
    for j in norm.levels:
        push = y.bond(1, j)
        assert norm.maps[j] == {a: push(b) for a, b in maps[j].items()}
    assert check_morphism(norm, x, y).ok


def test_normalized_morphism_is_a_fixed_point():
    pair = random_equivalent_pair(random.Random(5))
    once = normalize_morphism(pair.backward, pair.target, pair.source)
    twice = normalize_morphism(once, pair.target, pair.source)
    assert once.index_map == twice.index_map and once.maps == twice.maps


def test_normalizing_needs_room_in_the_target():
    x, y = chain([1, 1, 1]), chain([1, 1])
    m = Morphism({1: 1, 2: 1, 3: 1}, {i: {0: 0} for i in (1, 2, 3)})
    with pytest.raises(WindowError):
        normalize_morphism(m, x, y)


def test_identity_morphism_commutes():
    seq = random_concrete_sequence(random.Random(2))
    assert check_morphism(identity_morphism(seq), seq, seq).ok


def test_discrete_book_includes_into_open_book(book_windows):
    d, b = book_windows
    m = ray_morphism(d, b)
    assert check_morphism(m, d, b).ok
    lim = induced_limit_map(m, d, b)
    assert lim.well_defined and not lim.undefined
    assert len(set(lim.table.values())) == len(lim.table) == 5
    assert direct_limit(b).cardinality == 10


def test_corrupted_value_reports_exactly_the_broken_pairs():
    seq = ConcreteSequence(1, [[0, 1], [0, 1, 2], [0, 1, 2, 3], [0, 1, 2, 3, 4]],
                           [{0: 0, 1: 2}, {0: 0, 1: 1, 2: 2}, {x: x for x in range(4)}])
    m = identity_morphism(seq)
    broken = Morphism(m.index_map, {**m.maps, 2: {**m.maps[2], 2: 1}})
    report = check_morphism(broken, seq, seq)
    assert not report.ok
    got = {(i, j, x) for i, j, x, _, _ in report.violations}
    assert got == {(1, 2, 1), (2, 3, 2), (2, 4, 2)}


def test_morphism_json_round_trip():
    pair = random_equivalent_pair(random.Random(8))
    again = Morphism.from_json(pair.forward.to_json())
    assert again.index_map == pair.forward.index_map and again.maps == pair.forward.maps


# -- equivalence ----------------------------------------------------------------------

def test_identity_pair_is_an_equivalence():
    seq = random_concrete_sequence(random.Random(4))
    ident = identity_morphism(seq)
    assert check_equivalence(ident, ident, seq, seq).status == "pass"


def test_short_window_is_inconclusive_not_failure():
    pair = random_equivalent_pair(random.Random(9))
    report = check_equivalence(pair.forward, pair.backward, pair.source, pair.target)
    assert report.status == "inconclusive"
    assert report.skipped and not report.violations


def test_wrong_partner_fails():
    seq = chain([2, 2, 2])
    swap = Morphism({i: i for i in (1, 2, 3)}, {i: {0: 1, 1: 0} for i in (1, 2, 3)})
    ident = identity_morphism(seq)
    report = check_equivalence(ident, swap, seq, seq)
    assert report.status == "fail"
    assert {(v[0], v[1]) for v in report.violations} >= {("source", 1), ("target", 1)}


def test_basepoint_change_pair_for_discrete_book():
    from coarsesigma.functor import rebase
    res = rebase(discrete_open_book(12), (2, F(4)), (1, 8), TruncationParams(120))
    assert res.equivalence.status == "pass"


# -- limits ------------------------------------------------------------------------

def test_constant_identity_sequence_limit():
    seq = ConcreteSequence(1, [["a", "b", "c"]] * 4, [{x: x for x in "abc"}] * 3)
    assert direct_limit(seq).cardinality == 3
    assert direct_limit(SymbolicSequence("7", "identity")).cardinality == 7


def test_symbolic_limits():
    assert direct_limit(SymbolicSequence("N", "inclusion")).cardinality is OMEGA
    assert direct_limit(SymbolicSequence("omega", "identity")).cardinality is OMEGA
    with pytest.raises(DirectSequenceError):
        direct_limit(SymbolicSequence("3", "table", table={1: 1, 2: 1, 3: 2}))


def test_discrete_book_window_limit_has_one_class_per_ray(book_windows):
    d = ind_sigma(discrete_open_book(25), (1, 10), TruncationParams(200)).to_direct_sequence()
    limit = direct_limit(d)
    assert limit.cardinality == 10
    first_levels = sorted(c[0][0] for c in limit.classes)
    assert first_levels == list(range(1, 11))
    for members in limit.classes:
        level, cid = members[0]
        assert cid[0] == level


def test_identity_induces_identity_on_limit():
    seq = random_concrete_sequence(random.Random(6))
    lim = induced_limit_map(identity_morphism(seq), seq, seq)
    assert lim.table == {k: k for k in range(direct_limit(seq).cardinality)}


def test_equivalence_induces_inverse_bijections():
    pair = random_equivalent_pair(random.Random(12))
    la, lb = direct_limit(pair.source), direct_limit(pair.target)
    f = induced_limit_map(pair.forward, pair.source, pair.target, la, lb)
    g = induced_limit_map(pair.backward, pair.target, pair.source, lb, la)
    assert limit_maps_inverse(f, g, la, lb)


# -- obstruction --------------------------------------------------------------------

def test_book_sequences_are_separated():
    book, discrete = SymbolicSequence("omega", "identity"), SymbolicSequence("N", "inclusion")
    assert cardinality_obstruction(book, discrete).verdict == "not_equivalent"
    assert cardinality_obstruction(discrete, book).verdict == "inconclusive"


def test_obstruction_never_fires_on_equal_sequences():
    for seq in (SymbolicSequence("N", "inclusion"), SymbolicSequence("omega", "identity"),
                random_concrete_sequence(random.Random(1))):
        assert cardinality_obstruction(seq, seq).verdict == "inconclusive"


def test_collapsing_sequence_never_obstructs():
    collapse = ConcreteSequence(1, [list(range(5)), list(range(5)), [0]],
                                [{x: x for x in range(5)}, {x: 0 for x in range(5)}])
    assert cardinality_obstruction(collapse, chain([1, 1, 1])).verdict == "inconclusive"
    table = SymbolicSequence("4", "table", table={1: 1, 2: 1, 3: 1, 4: 1})
    assert cardinality_obstruction(table, SymbolicSequence("1", "identity")).verdict == "inconclusive"


def test_finite_bounded_target_is_obstructed_by_larger_growth():
    verdict = cardinality_obstruction(SymbolicSequence("2N+1", "inclusion"), SymbolicSequence("5", "identity"))
    assert verdict.verdict == "not_equivalent" and verdict.level == 3


# -- formats --------------------------------------------------------------------------

@pytest.mark.parametrize("text,values", [("N", [1, 2, 3]), ("2N+1", [3, 5, 7]), ("4", [4, 4, 4]),
                                         ("N-1", [0, 1, 2])])
def test_size_formulas(text, values):
    f = SizeFormula.parse(text)
    assert [f(n) for n in (1, 2, 3)] == values
    assert SizeFormula.parse(str(f)) == f


@pytest.mark.parametrize("bad", ["N^2", "", "x", "N+"])
def test_bad_size_formulas(bad):
    with pytest.raises(DirectSequenceError):
        SizeFormula.parse(bad)


def test_sequence_json_round_trip():
    for seq in (random_concrete_sequence(random.Random(7)), SymbolicSequence("N", "inclusion", start=2),
                SymbolicSequence("2", "table", table={1: 2, 2: 2})):
        assert sequence_from_json(seq.to_json()) == seq


# -- properties -----------------------------------------------------------------------

@given(SEEDS, st.data())
def test_bonding_composition_is_functorial(seed, data):
    seq = random_concrete_sequence(random.Random(seed), levels=5)
    i, j, k = sorted(data.draw(st.lists(st.integers(1, 5), min_size=3, max_size=3)))
    assert compose_bonding(seq, i, k) == compose_bonding(seq, i, j).then(compose_bonding(seq, j, k))


@given(SEEDS)
def test_limit_identifies_exactly_the_colliding_elements(seed):
    seq = random_concrete_sequence(random.Random(seed), levels=5, surjective_top=False)
    limit = direct_limit(seq)
    members = [(i, x) for i in seq.indices for x in seq.level(i)]
    for i, x in members:
        for j, y in members:
            k = max(i, j)
            collide = any(seq.bond(i, m)(x) == seq.bond(j, m)(y) for m in range(k, seq.stop + 1))
            assert (limit.class_of[(i, x)] == limit.class_of[(j, y)]) == collide


@given(SEEDS)
def test_random_equivalences_verify_and_normalize(seed):
    pair = random_equivalent_pair(random.Random(seed))
    assert check_morphism(pair.forward, pair.source, pair.target).ok
    assert check_morphism(pair.backward, pair.target, pair.source).ok
    assert check_equivalence(pair.forward, pair.backward, pair.source, pair.target,
                             pair.source_levels, pair.target_levels).status == "pass"
    for m, a, b in ((pair.forward, pair.source, pair.target), (pair.backward, pair.target, pair.source)):
        try:
            norm = normalize_morphism(m, a, b)
        except WindowError:
            continue
        assert check_morphism(norm, a, b).ok
        assert all(norm.u(i) >= i for i in norm.levels)
        assert all(norm.u(i) < norm.u(j) for i, j in zip(norm.levels, norm.levels[1:]))


@given(SEEDS)
def test_verified_equivalence_composes_to_bonding(seed):
    pair = random_equivalent_pair(random.Random(seed))
    round_trip = compose_morphisms(pair.forward, pair.backward)
    for i in pair.source_levels:
        phi = pair.source.bond(i, round_trip.u(i))
        assert all(round_trip.apply(i, x) == phi(x) for x in pair.source.level(i))


@given(SEEDS)
def test_obstruction_is_sound_on_verified_pairs(seed):
    rng = random.Random(seed)
    pair = random_equivalent_pair(rng)
    assert cardinality_obstruction(pair.source, pair.target).verdict == "inconclusive"
    assert cardinality_obstruction(pair.target, pair.source).verdict == "inconclusive"
