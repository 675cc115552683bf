import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drshadow import *
from strategies import GOLDEN


def golden_cases():
    lines = (GOLDEN / 'q_map.txt').read_text(encoding='utf-8').splitlines()
    return [tuple(part.strip() for part in line.split('=>')) for line in lines if line and not line.startswith('#')]


class TestQMap:

    @pytest.mark.parametrize('sequence,expected', golden_cases())
    def test_golden(self, sequence, expected):
        assert str(q_normalize(parse_sequence(sequence))) == expected

    def test_golden_file_covers_every_branch(self):
        outputs = [expected for _, expected in golden_cases()]
        assert len(outputs) == 20
        assert 'Zero' in outputs
        assert any(o.startswith('[') and '{' not in o for o in outputs)
        assert any('{' in o for o in outputs)

    def test_rule_with_late_infinity(self):
        seq = RuleCoordinates(lambda i: INFINITY if i == 5 else Nat(i), 'stops at 5')
        assert q_normalize(seq) == FiniteWord((Nat(1), Nat(2), Nat(3), Nat(4)))

    def test_certified_rule(self):
        seq = RuleCoordinates(lambda i: Nat(i), 'identity', certified_finite=True)
        word = q_normalize(seq)
        assert word.length == OMEGA
        assert word.coordinate(7) == Nat(7)

    def test_uncertified_rule(self):
        with pytest.raises(UndetectableInfinity):
            q_normalize(RuleCoordinates(lambda i: Nat(i), 'identity'), probe=16)


class TestWords:

    def test_lengths_and_coordinates(self):
        word = parse_word('[Nat:2; Nat:3]')
        assert word.length == 2
        assert word.coordinate(3) is INFINITY
        assert word.prefix(2) == (Nat(2), Nat(3))
        assert ZERO.length == 0
        assert parse_word('[{Nat:1}*]').length == OMEGA

    @pytest.mark.parametrize('text', ['[]', '[inf]', '[Nat:1; inf]', '[{inf}*]', 'Nat:1'])
    def test_bad_literals(self, text):
        with pytest.raises(LiteralError):
            parse_word(text)

    def test_check_word(self, nat, cantor):
        assert check_word(nat, parse_word('[Nat:1]')) == FiniteWord((Nat(1),))
        with pytest.raises(PointNotInSpace):
            check_word(cantor, parse_word('[Nat:1]'))


class TestCylinders:

    def test_z_cylinder_membership(self, nat):
        c = parse_cylinder('Z[{1}; {2}]', nat)
        assert cyl_member(c, parse_word('[Nat:1; Nat:3]'))
        assert cyl_member(c, parse_word('[Nat:1]'))
        assert not cyl_member(c, parse_word('[Nat:1; Nat:2]'))
        assert not cyl_member(c, ZERO)

    def test_c_cylinder_membership(self, nat):
        c = parse_cylinder('C[{0}]', nat)
        assert cyl_member(c, ZERO)
        assert cyl_member(c, parse_word('[Nat:4]'))
        assert not cyl_member(c, parse_word('[Nat:0; Nat:4]'))

    def test_cantor_cylinder(self, cantor):
        c = parse_cylinder('Z[Z(0) x Z(1); empty]', cantor)
        assert str(c) == 'Z[Z(0) x Z(1); empty]'
        assert cyl_member(c, parse_word('[01(0)*; 1(0)*]'))
        assert not cyl_member(c, parse_word('[01(0)*]'))

    def test_prefix_sets_must_be_basis_sets(self, nat):
        with pytest.raises(SpaceMismatch):
            z_cylinder(nat, [FiniteNatSet((1, 2))])
        with pytest.raises(LiteralError):
            parse_cylinder('Z[{1}]', nat)

    def test_neighborhood_contains_its_word(self, nat):
        word = parse_word('[Nat:2; Nat:3; Nat:9]')
        c = neighborhood(nat, word, 2, 4)
        assert cyl_member(c, word)
        assert not cyl_member(c, parse_word('[Nat:2; Nat:4]'))


class TestEnumeration:

    def test_first_tuples(self, cantor):
        assert [enumerate_tuples(cantor, j).entries for j in (1, 2, 3, 4)] == [(1,), (2,), (1, 1), (3,)]

    def test_tuple_sets(self, nat):
        assert enumerate_tuples(nat, 3).sets(nat) == (FiniteNatSet((0,)), FiniteNatSet((0,)))

    @settings(deadline=None)
    @given(st.lists(st.integers(min_value=1, max_value=30), min_size=1, max_size=4))
    def test_enumeration_is_a_bijection(self, entries):
        j = tuple_index(entries)
        assert enumerate_tuples(NatSpace(), j).entries == tuple(entries)

    def test_bad_indices(self, nat):
        with pytest.raises(ValueError):
            enumerate_tuples(nat, 0)
        with pytest.raises(ValueError):
            tuple_index([])


class TestDistance:

    def test_alpha_bits(self, nat):
        assert format_bits(alpha_bits(nat, parse_word('[Nat:0]'), 4)) == '1000'
        assert format_bits(alpha_bits(nat, ZERO, 4)) == '0000'

    def test_known_distances(self, nat):
        assert str(w0_distance(nat, ZERO, parse_word('[Nat:0]'))) == '2^-1'
        assert w0_distance(nat, parse_word('[Nat:0]'), parse_word('[Nat:0; Nat:0]')) == 3
        assert w0_distance(nat, parse_word('[{Nat:1}*]'), parse_word('[Nat:1; {Nat:1}*]')).is_infinite

    def test_indistinguishable_within_bound(self, nat):
        d = w0_distance(nat, parse_word('[Nat:40]'), parse_word('[Nat:41]'), 3)
        assert d == Indistinguishable(3)
        assert str(d) == 'indistinguishable@3'

    def test_separating_tuple_of_a_late_difference(self, nat):
        x, y = parse_word('[Nat:7]'), parse_word('[Nat:7; Nat:11]')
        j = separating_index(nat, x, y)
        assert j == tuple_index((8, 12)) == 16112
        assert enumerate_tuples(nat, j).sets(nat) == (FiniteNatSet((7,)), FiniteNatSet((11,)))
        assert w0_distance(nat, x, y, j) == j
        assert w0_distance(nat, x, y) == Indistinguishable(1000)

    def test_separating_tuples(self, nat, cantor):
        assert separating_index(cantor, ZERO, parse_word('[(0)*]')) == 1
        assert separating_index(nat, parse_word('[Nat:3]'), parse_word('[Nat:3]')) is None
        x, y = parse_word('[(0)*; 01(1)*]'), parse_word('[(0)*; 00(1)*]')
        j = separating_index(cantor, x, y)
        assert alpha_bits(cantor, x, 1, j)[0] != alpha_bits(cantor, y, 1, j)[0]
        assert 0 < w0_distance(cantor, x, y, j) <= j

    def test_distinct_short_words_separate(self, cantor):
        words = [ZERO] + [parse_word(f'[{p}]') for p in ('(0)*', '(1)*', '1(0)*', '(01)*')]
        for i, x in enumerate(words):
            for y in words[i + 1:]:
                assert isinstance(w0_distance(cantor, x, y), Level)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(min_value=0, max_value=3), min_size=0, max_size=2),
           st.lists(st.integers(min_value=0, max_value=3), min_size=0, max_size=2),
           st.lists(st.integers(min_value=0, max_value=3), min_size=0, max_size=2))
    def test_triangle(self, a, b, c):
        space = NatSpace()
        x, y, z = (FiniteWord(tuple(Nat(n) for n in w)) if w else ZERO for w in (a, b, c))
        xy, yz, xz = (w0_distance(space, p, q, 400) for p, q in ((x, y), (y, z), (x, z)))
        assert xz >= min(xy, yz)
        assert xy == w0_distance(space, y, x, 400)


class TestConvergence:

    def test_escaping_second_coordinate(self, nat):
        seq = WordSequence(lambda n: FiniteWord((Nat(1), Nat(2 * n + 1))), '(1, 2n+1)')
        result = check_convergence(nat, seq, parse_word('[Nat:1]'), depth=8, horizon=48)
        assert result.certified
        assert ('infinity', 2, 8, 4) in result.witnesses

    def test_constant_second_coordinate_is_a_counterexample(self, nat):
        seq = WordSequence(lambda n: FiniteWord((Nat(1), Nat(5))), '(1, 5)')
        result = check_convergence(nat, seq, parse_word('[Nat:1]'), depth=8, horizon=48)
        assert not result.certified
        assert (result.condition, result.coordinate, result.level) == ('infinity', 2, 5)

    def test_infinite_limit(self, nat):
        word = parse_word('[{Nat:1}*]')
        assert check_convergence(nat, WordSequence(lambda n: word), word).certified

    def test_lengths_must_grow(self, nat):
        seq = WordSequence(lambda n: FiniteWord((Nat(1),)), 'too short')
        result = check_convergence(nat, seq, parse_word('[{Nat:1}*]'))
        assert not result.certified and result.condition == 'length'

    def test_malformed_sequences(self, nat):
        with pytest.raises(MalformedSequence):
            check_convergence(nat, WordSequence(lambda n: 1 // 0, 'broken'), ZERO)
        with pytest.raises(MalformedSequence):
            check_convergence(nat, WordSequence(lambda n: Nat(n), 'points'), ZERO)
        with pytest.raises(ValueError):
            check_convergence(nat, WordSequence(lambda n: ZERO), ZERO, depth=8, horizon=8)
