import logging

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from drshadow import *
from strategies import cantor_points


class TestLoading:

    def test_bundled_systems_are_shared(self, vls):
        assert load_system(SystemName.VLS) is vls
        assert (vls.theta_gain, vls.r_level) == (1, 0)
        assert load_system('frm').has_separation
        assert not load_system('halving').has_separation

    def test_unknown_system(self):
        with pytest.raises(UnsupportedSystem):
            load_system('tent')

    def test_word_space_has_no_dynamics(self):
        otw = load_system('otw-full')
        with pytest.raises(UnsupportedSystem):
            apply(otw, Nat(1))


class TestVariableLengthShift:

    def test_branches_strip_their_prefix(self, vls):
        x = parse_point('1110(0)*')
        assert branch_of(vls, x).index == 3
        assert apply(vls, x) == CantorPoint('', '0')
        assert apply(vls, parse_point('0101(1)*')) == parse_point('101(1)*')

    def test_branch_data(self, vls):
        branch = vls.atlas.branch(2)
        assert branch.domain == CylinderUnion(('110',))
        assert branch.gain == 3
        assert branch_inverse(branch, parse_point('(0)*')) == parse_point('11(0)*')

    def test_removed_point_has_no_branch(self, vls):
        with pytest.raises(NotInDomain):
            apply(vls, CantorPoint('', '1'))

    @settings(max_examples=200, deadline=None)
    @given(cantor_points, cantor_points, st.integers(min_value=0, max_value=8))
    def test_exact_gain(self, a, b, n):
        system = load_system('vls')
        assume(system.space.contains(a) and system.space.contains(b))
        g = system.atlas.branch(n)
        ga, gb = branch_inverse(g, a), branch_inverse(g, b)
        assert point_distance(system.space, ga, gb) == point_distance(system.space, a, b) + (n + 1)
        assert apply(system, ga) == a
        assert branch_of(system, ga).index == n


class TestFirstReturnMap:

    def test_branches(self, frm):
        x = parse_point('0110(0)*')
        assert branch_of(frm, x).index == 2
        assert apply(frm, x) == parse_point('(0)*')
        assert branch_inverse(frm.atlas.branch(2), parse_point('(01)*')) == parse_point('011(01)*')

    def test_outside_the_image(self, frm):
        with pytest.raises(NotInImage):
            branch_inverse(frm.atlas.branch(0), parse_point('1(0)*'))
        with pytest.raises(NotInDomain):
            apply(frm, parse_point('1(0)*'))

    def test_return_time(self):
        assert return_time(parse_point('01110(0)*')) == 4
        assert return_time(parse_point('0110(0)*')) == 3
        assert return_time(parse_point('(0)*')) == 1
        with pytest.raises(InfiniteReturnTime):
            return_time(parse_point('0(1)*'))
        with pytest.raises(NotInDomain):
            return_time(parse_point('1(0)*'))

    def test_return_time_matches_branch(self, frm):
        rng = np.random.default_rng(7)
        for k in range(10):
            x = branch_inverse(frm.atlas.branch(k), sample_point(frm.space, rng))
            assert return_time(x) == k + 1 == branch_of(frm, x).index + 1


class TestNatSystems:

    def test_halving(self, halving):
        assert apply(halving, Nat(6)) == Nat(3)
        assert apply(halving, Nat(5)) == Nat(1)
        assert branch_of(halving, Nat(5)).index == 3
        assert branch_inverse(halving.atlas.branch(3), Nat(1)) == Nat(5)
        with pytest.raises(NotInImage):
            branch_inverse(halving.atlas.branch(3), Nat(2))

    def test_identity(self, identity):
        assert apply(identity, Nat(4)) == Nat(4)
        assert branch_of(identity, Nat(4)).index == 4

    def test_infinity_is_not_in_the_domain(self, halving):
        with pytest.raises(NotInDomain):
            apply(halving, INFINITY)


class TestSeparation:

    @pytest.mark.parametrize('name', ['vls', 'frm'])
    def test_cantor_systems_pass(self, name):
        report = verify_separation(load_system(name), samples=60, seed=1, branches=6)
        assert report.passed
        assert report.checks > 0

    @pytest.mark.parametrize('name', ['halving', 'nat-identity'])
    def test_branch_laws_without_constants(self, name):
        assert verify_separation(load_system(name), samples=30, seed=2, branches=5).passed

    def test_corrupted_gain_is_caught(self, vls):
        report = verify_separation(with_gain_override(vls, 0, 2), samples=30, seed=0, branches=1)
        assert not report.passed
        assert {f['check'] for f in report.failures} == {'gain'}

    def test_repeated_failures_log_once(self, vls, caplog):
        with caplog.at_level(logging.DEBUG):
            report = verify_separation(with_gain_override(vls, 0, 2), samples=30, seed=0, branches=1)
        errors = [r for r in caplog.records if r.levelno >= logging.ERROR]
        assert len(report.failures) > 1
        assert len(errors) == 1

    def test_expected_failures_log_below_error(self, vls, caplog):
        with caplog.at_level(logging.DEBUG):
            verify_separation(with_gain_override(vls, 0, 2), samples=30, seed=0, branches=1, failure_level=logging.INFO)
        assert not [r for r in caplog.records if r.levelno >= logging.ERROR]

    def test_override_leaves_the_bundled_system_alone(self, vls):
        with_gain_override(vls, 0, 2)
        assert vls.atlas.branch(0).gain == 1

    def test_override_needs_prefix_branches(self, halving):
        with pytest.raises(UnsupportedSystem):
            with_gain_override(halving, 0, 2)
