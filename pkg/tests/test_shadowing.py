import pytest

from drshadow import *


class TestPseudoOrbits:

    @pytest.mark.parametrize('policy', ['flip', 'resample', 'none'])
    def test_generated_orbits_are_pseudo_orbits(self, vls, frm, halving, policy):
        for system in (vls, frm, halving):
            po = make_pseudo_orbit(system, 6, 3, policy, seed=4)
            assert len(po) == 6
            assert all(level >= 4 for level in po.jumps())

    def test_seed_reproducibility(self, vls):
        assert make_pseudo_orbit(vls, 5, 3, seed=42) == make_pseudo_orbit(vls, 5, 3, seed=42)

    def test_large_jump_is_rejected(self, vls):
        with pytest.raises(InvalidPseudoOrbit):
            PseudoOrbit(vls, (parse_point('(0)*'), parse_point('1(0)*')), 3)

    def test_points_outside_the_domain(self, vls):
        with pytest.raises(InvalidPseudoOrbit):
            PseudoOrbit(vls, (parse_point('(1)*'),), 3)
        with pytest.raises(InvalidPseudoOrbit):
            make_pseudo_orbit(vls, 4, 0)

    def test_partition_pseudo_orbits(self, vls):
        spec = PartitionSpec(2)
        assert is_u_pseudo_orbit([parse_point('(0)*'), parse_point('0001(0)*')], spec, vls)
        assert not is_u_pseudo_orbit([parse_point('(0)*'), parse_point('1(0)*')], spec, vls)
        with pytest.raises(NotInDomain):
            is_u_pseudo_orbit([parse_point('(0)*'), parse_point('(1)*')], spec, vls)

    def test_images_outside_the_domain_share_no_atom(self, vls):
        seq = [parse_point('0(1)*'), parse_point('1111111(0)*')]
        assert not is_u_pseudo_orbit(seq, PartitionSpec(2), vls)
        with pytest.raises(OrbitLeavesDomain):
            u_shadow_check(parse_point('0(1)*'), seq, PartitionSpec(2), vls)


class TestShadowOrbit:

    def test_pulls_back_through_the_branches(self, vls):
        po = PseudoOrbit(vls, (parse_point('(0)*'), parse_point('00001(0)*')), 3)
        orbit = shadow_orbit(vls, po)
        assert orbit.points == (parse_point('000001(0)*'), parse_point('00001(0)*'))
        assert orbit.levels[0] == 5
        assert orbit.levels[1].is_infinite

    @pytest.mark.parametrize('name', ['vls', 'frm'])
    def test_shadowing_is_exact(self, name):
        system = load_system(name)
        for seed in range(20):
            po = make_pseudo_orbit(system, 8, 3, seed=seed)
            orbit = shadow_orbit(system, po)
            assert all(level >= 4 for level in orbit.levels)
            assert all(apply(system, a) == b for a, b in zip(orbit.points, orbit.points[1:]))
            assert orbit.points[-1] == po.points[-1]
            assert u_shadow_check(orbit.start, po.points, PartitionSpec(3), system)

    def test_needs_separation_constants(self, halving):
        po = make_pseudo_orbit(halving, 4, 3, seed=1)
        with pytest.raises(UnsupportedSystem):
            shadow_point(halving, po)


class TestBallPartitions:

    def test_separation_levels(self, nat, cantor, vls, frm):
        assert separation_level(nat, FiniteNatSet((5,))) == 5
        assert separation_level(cantor, CylinderUnion(('011',))) == 2
        assert separation_level(frm.space, CylinderUnion(('01',))) == 1

    def test_family_levels(self, vls, frm):
        assert family_level(vls.space, 4) == (1, 2)
        assert family_level(frm.space, 4) == (2, 2)

    @pytest.mark.parametrize('space', [CantorSpace(), NatSpace()])
    def test_defining_sequence(self, space):
        records = defining_sequence_report(space, 5, samples=80, seed=3)
        assert [r['n'] for r in records] == [1, 2, 3, 4, 5]
        assert all(r['passed'] and r['refines'] for r in records)
        assert [r['diameter_level'] for r in records] == [2, 3, 4, 5, 6]

    def test_partition_shadowing(self, vls, frm):
        for system in (vls, frm):
            records = partition_shadowing_probe(system, 2, 3, trials=15, seed=9)
            assert len(records) == 15
            assert all(r['verdict'] for r in records)

    def test_partition_levels_are_ordered(self, vls):
        with pytest.raises(ValueError):
            partition_shadowing_probe(vls, 3, 2)


class TestLift:

    def control(self, vls, delta_level=3):
        return PseudoOrbit(vls, (parse_point('110(0)*'), parse_point('(0)*')), delta_level)

    def test_lift_copies_the_branch_stream(self, vls):
        up = lift_pseudo_orbit(vls, self.control(vls), 4)
        assert up.violations() == []
        assert lift_levels(up)[0].is_infinite

    def test_skipped_step_is_caught(self, vls):
        up = lift_pseudo_orbit(vls, self.control(vls), 4, skip_step=1)
        assert verify_lift(up) == [(0, 3)]

    def test_rho_must_be_below_the_family_separation(self, vls):
        with pytest.raises(RhoTooLarge):
            lift_pseudo_orbit(vls, self.control(vls, 2), 4)

    def test_image_outside_the_domain_cannot_be_lifted(self, vls):
        po = PseudoOrbit(vls, (parse_point('0(1)*'), parse_point('1111111(0)*')), 5)
        with pytest.raises(OrbitLeavesDomain):
            lift_pseudo_orbit(vls, po, 4)

    def test_depth_covers_the_longest_tuple(self, vls):
        with pytest.raises(ValueError):
            lift_pseudo_orbit(vls, self.control(vls), 4, depth=1)

    @pytest.mark.parametrize('name', ['vls', 'frm'])
    def test_sampled_lifts(self, name):
        system = load_system(name)
        for seed in range(10):
            po = make_pseudo_orbit(system, 5, 6, seed=seed)
            up = lift_pseudo_orbit(system, po, 4)
            assert up.violations() == []
            assert [path_coordinate(y, 1) for y in up.points] == list(po.points)
