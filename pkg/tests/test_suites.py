import logging

import pytest

from drshadow import *
from drshadow.suites import SUITE_COLUMNS, Tally


def assert_passes(frame):
    assert list(frame.columns) == SUITE_COLUMNS
    assert not frame.empty
    assert (frame['verdict'] == 'pass').all(), frame[frame['verdict'] != 'pass'].to_dict('records')


class TestSpaceSuites:

    @pytest.mark.parametrize('space', ['cantor', 'nat', 'cantor-minus:(1)*'])
    def test_ultrametric(self, space):
        assert_passes(run_suite('ultrametric', space=parse_space(space), samples=200, seed=1))

    @pytest.mark.parametrize('space', ['cantor', 'nat'])
    def test_every_pair_of_pool_words_separates(self, space):
        frame = run_suite('ultrametric', space=parse_space(space), samples=50, seed=8)
        row = frame[frame['check'] == 'words-separation'].iloc[0]
        assert row['trials'] >= 1000
        assert row['verdict'] == 'pass', row['witness']

    @pytest.mark.parametrize('space', ['cantor', 'nat', 'cantor-minus:(1)*'])
    def test_balls(self, space):
        assert_passes(run_suite(Suite.BALLS, space=parse_space(space), samples=200, seed=2))

    @pytest.mark.parametrize('space', ['cantor', 'nat'])
    def test_defseq(self, space):
        frame = run_suite('defseq', space=parse_space(space), samples=40, seed=3)
        assert_passes(frame)
        assert frame.loc[frame['check'] == 'partition', 'trials'].item() == 10


class TestSystemSuites:

    @pytest.mark.parametrize('name', ['vls', 'frm', 'halving', 'nat-identity'])
    def test_branches(self, name):
        frame = run_suite('branches', system=load_system(name), samples=20, seed=4, branch_probe=5)
        assert_passes(frame)

    def test_branches_run_the_return_time_check_on_frm(self, frm):
        frame = run_suite('branches', system=frm, samples=26, seed=0, branch_probe=3)
        assert {'return-time', 'corrupted-control'} <= set(frame['check'])

    def test_corrupted_control_does_not_log_errors(self, vls, caplog):
        with caplog.at_level(logging.DEBUG):
            frame = run_suite('branches', system=vls, samples=40, seed=4, branch_probe=3)
        assert_passes(frame)
        assert not [r for r in caplog.records if r.levelno >= logging.ERROR]

    @pytest.mark.parametrize('name', ['vls', 'frm', 'halving', 'nat-identity'])
    def test_inverse_limit(self, name):
        frame = run_suite('inverse-limit', system=load_system(name), samples=80, seed=5, depth=12,
                          convergence_depth=6, convergence_horizon=30)
        assert_passes(frame)
        assert 'limit-witness' in set(frame['check'])

    @pytest.mark.parametrize('name', ['vls', 'frm'])
    def test_lift(self, name):
        frame = run_suite('lift', system=load_system(name), samples=40, seed=6)
        assert_passes(frame)
        assert 'skip-step-control' in set(frame['check'])

    @pytest.mark.parametrize('name', ['vls', 'frm'])
    def test_shadow(self, name):
        assert_passes(run_suite('shadow', system=load_system(name), samples=12, seed=7))

    def test_shadow_needs_separation_constants(self, halving):
        with pytest.raises(UnsupportedSystem):
            run_suite('shadow', system=halving, samples=5)

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            run_suite('entropy', space=CantorSpace())


class TestTally:

    def test_first_witness_is_kept(self):
        tally = Tally('shadow', 'vls')
        tally.record('exact-orbit', True)
        tally.record('exact-orbit', False, 'first')
        tally.record('exact-orbit', False, 'second')
        row = tally.frame().iloc[0]
        assert (row['trials'], row['failures'], row['verdict'], row['witness']) == (3, 2, 'fail', 'first')
