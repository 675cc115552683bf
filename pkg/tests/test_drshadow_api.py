import json
import logging

import pytest

from drshadow import DRShadow


@pytest.fixture
def api():
    return DRShadow()


class TestConfig:

    def test_defaults(self, api):
        assert api.setting('search', 'search_bound') == 1000
        assert api.setting('paths', 'convergence_horizon') == 48
        assert api.log_level == 'WARNING'

    def test_partial_config_is_merged(self, tmp_path):
        cfg = tmp_path / 'config.json'
        cfg.write_text(json.dumps({'drshadow': {'sampling': {'seed': 11}, 'log_level': 'INFO'}}))
        api = DRShadow(str(cfg))
        assert api.setting('sampling', 'seed') == 11
        assert api.setting('sampling', 'samples') == 1000
        assert api.log_level == 'INFO'

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            DRShadow(str(tmp_path / 'absent.json'))


class TestQueries:

    def test_point_distance(self, api):
        assert api.get_distance('cantor', '1(0)*', '0(0)*')['distance'][0] == '2^-0'
        assert api.get_distance('nat', 'Nat:3', 'inf')['distance'][0] == '2^-3'

    def test_word_distance(self, api):
        assert api.get_distance('nat', 'Zero', '[Nat:0]')['distance'][0] == '2^-1'
        assert api.get_distance('nat', '[Nat:40]', '[Nat:41]', bound=3)['distance'][0] == 'indistinguishable@3'

    def test_bad_literal_returns_none(self, api, caplog):
        with caplog.at_level(logging.ERROR):
            assert api.get_distance('cantor', '2(0)*', '0(0)*') is None
        assert 'failed' in caplog.text

    def test_membership(self, api):
        assert bool(api.get_membership('cantor', 'Z(01)+Z(1)', '1(0)*')['member'][0])
        assert not bool(api.get_membership('nat', '{n>=3}', 'Nat:2')['member'][0])
        assert bool(api.get_membership('nat', 'C[{0}]', 'Zero')['member'][0])
        assert api.get_membership('nat', '{2}', '0(1)*') is None

    def test_basis(self, api):
        record = api.get_basis('cantor', 3, word='[1(0)*]', bound=8).iloc[0]
        assert record['basis'] == 'Z(00)'
        assert record['tuple'] == [1, 1]
        assert len(record['alpha']) == 8
        assert api.get_basis('cantor', 0) is None

    def test_orbit_stops_outside_the_domain(self, api):
        orbit = api.get_orbit('vls', '0(1)*', 4)
        assert list(orbit['point']) == ['0(1)*', '(1)*']
        assert orbit['branch'].iloc[-1] is None or orbit['branch'].isna().iloc[-1]
        assert len(api.get_orbit('halving', 'Nat:12', 3)) == 4

    def test_pseudo_orbit(self, api):
        pseudo = api.get_pseudo_orbit('vls', 5, 3, seed=42)
        assert len(pseudo) == 5
        assert pseudo['jump'].iloc[0] is None

    def test_shadow(self, api):
        shadow = api.get_shadow('vls', 5, 3, seed=42)
        assert shadow['ok'].all()
        assert api.get_shadow('halving', 5, 3) is None

    def test_lift(self, api):
        lift = api.get_lift('vls', 4, 6, 4, seed=1)
        assert lift['ok'].all()
        assert api.get_lift('vls', 4, 2, 4) is None

    def test_limits(self, api):
        limits = api.get_limits('halving', depth=6, horizon=30)
        assert limits['certified'].all()
        assert list(limits['word']) == ['Zero', '[Nat:1]', '[Nat:1; Nat:1]', '[Nat:1; Nat:1; Nat:1]']
        assert api.get_limits('otw-full') is None

    def test_verify(self, api):
        report = api.verify('balls', space='nat', samples=50)
        assert (report['verdict'] == 'pass').all()
        assert api.verify('entropy') is None
