import abc
import copy
import json
import logging

import pandas as pd

from .src.datastruct import *
from .base_points import enumerate_basis, parse_clopen, parse_point, parse_space, point_distance
from .compactified_words import (alpha_bits, check_convergence, cyl_member, enumerate_tuples, format_bits,
                                 parse_cylinder, parse_word, w0_distance)
from .dr_systems import apply, branch_of, load_system
from .inverse_limit import limit_words
from .shadowing import lift_levels, lift_pseudo_orbit, make_pseudo_orbit, shadow_orbit
from .suites import run_suite

DEFAULT_CONFIG = {
    'drshadow': {
        'search': {'search_bound': 1000, 'branch_probe': 9},
        'paths': {'validation_depth': 32, 'convergence_depth': 8, 'convergence_horizon': 48},
        'sampling': {'samples': 1000, 'seed': 0},
        'log_level': 'WARNING',
    }
}


class IDRShadow(abc.ABC):

    @abc.abstractmethod
    def get_distance(self):
        pass

    @abc.abstractmethod
    def get_membership(self):
        pass

    @abc.abstractmethod
    def get_basis(self):
        pass

    @abc.abstractmethod
    def get_orbit(self):
        pass

    @abc.abstractmethod
    def get_pseudo_orbit(self):
        pass

    @abc.abstractmethod
    def get_shadow(self):
        pass

    @abc.abstractmethod
    def get_lift(self):
        pass

    @abc.abstractmethod
    def get_limits(self):
        pass

    @abc.abstractmethod
    def verify(self):
        pass


def _merge(base: dict, override: dict) -> dict:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _is_word_literal(text: str) -> bool:
    return text.strip() == 'Zero' or text.strip().startswith('[')


class DRShadow(IDRShadow):

    _config = None

    def __init__(self, cfg=None) -> None:

        config = {}
        if cfg is not None:
            with open(cfg, 'r') as file:
                config = json.load(file)
        self._config = _merge(DEFAULT_CONFIG, config)

    @property
    def settings(self) -> dict:
        return self._config['drshadow']

    def setting(self, group: str, key: str):
        return self.settings[group][key]

    @property
    def log_level(self) -> str:
        return self.settings['log_level']

    def get_distance(self, space: str, x: str, y: str, bound: int | None = None):

        """

        Exact distance between two points of a base space or two words of W₀ over it

        Args:
            space: space literal, nat, cantor or cantor-minus:<point>
            x, y: point literals (Nat:3, 01(10)*, inf) or word literals (Zero, [p1; p2])
            bound: tuple search bound for words, config search_bound when None

        Returns:
            distance: one-row DataFrame with the distance as 2^-k, 0 or indistinguishable@<bound>

        Examples:

            >>> from drshadow import *
            >>> api = DRShadow()
            >>> api.get_distance('cantor', '1(0)*', '0(0)*')['distance'][0]
            '2^-0'

        """

        distance = None
        try:
            base = parse_space(space)
            bound = self.setting('search', 'search_bound') if bound is None else bound
            if _is_word_literal(x) or _is_word_literal(y):
                value = w0_distance(base, parse_word(x), parse_word(y), bound)
            else:
                value = point_distance(base, parse_point(x), parse_point(y))
            distance = pd.DataFrame([{'command': 'dist', 'space': str(base), 'x': x, 'y': y,
                                      'distance': str(value)}])
        except DRShadowError as e:
            logging.error(f'Distance between {x} and {y} in {space} failed: {e}')
        return distance

    def get_membership(self, space: str, cylinder: str, x: str):

        """

        Membership of a point in a clopen set, or of a word in a generalized cylinder

        Args:
            space: space literal
            cylinder: clopen literal (Z(01)+Z(1), {2,5}, {n>=3}) or cylinder literal (Z[Z(0); empty], C[Z(0)])
            x: point or word literal

        Returns:
            membership: one-row DataFrame with the boolean verdict

        """

        membership = None
        try:
            base = parse_space(space)
            if cylinder.strip()[:2] in ('Z[', 'C['):
                member = cyl_member(parse_cylinder(cylinder, base), parse_word(x))
            else:
                s = parse_clopen(cylinder, base)
                point = parse_point(x)
                if not base.admits(point):
                    raise PointNotInSpace(f'{x} is not a point of {base}')
                member = s.contains(point)
            membership = pd.DataFrame([{'command': 'member', 'space': str(base), 'set': cylinder, 'x': x,
                                        'member': member}])
        except DRShadowError as e:
            logging.error(f'Membership of {x} in {cylinder} failed: {e}')
        return membership

    def get_basis(self, space: str, index: int, word: str | None = None, bound: int | None = None):

        """

        The basis set and the enumerated tuple at a given index, optionally with the alpha bits of a word

        Args:
            space: space literal
            index: positive index
            word: word literal whose alpha bits 1..bound are reported
            bound: number of alpha bits, config search_bound when None

        Returns:
            basis: one-row DataFrame

        """

        basis = None
        try:
            base = parse_space(space)
            t = enumerate_tuples(base, index)
            record = {'command': 'basis', 'space': str(base), 'index': index, 'basis': str(enumerate_basis(base, index)),
                      'tuple': list(t.entries), 'cylinder': ' x '.join(str(s) for s in t.sets(base))}
            if word is not None:
                bound = self.setting('search', 'search_bound') if bound is None else bound
                record['alpha'] = format_bits(alpha_bits(base, parse_word(word), bound))
            basis = pd.DataFrame([record])
        except (DRShadowError, ValueError) as e:
            logging.error(f'Basis lookup {index} in {space} failed: {e}')
        return basis

    def get_orbit(self, system: str, x: str, steps: int):
        '''Iterate f from x, one record per step, stopping when the orbit leaves the domain'''
        orbit = None
        try:
            sys = load_system(system)
            point = parse_point(x)
            records = []
            for step in range(steps + 1):
                inside = sys.space.contains(point)
                records.append({'command': 'orbit', 'system': str(sys), 'step': step, 'point': str(point),
                                'branch': branch_of(sys, point).index if inside else None})
                if not inside or step == steps:
                    break
                point = apply(sys, point)
            orbit = pd.DataFrame.from_records(records)
        except DRShadowError as e:
            logging.error(f'Orbit of {x} under {system} failed: {e}')
        return orbit

    def get_pseudo_orbit(self, system: str, length: int, delta_level: int, policy: str = 'flip', seed=None):
        pseudo = None
        try:
            sys = load_system(system)
            seed = self.setting('sampling', 'seed') if seed is None else seed
            po = make_pseudo_orbit(sys, length, delta_level, policy, seed)
            jumps = [None] + [str(level) for level in po.jumps()]
            pseudo = pd.DataFrame.from_records([{'command': 'pseudo', 'system': str(sys), 'step': i, 'point': str(x),
                                                 'jump': jumps[i]} for i, x in enumerate(po.points)])
        except DRShadowError as e:
            logging.error(f'Pseudo-orbit generation in {system} failed: {e}')
        return pseudo

    def get_shadow(self, system: str, length: int, delta_level: int, policy: str = 'flip', seed=None):

        """

        Generate a pseudo-orbit and the exact orbit shadowing it

        Args:
            system: vls or frm
            length: number of points
            delta_level: δ = 2^-delta_level
            policy: none, flip or resample
            seed: rng seed, config seed when None

        Returns:
            shadow: DataFrame with one record per step: the pseudo-orbit point, the shadow
            point and the level of their distance; ``ok`` states level >= delta_level + 1

        """

        shadow = None
        try:
            sys = load_system(system)
            seed = self.setting('sampling', 'seed') if seed is None else seed
            orbit = shadow_orbit(sys, make_pseudo_orbit(sys, length, delta_level, policy, seed))
            shadow = pd.DataFrame.from_records([
                {'command': 'shadow', 'system': str(sys), 'step': i, 'pseudo': str(x), 'shadow': str(z),
                 'level': str(level), 'ok': bool(level >= delta_level + 1)}
                for i, (x, z, level) in enumerate(zip(orbit.pseudo_orbit.points, orbit.points, orbit.levels))])
        except DRShadowError as e:
            logging.error(f'Shadowing in {system} failed: {e}')
        return shadow

    def get_lift(self, system: str, length: int, delta_level: int, l: int, depth: int | None = None,
                 skip_step: int | None = None, policy: str = 'flip', seed=None):
        lift = None
        try:
            sys = load_system(system)
            seed = self.setting('sampling', 'seed') if seed is None else seed
            up = lift_pseudo_orbit(sys, make_pseudo_orbit(sys, length, delta_level, policy, seed), l, depth, skip_step)
            bad = {i for i, _ in up.violations()}
            levels = lift_levels(up, self.setting('search', 'search_bound'))
            lift = pd.DataFrame.from_records([
                {'command': 'lift', 'system': str(sys), 'step': i, 'point': str(y),
                 'level': str(levels[i]) if i < len(levels) else None, 'ok': i not in bad}
                for i, y in enumerate(up.points)])
        except DRShadowError as e:
            logging.error(f'Lifting in {system} failed: {e}')
        return lift

    def get_limits(self, system: str, depth: int | None = None, horizon: int | None = None):

        """

        Limit words of a bundled system with their convergence certificates

        Args:
            system: vls, frm, halving or nat-identity
            depth: convergence depth, config convergence_depth when None
            horizon: terms inspected, config convergence_horizon when None

        Returns:
            limits: DataFrame with one record per example limit word

        """

        limits = None
        try:
            sys = load_system(system)
            depth = self.setting('paths', 'convergence_depth') if depth is None else depth
            horizon = self.setting('paths', 'convergence_horizon') if horizon is None else horizon
            family = limit_words(sys)
            records = []
            for word in family.examples():
                witness = family.witness(word)
                result = check_convergence(sys.space, witness, word, depth, horizon)
                records.append({'command': 'limits', 'system': str(sys), 'word': str(word),
                                'witness': witness.description, 'certified': result.certified,
                                'zero_in_E': family.zero_in_E})
            limits = pd.DataFrame.from_records(records)
        except DRShadowError as e:
            logging.error(f'Limit words of {system} failed: {e}')
        return limits

    def verify(self, suite: str, space: str | None = None, system: str | None = None,
               samples: int | None = None, seed=None):

        """

        Run one invariant suite

        Args:
            suite: ultrametric, balls, defseq (over a space) or branches, inverse-limit, lift, shadow (over a system)
            space: space literal for the space suites, cantor when None
            system: system name for the system suites, vls when None
            samples: cases per check, config samples when None
            seed: rng seed, config seed when None

        Returns:
            report: DataFrame with one row per check and its verdict

        """

        report = None
        try:
            suite = Suite(suite)
            samples = self.setting('sampling', 'samples') if samples is None else samples
            seed = self.setting('sampling', 'seed') if seed is None else seed
            base = parse_space(space or 'cantor')
            sys = load_system(system or 'vls')
            report = run_suite(suite, space=base, system=sys, samples=samples, seed=seed,
                               search_bound=self.setting('search', 'search_bound'),
                               branch_probe=self.setting('search', 'branch_probe'),
                               depth=self.setting('paths', 'validation_depth'),
                               convergence_depth=self.setting('paths', 'convergence_depth'),
                               convergence_horizon=self.setting('paths', 'convergence_horizon'))
        except (DRShadowError, ValueError) as e:
            logging.error(f'Suite {suite} failed to run: {e}')
        return report
