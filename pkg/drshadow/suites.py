"""Invariant suites run by ``drshadow verify``.

Each suite samples its inputs from one seeded generator, tallies every check
and returns a DataFrame with one row per check: how many cases ran, how many
failed and the first failing witness.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .src.datastruct import *
from .base_points import INFINITY, BaseSpace, Nat, NatSpace, ball_atom, clopen_intersect, point_distance, sample_point
from .compactified_words import (ZERO, FiniteWord, Indistinguishable, InfiniteWord, PeriodicCoordinates, alpha_bits,
                                 check_convergence, separating_index)
from .dr_systems import (DRSystem, PrefixAtlas, apply, branch_inverse, return_time, verify_separation,
                         with_gain_override)
from .inverse_limit import (alpha_f, coordinate_projection, limit_words, sample_shift_point, sigma, sigma_hat)
from .shadowing import (PartitionSpec, Perturbation, defining_sequence_report, family_level, lift_levels,
                        lift_pseudo_orbit, make_pseudo_orbit, partition_shadowing_probe, shadow_orbit,
                        u_shadow_check)

SUITE_COLUMNS = ['suite', 'subject', 'check', 'trials', 'failures', 'verdict', 'witness']


@dataclass
class Tally:
    suite: str
    subject: str
    rows: dict = field(default_factory=dict)

    def record(self, check: str, ok: bool, witness=None) -> None:
        row = self.rows.setdefault(check, {'trials': 0, 'failures': 0, 'witness': ''})
        row['trials'] += 1
        if not ok:
            row['failures'] += 1
            if not row['witness']:
                row['witness'] = str(witness)
                logging.error(f'{self.suite}/{check} failed on {self.subject}: {witness}')

    def frame(self) -> pd.DataFrame:
        records = [{'suite': self.suite, 'subject': self.subject, 'check': check, 'trials': row['trials'],
                    'failures': row['failures'], 'verdict': 'pass' if row['failures'] == 0 else 'fail',
                    'witness': row['witness']} for check, row in self.rows.items()]
        return pd.DataFrame.from_records(records, columns=SUITE_COLUMNS)


def _point_pool(space: BaseSpace, rng: np.random.Generator, size: int) -> list:
    pool = [sample_point(space, rng, max_preperiod=6, max_period=3) for _ in range(size)]
    if space.compactified:
        pool.append(INFINITY)
    return pool


def _shallow_point(space: BaseSpace, rng: np.random.Generator):
    if isinstance(space, NatSpace):
        return Nat(int(rng.integers(0, 12)))
    return sample_point(space, rng, max_preperiod=2, max_period=2)


def _word_pool(space: BaseSpace, rng: np.random.Generator, size: int) -> list:
    pool = {ZERO: None}
    while len(pool) < size:
        kind = int(rng.integers(0, 3))
        if kind == 2:
            word = InfiniteWord(PeriodicCoordinates((_shallow_point(space, rng),), (_shallow_point(space, rng),)))
        else:
            word = FiniteWord(tuple(_shallow_point(space, rng) for _ in range(kind + 1)))
        pool[word] = None
    return list(pool)


def _first_differences(vectors: np.ndarray) -> np.ndarray:
    '''Level matrix from alpha vectors: first differing index (1-based), 0 when none within the bound'''
    diff = vectors[:, None, :] != vectors[None, :, :]
    return np.where(diff.any(axis=2), diff.argmax(axis=2) + 1, 0)


def ultrametric_suite(space: BaseSpace, samples: int = 1000, seed: int = 0, search_bound: int = 1000) -> pd.DataFrame:
    rng = np.random.default_rng(seed)
    tally = Tally(Suite.ULTRAMETRIC.value, str(space))
    points = _point_pool(space, rng, 64)
    for _ in range(samples):
        x, y, z = (points[i] for i in rng.integers(0, len(points), size=3))
        xy, yz, xz = point_distance(space, x, y), point_distance(space, y, z), point_distance(space, x, z)
        tally.record('points-triangle', xz >= min(xy, yz), (str(x), str(y), str(z)))
        tally.record('points-symmetry', xy == point_distance(space, y, x), (str(x), str(y)))
        tally.record('points-identity', xy.is_infinite == (x == y), (str(x), str(y)))
    words = _word_pool(space, rng, 48)
    vectors = np.stack([alpha_bits(space, w, search_bound) for w in words])
    levels = _first_differences(vectors)
    for _ in range(samples):
        i, j, k = (int(v) for v in rng.integers(0, len(words), size=3))
        tally.record('words-symmetry', levels[i, j] == levels[j, i], (str(words[i]), str(words[j])))
        tally.record('words-identity', (separating_index(space, words[i], words[j]) is None) == (i == j),
                     (str(words[i]), str(words[j])))
        if len({i, j, k}) == 3 and levels[i, j] and levels[j, k] and levels[i, k]:
            tally.record('words-triangle', levels[i, k] >= min(levels[i, j], levels[j, k]),
                         (str(words[i]), str(words[j]), str(words[k])))
    for i, x in enumerate(words):
        for j in range(i + 1, len(words)):
            y = words[j]
            bound = separating_index(space, x, y)
            if bound is None:
                tally.record('words-separation', False, (str(x), str(y), 'no differing coordinate'))
                continue
            split = alpha_bits(space, x, 1, bound)[0] != alpha_bits(space, y, 1, bound)[0]
            # levels only reach search_bound; past it the explicit tuple is the certificate
            resolved = bound > search_bound or 0 < levels[i, j] <= bound
            tally.record('words-separation', bool(split) and resolved, (str(x), str(y), bound))
    return tally.frame()


def balls_suite(space: BaseSpace, samples: int = 1000, seed: int = 0) -> pd.DataFrame:
    rng = np.random.default_rng(seed)
    tally = Tally(Suite.BALLS.value, str(space))
    for _ in range(samples):
        n = int(rng.integers(0, 9))
        x, y = sample_point(space, rng), sample_point(space, rng)
        a, b = ball_atom(space, x, n), ball_atom(space, y, n)
        tally.record('dichotomy', a == b or clopen_intersect(space, a, b).is_empty, (str(x), str(y), n))
        tally.record('center', a.contains(x), (str(x), n))
        z = sample_point(space, rng, within=a)
        tally.record('closeness', point_distance(space, x, z) > n and ball_atom(space, z, n) == a, (str(x), str(z), n))
    return tally.frame()


def branches_suite(system: DRSystem, samples: int = 1000, seed: int = 0, branch_probe: int = 9) -> pd.DataFrame:
    tally = Tally(Suite.BRANCHES.value, str(system))
    report = verify_separation(system, samples, seed, branch_probe)
    for check in ('domain', 'inverse', 'gain', 'radius', 'surjectivity'):
        failures = [f for f in report.failures if f['check'] == check]
        tally.rows[check] = {'trials': report.checks, 'failures': len(failures),
                             'witness': str(failures[0]) if failures else ''}
    if isinstance(system.atlas, PrefixAtlas):
        corrupted = verify_separation(with_gain_override(system, 0, 2), min(samples, 100), seed, 1, logging.INFO)
        tally.record('corrupted-control', not corrupted.passed, 'corrupted atlas passed')
    if system.name is SystemName.FRM:
        rng = np.random.default_rng(seed)
        for k in range(13):
            for _ in range(max(1, samples // 13)):
                x = branch_inverse(system.atlas.branch(k), sample_point(system.space, rng))
                tally.record('return-time', return_time(x) == k + 1, (str(x), k))
    return tally.frame()


def inverse_limit_suite(system: DRSystem, samples: int = 1000, seed: int = 0, depth: int = 32,
                        convergence_depth: int = 8, convergence_horizon: int = 48) -> pd.DataFrame:
    rng = np.random.default_rng(seed)
    tally = Tally(Suite.INVERSE_LIMIT.value, str(system))
    for _ in range(samples):
        p = sample_shift_point(system, rng, depth=depth)
        coords = coordinate_projection(p, int(min(p.length, depth)))
        tally.record('backward-path', all(apply(system, coords[t + 1]) == coords[t] for t in range(len(coords) - 1)),
                     str(p))
        if p.length == 0:
            continue
        if not system.space.contains(apply(system, coords[0])):
            continue
        q = alpha_f(p)
        tally.record('sigma-hat-alpha', sigma_hat(q) == p, str(p))
        tally.record('alpha-kind', q.is_infinite == p.is_infinite and q.length == p.length + 1, str(p))
        if p.length >= 2:
            tally.record('alpha-sigma-hat', alpha_f(sigma_hat(p)) == p, str(p))
        if p.length == 1:
            tally.record('sigma-length-one', sigma(p).word == ZERO, str(p))
    family = limit_words(system)
    for word in family.examples():
        result = check_convergence(system.space, family.witness(word), word, convergence_depth, convergence_horizon)
        tally.record('limit-witness', result.certified, result)
    return tally.frame()


def lift_suite(system: DRSystem, samples: int = 100, seed: int = 0, search_bound: int = 1000) -> pd.DataFrame:
    tally = Tally(Suite.LIFT.value, str(system))
    for trial, child in enumerate(np.random.SeedSequence(seed).spawn(samples)):
        rng = np.random.default_rng(child)
        l = int(rng.integers(2, 7))
        rho_level, _ = family_level(system.space, l)
        delta_level = max(rho_level + 2, system.r_level + 1) + int(rng.integers(0, 3))
        po = make_pseudo_orbit(system, int(rng.integers(3, 9)), delta_level,
                               Perturbation.FLIP if rng.random() < 0.5 else Perturbation.RESAMPLE, rng)
        up = lift_pseudo_orbit(system, po, l)
        tally.record('membership-agreement', not up.violations(), (trial, l, delta_level))
        levels = lift_levels(up, min(search_bound, l + 1))
        tally.record('distance', all(isinstance(v, Indistinguishable) or v > l for v in levels),
                     (trial, l, delta_level))
    rng = np.random.default_rng(seed)
    rho_level, _ = family_level(system.space, 4)
    caught = False
    for _ in range(samples):
        po = make_pseudo_orbit(system, 2, rho_level + 2, Perturbation.NONE, rng)
        if lift_pseudo_orbit(system, po, 4, skip_step=1).violations():
            caught = True
            break
    tally.record('skip-step-control', caught, 'skipping a branch was never detected')
    return tally.frame()


def shadow_suite(system: DRSystem, samples: int = 100, seed: int = 0, max_n: int = 6) -> pd.DataFrame:
    tally = Tally(Suite.SHADOW.value, str(system))
    for trial, child in enumerate(np.random.SeedSequence(seed).spawn(samples)):
        rng = np.random.default_rng(child)
        delta_level = int(rng.integers(1, 7))
        po = make_pseudo_orbit(system, int(rng.integers(3, 13)), delta_level,
                               Perturbation.FLIP if rng.random() < 0.5 else Perturbation.RESAMPLE, rng)
        orbit = shadow_orbit(system, po)
        tally.record('shadow-level', all(level >= delta_level + 1 for level in orbit.levels), (trial, str(orbit.start)))
        tally.record('exact-orbit', all(apply(system, a) == b for a, b in zip(orbit.points, orbit.points[1:])),
                     (trial, str(orbit.start)))
        tally.record('u-shadow', u_shadow_check(orbit.start, po.points, PartitionSpec(delta_level), system),
                     (trial, str(orbit.start)))
    for n in range(1, max_n + 1):
        for record in partition_shadowing_probe(system, n, n + 1, samples, seed + n):
            tally.record('probe', record['verdict'], record)
    return tally.frame()


def defseq_suite(space: BaseSpace, samples: int = 1000, seed: int = 0, max_n: int = 10) -> pd.DataFrame:
    tally = Tally(Suite.DEFSEQ.value, str(space))
    records = defining_sequence_report(space, max_n, samples, seed)
    for record in records:
        tally.record('partition', record['passed'], record)
    levels = [record['diameter_level'] for record in records]
    tally.record('decreasing', all(a is not None and b is not None and a < b for a, b in zip(levels, levels[1:])),
                 levels)
    return tally.frame()


def run_suite(suite: Suite | str, space: BaseSpace | None = None, system: DRSystem | None = None,
              samples: int = 1000, seed: int = 0, search_bound: int = 1000, branch_probe: int = 9,
              depth: int = 32, convergence_depth: int = 8, convergence_horizon: int = 48) -> pd.DataFrame:
    '''Dispatch a suite by name; space suites need ``space``, system suites ``system``'''
    suite = Suite(suite)
    match suite:
        case Suite.ULTRAMETRIC:
            return ultrametric_suite(space, samples, seed, search_bound)
        case Suite.BALLS:
            return balls_suite(space, samples, seed)
        case Suite.DEFSEQ:
            return defseq_suite(space, samples, seed)
        case Suite.BRANCHES:
            return branches_suite(system, samples, seed, branch_probe)
        case Suite.INVERSE_LIMIT:
            return inverse_limit_suite(system, samples, seed, depth, convergence_depth, convergence_horizon)
        case Suite.LIFT:
            return lift_suite(system, samples, seed, search_bound)
        case Suite.SHADOW:
            return shadow_suite(system, samples, seed)
