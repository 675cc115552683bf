"""Deaconu-Renault systems as branch atlases, and the bundled example systems.

A system is a base space D together with a countable family of disjoint clopen
branch domains W_r covering D; f restricted to W_r is a homeomorphism onto its
image with inverse g_r. The Cantor examples act by stripping prefixes and their
inverses prepend them, so eventually periodic points stay eventually periodic.
"""

from __future__ import annotations

import dataclasses
import functools
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .src.datastruct import *
from .base_points import (BaseSpace, CantorPoint, CantorSpace, ClopenSet, CylinderUnion, FiniteNatSet,
                          Nat, NatProgression, NatSpace, Point, ball_atom, clopen_subset, point_distance, sample_point)


@dataclass(frozen=True)
class Branch:

    '''
    One chart of the atlas: f maps ``domain`` homeomorphically onto ``image`` and ``inverse`` undoes it.
    ``gain`` is the exact level gain of ``inverse`` when it is uniform on the image.

    '''

    index: int
    domain: ClopenSet
    image: ClopenSet
    forward: Callable[[Point], Point] = field(compare=False, repr=False)
    inverse: Callable[[Point], Point] = field(compare=False, repr=False)
    gain: int | None = None


class Atlas:
    '''A countable family of branches with pairwise disjoint domains'''

    def branch(self, r: int) -> Branch:
        raise NotImplementedError

    def locate(self, x: Point) -> Branch:
        raise NotImplementedError

    def preimage_branches(self, y: Point, limit: int) -> list[int]:
        '''The first ``limit`` branch indices whose image contains y'''
        raise NotImplementedError

    def extension_branch(self, y: Point) -> int:
        '''The branch used to extend a backward path past y'''
        return 0


@dataclass(frozen=True)
class PrefixAtlas(Atlas):

    '''
    Branch r strips the word prefix(r) from the front of a sequence; g_r prepends it.

    '''

    image_word: str
    gain_overrides: tuple[tuple[int, int], ...] = ()

    def prefix(self, r: int) -> str:
        raise NotImplementedError

    def locate_index(self, x: CantorPoint) -> int:
        raise NotImplementedError

    def branch(self, r: int) -> Branch:
        if r < 0:
            raise NotInDomain(f'no branch {r}')
        word = self.prefix(r)
        gain = dict(self.gain_overrides).get(r, len(word))
        return Branch(r, CylinderUnion((word + self.image_word,)), CylinderUnion((self.image_word,)),
                      lambda x: x.shift(len(word)), lambda y: y.prepend(word), gain)

    def locate(self, x: Point) -> Branch:
        return self.branch(self.locate_index(x))

    def preimage_branches(self, y: Point, limit: int) -> list[int]:
        return list(range(limit)) if isinstance(y, CantorPoint) and y.startswith(self.image_word) else []


@dataclass(frozen=True)
class VariableLengthAtlas(PrefixAtlas):
    '''W_n = Z(1ⁿ0), g_n(y) = 1ⁿ0y, image everything'''

    image_word: str = ''

    def prefix(self, r: int) -> str:
        return '1' * r + '0'

    def locate_index(self, x: CantorPoint) -> int:
        run = x.leading_run('1')
        if run is None:
            raise NotInDomain(f'{x} lies in no branch Z(1ⁿ0)')
        return run


@dataclass(frozen=True)
class ReturnMapAtlas(PrefixAtlas):
    '''W_k = Z(01^k0), g_k(y) = 01^k y, image A = Z(0)'''

    image_word: str = '0'

    def prefix(self, r: int) -> str:
        return '0' + '1' * r

    def locate_index(self, x: CantorPoint) -> int:
        if x.bit(0) != '0':
            raise NotInDomain(f'{x} lies outside Z(0)')
        run = x.leading_run('1', 1)
        if run is None:
            raise NotInDomain(f'{x} never returns to Z(0)')
        return run


@dataclass(frozen=True)
class HalvingAtlas(Atlas):

    '''
    f(m) = m/2 on evens, f(m) = 1 on odds.
    Branch 0 is the even numbers onto ℕ; branch r >= 1 is the singleton {2r-1} onto {1}.

    '''

    def branch(self, r: int) -> Branch:
        if r < 0:
            raise NotInDomain(f'no branch {r}')
        if r == 0:
            return Branch(0, NatProgression(0, 2), NatProgression(0), lambda x: Nat(x.n // 2), lambda y: Nat(2 * y.n))
        odd = 2 * r - 1
        return Branch(r, FiniteNatSet((odd,)), FiniteNatSet((1,)), lambda x: Nat(1), lambda y: Nat(odd))

    def locate(self, x: Point) -> Branch:
        return self.branch(0 if x.n % 2 == 0 else (x.n + 1) // 2)

    def preimage_branches(self, y: Point, limit: int) -> list[int]:
        return list(range(limit)) if y == Nat(1) else [0][:limit]


@dataclass(frozen=True)
class IdentityAtlas(Atlas):
    '''Branch n is the singleton {n} mapped to itself'''

    def branch(self, r: int) -> Branch:
        if r < 0:
            raise NotInDomain(f'no branch {r}')
        return Branch(r, FiniteNatSet((r,)), FiniteNatSet((r,)), lambda x: x, lambda y: y)

    def locate(self, x: Point) -> Branch:
        return self.branch(x.n)

    def preimage_branches(self, y: Point, limit: int) -> list[int]:
        return [y.n][:limit]

    def extension_branch(self, y: Point) -> int:
        return y.n


@dataclass(frozen=True, eq=False)
class DRSystem:

    '''
    A bundled Deaconu-Renault system.

    ``theta_gain`` is the uniform contraction s of every inverse branch (θ = 2^-s) and
    ``r_level`` the interior radius R = 2^-r_level of every branch image; both are None
    for systems bundled without separation constants. ``atlas`` is None for word spaces
    that carry no dynamics.

    '''

    name: SystemName
    space: BaseSpace
    atlas: Atlas | None
    theta_gain: int | None = None
    r_level: int | None = None
    description: str = ''

    @property
    def has_separation(self) -> bool:
        return self.theta_gain is not None and self.r_level is not None

    def require_atlas(self) -> Atlas:
        if self.atlas is None:
            raise UnsupportedSystem(f'{self.name.value} carries no base dynamics')
        return self.atlas

    def __str__(self) -> str:
        return self.name.value


def load_system(name: str | SystemName) -> DRSystem:

    """

    One of the bundled systems by name.

    Args:
        name: vls, frm, halving, nat-identity or otw-full

    Returns:
        system: the DRSystem (one shared instance per name)

    Examples:

        >>> from drshadow import *
        >>> load_system('vls').theta_gain
        1

    """

    try:
        name = SystemName(name)
    except ValueError as e:
        raise UnsupportedSystem(f'unknown system {name!r}') from e
    return _bundled(name)


@functools.lru_cache(maxsize=None)
def _bundled(name: SystemName) -> DRSystem:
    match name:
        case SystemName.VLS:
            return DRSystem(name, CantorSpace(excluded=CantorPoint('', '1'), compactified=True),
                            VariableLengthAtlas(), 1, 0, 'variable-length shift on {0,1}^ℕ minus 1^∞')
        case SystemName.FRM:
            return DRSystem(name, CantorSpace(ambient='0', excluded=CantorPoint('0', '1'), compactified=True),
                            ReturnMapAtlas(), 1, 0, 'first-return map of the shift to Z(0)')
        case SystemName.HALVING:
            return DRSystem(name, NatSpace(), HalvingAtlas(), description='m/2 on evens, 1 on odds')
        case SystemName.NAT_IDENTITY:
            return DRSystem(name, NatSpace(), IdentityAtlas(), description='identity on ℕ')
        case SystemName.OTW_FULL:
            return DRSystem(name, NatSpace(), None, description='full OTW word space over ℕ')


def with_gain_override(system: DRSystem, r: int, gain: int) -> DRSystem:
    '''A copy of a prefix system whose branch r claims the exact gain ``gain``'''
    atlas = system.require_atlas()
    if not isinstance(atlas, PrefixAtlas):
        raise UnsupportedSystem(f'{system} has no prefix branches')
    overrides = tuple(p for p in atlas.gain_overrides if p[0] != r) + ((r, gain),)
    return dataclasses.replace(system, atlas=dataclasses.replace(atlas, gain_overrides=overrides))


def _require_domain(system: DRSystem, x: Point) -> None:
    if not system.space.contains(x):
        raise NotInDomain(f'{x} is not in the domain of {system}')


def branch_of(system: DRSystem, x: Point) -> Branch:
    atlas = system.require_atlas()
    _require_domain(system, x)
    return atlas.locate(x)


def apply(system: DRSystem, x: Point) -> Point:
    '''f(x), through the branch containing x'''
    return branch_of(system, x).forward(x)


def branch_inverse(branch: Branch, y: Point) -> Point:
    if not branch.image.contains(y):
        raise NotInImage(f'{y} is not in the image of branch {branch.index}')
    return branch.inverse(y)


def return_time(x: Point) -> int:

    """

    First return time of x to A = Z(0) under the shift.

    Args:
        x: a Cantor point of Z(0)

    Returns:
        tau: the least n >= 1 with σⁿ(x) ∈ Z(0)

    Examples:

        >>> from drshadow import *
        >>> return_time(parse_point('01110(0)*'))
        4

    """

    if not isinstance(x, CantorPoint) or x.bit(0) != '0':
        raise NotInDomain(f'{x} is not in Z(0)')
    run = x.leading_run('1', 1)
    if run is None:
        raise InfiniteReturnTime(f'{x} never returns to Z(0)')
    return run + 1


@dataclass
class SeparationReport:
    system: str
    theta_gain: int | None
    r_level: int | None
    checks: int = 0
    failures: list[dict] = field(default_factory=list)
    failure_level: int = logging.ERROR

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, **witness) -> None:
        # one record per check at failure_level, repeats at DEBUG
        first = all(f['check'] != witness['check'] for f in self.failures)
        level = self.failure_level if first else logging.DEBUG
        logging.log(level, f'Separation check failed for {self.system}: {witness}')
        self.failures.append(witness)


def verify_separation(system: DRSystem, samples: int = 1000, seed: int = 0, branches: int = 9,
                      failure_level: int = logging.ERROR) -> SeparationReport:

    """

    Sample-test the branch laws, the contraction of inverse branches and the interior radius.

    For each of the first ``branches`` branches, pairs a, b are drawn from the
    image. Checked: f(g(a)) = a, g(f(x)) = x for x = g(a), g(a) lies in the
    branch domain, the level gain of g is at least theta_gain and equals the
    branch's exact gain when it has one, and the ball of level r_level around a
    stays inside the image. Every sampled y of D also has the branch-0 preimage.
    Systems without separation constants get the branch-law checks only.

    Args:
        system: a DRSystem with an atlas
        samples: pairs per branch
        seed: rng seed
        branches: number of branches probed
        failure_level: log level of the first failure of each check; later ones go to DEBUG

    Returns:
        report: SeparationReport with one witness record per failure

    """

    atlas = system.require_atlas()
    space = system.space
    rng = np.random.default_rng(seed)
    report = SeparationReport(str(system), system.theta_gain, system.r_level, failure_level=failure_level)
    for r in range(branches):
        branch = atlas.branch(r)
        for _ in range(samples):
            a = sample_point(space, rng, within=branch.image)
            b = sample_point(space, rng, within=branch.image)
            ga, gb = branch_inverse(branch, a), branch_inverse(branch, b)
            report.checks += 1
            if not branch.domain.contains(ga) or branch_of(system, ga).index != r:
                report.fail(branch=r, check='domain', a=str(a), image=str(ga))
                continue
            if apply(system, ga) != a or branch_inverse(branch, apply(system, ga)) != ga:
                report.fail(branch=r, check='inverse', a=str(a), image=str(ga))
            if not system.has_separation:
                continue
            before, after = point_distance(space, a, b), point_distance(space, ga, gb)
            if not before.is_infinite:
                expected = before + (branch.gain if branch.gain is not None else system.theta_gain)
                if after < before + system.theta_gain or (branch.gain is not None and after != expected):
                    report.fail(branch=r, check='gain', a=str(a), b=str(b), expected=str(expected), observed=str(after))
            ball = ball_atom(space, a, system.r_level)
            if not clopen_subset(space, ball, branch.image):
                report.fail(branch=r, check='radius', a=str(a), ball=str(ball))
    for _ in range(samples):
        y = sample_point(space, rng)
        if 0 not in atlas.preimage_branches(y, 1):
            continue
        x = branch_inverse(atlas.branch(0), y)
        report.checks += 1
        if not space.contains(x) or apply(system, x) != y:
            report.fail(branch=0, check='surjectivity', y=str(y), preimage=str(x))
    logging.info(f'Separation report for {system}: {report.checks} checks, {len(report.failures)} failures')
    return report
