"""Pseudo-orbits, ball partitions and the two shadowing constructions.

Downstairs, a δ-pseudo-orbit x₀ ... x_N is shadowed by the point obtained by
pulling x_N back through the inverse branches of x_{N-1}, ..., x₀. Upstairs, a
pseudo-orbit is lifted to X̃ by copying the branch stream of α_f(y_i) onto the
backward path seeded at x_{i+1}. Both constructions are verified exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .src.datastruct import *
from .base_points import (BaseSpace, ClopenSet, CylinderUnion, Level, Nat, NatSpace, Point, ball_atom, clopen_subset,
                          point_distance, sample_point)
from .compactified_words import Indistinguishable, ZCylinder, cyl_member, enumerate_tuples
from .dr_systems import DRSystem, apply, branch_inverse, branch_of
from .inverse_limit import ShiftPoint, alpha_f, backward_path, infinite_point, xtilde_distance


@dataclass(frozen=True)
class PseudoOrbit:

    '''
    Points x₀ ... x_N of D with d(f(x_i), x_{i+1}) < 2^-delta_level, i.e. level >= delta_level + 1.

    '''

    system: DRSystem
    points: tuple[Point, ...]
    delta_level: int

    def __post_init__(self) -> None:
        object.__setattr__(self, 'points', tuple(self.points))
        if not self.points:
            raise InvalidPseudoOrbit('a pseudo-orbit has at least one point')
        if self.delta_level < 1:
            raise InvalidPseudoOrbit(f'delta_level must be >= 1, got {self.delta_level}')
        for i, x in enumerate(self.points):
            if not self.system.space.contains(x):
                raise InvalidPseudoOrbit(f'point {i} ({x}) is not in the domain of {self.system}')
        for i, level in enumerate(self.jumps()):
            if level <= self.delta_level:
                raise InvalidPseudoOrbit(f'step {i} jumps by {level}, not below 2^-{self.delta_level}')

    def jumps(self) -> list[Level]:
        '''Levels of d(f(x_i), x_{i+1})'''
        return [point_distance(self.system.space, apply(self.system, a), b)
                for a, b in zip(self.points, self.points[1:])]

    def __len__(self) -> int:
        return len(self.points)


def _perturb(space: BaseSpace, y: Point, delta_level: int, policy: Perturbation,
             rng: np.random.Generator) -> Point | None:
    if not space.contains(y):
        return None
    if policy is Perturbation.NONE:
        return y
    if isinstance(space, NatSpace):
        if y.n <= delta_level:
            return y
        return Nat(int(rng.integers(delta_level + 1, delta_level + 21)))
    if policy is Perturbation.RESAMPLE:
        return sample_point(space, rng, within=CylinderUnion((y.take(delta_level + 1),)))
    for j in rng.permutation(np.arange(delta_level + 1, delta_level + 9)):
        candidate = y.flip(int(j))
        if space.contains(candidate):
            return candidate
    return y


def make_pseudo_orbit(system: DRSystem, length: int, delta_level: int,
                      policy: Perturbation | str = Perturbation.FLIP, seed=0, attempts: int = 100) -> PseudoOrbit:

    """

    Generate a δ-pseudo-orbit by iterating f and perturbing every image inside its ball of level delta_level.

    FLIP changes one bit of f(x_i) at an index in delta_level+1 .. delta_level+8;
    RESAMPLE keeps the first delta_level+1 bits and draws a fresh tail; on ℕ both
    move large images anywhere inside the tail ball. An orbit that runs into the
    removed point (f(x_i) outside D) is abandoned and restarted from a new x₀.

    Args:
        system: a system with base dynamics
        length: number of points
        delta_level: δ = 2^-delta_level
        policy: a Perturbation or its name
        seed: int seed, SeedSequence or Generator

    Returns:
        orbit: the PseudoOrbit

    """

    policy = Perturbation(policy)
    if delta_level < 1:
        raise InvalidPseudoOrbit(f'delta_level must be >= 1, got {delta_level}')
    rng = np.random.default_rng(seed)
    space = system.space
    for _ in range(attempts):
        points = [sample_point(space, rng)]
        while len(points) < length:
            nxt = _perturb(space, apply(system, points[-1]), delta_level, policy, rng)
            if nxt is None:
                break
            points.append(nxt)
        if len(points) == length:
            return PseudoOrbit(system, tuple(points), delta_level)
    logging.error(f'No pseudo-orbit of length {length} in {system} after {attempts} attempts')
    raise OrbitLeavesDomain(f'every sampled orbit of {system} left the domain')


@dataclass(frozen=True)
class PartitionSpec:
    '''The partition of D into balls of radius ρ = 2^-radius_level'''

    radius_level: int

    def atom(self, space: BaseSpace, x: Point) -> ClopenSet:
        return ball_atom(space, x, self.radius_level)


def is_u_pseudo_orbit(seq, spec: PartitionSpec, system: DRSystem) -> bool:
    '''True iff every f(x_n) shares its partition atom with x_{n+1}'''
    space = system.space
    for a, b in zip(seq, seq[1:]):
        if not space.contains(b):
            raise NotInDomain(f'{b} is not in the domain of {system}')
        image = apply(system, a)
        if not space.contains(image) or spec.atom(space, image) != spec.atom(space, b):
            return False
    return True


def u_shadow_check(z: Point, seq, spec: PartitionSpec, system: DRSystem) -> bool:
    '''True iff fⁿ(z) shares its partition atom with x_n along the whole sequence'''
    space = system.space
    for i, x in enumerate(seq):
        if i:
            z = apply(system, z)
        if not space.contains(z):
            raise OrbitLeavesDomain(f'iterate {i} of the orbit ({z}) left the domain of {system}')
        if spec.atom(space, z) != spec.atom(space, x):
            return False
    return True


def _require_separation(system: DRSystem, delta_level: int) -> None:
    if not system.has_separation:
        raise UnsupportedSystem(f'{system} has no separation constants')
    if delta_level < system.r_level:
        raise RhoTooLarge(f'2^-{delta_level} exceeds the interior radius 2^-{system.r_level} of {system}')


@dataclass(frozen=True)
class ShadowOrbit:
    '''The exact orbit z₀ ... z_N shadowing a pseudo-orbit, with the levels of d(z_i, x_i)'''

    pseudo_orbit: PseudoOrbit
    points: tuple[Point, ...]
    levels: tuple[Level, ...]

    @property
    def start(self) -> Point:
        return self.points[0]


def shadow_orbit(system: DRSystem, po: PseudoOrbit) -> ShadowOrbit:

    """

    Pull the last point of a pseudo-orbit back through the branches of its earlier points.

    z_N = x_N and z_i = g_{r_i}(z_{i+1}) where W_{r_i} is the branch of x_i. Since
    x_i = g_{r_i}(f(x_i)) and g_{r_i} gains at least theta_gain levels, every
    z_i is within θδ of x_i, and f(z_i) = z_{i+1} exactly.

    Args:
        system: a system with separation constants
        po: a pseudo-orbit whose δ is at most the interior radius

    Returns:
        orbit: ShadowOrbit with the exact orbit and per-step levels

    """

    _require_separation(system, po.delta_level)
    z = [po.points[-1]]
    for x in reversed(po.points[:-1]):
        branch = branch_of(system, x)
        try:
            z.append(branch_inverse(branch, z[-1]))
        except NotInImage as e:
            logging.error(f'Shadow recursion for {system} left the image of branch {branch.index} at {z[-1]}')
            raise BallEscapesImage(str(e)) from e
    z.reverse()
    levels = tuple(point_distance(system.space, a, b) for a, b in zip(z, po.points))
    return ShadowOrbit(po, tuple(z), levels)


def shadow_point(system: DRSystem, po: PseudoOrbit) -> Point:
    return shadow_orbit(system, po).start


def separation_level(space: BaseSpace, b: ClopenSet) -> int:
    '''Level of dist(B, D minus B) for a basis set B'''
    if isinstance(space, NatSpace):
        return b.elements[0]
    w = b.words[0]
    for j in range(len(w) - 1, -1, -1):
        outside = w[:j] + ('1' if w[j] == '0' else '0')
        if outside.startswith(space.ambient) or space.ambient.startswith(outside):
            return j
    raise ValueError(f'{b} is not a proper clopen subset of {space}')


def family_level(space: BaseSpace, l: int) -> tuple[int, int]:
    '''(level of ρ_l, longest tuple length) over the basis sets of the first l tuples'''
    tuples = [enumerate_tuples(space, j) for j in range(1, l + 1)]
    sets = {b for t in tuples for b in t.sets(space)}
    return max(separation_level(space, b) for b in sets), max(len(t.entries) for t in tuples)


@dataclass(frozen=True)
class UpstairsPseudoOrbit:
    '''Points y₀ ... y_N of X̃ meant to satisfy d(α_f(y_i), y_{i+1}) < 2^-level_bound'''

    system: DRSystem
    points: tuple[ShiftPoint, ...]
    level_bound: int

    def violations(self) -> list[tuple[int, int]]:
        return verify_lift(self)


def verify_lift(up: UpstairsPseudoOrbit) -> list[tuple[int, int]]:
    '''Pairs (i, j): α_f(y_i) and y_{i+1} disagree on Z[p_j, ∅] for some j <= level_bound'''
    space = up.system.space
    cylinders = [ZCylinder(enumerate_tuples(space, j).sets(space), space.empty())
                 for j in range(1, up.level_bound + 1)]
    bad = []
    for i, (y, nxt) in enumerate(zip(up.points, up.points[1:])):
        image = alpha_f(y)
        for j, c in enumerate(cylinders, start=1):
            if cyl_member(c, image.word) != cyl_member(c, nxt.word):
                logging.error(f'Lift step {i} separated by tuple {j}: {image} vs {nxt}')
                bad.append((i, j))
                break
    return bad


def lift_pseudo_orbit(system: DRSystem, po: PseudoOrbit, l: int, depth: int | None = None,
                      skip_step: int | None = None) -> UpstairsPseudoOrbit:

    """

    Lift a base pseudo-orbit to a pseudo-orbit of α_f on X̃.

    y₀ is x₀ extended backwards through branch 0. Given y_i, the first ``depth``
    coordinates of y_{i+1} follow b₁ = x_{i+1}, b_{t+1} = g_{r_t}(b_t) with W_{r_t}
    the branch of coordinate t+1 of α_f(y_i); beyond depth the path continues
    through branch 0. When ρ = 2δ is below the separation of every basis set in
    the first l tuples, α_f(y_i) and y_{i+1} lie in the same cylinders Z[p_j, ∅]
    for j <= l.

    Args:
        system: a system with separation constants
        po: the base pseudo-orbit
        l: number of enumerated tuples that must not separate consecutive points
        depth: recursion depth L, at least the longest of the first l tuples
        skip_step: drop the branch of recursion step t (1-based) at every lift

    Returns:
        lifted: UpstairsPseudoOrbit with level_bound l

    Raises:
        OrbitLeavesDomain: some f(x_i) with i < N is not in D, so α_f is undefined on y_i
        RhoTooLarge: 2δ is not below the separation of the first l tuples

    """

    space = system.space
    _require_separation(system, po.delta_level - 1)
    rho_level, longest = family_level(space, l)
    if po.delta_level - 1 <= rho_level:
        raise RhoTooLarge(f'ρ = 2^-{po.delta_level - 1} is not below ρ_{l} = 2^-{rho_level}')
    depth = longest if depth is None else depth
    if depth < longest:
        raise ValueError(f'depth {depth} is shorter than the longest tuple {longest}')
    for i, x in enumerate(po.points[:-1]):
        image = apply(system, x)
        if not space.contains(image):
            logging.error(f'Cannot lift step {i} of a pseudo-orbit in {system}: f({x}) = {image} is outside D')
            raise OrbitLeavesDomain(f'f(x_{i}) = {image} is not in the domain of {system}')
    lifted = [infinite_point(backward_path(system, po.points[0]))]
    for x in po.points[1:]:
        image = alpha_f(lifted[-1]).word.generator
        stream = [image.branch_at(t) for t in range(1, depth)]
        if skip_step is not None and 1 <= skip_step <= len(stream):
            del stream[skip_step - 1]
        try:
            lifted.append(infinite_point(backward_path(system, x, tuple(stream), (0,))))
        except NotInImage as e:
            raise BallEscapesImage(str(e)) from e
    logging.info(f'Lifted a pseudo-orbit of length {len(po)} in {system} at l={l}, depth={depth}')
    return UpstairsPseudoOrbit(system, tuple(lifted), l)


def lift_levels(up: UpstairsPseudoOrbit, search_bound: int = 1000) -> list[Level | Indistinguishable]:
    return [xtilde_distance(alpha_f(y), nxt, search_bound) for y, nxt in zip(up.points, up.points[1:])]


def _boundary_pairs(space: BaseSpace, x: Point, n: int):
    '''Two points of one level-n atom at level exactly n+1, and two of different atoms at level exactly n'''
    if isinstance(space, NatSpace):
        return (Nat(n + 1), Nat(n + 2)), (Nat(n), Nat(n + 1))
    inside, outside = x.flip(n + 1), x.flip(n)
    if not space.contains(inside) or not space.contains(outside):
        return None
    return (x, inside), (x, outside)


def defining_sequence_report(space: BaseSpace, max_n: int, samples: int = 1000, seed: int = 0) -> list[dict]:

    """

    Exact diameters, separations and refinement of the ball partitions at levels 1..max_n.

    Args:
        space: the base space
        max_n: last level
        samples: random points per level
        seed: rng seed

    Returns:
        records: one dict per level with the sampled diameter S_n, separation ρ_n
        and refinement verdict

    """

    rng = np.random.default_rng(seed)
    records = []
    for n in range(1, max_n + 1):
        spec, finer = PartitionSpec(n), PartitionSpec(n + 1)
        diameter, separation, refines = Level.infinite(), Level(0), True
        for _ in range(samples):
            x = sample_point(space, rng)
            y = sample_point(space, rng, within=spec.atom(space, x))
            pairs = [(x, y)]
            boundary = _boundary_pairs(space, x, n)
            if boundary is not None:
                pairs.append(boundary[0])
                separation = max(separation, point_distance(space, *boundary[1]))
            for a, b in pairs:
                diameter = min(diameter, point_distance(space, a, b))
            w = sample_point(space, rng)
            if spec.atom(space, w) != spec.atom(space, x):
                separation = max(separation, point_distance(space, x, w))
            refines &= clopen_subset(space, finer.atom(space, x), spec.atom(space, x))
        passed = diameter >= n + 1 and separation <= n and refines
        if not passed:
            logging.error(f'Ball partition at level {n} of {space} fails: S={diameter}, rho={separation}')
        records.append({'n': n, 'diameter': str(diameter), 'diameter_level': diameter.value,
                        'separation': str(separation), 'refines': refines, 'passed': passed})
    return records


def partition_shadowing_probe(system: DRSystem, n: int, m: int, trials: int = 100, seed: int = 0,
                              min_length: int = 3, max_length: int = 12) -> list[dict]:

    """

    Empirical check that every partition-m pseudo-orbit is partition-n shadowed.

    Each trial draws a pseudo-orbit at delta_level m from its own spawned rng
    stream, builds its shadow point and checks partition-n shadowing. Evidence
    only: trials cover sampled pseudo-orbits, not all of them.

    Args:
        system: a system with separation constants
        n: level of the shadowing partition
        m: level of the pseudo-orbit partition, m >= n
        trials: number of pseudo-orbits
        seed: root seed

    Returns:
        records: one dict per trial with fields system, n, m, trial, verdict, witness

    """

    if m < n:
        raise ValueError(f'm = {m} must be at least n = {n}')
    spec = PartitionSpec(n)
    records = []
    for trial, child in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        rng = np.random.default_rng(child)
        length = int(rng.integers(min_length, max_length + 1))
        policy = Perturbation.FLIP if rng.random() < 0.5 else Perturbation.RESAMPLE
        po = make_pseudo_orbit(system, length, max(m, 1), policy, rng)
        z = shadow_point(system, po)
        verdict = u_shadow_check(z, po.points, spec, system)
        if not verdict:
            logging.error(f'Trial {trial}: {z} does not shadow {[str(p) for p in po.points]}')
        records.append({'system': str(system), 'n': n, 'm': m, 'trial': trial, 'verdict': verdict, 'witness': str(z)})
    return records
