"""Backward f-paths and the inverse limit X̃ = D_∞ ∪ D_lim with its shifts σ, σ̂ and α_f.

An infinite backward path is a seed x₁ together with an eventually periodic
stream of branch indices r₁ r₂ ...; coordinate t+1 is g_{r_t}(x_t). Branch
domains are disjoint, so the stream is determined by the path and equal
normal forms mean equal paths. Finite points of X̃ are the limit words of the
bundled systems, described in closed form by a :class:`LimitFamily`.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass

import numpy as np

from .src.datastruct import *
from .base_points import INFINITY, CantorPoint, Level, Nat, Point, canonical_cycle, parse_point, sample_point
from .compactified_words import (ZERO, CoordinateGenerator, FiniteWord, Indistinguishable, InfiniteWord,
                                 PeriodicCoordinates, W0Word, WordSequence, w0_distance)
from .dr_systems import DRSystem, PrefixAtlas, apply, branch_inverse, branch_of, load_system


@dataclass(frozen=True)
class BackwardPathGen(CoordinateGenerator):

    '''
    Coordinates x₁ = seed, x_{t+1} = g_{r_t}(x_t) for the branch stream stream_pre · stream_per^∞.

    '''

    system: DRSystem
    seed: Point
    stream_pre: tuple[int, ...]
    stream_per: tuple[int, ...]

    def __post_init__(self) -> None:
        pre, per = canonical_cycle(tuple(self.stream_pre), tuple(self.stream_per))
        object.__setattr__(self, 'stream_pre', pre)
        object.__setattr__(self, 'stream_per', per)

    def branch_at(self, t: int) -> int:
        '''Index r_t of the branch leading from coordinate t to coordinate t+1'''
        if t <= len(self.stream_pre):
            return self.stream_pre[t - 1]
        return self.stream_per[(t - 1 - len(self.stream_pre)) % len(self.stream_per)]

    def coordinate(self, i: int) -> Point:
        return _path_coordinate(self, i)

    def advanced(self) -> 'BackwardPathGen':
        if self.stream_pre:
            return BackwardPathGen(self.system, self.coordinate(2), self.stream_pre[1:], self.stream_per)
        return BackwardPathGen(self.system, self.coordinate(2), (), self.stream_per[1:] + self.stream_per[:1])

    @property
    def infinity_free(self) -> bool:
        return True

    def periodic_form(self) -> PeriodicCoordinates | None:
        '''Periodic coordinates when one period of the stream brings the path back to where it entered the period'''
        a, q = len(self.stream_pre), len(self.stream_per)
        if self.coordinate(a + 1 + q) != self.coordinate(a + 1):
            return None
        coords = tuple(self.coordinate(i) for i in range(1, a + q + 1))
        return PeriodicCoordinates(coords[:a], coords[a:])

    def __str__(self) -> str:
        pre = ','.join(str(r) for r in self.stream_pre)
        per = ','.join(str(r) for r in self.stream_per)
        return f'inf({self.seed};{pre}({per})*)'


@functools.lru_cache(maxsize=65536)
def _path_coordinate(gen: BackwardPathGen, i: int) -> Point:
    if i < 1:
        raise ValueError(f'coordinates are indexed from 1, got {i}')
    if i == 1:
        return gen.seed
    previous = _path_coordinate(gen, i - 1)
    return branch_inverse(gen.system.require_atlas().branch(gen.branch_at(i - 1)), previous)


def backward_path(system: DRSystem, seed: Point, stream_pre=(), stream_per=(0,), depth: int = 32) -> BackwardPathGen:
    '''Build a backward path and check that its first ``depth`` coordinates compose'''
    system.require_atlas()
    if not system.space.contains(seed):
        raise NotInDomain(f'seed {seed} is not in the domain of {system}')
    gen = BackwardPathGen(system, seed, tuple(stream_pre), tuple(stream_per))
    for i in range(2, depth + 1):
        gen.coordinate(i)
    return gen


@dataclass(frozen=True)
class ShiftPoint:
    '''A point of X̃: an infinite backward path, a finite limit word, or the zero word'''

    system: DRSystem
    word: W0Word

    @property
    def length(self) -> float:
        return self.word.length

    @property
    def is_infinite(self) -> bool:
        return isinstance(self.word, InfiniteWord)

    def __str__(self) -> str:
        match self.word:
            case InfiniteWord():
                return str(self.word.generator)
            case FiniteWord():
                return 'fin[' + '; '.join(str(p) for p in self.word.points) + ']'
        return 'zero'


def infinite_point(gen: BackwardPathGen) -> ShiftPoint:
    return ShiftPoint(gen.system, InfiniteWord(gen))


def limit_point(system: DRSystem, word: W0Word) -> ShiftPoint:
    '''The finite point of X̃ given by ``word``; NotInLimitSet unless it is a limit of infinite paths'''
    if isinstance(word, InfiniteWord):
        if not isinstance(word.generator, BackwardPathGen) or word.generator.system is not system:
            raise NotInLimitSet(f'{word} is not a backward path of {system}')
        return ShiftPoint(system, word)
    if not limit_words(system).contains(word):
        raise NotInLimitSet(f'{word} is not a limit of infinite backward paths of {system}')
    return ShiftPoint(system, word)


def path_coordinate(p: ShiftPoint, t: int) -> Point:
    if t < 1:
        raise ValueError(f'coordinates are indexed from 1, got {t}')
    return p.word.coordinate(t)


def coordinate_projection(p: ShiftPoint, length: int) -> tuple[Point, ...]:
    '''The first ``length`` coordinates, ∞ past the end of the word'''
    return tuple(path_coordinate(p, t) for t in range(1, length + 1))


def sigma(p: ShiftPoint) -> ShiftPoint:

    """

    The tail shift x₁x₂x₃... -> x₂x₃..., sending words of length one to the zero word.

    Args:
        p: a point of X̃ of positive length

    Returns:
        tail: the ShiftPoint σ(p)

    """

    match p.word:
        case InfiniteWord():
            return infinite_point(p.word.generator.advanced())
        case FiniteWord() if p.length == 1:
            return ShiftPoint(p.system, ZERO)
        case FiniteWord():
            return ShiftPoint(p.system, FiniteWord(p.word.points[1:]))
    raise ZeroWordNotInDomain('σ is not defined on the zero word')


def sigma_hat(p: ShiftPoint) -> ShiftPoint:
    if p.length < 2:
        raise LengthBelowTwo(f'σ̂ needs length >= 2, got {p}')
    return sigma(p)


def alpha_f(p: ShiftPoint) -> ShiftPoint:

    """

    The prefixing map y -> f(y₁)y₁y₂..., inverse to σ̂.

    Args:
        p: a point of X̃ of positive length

    Returns:
        extended: the ShiftPoint α_f(p)

    Examples:

        >>> from drshadow import *
        >>> vls = load_system('vls')
        >>> str(alpha_f(parse_shift_point('fin[10(0)*]', vls)))
        'fin[(0)*; 1(0)*]'

    """

    if p.length == 0:
        raise ZeroWordNotInDomain('α_f is not defined on the zero word')
    seed = p.word.coordinate(1)
    image = apply(p.system, seed)
    if not p.system.space.contains(image):
        raise NotInDomain(f'{p} is not in E: f of its first coordinate leaves the domain')
    if isinstance(p.word, InfiniteWord):
        gen = p.word.generator
        stream = (branch_of(p.system, seed).index,) + gen.stream_pre
        return infinite_point(BackwardPathGen(p.system, image, stream, gen.stream_per))
    return ShiftPoint(p.system, FiniteWord((image,) + p.word.points))


def xtilde_distance(p: ShiftPoint, q: ShiftPoint, search_bound: int = 1000) -> Level | Indistinguishable:
    if p.system is not q.system:
        raise SpaceMismatch(f'{p} and {q} belong to different systems')
    return w0_distance(p.system.space, p.word, q.word, search_bound)


def is_backward_path(system: DRSystem, points) -> bool:
    return (all(system.space.contains(x) for x in points) and
            all(apply(system, points[i + 1]) == points[i] for i in range(len(points) - 1)))


class LimitFamily:

    '''
    Closed-form description of the finite points of X̃ for one bundled system.

    '''

    description = ''

    def __init__(self, system: DRSystem) -> None:
        self.system = system

    def contains(self, word: W0Word) -> bool:
        raise NotImplementedError

    def witness(self, word: W0Word) -> WordSequence:
        '''A sequence of infinite backward paths converging to ``word``'''
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, max_length: int = 4) -> W0Word:
        raise NotImplementedError

    def examples(self) -> list[W0Word]:
        raise NotImplementedError

    @property
    def zero_in_E(self) -> bool:
        '''E = σ(Dom σ) contains the zero word iff X̃ has a word of length one'''
        return any(w.length == 1 for w in self.examples())

    def _require(self, word: W0Word) -> None:
        if not self.contains(word):
            raise NotInLimitSet(f'{word} is not a limit word of {self.system}')

    def _path(self, seed: Point, pre, per=(0,)) -> InfiniteWord:
        return InfiniteWord(backward_path(self.system, seed, pre, per))


class BackwardPathFamily(LimitFamily):

    '''
    Every finite backward path and the zero word: the branch n preimage of the last
    coordinate runs off to the removed point as n grows.

    '''

    description = 'zero word and every finite backward path'

    def contains(self, word: W0Word) -> bool:
        if word == ZERO:
            return True
        return isinstance(word, FiniteWord) and is_backward_path(self.system, word.points)

    def witness(self, word: W0Word) -> WordSequence:
        self._require(word)
        if word == ZERO:
            atlas = self.system.require_atlas()
            return WordSequence(lambda n: self._path(branch_inverse(atlas.branch(n), CantorPoint('', '0')), ()),
                                f'g_n paths escaping to infinity in {self.system}')
        points = word.points
        stream = tuple(branch_of(self.system, x).index for x in points[1:])
        return WordSequence(lambda n: self._path(points[0], stream + (n,)),
                            f'paths through {word} then branch n in {self.system}')

    def sample(self, rng: np.random.Generator, max_length: int = 4) -> W0Word:
        length = int(rng.integers(0, max_length + 1))
        if length == 0:
            return ZERO
        atlas = self.system.require_atlas()
        points = [sample_point(self.system.space, rng)]
        while len(points) < length:
            points.append(branch_inverse(atlas.branch(int(rng.integers(0, 9))), points[-1]))
        return FiniteWord(tuple(points))

    def examples(self) -> list[W0Word]:
        w = CantorPoint('1', '0') if self.system.space.ambient == '' else CantorPoint('', '01')
        return [ZERO, FiniteWord((w,))]


class OnesFamily(LimitFamily):
    '''The zero word and the words (1), (1,1), (1,1,1), ...'''

    description = 'zero word and every all-ones word'

    def contains(self, word: W0Word) -> bool:
        return word == ZERO or (isinstance(word, FiniteWord) and all(p == Nat(1) for p in word.points))

    def witness(self, word: W0Word) -> WordSequence:
        self._require(word)
        if word == ZERO:
            return WordSequence(lambda n: self._path(Nat(2 * n + 1), ()), '(2n+1, 4n+2, ...)')
        ones = (1,) * (int(word.length) - 1)
        return WordSequence(lambda n: self._path(Nat(1), ones + (n + 1,)), f'{word} then (2n+1, 4n+2, ...)')

    def sample(self, rng: np.random.Generator, max_length: int = 4) -> W0Word:
        length = int(rng.integers(0, max_length + 1))
        return ZERO if length == 0 else FiniteWord((Nat(1),) * length)

    def examples(self) -> list[W0Word]:
        return [ZERO] + [FiniteWord((Nat(1),) * k) for k in (1, 2, 3)]


class ZeroFamily(LimitFamily):
    '''Only the zero word: every backward path is constant'''

    description = 'zero word only'

    def contains(self, word: W0Word) -> bool:
        return word == ZERO

    def witness(self, word: W0Word) -> WordSequence:
        self._require(word)
        return WordSequence(lambda n: self._path(Nat(n), (), (n,)), '(n, n, n, ...)')

    def sample(self, rng: np.random.Generator, max_length: int = 4) -> W0Word:
        return ZERO

    def examples(self) -> list[W0Word]:
        return [ZERO]


def limit_words(system: DRSystem) -> LimitFamily:

    """

    The finite points of X̃ for a bundled system.

    Args:
        system: vls, frm, halving or nat-identity

    Returns:
        family: a LimitFamily with membership, convergence witnesses and samplers

    """

    match system.name:
        case SystemName.VLS | SystemName.FRM:
            return BackwardPathFamily(system)
        case SystemName.HALVING:
            return OnesFamily(system)
        case SystemName.NAT_IDENTITY:
            return ZeroFamily(system)
    raise UnsupportedSystem(f'no closed form for the limit words of {system}')


def sample_shift_point(system: DRSystem, rng: np.random.Generator, finite_share: float = 0.25,
                       max_prefix: int = 4, branch_probe: int = 9, depth: int = 32) -> ShiftPoint:
    '''A random point of X̃: a limit word with probability ``finite_share``, else an infinite path'''
    atlas = system.require_atlas()
    if rng.random() < finite_share:
        return ShiftPoint(system, limit_words(system).sample(rng))
    seed = sample_point(system.space, rng)
    y, pre = seed, []
    for _ in range(int(rng.integers(0, max_prefix + 1))):
        choices = atlas.preimage_branches(y, branch_probe)
        pre.append(int(rng.choice(choices)))
        y = branch_inverse(atlas.branch(pre[-1]), y)
    if isinstance(atlas, PrefixAtlas):
        per = tuple(int(r) for r in rng.integers(0, branch_probe, size=int(rng.integers(1, 4))))
    else:
        per = (atlas.extension_branch(y),)
    return infinite_point(backward_path(system, seed, pre, per, depth))


_INF = re.compile(r'^inf\((.+);([\d,]*)\(([\d,]+)\)\*\)$')


def _indices(text: str) -> tuple[int, ...]:
    return tuple(int(r) for r in text.split(',') if r)


def parse_shift_point(text: str, system: DRSystem | str) -> ShiftPoint:
    '''``inf(<seed>;<pre>(<per>)*)``, ``fin[<p1>; <p2>]`` or ``zero``'''
    system = load_system(system) if isinstance(system, str) else system
    text = text.strip()
    if text == 'zero':
        return limit_point(system, ZERO)
    if m := _INF.match(text):
        return infinite_point(backward_path(system, parse_point(m.group(1)), _indices(m.group(2)), _indices(m.group(3))))
    if text.startswith('fin[') and text.endswith(']'):
        points = tuple(parse_point(p) for p in text[4:-1].split(';') if p.strip())
        if not points or INFINITY in points:
            raise LiteralError(f'bad finite shift point {text!r}')
        return limit_point(system, FiniteWord(points))
    raise LiteralError(f'not a shift point literal: {text!r}')
