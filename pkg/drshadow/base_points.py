"""Points of the bundled base spaces, their clopen sets, bases and exact distances.

Three base spaces are supported: discrete ℕ (optionally with its point at
infinity), the full Cantor space {0,1}^ℕ, and a Cantor cylinder with one point
removed. Cantor points are eventually periodic, so every value here is finite
and every comparison is exact. Distances are never floats: a distance 2^-n is
carried as the :class:`Level` n and distance 0 as the infinite level.
"""

from __future__ import annotations

import functools
import logging
import math
import re
from dataclasses import dataclass
from typing import TypeVar

import numpy as np

from .src.datastruct import *


@functools.total_ordering
class Level:

    '''
    Exponent of a dyadic distance: level n encodes 2^-n, the infinite level encodes 0.
    Larger levels are smaller distances. Levels compare with plain ints.

    '''

    __slots__ = ('_value',)

    def __init__(self, value: int | None) -> None:
        if value is not None and value < 0:
            raise ValueError(f'level must be nonnegative, got {value}')
        self._value = value

    @classmethod
    def infinite(cls) -> 'Level':
        return cls(None)

    @property
    def value(self) -> int | None:
        return self._value

    @property
    def is_infinite(self) -> bool:
        return self._value is None

    def _key(self) -> tuple[int, int]:
        return (1, 0) if self._value is None else (0, self._value)

    @staticmethod
    def _coerce(other) -> 'Level | None':
        if isinstance(other, Level):
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return Level(other)
        return None

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._key() == other._key()

    def __lt__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._key() < other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __add__(self, gain: int) -> 'Level':
        return self if self._value is None else Level(self._value + gain)

    def __repr__(self) -> str:
        return 'Level.infinite()' if self._value is None else f'Level({self._value})'

    def __str__(self) -> str:
        return '0' if self._value is None else f'2^-{self._value}'


S = TypeVar('S', str, tuple)


def canonical_cycle(preperiod: S, period: S) -> tuple[S, S]:
    """Normal form of an eventually periodic sequence ``preperiod · period^∞``.

    The period is reduced to its primitive root and the preperiod is shortened
    while its last entry equals the last entry of the period (rotating the
    period each time). Two descriptions denote the same sequence iff their
    normal forms are equal. Works on bit strings and on tuples alike.
    """
    if len(period) == 0:
        raise ValueError('period must be nonempty')
    n = len(period)
    for d in range(1, n + 1):
        if n % d == 0 and period[:d] * (n // d) == period:
            period = period[:d]
            break
    while preperiod and preperiod[-1] == period[-1]:
        preperiod = preperiod[:-1]
        period = period[-1:] + period[:-1]
    return preperiod, period


class Point:
    '''A point of a base space or of its one-point compactification'''
    __slots__ = ()


@dataclass(frozen=True)
class Nat(Point):
    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or self.n < 0:
            raise PointNotInSpace(f'{self.n!r} is not a natural number')
        object.__setattr__(self, 'n', int(self.n))

    def __str__(self) -> str:
        return f'Nat:{self.n}'


@dataclass(frozen=True)
class Infinity(Point):

    def __str__(self) -> str:
        return 'inf'


INFINITY = Infinity()


@dataclass(frozen=True)
class CantorPoint(Point):

    '''
    The binary sequence preperiod · period · period · ... stored in normal form,
    so dataclass equality is equality of sequences.

    '''

    preperiod: str
    period: str

    def __post_init__(self) -> None:
        if not set(self.preperiod + self.period) <= {'0', '1'} or not self.period:
            raise PointNotInSpace(f'bad Cantor point {self.preperiod!r}({self.period!r})*')
        pre, per = canonical_cycle(self.preperiod, self.period)
        object.__setattr__(self, 'preperiod', pre)
        object.__setattr__(self, 'period', per)

    def bit(self, i: int) -> str:
        if i < len(self.preperiod):
            return self.preperiod[i]
        return self.period[(i - len(self.preperiod)) % len(self.period)]

    def take(self, n: int) -> str:
        return ''.join(self.bit(i) for i in range(n))

    def startswith(self, word: str) -> bool:
        return all(self.bit(i) == b for i, b in enumerate(word))

    def shift(self, n: int) -> 'CantorPoint':
        if n <= len(self.preperiod):
            return CantorPoint(self.preperiod[n:], self.period)
        k = (n - len(self.preperiod)) % len(self.period)
        return CantorPoint('', self.period[k:] + self.period[:k])

    def prepend(self, word: str) -> 'CantorPoint':
        return CantorPoint(word + self.preperiod, self.period)

    def flip(self, i: int) -> 'CantorPoint':
        m = max(len(self.preperiod), i + 1)
        head = self.take(m)
        head = head[:i] + ('1' if head[i] == '0' else '0') + head[i + 1:]
        return CantorPoint(head, self.shift(m).period)

    def first_difference(self, other: 'CantorPoint') -> int | None:
        if self == other:
            return None
        bound = max(len(self.preperiod), len(other.preperiod)) + math.lcm(len(self.period), len(other.period))
        for i in range(bound):
            if self.bit(i) != other.bit(i):
                return i
        raise AssertionError('distinct normal forms must differ within the joint period')

    def leading_run(self, bit: str, start: int = 0) -> int | None:
        '''Length of the run of ``bit`` beginning at ``start``; None when the run never ends.'''
        tail = self.shift(start)
        if not tail.preperiod and tail.period == bit:
            return None
        count = 0
        while tail.bit(count) == bit:
            count += 1
        return count

    def __str__(self) -> str:
        return f'{self.preperiod}({self.period})*'


class ClopenSet:
    '''A clopen subset of a base space'''
    __slots__ = ()

    def contains(self, x: Point) -> bool:
        raise NotImplementedError

    @property
    def is_empty(self) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class FiniteNatSet(ClopenSet):
    elements: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, 'elements', tuple(sorted(set(int(e) for e in self.elements))))

    def contains(self, x: Point) -> bool:
        return isinstance(x, Nat) and x.n in self.elements

    @property
    def is_empty(self) -> bool:
        return not self.elements

    def __str__(self) -> str:
        return '{' + ','.join(str(e) for e in self.elements) + '}'


@dataclass(frozen=True)
class NatProgression(ClopenSet):

    '''
    The set {start, start+step, start+2·step, ...}: tails of ℕ (step 1) and residue classes

    '''

    start: int
    step: int = 1

    def __post_init__(self) -> None:
        if self.start < 0 or self.step < 1:
            raise ValueError(f'bad progression {self.start}+{self.step}k')

    def contains(self, x: Point) -> bool:
        return isinstance(x, Nat) and x.n >= self.start and (x.n - self.start) % self.step == 0

    @property
    def is_empty(self) -> bool:
        return False

    def __str__(self) -> str:
        if self.step == 1:
            return f'{{n>={self.start}}}'
        return f'{{{self.start}+{self.step}k}}'


def _canonical_words(words) -> tuple[str, ...]:
    ws = set(words)
    while True:
        ws = {w for w in ws if not any(v != w and w.startswith(v) for v in ws)}
        siblings = next((w for w in sorted(ws, key=len, reverse=True)
                         if w and w[:-1] + ('1' if w[-1] == '0' else '0') in ws), None)
        if siblings is None:
            return tuple(sorted(ws, key=lambda w: (len(w), w)))
        ws -= {siblings[:-1] + '0', siblings[:-1] + '1'}
        ws.add(siblings[:-1])


@dataclass(frozen=True)
class CylinderUnion(ClopenSet):

    '''
    Finite union of cylinders Z(w); kept as the unique antichain of maximal cylinders

    '''

    words: tuple[str, ...]

    def __post_init__(self) -> None:
        if not all(set(w) <= {'0', '1'} for w in self.words):
            raise LiteralError(f'bad cylinder words {self.words!r}')
        object.__setattr__(self, 'words', _canonical_words(self.words))

    def contains(self, x: Point) -> bool:
        return isinstance(x, CantorPoint) and any(x.startswith(w) for w in self.words)

    @property
    def is_empty(self) -> bool:
        return not self.words

    def __str__(self) -> str:
        return '+'.join(f'Z({w})' for w in self.words) if self.words else 'empty'


class BaseSpace:
    '''A base space D together with the metric of its one-point compactification'''

    kind: SpaceKind
    compactified: bool

    def contains(self, x: Point) -> bool:
        raise NotImplementedError

    def basis(self, i: int) -> ClopenSet:
        raise NotImplementedError

    def is_basis_element(self, s: ClopenSet) -> bool:
        raise NotImplementedError

    def empty(self) -> ClopenSet:
        raise NotImplementedError

    def admits(self, x: Point) -> bool:
        '''Membership in D, or in D^∞ when the space is compactified'''
        return self.contains(x) or (self.compactified and self.at_infinity(x))

    def at_infinity(self, x: Point) -> bool:
        return x is INFINITY


@dataclass(frozen=True)
class NatSpace(BaseSpace):
    compactified: bool = True

    @property
    def kind(self) -> SpaceKind:
        return SpaceKind.NAT

    def contains(self, x: Point) -> bool:
        return isinstance(x, Nat)

    def basis(self, i: int) -> ClopenSet:
        return FiniteNatSet((i - 1,))

    def is_basis_element(self, s: ClopenSet) -> bool:
        return isinstance(s, FiniteNatSet) and len(s.elements) == 1

    def empty(self) -> ClopenSet:
        return FiniteNatSet(())

    def __str__(self) -> str:
        return 'nat'


@dataclass(frozen=True)
class CantorSpace(BaseSpace):

    '''
    The cylinder Z(ambient) of the Cantor space, minus ``excluded`` when given.
    With an excluded point and ``compactified`` set, that point plays the point at infinity.

    '''

    ambient: str = ''
    excluded: CantorPoint | None = None
    compactified: bool = False

    def __post_init__(self) -> None:
        if self.excluded is not None and not self.excluded.startswith(self.ambient):
            raise PointNotInSpace(f'{self.excluded} lies outside Z({self.ambient})')
        if self.compactified and self.excluded is None:
            raise ValueError('only a punctured Cantor space has a point at infinity')

    @property
    def kind(self) -> SpaceKind:
        return SpaceKind.CANTOR if self.excluded is None else SpaceKind.CANTOR_MINUS

    def contains(self, x: Point) -> bool:
        return isinstance(x, CantorPoint) and x.startswith(self.ambient) and x != self.excluded

    def at_infinity(self, x: Point) -> bool:
        return self.excluded is not None and (x is INFINITY or x == self.excluded)

    def resolve(self, x: Point) -> CantorPoint:
        '''The Cantor sequence standing for ``x`` in D^∞'''
        if x is INFINITY:
            if not self.compactified:
                raise PointNotInSpace(f'{self} has no point at infinity')
            return self.excluded
        return x

    def basis(self, i: int) -> ClopenSet:
        return CylinderUnion((_cantor_basis_word(self.ambient, self.excluded, i),))

    def is_basis_element(self, s: ClopenSet) -> bool:
        if not isinstance(s, CylinderUnion) or len(s.words) != 1:
            return False
        w = s.words[0]
        return bool(w) and w.startswith(self.ambient) and (self.excluded is None or not self.excluded.startswith(w))

    def empty(self) -> ClopenSet:
        return CylinderUnion(())

    def __str__(self) -> str:
        if self.excluded is None:
            return 'cantor' if not self.ambient else f'cantor:{self.ambient}'
        if not self.ambient:
            return f'cantor-minus:{self.excluded}'
        return f'cantor-minus:{self.excluded}@{self.ambient}'


@functools.lru_cache(maxsize=4096)
def _cantor_basis_word(ambient: str, excluded: CantorPoint | None, i: int) -> str:
    # length-lex over nonempty extensions of ambient, skipping the cylinder around the excluded point
    if i < 1:
        raise ValueError(f'basis index must be >= 1, got {i}')
    rank = i - 1
    length = max(1, len(ambient))
    while True:
        free = length - len(ambient)
        count = 2 ** free - (0 if excluded is None else 1)
        if rank < count:
            if not free:
                return ambient
            blocked = None if excluded is None else int(excluded.take(length)[len(ambient):], 2)
            c = rank if blocked is None or rank < blocked else rank + 1
            return ambient + format(c, 'b').zfill(free)
        rank -= count
        length += 1


def _require_kind(space: BaseSpace, *sets: ClopenSet) -> None:
    expected = CylinderUnion if isinstance(space, CantorSpace) else (FiniteNatSet, NatProgression)
    for s in sets:
        if not isinstance(s, expected):
            raise SpaceMismatch(f'{s} is not a clopen set of {space}')


def _require_point(space: BaseSpace, x: Point) -> None:
    if not space.admits(x):
        raise PointNotInSpace(f'{x} is not a point of {space}')


def point_distance(space: BaseSpace, x: Point, y: Point) -> Level:

    """

    Exact distance between two points of D^∞.

    On Cantor spaces this is 2^-N with N the first index where the bits differ;
    the point at infinity of a punctured Cantor space is its excluded point.
    On ℕ ∪ {∞} it is 2^-min(m,n) for m ≠ n and d(m,∞) = 2^-m.

    Args:
        space: the base space
        x, y: points of the space or of its one-point compactification

    Returns:
        level: the Level of d(x, y)

    Examples:

        >>> from drshadow import *
        >>> str(point_distance(CantorSpace(), parse_point('1(0)*'), parse_point('0(0)*')))
        '2^-0'
        >>> str(point_distance(NatSpace(), Nat(3), INFINITY))
        '2^-3'

    """

    _require_point(space, x)
    _require_point(space, y)
    if isinstance(space, CantorSpace):
        i = space.resolve(x).first_difference(space.resolve(y))
        return Level.infinite() if i is None else Level(i)
    if x == y:
        return Level.infinite()
    if x is INFINITY:
        return Level(y.n)
    if y is INFINITY:
        return Level(x.n)
    return Level(min(x.n, y.n))


def clopen_member(space: BaseSpace, s: ClopenSet, x: Point) -> bool:
    _require_kind(space, s)
    return s.contains(x)


def _first_common(a: NatProgression, b: NatProgression) -> int | None:
    step = math.lcm(a.step, b.step)
    start = max(a.start, b.start)
    for c in range(start, start + step):
        if a.contains(Nat(c)) and b.contains(Nat(c)):
            return c
    return None


def clopen_intersect(space: BaseSpace, s: ClopenSet, t: ClopenSet) -> ClopenSet:
    '''Canonical S ∩ T (possibly empty)'''
    _require_kind(space, s, t)
    match (s, t):
        case (CylinderUnion(), CylinderUnion()):
            words = []
            for u in s.words:
                for v in t.words:
                    if v.startswith(u):
                        words.append(v)
                    elif u.startswith(v):
                        words.append(u)
            return CylinderUnion(tuple(words))
        case (FiniteNatSet(), _):
            return FiniteNatSet(tuple(e for e in s.elements if t.contains(Nat(e))))
        case (_, FiniteNatSet()):
            return clopen_intersect(space, t, s)
        case (NatProgression(), NatProgression()):
            c = _first_common(s, t)
            return space.empty() if c is None else NatProgression(c, math.lcm(s.step, t.step))
    raise SpaceMismatch(f'cannot intersect {s} and {t}')


def clopen_subset(space: BaseSpace, s: ClopenSet, t: ClopenSet) -> bool:
    return clopen_intersect(space, s, t) == s


def clopen_union(space: BaseSpace, s: ClopenSet, t: ClopenSet) -> ClopenSet:
    '''Canonical S ∪ T for cylinder unions and finite sets of naturals'''
    _require_kind(space, s, t)
    match (s, t):
        case (CylinderUnion(), CylinderUnion()):
            return CylinderUnion(s.words + t.words)
        case (FiniteNatSet(), FiniteNatSet()):
            return FiniteNatSet(s.elements + t.elements)
        case (FiniteNatSet(), NatProgression()) if all(t.contains(Nat(e)) for e in s.elements):
            return t
        case (NatProgression(), FiniteNatSet()):
            return clopen_union(space, t, s)
        case (NatProgression(), NatProgression()) if clopen_subset(space, s, t) or clopen_subset(space, t, s):
            return t if clopen_subset(space, s, t) else s
    raise SpaceMismatch(f'{s} ∪ {t} has no canonical ClopenSet form')


def enumerate_basis(space: BaseSpace, i: int) -> ClopenSet:

    """

    The i-th element of the fixed enumeration of the countable basis.

    ℕ: the singletons {0}, {1}, {2}, ... Cantor spaces: cylinders Z(w) over the
    nonempty bit strings w in length-lex order, keeping only the cylinders that
    lie inside the space (w extends the ambient word and Z(w) avoids the
    excluded point). The empty set is never enumerated.

    Args:
        space: the base space
        i: a positive index

    Returns:
        basis_set: the ClopenSet ℬ_i

    Examples:

        >>> from drshadow import *
        >>> str(enumerate_basis(CantorSpace(), 2))
        'Z(1)'
        >>> str(enumerate_basis(NatSpace(), 1))
        '{0}'

    """

    if i < 1:
        raise ValueError(f'basis index must be >= 1, got {i}')
    return space.basis(i)


def _cantor_basis_rank(ambient: str, excluded: CantorPoint | None, w: str) -> int:
    rank = sum(2 ** (length - len(ambient)) - (0 if excluded is None else 1)
               for length in range(max(1, len(ambient)), len(w)))
    free = len(w) - len(ambient)
    if not free:
        return rank
    c = int(w[len(ambient):], 2)
    if excluded is not None and c > int(excluded.take(len(w))[len(ambient):], 2):
        c -= 1
    return rank + c


def basis_index(space: BaseSpace, b: ClopenSet) -> int:
    '''Inverse of :func:`enumerate_basis`'''
    if not space.is_basis_element(b):
        raise ValueError(f'{b} is not a basis set of {space}')
    if isinstance(space, NatSpace):
        return b.elements[0] + 1
    return _cantor_basis_rank(space.ambient, space.excluded, b.words[0]) + 1


def ball_atom(space: BaseSpace, x: Point, n: int) -> ClopenSet:
    '''The open ball B(x, 2^-n) as a canonical ClopenSet; the atoms partition D, so x must lie in D'''
    if not space.contains(x):
        raise PointNotInSpace(f'{x} is not a point of {space}')
    if isinstance(space, CantorSpace):
        return CylinderUnion((x.take(n + 1),))
    if x.n > n:
        return NatProgression(n + 1)
    return FiniteNatSet((x.n,))


def random_bits(rng: np.random.Generator, k: int) -> str:
    return ''.join('1' if b else '0' for b in rng.integers(0, 2, size=k))


def sample_point(space: BaseSpace, rng: np.random.Generator, within: ClopenSet | None = None,
                 max_preperiod: int = 8, max_period: int = 4) -> Point:
    '''A random point of D, optionally inside a clopen set meeting D'''
    if isinstance(space, NatSpace):
        match within:
            case None:
                return Nat(int(rng.integers(0, 32)))
            case FiniteNatSet():
                return Nat(int(rng.choice(within.elements)))
            case NatProgression():
                return Nat(within.start + within.step * int(rng.integers(0, 16)))
    words = within.words if within is not None else (space.ambient,)
    for _ in range(1000):
        head = str(rng.choice(words)) if len(words) > 1 else words[0]
        if space.ambient.startswith(head):
            head = space.ambient
        pre = head + random_bits(rng, int(rng.integers(0, max_preperiod + 1)))
        per = random_bits(rng, int(rng.integers(1, max_period + 1)))
        x = CantorPoint(pre, per)
        if space.contains(x) and (within is None or within.contains(x)):
            return x
    logging.error(f'No point of {space} found inside {within}')
    raise PointNotInSpace(f'{within} does not meet {space}')


_NAT = re.compile(r'^Nat:(\d+)$')
_CANTOR = re.compile(r'^([01]*)\(([01]+)\)\*$')
_FINITE = re.compile(r'^\{\s*(\d+(?:\s*,\s*\d+)*)?\s*\}$')
_TAIL = re.compile(r'^\{n>=(\d+)\}$')
_PROGRESSION = re.compile(r'^\{(\d+)\+(\d+)k\}$')
_CYLINDERS = re.compile(r'^Z\(([01]*)\)(?:\+Z\(([01]*)\))*$')


def parse_point(text: str) -> Point:
    text = text.strip()
    if text == 'inf':
        return INFINITY
    if m := _NAT.match(text):
        return Nat(int(m.group(1)))
    if m := _CANTOR.match(text):
        return CantorPoint(m.group(1), m.group(2))
    raise LiteralError(f'not a point literal: {text!r}')


def parse_clopen(text: str, space: BaseSpace) -> ClopenSet:
    text = text.strip()
    if text == 'empty':
        return space.empty()
    if _CYLINDERS.match(text):
        return CylinderUnion(tuple(re.findall(r'Z\(([01]*)\)', text)))
    if m := _FINITE.match(text):
        return FiniteNatSet(tuple(int(e) for e in (m.group(1) or '').replace(' ', '').split(',') if e))
    if m := _TAIL.match(text):
        return NatProgression(int(m.group(1)))
    if m := _PROGRESSION.match(text):
        return NatProgression(int(m.group(1)), int(m.group(2)))
    raise LiteralError(f'not a clopen set literal: {text!r}')


def parse_space(text: str) -> BaseSpace:
    text = text.strip()
    if text == 'nat':
        return NatSpace()
    if text == 'cantor':
        return CantorSpace()
    if text.startswith('cantor-minus:'):
        point = parse_point(text[len('cantor-minus:'):])
        if not isinstance(point, CantorPoint):
            raise LiteralError(f'cantor-minus needs a Cantor point, got {point}')
        return CantorSpace(excluded=point, compactified=True)
    raise LiteralError(f'not a space literal: {text!r}')
