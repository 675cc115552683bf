"""The compactified word space W₀ over a base space.

A word is the zero word, a nonempty finite tuple of points of D, or an infinite
word described by a coordinate generator. Words are compared canonically and
measured with the enumeration metric: the level of d(x, y) is the first index
j at which exactly one of x, y lies in the cylinder Z[p_j, ∅] of the j-th
enumerated tuple of basis sets.
"""

from __future__ import annotations

import functools
import logging
import math
import re
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .src.datastruct import *
from .base_points import (INFINITY, BaseSpace, CantorSpace, ClopenSet, CylinderUnion, FiniteNatSet, Level,
                          NatSpace, Point, basis_index, canonical_cycle, parse_clopen, parse_point, point_distance)

OMEGA = math.inf


class CoordinateGenerator:
    '''Finite description of an infinite coordinate sequence, indexed from 1'''

    def coordinate(self, i: int) -> Point:
        raise NotImplementedError

    @property
    def infinity_free(self) -> bool:
        '''True when the generator certifies that no coordinate is the point at infinity'''
        return False

    def periodic_form(self) -> PeriodicCoordinates | None:
        '''The same coordinates in periodic normal form, when the generator can certify them'''
        return None


@dataclass(frozen=True)
class PeriodicCoordinates(CoordinateGenerator):

    '''
    Eventually periodic coordinates preperiod · period · period · ..., kept in normal form.
    Entries may be the point at infinity; such sequences only feed the normalization map.

    '''

    preperiod: tuple[Point, ...]
    period: tuple[Point, ...]

    def __post_init__(self) -> None:
        pre, per = canonical_cycle(tuple(self.preperiod), tuple(self.period))
        object.__setattr__(self, 'preperiod', pre)
        object.__setattr__(self, 'period', per)

    def coordinate(self, i: int) -> Point:
        if i <= len(self.preperiod):
            return self.preperiod[i - 1]
        return self.period[(i - 1 - len(self.preperiod)) % len(self.period)]

    @property
    def infinity_free(self) -> bool:
        return INFINITY not in self.preperiod and INFINITY not in self.period

    def periodic_form(self) -> PeriodicCoordinates:
        return self

    def first_infinity(self) -> int | None:
        entries = self.preperiod + self.period
        return entries.index(INFINITY) + 1 if INFINITY in entries else None

    def __str__(self) -> str:
        head = [str(p) for p in self.preperiod]
        return '; '.join(head + ['{' + '; '.join(str(p) for p in self.period) + '}*'])


@dataclass(frozen=True)
class RuleCoordinates(CoordinateGenerator):
    '''Coordinates given by an arbitrary rule i -> point'''

    rule: Callable[[int], Point]
    description: str = 'rule'
    certified_finite: bool = False

    def coordinate(self, i: int) -> Point:
        return self.rule(i)

    @property
    def infinity_free(self) -> bool:
        return self.certified_finite

    def __str__(self) -> str:
        return self.description


class W0Word:
    '''A word of W₀: zero, finite, or infinite'''

    @property
    def length(self) -> float:
        raise NotImplementedError

    def coordinate(self, i: int) -> Point:
        raise NotImplementedError

    def prefix(self, n: int) -> tuple[Point, ...]:
        if n > self.length:
            raise ValueError(f'word of length {self.length} has no prefix of length {n}')
        return tuple(self.coordinate(i) for i in range(1, n + 1))


@dataclass(frozen=True)
class ZeroWord(W0Word):

    @property
    def length(self) -> float:
        return 0

    def coordinate(self, i: int) -> Point:
        return INFINITY

    def __str__(self) -> str:
        return 'Zero'


ZERO = ZeroWord()


@dataclass(frozen=True)
class FiniteWord(W0Word):
    points: tuple[Point, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, 'points', tuple(self.points))
        if not self.points:
            raise ValueError('a finite word has length >= 1; use ZERO for the empty word')
        if INFINITY in self.points:
            raise PointNotInSpace('finite words carry no point at infinity')

    @property
    def length(self) -> float:
        return len(self.points)

    def coordinate(self, i: int) -> Point:
        return self.points[i - 1] if i <= len(self.points) else INFINITY

    def __str__(self) -> str:
        return '[' + '; '.join(str(p) for p in self.points) + ']'


@dataclass(frozen=True)
class InfiniteWord(W0Word):
    generator: CoordinateGenerator

    @property
    def length(self) -> float:
        return OMEGA

    def coordinate(self, i: int) -> Point:
        return self.generator.coordinate(i)

    def __str__(self) -> str:
        return f'[{self.generator}]'


def check_word(space: BaseSpace, x: W0Word, depth: int = 32) -> W0Word:
    '''Raise PointNotInSpace unless the coordinates of x (up to depth) lie in D'''
    for i in range(1, int(min(x.length, depth)) + 1):
        if not space.contains(x.coordinate(i)):
            raise PointNotInSpace(f'coordinate {i} of {x} is not a point of {space}')
    return x


def q_normalize(seq: PeriodicCoordinates | CoordinateGenerator, probe: int = 64) -> W0Word:

    """

    The normalization map Q from sequences over D ∪ {∞} onto words.

    A sequence whose first point at infinity sits at position n+1 becomes the
    word of its first n coordinates (the zero word when n = 0); a sequence
    without points at infinity becomes an infinite word. Eventually periodic
    sequences are decided exactly. Rule-based sequences are scanned up to
    ``probe`` coordinates unless they certify that they never reach infinity.

    Args:
        seq: a finitely described element of (D ∪ {∞})^ℕ
        probe: how far an uncertified rule is scanned for a point at infinity

    Returns:
        word: the W0Word Q(seq)

    Examples:

        >>> from drshadow import *
        >>> str(q_normalize(parse_sequence('Nat:4; inf; {Nat:2}*')))
        '[Nat:4]'
        >>> str(q_normalize(parse_sequence('inf; {Nat:1}*')))
        'Zero'

    """

    if isinstance(seq, PeriodicCoordinates):
        n = seq.first_infinity()
        if n is None:
            return InfiniteWord(seq)
        return ZERO if n == 1 else FiniteWord(tuple(seq.coordinate(i) for i in range(1, n)))
    if seq.infinity_free:
        return InfiniteWord(seq)
    for i in range(1, probe + 1):
        if seq.coordinate(i) is INFINITY:
            return ZERO if i == 1 else FiniteWord(tuple(seq.coordinate(j) for j in range(1, i)))
    logging.error(f'No point at infinity within {probe} coordinates of {seq} and no certificate of absence')
    raise UndetectableInfinity(f'cannot locate the first point at infinity of {seq}')


@dataclass(frozen=True)
class ZCylinder:
    '''Z[B₁×…×B_k, K]: words of length >= k with x_i ∈ B_i and x_{k+1} ∉ K'''

    prefix: tuple[ClopenSet, ...]
    avoid: ClopenSet

    def __str__(self) -> str:
        return 'Z[' + ' x '.join(str(b) for b in self.prefix) + f'; {self.avoid}]'


@dataclass(frozen=True)
class CCylinder:
    '''C[K]: the zero word and every word whose first coordinate avoids K'''

    avoid: ClopenSet

    def __str__(self) -> str:
        return f'C[{self.avoid}]'


def z_cylinder(space: BaseSpace, prefix: Sequence[ClopenSet], avoid: ClopenSet | None = None) -> ZCylinder:
    if not prefix:
        raise ValueError('Z cylinders need at least one basis set')
    for b in prefix:
        if not space.is_basis_element(b):
            raise SpaceMismatch(f'{b} is not a basis set of {space}')
    return ZCylinder(tuple(prefix), space.empty() if avoid is None else avoid)


def cyl_member(c: ZCylinder | CCylinder, x: W0Word) -> bool:
    if isinstance(c, CCylinder):
        return not c.avoid.contains(x.coordinate(1))
    k = len(c.prefix)
    if x.length < k:
        return False
    if not all(b.contains(x.coordinate(i)) for i, b in enumerate(c.prefix, start=1)):
        return False
    return not c.avoid.contains(x.coordinate(k + 1))


def basis_set_around(space: BaseSpace, x: Point, n: int) -> ClopenSet:
    '''The largest basis set containing x inside the ball of level n around x'''
    if isinstance(space, NatSpace):
        return FiniteNatSet((x.n,))
    length = n + 1
    if space.excluded is not None:
        length = max(length, x.first_difference(space.excluded) + 1)
    return CylinderUnion((x.take(max(length, len(space.ambient))),))


def neighborhood(space: BaseSpace, x: W0Word, k: int, n: int, avoid: ClopenSet | None = None) -> ZCylinder:
    '''Basic neighborhood Z[U₁×…×U_k, K] of a word built from level-n basis sets around its coordinates'''
    if not 1 <= k <= x.length:
        raise ValueError(f'{x} has no coordinate {k}')
    avoid = space.empty() if avoid is None else avoid
    if avoid.contains(x.coordinate(k + 1)):
        raise ValueError(f'coordinate {k + 1} of {x} lies in {avoid}')
    return z_cylinder(space, [basis_set_around(space, x.coordinate(i), n) for i in range(1, k + 1)], avoid)


def _unpair(z: int) -> tuple[int, int]:
    w = (math.isqrt(8 * z + 1) - 1) // 2
    a = z - w * (w + 1) // 2
    return a, w - a


def _pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + a


@dataclass(frozen=True)
class BasisTuple:
    entries: tuple[int, ...]
    enum_index: int

    def sets(self, space: BaseSpace) -> tuple[ClopenSet, ...]:
        return tuple(space.basis(i) for i in self.entries)


@functools.lru_cache(maxsize=None)
def _tuple_entries(j: int) -> tuple[int, ...]:
    a, b = _unpair(j - 1)
    entries = []
    for _ in range(a):
        c, b = _unpair(b)
        entries.append(c + 1)
    entries.append(b + 1)
    return tuple(entries)


def enumerate_tuples(space: BaseSpace, j: int) -> BasisTuple:

    """

    The j-th tuple of basis indices in the fixed enumeration of all finite tuples.

    j - 1 is unpaired with the Cantor pairing π(a, b) = (a+b)(a+b+1)/2 + a into
    a tuple length a + 1 and a code b; the code is unpaired repeatedly into the
    entries, the last entry taking what remains. Entries are 1-based indices
    into :func:`enumerate_basis`. The order depends on the space only through
    the basis it indexes.

    Args:
        space: the base space
        j: a positive index

    Returns:
        basis_tuple: BasisTuple with entries and enum_index j

    Examples:

        >>> from drshadow import *
        >>> [enumerate_tuples(CantorSpace(), j).entries for j in (1, 2, 3, 4)]
        [(1,), (2,), (1, 1), (3,)]

    """

    if j < 1:
        raise ValueError(f'tuple index must be >= 1, got {j}')
    return BasisTuple(_tuple_entries(j), j)


def tuple_index(entries: Sequence[int]) -> int:
    '''Inverse of :func:`enumerate_tuples`'''
    if not entries or min(entries) < 1:
        raise ValueError(f'bad basis tuple {entries!r}')
    code = entries[-1] - 1
    for c in reversed(entries[:-1]):
        code = _pair(c - 1, code)
    return _pair(len(entries) - 1, code) + 1


@functools.lru_cache(maxsize=65536)
def _tuple_sets(space: BaseSpace, j: int) -> tuple[ClopenSet, ...]:
    return enumerate_tuples(space, j).sets(space)


def alpha_bits(space: BaseSpace, x: W0Word, m: int, start: int = 1) -> np.ndarray:
    '''Bits α(x)(p_j) for j = start .. start+m-1 as a uint8 vector'''
    bits = np.zeros(m, dtype=np.uint8)
    for offset in range(m):
        sets = _tuple_sets(space, start + offset)
        if len(sets) <= x.length and all(b.contains(x.coordinate(i)) for i, b in enumerate(sets, start=1)):
            bits[offset] = 1
    return bits


def format_bits(bits: np.ndarray) -> str:
    return ''.join(str(int(b)) for b in bits)


@dataclass(frozen=True)
class Indistinguishable:
    '''Distinct words whose alpha bits agree on every index up to bound'''

    bound: int

    def __str__(self) -> str:
        return f'indistinguishable@{self.bound}'


def w0_distance(space: BaseSpace, x: W0Word, y: W0Word, search_bound: int = 1000) -> Level | Indistinguishable:

    """

    Enumeration distance between two words.

    Args:
        space: the base space both words live over
        x, y: words
        search_bound: last tuple index inspected

    Returns:
        level: Level j of the first tuple separating x from y, the infinite
        level for canonically equal words, or Indistinguishable(search_bound)

    Infinite words are compared through :meth:`CoordinateGenerator.periodic_form`
    first, so a backward path with periodic coordinates equals the matching
    periodic word. Generators without a periodic form compare structurally.

    Examples:

        >>> from drshadow import *
        >>> str(w0_distance(NatSpace(), ZERO, parse_word('[Nat:0]')))
        '2^-1'

    """

    if _normal_word(x) == _normal_word(y):
        return Level.infinite()
    start, chunk = 1, 32
    while start <= search_bound:
        m = min(chunk, search_bound - start + 1)
        diff = np.flatnonzero(alpha_bits(space, x, m, start) != alpha_bits(space, y, m, start))
        if diff.size:
            return Level(start + int(diff[0]))
        start += m
        chunk *= 2
    logging.debug(f'{x} and {y} agree on the first {search_bound} tuples')
    return Indistinguishable(search_bound)


def _normal_word(x: W0Word) -> W0Word:
    if isinstance(x, InfiniteWord):
        periodic = x.generator.periodic_form()
        if periodic is not None:
            return InfiniteWord(periodic)
    return x


def separating_index(space: BaseSpace, x: W0Word, y: W0Word, depth: int = 64) -> int | None:

    """

    Index j of a tuple p_j with α(x)(p_j) ≠ α(y)(p_j), built from the first differing coordinate.

    With k the first coordinate where x and y differ, the tuple holds basis
    sets around the shared coordinates 1..k-1 and, at k, a basis set around
    the coordinate that lies in D small enough to miss the other one.
    w0_distance(x, y) is therefore at least 2^-j.

    Args:
        space: the base space
        x, y: words
        depth: number of coordinates compared

    Returns:
        index: the tuple index, or None when the first depth coordinates agree

    """

    for k in range(1, depth + 1):
        a, b = x.coordinate(k), y.coordinate(k)
        if a != b:
            break
    else:
        return None
    if a is INFINITY:
        a, b = b, a
    sets = [basis_set_around(space, x.coordinate(i), 0) for i in range(1, k)]
    sets.append(basis_set_around(space, a, 0 if b is INFINITY else point_distance(space, a, b).value))
    return tuple_index([basis_index(space, s) for s in sets])


@dataclass(frozen=True)
class WordSequence:
    '''A sequence of words x¹, x², ... given by a rule n -> xⁿ'''

    term: Callable[[int], W0Word]
    description: str = 'sequence'

    def __call__(self, n: int) -> W0Word:
        try:
            word = self.term(n)
        except DRShadowError:
            raise
        except Exception as e:
            raise MalformedSequence(f'{self.description} has no term {n}: {e}') from e
        if not isinstance(word, W0Word):
            raise MalformedSequence(f'term {n} of {self.description} is not a word: {word!r}')
        return word


@dataclass(frozen=True)
class ConvergenceCertificate:
    '''Per condition, coordinate and level: the index from which the condition holds'''

    limit: str
    depth: int
    horizon: int
    witnesses: tuple[tuple[str, int, int, int], ...]

    @property
    def certified(self) -> bool:
        return True


@dataclass(frozen=True)
class ConvergenceCounterexample:
    limit: str
    condition: str
    coordinate: int
    level: int
    index: int

    @property
    def certified(self) -> bool:
        return False


def _level_to_infinity(space: BaseSpace, x: Point) -> Level:
    if isinstance(space, CantorSpace) and space.excluded is None:
        return Level(0)
    return point_distance(space, x, INFINITY)


def check_convergence(space: BaseSpace, seq: WordSequence, limit: W0Word, depth: int = 8,
                      horizon: int = 48) -> ConvergenceCertificate | ConvergenceCounterexample:

    """

    Check the coordinatewise characterization of xⁿ -> x in W₀ on terms 1..horizon.

    For a limit of finite length k: eventually ℓ(xⁿ) >= k, each coordinate
    i <= k converges to x_i, and, when the tail has infinitely many terms of
    length >= k+1, coordinate k+1 converges to ∞. For an infinite limit:
    ℓ(xⁿ) -> ∞ and every coordinate converges. Convergence of a coordinate is
    checked at every level m <= depth: the index N after the last term whose
    coordinate is not within 2^-m must leave at least ``depth`` terms before
    the horizon. Terms with index in the last half of the horizon decide the
    "infinitely many" clause.

    Args:
        space: the base space
        seq: the sequence
        limit: the candidate limit
        depth: coordinates and levels inspected
        horizon: number of terms computed

    Returns:
        result: ConvergenceCertificate or ConvergenceCounterexample

    """

    if horizon <= depth:
        raise ValueError(f'horizon {horizon} must exceed depth {depth}')
    terms = [seq(n) for n in range(1, horizon + 1)]
    lengths = [t.length for t in terms]
    latest = horizon - depth
    witnesses = []

    def settle(condition: str, coordinate: int, level: int, violations: list[int]):
        last = max(violations, default=0)
        if last > latest:
            return ConvergenceCounterexample(str(limit), condition, coordinate, level, last)
        witnesses.append((condition, coordinate, level, last + 1))
        return None

    finite = limit.length != OMEGA
    k = int(limit.length) if finite else depth
    checks = []
    for target in ([k] if finite else range(1, depth + 1)):
        checks.append(('length', target, 0, [n for n, l in enumerate(lengths, 1) if l < target]))
    for i in range(1, k + 1):
        levels = {n: point_distance(space, t.coordinate(i), limit.coordinate(i))
                  for n, t in enumerate(terms, 1) if t.length >= i}
        checks.extend(('coordinate', i, m, [n for n, l in levels.items() if l <= m]) for m in range(depth + 1))
    if finite and any(l >= k + 1 for l in lengths[horizon // 2:]):
        levels = {n: _level_to_infinity(space, t.coordinate(k + 1)) for n, t in enumerate(terms, 1) if t.length >= k + 1}
        checks.extend(('infinity', k + 1, m, [n for n, l in levels.items() if l <= m]) for m in range(depth + 1))
    for check in checks:
        failure = settle(*check)
        if failure is not None:
            logging.info(f'{seq.description} does not converge to {limit}: {failure}')
            return failure
    logging.info(f'{seq.description} converges to {limit} at depth {depth}')
    return ConvergenceCertificate(str(limit), depth, horizon, tuple(witnesses))


_PERIODIC = re.compile(r'^(.*?)\{(.*)\}\*$')


def _split(body: str) -> list[str]:
    return [p.strip() for p in body.split(';') if p.strip()]


def parse_sequence(text: str) -> PeriodicCoordinates:
    '''Parse an eventually periodic element of (D ∪ {∞})^ℕ, e.g. ``Nat:4; inf; {Nat:2}*``'''
    m = _PERIODIC.match(text.strip())
    if m is None:
        raise LiteralError(f'not a periodic sequence literal: {text!r}')
    period = [parse_point(p) for p in _split(m.group(2))]
    if not period:
        raise LiteralError(f'empty period in {text!r}')
    return PeriodicCoordinates(tuple(parse_point(p) for p in _split(m.group(1))), tuple(period))


def parse_word(text: str) -> W0Word:
    text = text.strip()
    if text == 'Zero':
        return ZERO
    if not (text.startswith('[') and text.endswith(']')):
        raise LiteralError(f'not a word literal: {text!r}')
    body = text[1:-1]
    if '{' in body:
        seq = parse_sequence(body)
        if not seq.infinity_free:
            raise LiteralError(f'infinite word literals carry no point at infinity: {text!r}')
        return InfiniteWord(seq)
    points = tuple(parse_point(p) for p in _split(body))
    if not points:
        raise LiteralError(f'use Zero for the empty word: {text!r}')
    if INFINITY in points:
        raise LiteralError(f'finite word literals carry no point at infinity: {text!r}')
    return FiniteWord(points)


def parse_cylinder(text: str, space: BaseSpace) -> ZCylinder | CCylinder:
    '''``Z[<set> x <set>; <K>]`` or ``C[<K>]``'''
    text = text.strip()
    if text.startswith('C[') and text.endswith(']'):
        return CCylinder(parse_clopen(text[2:-1], space))
    if text.startswith('Z[') and text.endswith(']'):
        head, _, avoid = text[2:-1].rpartition(';')
        if not head:
            raise LiteralError(f'Z cylinders need an avoided set: {text!r}')
        return z_cylinder(space, [parse_clopen(s, space) for s in head.split(' x ')], parse_clopen(avoid, space))
    raise LiteralError(f'not a cylinder literal: {text!r}')
