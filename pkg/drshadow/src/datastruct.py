from enum import Enum,auto

class SpaceKind(Enum):
    '''
    Lists of all base spaces the package can sample, measure and enumerate

    '''
    NAT = auto()
    CANTOR = auto()
    CANTOR_MINUS = auto()

class SystemName(Enum):

    '''
    Lists of all bundled Deaconu-Renault systems, keyed by their command-line name

    '''
    VLS = 'vls'
    FRM = 'frm'
    HALVING = 'halving'
    NAT_IDENTITY = 'nat-identity'
    OTW_FULL = 'otw-full'

class Suite(Enum):

    '''
    Lists of all invariant suites exposed by the verify command

    '''
    ULTRAMETRIC = 'ultrametric'
    BALLS = 'balls'
    BRANCHES = 'branches'
    INVERSE_LIMIT = 'inverse-limit'
    LIFT = 'lift'
    SHADOW = 'shadow'
    DEFSEQ = 'defseq'

class Perturbation(Enum):

    '''
    How a generated pseudo-orbit departs from the exact orbit at each step

    '''
    NONE = 'none'
    FLIP = 'flip'
    RESAMPLE = 'resample'


class DRShadowError(Exception):
    '''Base class of every error raised by the package'''

class LiteralError(DRShadowError):
    '''A point, set, word or shift-point literal does not parse'''

class PointNotInSpace(DRShadowError):
    pass

class SpaceMismatch(DRShadowError):
    '''Two values built over different kinds of base space were combined'''

class NotInDomain(DRShadowError):
    pass

class NotInImage(DRShadowError):
    pass

class InfiniteReturnTime(DRShadowError):
    pass

class UndetectableInfinity(DRShadowError):
    '''The position of the first point at infinity cannot be certified'''

class MalformedSequence(DRShadowError):
    pass

class ZeroWordNotInDomain(DRShadowError):
    pass

class LengthBelowTwo(DRShadowError):
    pass

class UnsupportedSystem(DRShadowError):
    pass

class NotInLimitSet(DRShadowError):
    '''A finite word is not a limit of infinite backward paths'''

class InvalidPseudoOrbit(DRShadowError):
    pass

class OrbitLeavesDomain(DRShadowError):
    pass

class BallEscapesImage(DRShadowError):
    '''An inverse branch was asked to act outside its image'''

class RhoTooLarge(DRShadowError):
    '''The partition radius does not separate the basis sets it must detect'''
