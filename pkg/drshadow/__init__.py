from .src.datastruct import *
from .base_points import *
from .compactified_words import *
from .dr_systems import *
from .inverse_limit import *
from .shadowing import *
from .suites import run_suite
from .drshadow_api import DRShadow, IDRShadow
