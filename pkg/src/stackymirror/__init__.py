"""Exact genus-zero mirror-symmetry computations for toric Deligne-Mumford stacks.

The pipeline runs from a stacky fan with extension data to I-functions,
mirror maps, J-functions, quantum products and their twisted variants for
complete intersections. All arithmetic is over the rationals.
"""

from .abelian import FGAbelianGroup, GroupHom, cokernel, gale_dual, kernel, smith_normal_form
from .birkhoff import BirkhoffResult, eliminate_positive_z
from .cohomology import (ChenRuanAlgebra, CoefficientRing, Sector, algebra_from_structure_constants,
                         chen_ruan_from_fan)
from .errors import EngineError
from .poly import Poly
from .series import (Series, SeriesSpace, TruncationPolicy, asymptotics, check_sharp, i_function,
                     j_function, mirror_map, quantum_power, quantum_structure_constants, reverse)
from .stackyfan import ExtendedStackyFan, Lattice, StackyFan, extend, mori_cone
from .twist import (TwistSpec, ci_i_function, convexity_check, g_series, modification_factor,
                    normalize_epsilons, quantum_period, twisted_i_function)

__all__ = [
    "BirkhoffResult", "ChenRuanAlgebra", "CoefficientRing", "EngineError", "ExtendedStackyFan",
    "FGAbelianGroup", "GroupHom", "Lattice", "Poly", "Sector", "Series", "SeriesSpace", "StackyFan",
    "TruncationPolicy", "TwistSpec", "algebra_from_structure_constants", "asymptotics",
    "check_sharp", "chen_ruan_from_fan", "ci_i_function", "cokernel", "convexity_check",
    "eliminate_positive_z", "extend", "g_series", "gale_dual", "i_function", "j_function",
    "kernel", "mirror_map", "modification_factor", "mori_cone", "normalize_epsilons",
    "quantum_period", "quantum_power", "quantum_structure_constants", "reverse",
    "smith_normal_form", "twisted_i_function",
]
