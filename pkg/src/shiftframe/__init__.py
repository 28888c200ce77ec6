"""Frame generator sets from iterated shift-preserving operators, decided
fiberwise and certified with explicit frame bounds."""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .finite import (FrameBounds, IterateSystem, alpha_of, build_interpolation_operators,  # noqa: E402
                     c_lambda, ds_characterization_check, frame_bounds_oracle, iterate_system,
                     necessary_projection_bounds, sufficient_iterate_bounds)
from .fibers import (FiberField, FiberWindow, OmegaGrid, RangeFunctionField, apply_translation,  # noqa: E402
                     helson_project, range_function_from_generators, spectrum_and_length,
                     uniform_frame_check)
from .linalg import normal_eig, orthonormal_span, singular_values  # noqa: E402
from .operators import (RangeOperatorField, SDiagonalization, adjoint_field, adjoint_sdiag,  # noqa: E402
                        apply_operator, normality_check, op_norm, s_diagonalize, spectral_gap,
                        spectral_reconstruction_residual)
from .sampling import (DSInstance, FrameReport, check_characterization, check_necessary,  # noqa: E402
                       iterate_fiber_system)
