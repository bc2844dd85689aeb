"""Weighted Riesz polarization (Chebyshev) constants of compact sets.

Certified brackets on ``inf_y sum_j w(y, x_j) / |y - x_j|^s``, solvers for
the max-min problem over configurations, asymptotic constants and the
limit distribution of optimal configurations.
"""

__version__ = "0.1.0"

from .geometry import arc, ball, box, circle, cube, curve, interval, mesh, sphere, union  # noqa: E402,F401
from .kernel import log_kernel, riesz, separable_weight, weighted_riesz, Modulation  # noqa: E402,F401
from .potential import Configuration, polarization, potential_at  # noqa: E402,F401
from .solver import optimize, seed_configuration  # noqa: E402,F401
