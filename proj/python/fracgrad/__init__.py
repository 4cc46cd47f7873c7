"""Spectral fractional-gradient calculus on the periodic torus.

Thin numpy-facing wrapper over the C++ core. Fields are C-ordered float64
arrays with equal extents per axis; vector fields stack their d components
on a leading axis.
"""

from ._fracgrad import (
    NumericError,
    ValidationError,
    estimate_holder,
    first_variation,
    frac_divergence,
    frac_gradient,
    frac_laplacian,
    gagliardo_seminorm,
    hsp_seminorm,
    lift,
    p_energy,
    random_band_limited,
    riesz_potential,
    set_max_threads,
    solve,
)

__all__ = [
    "NumericError",
    "ValidationError",
    "estimate_holder",
    "first_variation",
    "frac_divergence",
    "frac_gradient",
    "frac_laplacian",
    "gagliardo_seminorm",
    "hsp_seminorm",
    "lift",
    "p_energy",
    "random_band_limited",
    "riesz_potential",
    "set_max_threads",
    "solve",
]
