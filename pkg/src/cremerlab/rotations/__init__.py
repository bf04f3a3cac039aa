"""Rotation numbers, small divisors and Bruno-type sums."""

from .angle import RotationNumber
from .smalldiv import (
    ArithProfile, arith_profile, bruno_partial_sum, bruno_partials, cremer_profile, cremer_witness,
    divisor_bounds, min_frac_dist, poschel_omega, poschel_partial_sum, poschel_partials, small_divisor_Omega,
)

__all__ = [
    "RotationNumber", "ArithProfile", "arith_profile", "bruno_partial_sum", "bruno_partials",
    "cremer_profile", "cremer_witness", "divisor_bounds", "min_frac_dist", "poschel_omega",
    "poschel_partial_sum", "poschel_partials", "small_divisor_Omega",
]
