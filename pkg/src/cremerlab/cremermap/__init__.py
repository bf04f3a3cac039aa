"""F(x, y) = (lambda x, y + a(x)): evaluation, iteration, escape certificates, linearization."""

from .escape import DomainCxU, EscapeCertificate, escape_certificate, lemma_chain
from .series import (
    CremerMapSpec, SeriesValue, apply_F, apply_F_inv, apply_Fk, brute_force_Lk, coefficient, eval_a, eval_Lk,
    to_polymap,
)
from .linearize import (coefficient_identity, contrast_profile, divergence_profile, first_integral_direct,
                        first_integral_residual, linearize_coeff, transversal_linearization)

__all__ = [
    "CremerMapSpec", "SeriesValue", "DomainCxU", "EscapeCertificate", "apply_F", "apply_F_inv", "apply_Fk",
    "brute_force_Lk", "coefficient", "escape_certificate", "eval_a", "eval_Lk", "lemma_chain",
    "to_polymap", "linearize_coeff", "divergence_profile", "coefficient_identity", "first_integral_residual",
    "first_integral_direct", "contrast_profile", "transversal_linearization",
]
