"""Forging and certifying the level data (m_j, M_j, k_j, r_j)."""

from .certify import CertReport, Verdict, certify, certify_inverse
from .forge import ForgePolicy, SeedLevel, SeedSequences, forge, minimal_escape_multiplier, tamper
from .io import load_seed, save_seed, seed_from_json, seed_to_json

__all__ = [
    "CertReport", "Verdict", "certify", "certify_inverse", "ForgePolicy", "SeedLevel", "SeedSequences",
    "forge", "minimal_escape_multiplier", "tamper", "load_seed", "save_seed", "seed_from_json", "seed_to_json",
]
