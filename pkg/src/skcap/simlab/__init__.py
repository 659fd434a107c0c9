"""Finite-blocklength simulator of the three-codebook key-agreement scheme."""

from .codebook import CodebookSet, CodeParams, build_codebooks, derive_params
from .coding import decode_receiver, eaves_decode_given_key, eaves_decode_unrestricted, encode
from .equivocation import exact_equivocation
from .experiment import SimReport, run_experiment
from .typical import is_typical, jointly_typical, sample_typical, typical_set_size

__all__ = [
    "CodeParams", "CodebookSet", "SimReport", "build_codebooks", "decode_receiver",
    "derive_params", "eaves_decode_given_key", "eaves_decode_unrestricted", "encode",
    "exact_equivocation", "is_typical", "jointly_typical", "run_experiment",
    "sample_typical", "typical_set_size",
]
