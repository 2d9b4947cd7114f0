"""Exact q-series arithmetic and verification of partition and character identities."""

from .qseries import QSeries, SeriesError, equal_up_to, make_monomial
from .report import Mismatch, VerificationReport
from .identities import REGISTRY, IdentityError, master_check, run_suite, verify

__all__ = [
    "QSeries",
    "SeriesError",
    "equal_up_to",
    "make_monomial",
    "Mismatch",
    "VerificationReport",
    "REGISTRY",
    "IdentityError",
    "master_check",
    "run_suite",
    "verify",
]
__version__ = "0.1.0"
