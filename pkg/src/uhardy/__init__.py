"""Finite-truncation laboratory for Hardy spaces over the infinite unitary group.

Exact Young-diagram combinatorics, Haar sampling on U(m) with the Livsic
projective system, a truncated symmetric Fock space, the weighted Hardy
coefficient model with its antilinear isomorphism, reproducing kernels,
radial transforms, and a seeded Monte Carlo verification engine.
"""

from uhardy.errors import CapacityError, DomainError, UHardyError, ValidationError
from uhardy.partitions import BasisKey, Partition, canonicalize_key

__version__ = "0.1.0"

__all__ = [
    "BasisKey",
    "CapacityError",
    "DomainError",
    "Partition",
    "UHardyError",
    "ValidationError",
    "canonicalize_key",
    "__version__",
]
