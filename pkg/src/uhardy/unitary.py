"""Haar sampling on U(m), the Livsic projective system and first-column monomials.

Group elements of the projective limit are modelled by stabilized sequences:
a unitary ``u_m`` of size ``m`` stands for the sequence whose k-th term is the
iterated Livsic projection for ``k < m``, ``u_m`` itself for ``k = m`` and the
identity-padded matrix for ``k > m``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from uhardy._numeric import monomial_table
from uhardy.errors import CapacityError, DomainError, ValidationError
from uhardy.partitions import BasisKey

UNITARITY_TOL = 1e-10
SINGULAR_TOL = 1e-12
MAX_HAAR_DIM = 256

_SEED_MASK = (1 << 64) - 1


class RandomStream:
    """A reproducible random source identified by ``(seed, stream_id)``.

    The stream draws from PCG64 seeded through ``SeedSequence``; the stream id
    and any child path enter as the spawn key, which gives statistically
    independent sequences for distinct ids. The stream is stateful: repeated
    draws advance it. A fresh stream with the same identity replays the draws.
    """

    def __init__(self, seed: int, stream_id: int = 0, path: tuple[int, ...] = ()):
        self.seed = int(seed) & _SEED_MASK
        self.stream_id = int(stream_id) & _SEED_MASK
        self.path = tuple(int(p) for p in path)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, *self.path))
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def spawn(self, child: int) -> RandomStream:
        """Independent child stream; depends only on identity, not on state."""
        return RandomStream(self.seed, self.stream_id, self.path + (child,))

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id}, path={self.path})"


def _generator(rng: RandomStream | np.random.Generator) -> np.random.Generator:
    return rng.generator if isinstance(rng, RandomStream) else rng


def unitarity_defect(a: np.ndarray) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))))


class UnitaryMatrix:
    """Immutable dense complex unitary matrix.

    Arbitrary inputs are checked against ``||U*U - I||_max <= 1e-10``; the
    factories in this module pass ``check=False`` for matrices that are unitary
    by construction.
    """

    __slots__ = ("_a",)

    def __init__(self, entries, *, check: bool = True):
        a = np.array(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValidationError(f"expected a nonempty square matrix, got shape {a.shape}")
        if check:
            defect = unitarity_defect(a)
            if defect > UNITARITY_TOL:
                raise ValidationError(f"matrix is not unitary (defect {defect:.3e})")
        a.setflags(write=False)
        self._a = a

    @classmethod
    def identity(cls, m: int) -> UnitaryMatrix:
        return cls(np.eye(m, dtype=complex), check=False)

    @property
    def entries(self) -> np.ndarray:
        return self._a

    @property
    def dim(self) -> int:
        return self._a.shape[0]

    def adjoint(self) -> UnitaryMatrix:
        return UnitaryMatrix(self._a.conj().T, check=False)

    def __matmul__(self, other: UnitaryMatrix) -> UnitaryMatrix:
        return UnitaryMatrix(self._a @ other._a, check=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UnitaryMatrix):
            return NotImplemented
        return self._a.shape == other._a.shape and bool(np.array_equal(self._a, other._a))

    def __hash__(self) -> int:
        return hash(self._a.tobytes())

    def __repr__(self) -> str:
        return f"UnitaryMatrix(dim={self.dim})"

    def to_json_obj(self) -> list:
        """Row-major array of ``[re, im]`` pairs."""
        return [[[float(z.real), float(z.imag)] for z in row] for row in self._a]

    @classmethod
    def from_json_obj(cls, obj) -> UnitaryMatrix:
        try:
            a = np.array([[complex(re, im) for re, im in row] for row in obj], dtype=complex)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"bad matrix JSON: {exc}") from exc
        return cls(a)


def dumps_matrices(mats: Sequence[UnitaryMatrix]) -> str:
    return json.dumps([m.to_json_obj() for m in mats])


def loads_matrices(text: str) -> list[UnitaryMatrix]:
    return [UnitaryMatrix.from_json_obj(obj) for obj in json.loads(text)]


# ---------------------------------------------------------------------------
# Haar sampling
# ---------------------------------------------------------------------------


def haar_batch(m: int, count: int, rng: RandomStream | np.random.Generator) -> np.ndarray:
    """``count`` Haar-distributed unitaries of size ``m`` as a ``(count, m, m)`` array.

    Complex Ginibre matrix, Householder QR (LAPACK ``geqrf``), then the columns
    of Q are rotated by the phases of ``diag(R)``. Without the phase fix the
    law of Q depends on the QR sign convention and is not Haar.
    """
    if not 1 <= m <= MAX_HAAR_DIM:
        raise CapacityError(f"dimension {m} outside 1..{MAX_HAAR_DIM}")
    gen = _generator(rng)
    z = gen.standard_normal((count, m, m, 2))
    z = (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., None, :]


def haar_sample(m: int, rng: RandomStream | np.random.Generator) -> UnitaryMatrix:
    """One draw from the Haar probability measure on U(m)."""
    return UnitaryMatrix(haar_batch(m, 1, rng)[0], check=False)


# ---------------------------------------------------------------------------
# Livsic projective system
# ---------------------------------------------------------------------------


def livsic_project_batch(u: np.ndarray) -> np.ndarray:
    """Vectorised Livsic map on a ``(..., m, m)`` stack; see :func:`livsic_project`."""
    u = np.asarray(u, dtype=complex)
    m = u.shape[-1]
    if m < 2:
        raise DomainError("U(1) has no predecessor group")
    z = u[..., : m - 1, : m - 1]
    a = u[..., : m - 1, m - 1 :]
    b = u[..., m - 1 :, : m - 1]
    t = u[..., m - 1, m - 1]
    denom = 1.0 + t
    regular = np.abs(denom) > SINGULAR_TOL
    safe = np.where(regular, denom, 1.0)
    corr = (a @ b) / safe[..., None, None]
    return np.where(regular[..., None, None], z - corr, z)


def livsic_project(u: UnitaryMatrix) -> UnitaryMatrix:
    """``[[z, a], [b, t]] -> z - a (1+t)^{-1} b``, or ``z`` when ``|1+t| <= 1e-12``."""
    return UnitaryMatrix(livsic_project_batch(u.entries), check=False)


def livsic_chain(u: UnitaryMatrix, k: int) -> UnitaryMatrix:
    """Iterated Livsic projection from ``U(dim u)`` down to ``U(k)``."""
    if k < 1 or k > u.dim:
        raise DomainError(f"cannot project U({u.dim}) to U({k})")
    a = u.entries
    for _ in range(u.dim - k):
        a = livsic_project_batch(a)
    return UnitaryMatrix(a, check=False)


def embed_batch(u: np.ndarray, k: int) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    m = u.shape[-1]
    if k < m:
        raise DomainError(f"cannot embed U({m}) into U({k})")
    if k == m:
        return u
    out = np.zeros(u.shape[:-2] + (k, k), dtype=complex)
    out[..., :m, :m] = u
    idx = np.arange(m, k)
    out[..., idx, idx] = 1.0
    return out


def embed(u: UnitaryMatrix, k: int) -> UnitaryMatrix:
    """Block-diagonal padding ``[[u, 0], [0, I]]`` to size ``k``."""
    return UnitaryMatrix(embed_batch(u.entries, k), check=False)


@dataclass(frozen=True, eq=False)
class GroupElement:
    """Stabilized sequence generated by a unitary of size ``level``."""

    level: int
    matrix: UnitaryMatrix

    def __post_init__(self) -> None:
        if self.matrix.dim != self.level:
            raise ValidationError(
                f"level {self.level} does not match matrix dimension {self.matrix.dim}"
            )

    @classmethod
    def rho(cls, u: UnitaryMatrix) -> GroupElement:
        return cls(u.dim, u)

    def project(self, k: int) -> UnitaryMatrix:
        """The k-th term of the stabilized sequence."""
        if k < self.level:
            return livsic_chain(self.matrix, k)
        return embed(self.matrix, k)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.level == other.level and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash((self.level, self.matrix))


def rho(u: UnitaryMatrix) -> GroupElement:
    return GroupElement.rho(u)


def right_action(u: GroupElement, v: UnitaryMatrix, w: UnitaryMatrix) -> GroupElement:
    """``u.(v, w) = w^{-1} u v`` with every factor lifted to a common level."""
    if v.dim != w.dim:
        raise ValidationError(f"g = (v, w) needs equal sizes, got {v.dim} and {w.dim}")
    level = max(u.level, v.dim)
    uu = embed_batch(u.matrix.entries, level)
    vv = embed_batch(v.entries, level)
    ww = embed_batch(w.entries, level)
    return GroupElement(level, UnitaryMatrix(ww.conj().T @ uu @ vv, check=False))


def right_action_batch(u: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """:func:`right_action` applied to a ``(N, L, L)`` stack with fixed ``(v, w)``."""
    level = max(u.shape[-1], v.shape[-1])
    uu = embed_batch(u, level)
    vv = embed_batch(v, level)
    ww = embed_batch(w, level)
    return ww.conj().T @ uu @ vv


def zeta(u: GroupElement) -> np.ndarray:
    """First column of the generating matrix: a unit vector of length ``level``.

    Components past ``level`` are zero and are not stored.
    """
    return np.array(u.matrix.entries[:, 0])


def epsilon_basis(u: GroupElement, key: BasisKey) -> complex:
    """``prod_k (u e_1)_{i_k} ** lambda_k``; the vacuum key gives 1."""
    return complex(monomial_table(zeta(u), [key])[0, 0])


def epsilon_table(columns: np.ndarray, keys: Sequence[BasisKey]) -> np.ndarray:
    """Basis monomials for a ``(N, M)`` batch of first columns, shape ``(N, len(keys))``."""
    return monomial_table(columns, keys)
