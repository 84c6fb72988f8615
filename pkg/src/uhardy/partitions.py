"""Young diagrams, basis keys and the exact weight families attached to them.

A basis key pairs a partition with distinct indices; it labels one symmetric
tensor basis vector in the Fock space and one monomial of the Hardy basis.
Keys are stored canonically as ``(index, exponent)`` pairs sorted by index, so
two keys are equal exactly when they describe the same monomial.

All weights are :class:`fractions.Fraction` values; callers convert to float
at the point of use.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, factorial, prod
from typing import Iterable, Iterator, Sequence

from uhardy.errors import CapacityError, ValidationError

MAX_FACTORIAL_ORDER = 60
MAX_ENUM_DEGREE = 20
MAX_ENUM_DIM = 32


@dataclass(frozen=True, order=True)
class Partition:
    """A Young diagram given by its nonincreasing positive row lengths."""

    parts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise ValidationError(f"partition parts must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValidationError(f"partition parts must be nonincreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __repr__(self) -> str:
        return f"Partition({self.parts})"


EMPTY = Partition(())


@dataclass(frozen=True)
class BasisKey:
    """Canonical ``(index -> exponent)`` mapping with distinct positive indices.

    Build keys with :func:`canonicalize_key` or :meth:`from_partition`; the
    constructor checks that ``pairs`` is already canonical.
    """

    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        idx = [i for i, _ in self.pairs]
        if any(i <= 0 for i in idx) or any(e <= 0 for _, e in self.pairs):
            raise ValidationError(f"indices and exponents must be positive: {self.pairs}")
        if any(a >= b for a, b in zip(idx, idx[1:])):
            raise ValidationError(f"key pairs must be strictly increasing in index: {self.pairs}")

    @classmethod
    def from_partition(cls, partition: Partition | Sequence[int], iota: Sequence[int]) -> BasisKey:
        """Key for the tensor ``e_{iota_1}^{lambda_1} ... e_{iota_m}^{lambda_m}``."""
        parts = partition.parts if isinstance(partition, Partition) else tuple(partition)
        if len(parts) != len(iota):
            raise ValidationError(
                f"partition length {len(parts)} does not match index count {len(iota)}"
            )
        return canonicalize_key(zip(iota, parts))

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.pairs)

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(e for _, e in self.pairs)

    @property
    def partition(self) -> Partition:
        return Partition(tuple(sorted(self.exponents, reverse=True)))

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @property
    def max_index(self) -> int:
        return self.pairs[-1][0] if self.pairs else 0

    def __repr__(self) -> str:
        return f"BasisKey({dict(self.pairs)})"


VACUUM = BasisKey(())


def canonicalize_key(pairs: Iterable[tuple[int, int]]) -> BasisKey:
    """Sort ``(index, exponent)`` pairs by index; reject repeated indices."""
    items = [(int(i), int(e)) for i, e in pairs]
    seen = Counter(i for i, _ in items)
    dup = [i for i, c in seen.items() if c > 1]
    if dup:
        raise ValidationError(f"duplicate index in key: {sorted(dup)}")
    return BasisKey(tuple(sorted(items)))


def _check_order(n: int, bound: int = MAX_FACTORIAL_ORDER) -> None:
    if n > bound:
        raise CapacityError(f"order {n} exceeds the bound {bound}")


def _partitions_bounded(
    n: int, largest: int, max_len: int | None = None
) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    if max_len == 0:
        return
    rest_len = None if max_len is None else max_len - 1
    for first in range(min(n, largest), 0, -1):
        if max_len is not None and first * max_len < n:
            break
        for rest in _partitions_bounded(n - first, first, rest_len):
            yield (first,) + rest


def enumerate_partitions(n: int) -> list[Partition]:
    """All partitions of ``n`` in reverse-lexicographic order; ``[EMPTY]`` for 0."""
    if n < 0:
        raise ValidationError("n must be nonnegative")
    _check_order(n)
    return [Partition(p) for p in _partitions_bounded(n, n)]


def _distinct_permutations(values: Sequence[int]) -> Iterator[tuple[int, ...]]:
    counts = Counter(values)
    distinct = sorted(counts, reverse=True)
    out: list[int] = []

    def rec(k: int) -> Iterator[tuple[int, ...]]:
        if k == 0:
            yield tuple(out)
            return
        for v in distinct:
            if counts[v]:
                counts[v] -= 1
                out.append(v)
                yield from rec(k - 1)
                out.pop()
                counts[v] += 1

    yield from rec(len(values))


def iter_basis_keys(n: int, d: int) -> Iterator[BasisKey]:
    """Uncapped generator behind :func:`enumerate_basis_keys`."""
    for lam in _partitions_bounded(n, n, d):
        m = len(lam)
        for idx in combinations(range(1, d + 1), m):
            for exps in _distinct_permutations(lam):
                yield BasisKey(tuple(zip(idx, exps)))


def enumerate_basis_keys(n: int, d: int) -> list[BasisKey]:
    """Every monomial of degree ``n`` in the variables ``1..d`` exactly once."""
    if n < 0 or d < 1:
        raise ValidationError("need n >= 0 and d >= 1")
    if n > MAX_ENUM_DEGREE or d > MAX_ENUM_DIM:
        raise CapacityError(
            f"enumeration bound exceeded: n={n} (max {MAX_ENUM_DEGREE}), d={d} (max {MAX_ENUM_DIM})"
        )
    return list(iter_basis_keys(n, d))


def keys_up_to(max_degree: int, d: int) -> list[BasisKey]:
    """Keys of every degree ``0..max_degree``, grouped by degree."""
    keys: list[BasisKey] = []
    for n in range(max_degree + 1):
        keys.extend(iter_basis_keys(n, d))
    return keys


def count_keys(n: int, d: int) -> int:
    """Number of degree-``n`` monomials in ``d`` variables."""
    return comb(n + d - 1, n)


def _as_partition(lam: Partition | BasisKey | Sequence[int]) -> Partition:
    if isinstance(lam, Partition):
        return lam
    if isinstance(lam, BasisKey):
        return lam.partition
    return Partition(tuple(lam))


@lru_cache(maxsize=4096)
def _partition_factorial(parts: tuple[int, ...]) -> int:
    return prod(factorial(p) for p in parts)


def partition_factorial(lam: Partition | Sequence[int]) -> int:
    """``lambda_1! * ... * lambda_m!`` (1 for the empty diagram)."""
    lam = _as_partition(lam)
    _check_order(lam.weight)
    return _partition_factorial(lam.parts)


@lru_cache(maxsize=4096)
def _fock_weight(parts: tuple[int, ...]) -> Fraction:
    return Fraction(_partition_factorial(parts), factorial(sum(parts)))


def fock_weight(lam: Partition | BasisKey | Sequence[int]) -> Fraction:
    """Squared norm ``lambda!/|lambda|!`` of a symmetric tensor basis vector."""
    lam = _as_partition(lam)
    _check_order(lam.weight)
    return _fock_weight(lam.parts)


@lru_cache(maxsize=4096)
def _hardy_weight(parts: tuple[int, ...]) -> Fraction:
    if not parts:
        return Fraction(1)
    m, n = len(parts), sum(parts)
    return Fraction(factorial(m - 1) * _partition_factorial(parts), factorial(m - 1 + n))


def hardy_weight(lam: Partition | BasisKey | Sequence[int]) -> Fraction:
    """Squared model norm ``(m-1)! lambda! / (m-1+|lambda|)!`` with ``m = len(lambda)``."""
    lam = _as_partition(lam)
    _check_order(lam.weight + lam.length)
    return _hardy_weight(lam.parts)


def jstar_ratio(lam: Partition | BasisKey | Sequence[int]) -> Fraction:
    """Ratio ``fock_weight / hardy_weight``, i.e. ``C(m-1+|lambda|, |lambda|)``."""
    lam = _as_partition(lam)
    _check_order(lam.weight + lam.length)
    if lam.length == 0:
        return Fraction(1)
    return Fraction(comb(lam.length - 1 + lam.weight, lam.weight))


def sphere_moment(lam: Partition | BasisKey | Sequence[int], level: int) -> Fraction:
    """``E|x^lambda|^2`` for ``x`` uniform on the unit sphere of C^level.

    Equals ``lambda! (level-1)! / (|lambda| + level - 1)!``.
    """
    lam = _as_partition(lam)
    if lam.length > level:
        raise ValidationError(f"partition {lam.parts} needs at least {lam.length} coordinates")
    _check_order(lam.weight + level - 1)
    return Fraction(
        _partition_factorial(lam.parts) * factorial(level - 1),
        factorial(lam.weight + level - 1),
    )


def schur_constant(n: int, m: int) -> Fraction:
    """``n! (m-1)! / (n+m-1)!``: the Haar average scale on degree-``n`` tensors over C^m."""
    _check_order(n + m - 1)
    return Fraction(factorial(n) * factorial(m - 1), factorial(n + m - 1))
