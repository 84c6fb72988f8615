"""Truncated symmetric Fock space in basis-key coordinates.

A :class:`FockVector` stores expansion coefficients ``c`` of
``psi = sum_k c_k e^{sym lambda}_iota`` over canonical basis keys. Tensor
powers are never materialised; ``x^{(x) n}`` has coefficient
``(n!/lambda!) x^lambda`` at every degree-``n`` key.

Inner products are linear in the left slot and conjugate-linear in the right,
matching ``x_k = <x | e_k>`` for the coordinates of a vector ``x``. Every
conjugation below follows from that single choice.

Arithmetic is generic over the coefficient type: floats and complex numbers
give the usual floating-point model, while :class:`fractions.Fraction`
coordinates keep everything exact.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from itertools import permutations, product
from math import factorial
from types import MappingProxyType
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from uhardy._numeric import monomial_table
from uhardy.errors import CapacityError, DomainError, ValidationError
from uhardy.partitions import (
    BasisKey,
    canonicalize_key,
    fock_weight,
    iter_basis_keys,
    keys_up_to,
    partition_factorial,
)

MAX_POLARIZATION_ORDER = 8


def _conj(c):
    return c.conjugate()


class EVector:
    """Finitely supported vector of E in the orthonormal basis ``e_1, e_2, ...``.

    Built from a sequence (coordinate ``k`` at position ``k-1``) or from a
    mapping ``index -> coordinate``. Zero coordinates are dropped.
    """

    __slots__ = ("_c",)

    def __init__(self, coords: Mapping[int, Any] | Sequence[Any] | np.ndarray = ()):
        if isinstance(coords, Mapping):
            items = ((int(k), v) for k, v in coords.items())
        else:
            items = ((k + 1, v) for k, v in enumerate(coords))
        c: dict[int, Any] = {}
        for k, v in items:
            if k <= 0:
                raise ValidationError(f"E-vector indices start at 1, got {k}")
            if isinstance(v, np.generic):
                v = v.item()
            if v != 0:
                c[k] = v
        self._c = c

    def __getitem__(self, k: int):
        return self._c.get(k, 0)

    def items(self):
        return self._c.items()

    @property
    def dim(self) -> int:
        """Largest index in the support (0 for the zero vector)."""
        return max(self._c, default=0)

    def norm_sq(self):
        return sum(((v * _conj(v)).real for v in self._c.values()), 0)

    def norm(self) -> float:
        return math.sqrt(abs(self.norm_sq()))

    def inner(self, other: EVector):
        """``<self | other> = sum_k self_k conj(other_k)``."""
        return sum((v * _conj(other[k]) for k, v in self._c.items()), 0)

    def __add__(self, other: EVector) -> EVector:
        out = dict(self._c)
        for k, v in other._c.items():
            out[k] = out.get(k, 0) + v
        return EVector(out)

    def __mul__(self, alpha) -> EVector:
        return EVector({k: alpha * v for k, v in self._c.items()})

    __rmul__ = __mul__

    def __neg__(self) -> EVector:
        return self * -1

    def as_array(self, d: int | None = None) -> np.ndarray:
        d = self.dim if d is None else d
        a = np.zeros(d, dtype=complex)
        for k, v in self._c.items():
            if k > d:
                raise ValidationError(f"coordinate {k} beyond requested length {d}")
            a[k - 1] = complex(v)
        return a

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EVector):
            return NotImplemented
        return self._c == other._c

    def __repr__(self) -> str:
        return f"EVector({self._c})"


def basis_vector(k: int) -> EVector:
    return EVector({k: 1})


class CoefficientVector:
    """Finitely supported coefficients over basis keys with a truncation box.

    Subclasses fix the squared norm attached to each key through :meth:`weight`.
    The truncation ``(max_degree, max_dim)`` defaults to the smallest box
    holding the support; binary operations take the union of boxes.
    """

    space = "abstract"
    weight: Callable[[BasisKey], Fraction]

    __slots__ = ("_c", "max_degree", "max_dim")

    def __init__(
        self,
        coefficients: Mapping[BasisKey, Any] | Iterable[tuple[BasisKey, Any]] = (),
        max_degree: int | None = None,
        max_dim: int | None = None,
    ):
        items = coefficients.items() if isinstance(coefficients, Mapping) else coefficients
        c: dict[BasisKey, Any] = {}
        for key, v in items:
            if not isinstance(key, BasisKey):
                raise ValidationError(f"coefficient keys must be BasisKey, got {key!r}")
            if isinstance(v, np.generic):
                v = v.item()
            if v != 0:
                c[key] = v
        deg = max((k.degree for k in c), default=0)
        dim = max((k.max_index for k in c), default=1)
        self.max_degree = deg if max_degree is None else int(max_degree)
        self.max_dim = max(dim, 1) if max_dim is None else int(max_dim)
        if deg > self.max_degree or dim > self.max_dim:
            raise ValidationError(
                f"support (degree {deg}, index {dim}) exceeds truncation "
                f"(degree {self.max_degree}, dim {self.max_dim})"
            )
        self._c = c

    def _new(self, coefficients, max_degree=None, max_dim=None):
        return type(self)(
            coefficients,
            self.max_degree if max_degree is None else max_degree,
            self.max_dim if max_dim is None else max_dim,
        )

    @classmethod
    def basis(cls, key: BasisKey, coefficient=1, **kw):
        return cls({key: coefficient}, **kw)

    @property
    def coefficients(self) -> Mapping[BasisKey, Any]:
        return MappingProxyType(self._c)

    def __getitem__(self, key: BasisKey):
        return self._c.get(key, 0)

    def __iter__(self) -> Iterator[BasisKey]:
        return iter(self._c)

    def __len__(self) -> int:
        return len(self._c)

    def items(self):
        return self._c.items()

    def degrees(self) -> list[int]:
        return sorted({k.degree for k in self._c})

    def component(self, n: int):
        """Degree-``n`` part (same truncation box)."""
        return self._new({k: v for k, v in self._c.items() if k.degree == n})

    def is_homogeneous(self, n: int) -> bool:
        return all(k.degree == n for k in self._c)

    def norm_sq(self):
        """``sum_k |c_k|^2 weight(k)`` summed in support order."""
        return sum(((v * _conj(v)).real * type(self).weight(k) for k, v in self._c.items()), 0)

    def norm(self) -> float:
        return math.sqrt(abs(self.norm_sq()))

    def inner(self, other):
        """Weighted inner product, linear in ``self``, conjugate-linear in ``other``."""
        if type(other) is not type(self):
            raise ValidationError(f"cannot pair {self.space} with {other.space}")
        small, large = (self, other) if len(self) <= len(other) else (other, self)
        total = 0
        for k in small._c:
            if k in large._c:
                total += self._c[k] * _conj(other._c[k]) * type(self).weight(k)
        return total

    def map_coefficients(self, fn: Callable[[BasisKey, Any], Any]):
        return self._new({k: fn(k, v) for k, v in self._c.items()})

    def conj(self):
        return self.map_coefficients(lambda _k, v: _conj(v))

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        out = dict(self._c)
        for k, v in other._c.items():
            out[k] = out.get(k, 0) + v
        return self._new(
            out, max(self.max_degree, other.max_degree), max(self.max_dim, other.max_dim)
        )

    def __neg__(self):
        return self.map_coefficients(lambda _k, v: -v)

    def __sub__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self + (-other)

    def __mul__(self, alpha):
        if isinstance(alpha, CoefficientVector):
            return NotImplemented
        return self.map_coefficients(lambda _k, v: alpha * v)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoefficientVector):
            return NotImplemented
        return type(other) is type(self) and self._c == other._c

    __hash__ = None  # type: ignore[assignment]

    def max_abs_diff(self, other) -> float:
        keys = set(self._c) | set(other._c)
        return max((abs(complex(self[k]) - complex(other[k])) for k in keys), default=0.0)

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}({len(self)} terms, "
            f"max_degree={self.max_degree}, max_dim={self.max_dim})"
        )

    # -- serialization -----------------------------------------------------

    def to_json_obj(self) -> dict:
        rows = []
        for key, v in self._c.items():
            # rows list lambda nonincreasing with iota aligned
            pairs = sorted(key.pairs, key=lambda p: (-p[1], p[0]))
            z = complex(v)
            rows.append(
                {
                    "lambda": [e for _, e in pairs],
                    "iota": [i for i, _ in pairs],
                    "re": z.real,
                    "im": z.imag,
                }
            )
        return {
            "space": self.space,
            "max_degree": self.max_degree,
            "max_dim": self.max_dim,
            "coefficients": rows,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), indent=1)

    @classmethod
    def from_json_obj(cls, obj):
        if isinstance(obj, list):
            if cls.space != "fock":
                raise ValidationError(
                    f"field 'space': a bare coefficient list is a fock file, expected '{cls.space}'"
                )
            rows, max_degree, max_dim = obj, None, None
        elif isinstance(obj, dict):
            space = obj.get("space")
            if space != cls.space:
                raise ValidationError(f"field 'space': expected '{cls.space}', got {space!r}")
            if "coefficients" not in obj or not isinstance(obj["coefficients"], list):
                raise ValidationError("field 'coefficients': missing or not a list")
            rows = obj["coefficients"]
            max_degree, max_dim = obj.get("max_degree"), obj.get("max_dim")
        else:
            raise ValidationError("coefficient file must hold a JSON object or list")
        coeffs = parse_coefficient_rows(rows)
        return cls(coeffs, max_degree, max_dim)

    @classmethod
    def loads(cls, text: str):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid JSON: {exc}") from exc
        return cls.from_json_obj(obj)


def parse_coefficient_rows(rows: list) -> dict[BasisKey, complex]:
    """Rows of ``{"lambda", "iota", "re", "im"}``; keys canonicalised, duplicates rejected."""
    out: dict[BasisKey, complex] = {}
    for n, row in enumerate(rows):
        where = f"coefficients[{n}]"
        if not isinstance(row, dict):
            raise ValidationError(f"{where}: expected an object")
        for field in ("lambda", "iota", "re", "im"):
            if field not in row:
                raise ValidationError(f"{where}.{field}: missing")
        lam, iota = row["lambda"], row["iota"]
        if not isinstance(lam, list) or not all(isinstance(e, int) and e > 0 for e in lam):
            raise ValidationError(f"{where}.lambda: expected a list of positive integers")
        if not isinstance(iota, list) or not all(isinstance(i, int) and i > 0 for i in iota):
            raise ValidationError(f"{where}.iota: expected a list of positive integers")
        if len(lam) != len(iota):
            raise ValidationError(f"{where}.iota: length differs from lambda")
        for field in ("re", "im"):
            if not isinstance(row[field], (int, float)) or isinstance(row[field], bool):
                raise ValidationError(f"{where}.{field}: expected a number")
        try:
            key = canonicalize_key(zip(iota, lam))
        except ValidationError as exc:
            raise ValidationError(f"{where}.iota: {exc}") from exc
        if key in out:
            raise ValidationError(f"{where}: duplicate key {key!r}")
        out[key] = complex(row["re"], row["im"])
    return out


class FockVector(CoefficientVector):
    """Element of the truncated symmetric Fock space.

    Basis vectors ``e^{sym lambda}_iota`` carry squared norm ``lambda!/n!``.
    """

    space = "fock"
    weight = staticmethod(fock_weight)
    __slots__ = ()


def fock_inner(psi: FockVector, phi: FockVector):
    """``sum_k psi_k conj(phi_k) lambda!/n!`` over shared keys."""
    return psi.inner(phi)


def monomial(x: EVector, key: BasisKey):
    """``<x^{(x) n} | e^{sym lambda}_iota> = prod_k x_{iota_k} ** lambda_k``."""
    out = 1
    for i, e in key.pairs:
        xi = x[i]
        if xi == 0:
            return 0
        out = out * xi**e
    return out


def _check_support(x: EVector, d: int) -> None:
    if x.dim > d:
        raise ValidationError(f"vector has index {x.dim} beyond dimension {d}")


def tensor_power(x: EVector, n: int, d: int) -> FockVector:
    """``x^{(x) n}`` in key coordinates: coefficient ``(n!/lambda!) x^lambda``."""
    _check_support(x, d)
    coeffs = {}
    for key in iter_basis_keys(n, d):
        mono = monomial(x, key)
        if mono != 0:
            coeffs[key] = Fraction(factorial(n), partition_factorial(key.partition)) * mono
    return FockVector(coeffs, n, d)


def coherent_state(x: EVector, N: int, d: int) -> FockVector:
    """Truncation of ``(1-x)^{-(x)1} = sum_n x^{(x) n}`` to degrees ``<= N``."""
    if not x.norm_sq() < 1:
        raise DomainError(f"coherent state needs ||x|| < 1, got {x.norm():.6g}")
    _check_support(x, d)
    coeffs = {}
    for key in keys_up_to(N, d):
        mono = monomial(x, key)
        if mono != 0:
            coeffs[key] = mono / fock_weight(key)
    return FockVector(coeffs, N, d)


def evaluate_hs(psi: FockVector, x: EVector):
    """Hilbert-Schmidt function ``psi*(x) = <(1-x)^{-(x)1} | psi> = sum conj(c_k) x^k``.

    The conjugate comes from the right slot of the inner product.
    """
    return sum((_conj(c) * monomial(x, k) for k, c in psi.items()), 0)


def evaluate_hs_batch(psi: FockVector, X: np.ndarray) -> np.ndarray:
    """:func:`evaluate_hs` for each row of an ``(N, d)`` array of coordinates."""
    keys = list(psi)
    if not keys:
        return np.zeros(np.atleast_2d(X).shape[0], dtype=complex)
    c = np.array([complex(psi[k]) for k in keys]).conj()
    return monomial_table(X, keys) @ c


def symmetrize_polarization(z: Sequence[EVector], d: int) -> FockVector:
    """``z_1 (.) ... (.) z_n`` from the 2^n-term polarization identity.

    Sums ``theta_1...theta_n x^{(x) n}`` over sign patterns with
    ``x = sum theta_k z_k`` and divides by ``2^n n!``.
    """
    n = len(z)
    if n > MAX_POLARIZATION_ORDER:
        raise CapacityError(f"polarization supports at most {MAX_POLARIZATION_ORDER} factors")
    for zk in z:
        _check_support(zk, d)
    keys = list(iter_basis_keys(n, d))
    mult = [Fraction(factorial(n), partition_factorial(k.partition)) for k in keys]
    acc: dict[BasisKey, Any] = {}
    for signs in product((1, -1), repeat=n):
        x = EVector()
        for s, zk in zip(signs, z):
            x = x + zk * s
        sign = math.prod(signs)
        for key, m in zip(keys, mult):
            mono = monomial(x, key)
            if mono != 0:
                acc[key] = acc.get(key, 0) + sign * m * mono
    scale = Fraction(1, 2**n * factorial(n))
    return FockVector({k: v * scale for k, v in acc.items()}, n, d)


def symmetrize_permutations(z: Sequence[EVector], d: int) -> FockVector:
    """``z_1 (.) ... (.) z_n`` by averaging the dense tensor over all n! orderings.

    A symmetric tensor ``T = sum c_k e^{sym k}`` has entry ``c_k lambda!/n!``
    at every multi-index of type ``k``, which is how coefficients are read
    back. Cost is ``n! d^n``; intended for small cross-checks.
    """
    n = len(z)
    if n > MAX_POLARIZATION_ORDER:
        raise CapacityError(f"permutation averaging supports at most {MAX_POLARIZATION_ORDER} factors")
    vecs = [zk.as_array(d) for zk in z]
    total = np.zeros((d,) * n, dtype=complex)
    for perm in permutations(range(n)):
        t = np.ones((), dtype=complex)
        for j in perm:
            t = np.multiply.outer(t, vecs[j])
        total += t
    total /= factorial(n)
    coeffs = {}
    for key in iter_basis_keys(n, d):
        idx = tuple(i - 1 for i, e in key.pairs for _ in range(e))
        coeffs[key] = complex(total[idx]) * factorial(n) / partition_factorial(key.partition)
    return FockVector(coeffs, n, d)
