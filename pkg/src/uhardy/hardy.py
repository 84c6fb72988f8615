"""Hardy coefficient model, the antilinear isomorphism to Fock space, kernels.

A :class:`HardyFunction` stores Fourier coefficients ``f_k`` against the
monomials ``eps^lambda_iota``, whose declared squared norms are
``(m-1)! lambda! / (m-1+|lambda|)!``. The antilinear map ``j_map`` sends the
orthonormalised Fock basis onto the orthonormalised Hardy basis, so each
coefficient is conjugated and rescaled by ``||e_k|| / ||eps_k||``, the square
root of :func:`~uhardy.partitions.jstar_ratio`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb

import numpy as np

from uhardy.errors import CapacityError, DomainError
from uhardy.fock import (
    CoefficientVector,
    EVector,
    FockVector,
    _conj,
    evaluate_hs,
)
from uhardy.partitions import (
    BasisKey,
    enumerate_basis_keys,
    fock_weight,
    hardy_weight,
    jstar_ratio,
)
from uhardy.unitary import GroupElement, epsilon_table, zeta

MAX_FOCK_KERNEL_DEGREE = 12
MAX_BINOMIAL_KERNEL_DEGREE = 30
MAX_COMPARE_DEGREE = 20

FOCK_SUM = "fock-sum"
BINOMIAL_SUM = "binomial-sum"
PRODUCT = "product"
KERNEL_FORMS = (FOCK_SUM, BINOMIAL_SUM, PRODUCT)


class HardyFunction(CoefficientVector):
    """Finitely supported element of the Hardy coefficient model."""

    space = "hardy"
    weight = staticmethod(hardy_weight)
    __slots__ = ()


def hardy_inner(f: HardyFunction, g: HardyFunction):
    """``sum_k f_k conj(g_k) hardy_weight(k)``."""
    return f.inner(g)


def _basis_scale(key: BasisKey) -> float:
    return math.sqrt(jstar_ratio(key))


def j_map(psi: FockVector) -> HardyFunction:
    """Antilinear isometry from Fock space onto the Hardy model."""
    return HardyFunction(
        {k: _conj(c) * _basis_scale(k) for k, c in psi.items()}, psi.max_degree, psi.max_dim
    )


def j_star(f: HardyFunction) -> FockVector:
    """Inverse (and adjoint, in the antilinear sense) of :func:`j_map`."""
    return FockVector(
        {k: _conj(c) / _basis_scale(k) for k, c in f.items()}, f.max_degree, f.max_dim
    )


def _check_ball(x: EVector) -> None:
    if not x.norm_sq() < 1:
        raise DomainError(f"x must lie in the open unit ball, ||x|| = {x.norm():.6g}")


def extend(f: HardyFunction, x: EVector):
    """Hilbert-Schmidt analytic extension ``<(1-x)^{-(x)1} | j_star f>`` at ``x``."""
    _check_ball(x)
    return evaluate_hs(j_star(f), x)


def taylor_coeff(f: HardyFunction, n: int, x: EVector):
    """n-th Taylor term of the extension, an n-homogeneous polynomial in ``x``."""
    return evaluate_hs(j_star(f.component(n)), x)


def h2_norm(f: HardyFunction) -> float:
    """Norm of the extension in H^2, i.e. the Fock norm of ``j_star f``."""
    return j_star(f).norm()


def radial_transform(f: HardyFunction, r: float) -> HardyFunction:
    """``C_r f = sum_n r^n f_n``: each degree-n coefficient scaled by ``r**n``."""
    if not 0 <= r < 1:
        raise DomainError(f"radius must lie in [0, 1), got {r}")
    return f.map_coefficients(lambda k, c: c * r**k.degree)


def radial_norm_sq(f: HardyFunction, r: float) -> float:
    """``sum_n r^{2n} ||f_n||^2`` evaluated degree by degree."""
    return sum(r ** (2 * n) * float(f.component(n).norm_sq()) for n in f.degrees())


def boundary_gap(f: HardyFunction, r: float) -> float:
    """``||C_r f - f||``; ``r = 1`` gives 0."""
    if r == 1:
        return 0.0
    return (radial_transform(f, r) - f).norm()


# ---------------------------------------------------------------------------
# Reproducing kernels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelValue:
    value: complex
    q: int
    form: str


def _padded_zetas(u: GroupElement, v: GroupElement) -> tuple[np.ndarray, np.ndarray, int]:
    d = max(u.level, v.level)
    zu = np.zeros(d, dtype=complex)
    zv = np.zeros(d, dtype=complex)
    zu[: u.level] = zeta(u)
    zv[: v.level] = zeta(v)
    return zu, zv, d


def zeta_overlap(v: GroupElement, u: GroupElement) -> complex:
    """``<zeta(v) | zeta(u)> = sum_k zeta(v)_k conj(zeta(u)_k)``."""
    zu, zv, _ = _padded_zetas(u, v)
    return complex(np.vdot(zu, zv))


def kernel_q(u: GroupElement, v: GroupElement) -> int:
    return min(u.level, v.level)


def multinomial_weights(keys) -> np.ndarray:
    """``n!/lambda!`` for each key, as floats."""
    return np.array([float(1 / fock_weight(k)) for k in keys])


def kernel_hn_fock(u: GroupElement, v: GroupElement, n: int) -> KernelValue:
    """``sum_{|lambda|=n, iota} (n!/lambda!) eps(v) conj(eps(u))`` over ``max(level)`` indices."""
    if n > MAX_FOCK_KERNEL_DEGREE:
        raise CapacityError(f"fock-sum kernel supports n <= {MAX_FOCK_KERNEL_DEGREE}")
    zu, zv, d = _padded_zetas(u, v)
    keys = enumerate_basis_keys(n, d)
    ev = epsilon_table(zv, keys)[0]
    eu = epsilon_table(zu, keys)[0]
    value = complex(np.sum(multinomial_weights(keys) * ev * eu.conj()))
    return KernelValue(value, kernel_q(u, v), FOCK_SUM)


def binomial_factor(n: int, q: int) -> int:
    """``sum_{m=1}^{q} C(n+m-1, n)``."""
    return sum(comb(n + m - 1, n) for m in range(1, q + 1))


def kernel_hn_binomial(u: GroupElement, v: GroupElement, n: int) -> KernelValue:
    """``c^n sum_{m<=q} C(n+m-1, n)`` with ``c = <zeta(v)|zeta(u)>``, as printed."""
    if n > MAX_BINOMIAL_KERNEL_DEGREE:
        raise CapacityError(f"binomial kernel supports n <= {MAX_BINOMIAL_KERNEL_DEGREE}")
    q = kernel_q(u, v)
    c = zeta_overlap(v, u)
    return KernelValue(c**n * binomial_factor(n, q), q, BINOMIAL_SUM)


def product_exponent(q: int) -> int:
    """Total exponent ``1 + 2 + ... + q`` of the product kernel."""
    return q * (q + 1) // 2


def product_coefficient(n: int, q: int, c: complex) -> complex:
    """n-th coefficient in z of ``(1 - z c)^{-q(q+1)/2}``."""
    e = product_exponent(q)
    return comb(n + e - 1, n) * c**n


def kernel_product(z: complex, u: GroupElement, v: GroupElement) -> KernelValue:
    """``prod_{m<=q} (1 - z c)^{-m} = (1 - z c)^{-q(q+1)/2}``."""
    if abs(z) >= 1:
        raise DomainError(f"product kernel needs |z| < 1, got {abs(z):.6g}")
    q = kernel_q(u, v)
    c = zeta_overlap(v, u)
    return KernelValue((1 - z * c) ** (-product_exponent(q)), q, PRODUCT)


def kernel_hn_batch(form: str, zv: np.ndarray, Zu: np.ndarray, n: int, q: int) -> np.ndarray:
    """Degree-n kernel ``h_n(v, u_s)`` for a batch of first columns ``Zu`` (shape ``(N, M)``).

    ``form`` picks the multinomial sum, the printed binomial sum, or the n-th
    series coefficient of the product kernel.
    """
    Zu = np.atleast_2d(Zu)
    d = max(zv.shape[0], Zu.shape[1])
    zvp = np.zeros(d, dtype=complex)
    zvp[: zv.shape[0]] = zv
    Zup = np.zeros((Zu.shape[0], d), dtype=complex)
    Zup[:, : Zu.shape[1]] = Zu
    if form == FOCK_SUM:
        keys = enumerate_basis_keys(n, d)
        ev = epsilon_table(zvp, keys)[0] * multinomial_weights(keys)
        return epsilon_table(Zup, keys).conj() @ ev
    c = Zup.conj() @ zvp
    if form == BINOMIAL_SUM:
        return c**n * binomial_factor(n, q)
    if form == PRODUCT:
        return comb(n + product_exponent(q) - 1, n) * c**n
    raise ValueError(f"unknown kernel form {form!r}; expected one of {KERNEL_FORMS}")


@dataclass
class KernelComparison:
    """Per-degree table of the three kernel forms for one pair ``(u, v)``."""

    q: int
    c: complex
    z: complex
    rows: list[dict] = field(default_factory=list)
    product_value: complex = 0j
    asserted: bool = False
    passed: bool | None = None

    def discrepancy_rows(self, tol: float = 1e-10) -> list[dict]:
        cols = ("fock_vs_binomial", "fock_vs_product", "binomial_vs_product")
        return [r for r in self.rows if any(r[c] is not None and r[c] > tol for c in cols)]


def kernel_compare(
    u: GroupElement, v: GroupElement, n_max: int, z: complex, tol: float = 1e-10
) -> KernelComparison:
    """Tabulate fock-sum, binomial-sum and product-series coefficients for ``n <= n_max``.

    Discrepancies are reported for every ``q``; equality is asserted (``passed``)
    only when ``q = 1``, where all three forms reduce to ``c^n``. The fock-sum
    column is omitted above degree 12.
    """
    if n_max > MAX_COMPARE_DEGREE:
        raise CapacityError(f"kernel comparison supports n_max <= {MAX_COMPARE_DEGREE}")
    q = kernel_q(u, v)
    c = zeta_overlap(v, u)
    if abs(z * c) >= 1:
        raise DomainError(f"|z c| must be < 1, got {abs(z * c):.6g}")
    report = KernelComparison(q=q, c=c, z=complex(z), asserted=q == 1)
    binomial_partial = 0j
    product_partial = 0j
    for n in range(n_max + 1):
        fock = kernel_hn_fock(u, v, n).value if n <= MAX_FOCK_KERNEL_DEGREE else None
        binom = kernel_hn_binomial(u, v, n).value
        prod_c = product_coefficient(n, q, c)
        binomial_partial += z**n * binom
        product_partial += z**n * prod_c
        report.rows.append(
            {
                "n": n,
                "fock_sum": fock,
                "binomial_sum": binom,
                "product_coeff": prod_c,
                "fock_vs_binomial": None if fock is None else abs(fock - binom),
                "fock_vs_product": None if fock is None else abs(fock - prod_c),
                "binomial_vs_product": abs(binom - prod_c),
                "binomial_series_partial": binomial_partial,
                "product_series_partial": product_partial,
            }
        )
    if abs(z) < 1:
        report.product_value = kernel_product(z, u, v).value
    if report.asserted:
        report.passed = not report.discrepancy_rows(tol)
    return report
