"""Seeded Haar Monte Carlo: estimates, checks and the statistical experiments.

Samples are split into fixed-size shards. Shard ``j`` draws from
``rng.spawn(j)``, so the draws depend only on ``(seed, stream_id, shard
layout)``. Shard moments are merged with the pairwise Chan update in a fixed
tree order in extended precision, which makes every estimate bit-identical for
any worker count.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from uhardy.errors import CapacityError, ValidationError
from uhardy.fock import FockVector, evaluate_hs_batch, fock_inner
from uhardy.hardy import FOCK_SUM, KERNEL_FORMS, kernel_hn_batch
from uhardy.partitions import (
    BasisKey,
    hardy_weight,
    keys_up_to,
    schur_constant,
    sphere_moment,
)
from uhardy.unitary import (
    GroupElement,
    RandomStream,
    SINGULAR_TOL,
    UnitaryMatrix,
    epsilon_basis,
    epsilon_table,
    haar_batch,
    livsic_project_batch,
    right_action_batch,
    zeta,
)

log = logging.getLogger(__name__)

SHARD_SIZE = 8192
SIGMA_THRESHOLD = 4.0
# stderr floor for integrands that are constant up to rounding
NUMERICAL_FLOOR = 1e-12
MAX_GRAM_KEYS = 200


# ---------------------------------------------------------------------------
# Moment accumulation
# ---------------------------------------------------------------------------


@dataclass
class Moments:
    """Count, mean and sum of squared deviations for a vector of integrands."""

    n: int
    mean: np.ndarray  # clongdouble
    m2: np.ndarray  # longdouble, sum |x - mean|^2

    @classmethod
    def from_samples(cls, x: np.ndarray) -> Moments:
        x = np.asarray(x, dtype=complex)
        if x.ndim == 1:
            x = x[:, None]
        mean = x.mean(axis=0)
        dev = x - mean
        m2 = np.sum(dev.real**2 + dev.imag**2, axis=0)
        return cls(x.shape[0], mean.astype(np.clongdouble), m2.astype(np.longdouble))

    def merge(self, other: Moments) -> Moments:
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * (np.longdouble(other.n) / n)
        corr = (delta.real**2 + delta.imag**2) * (np.longdouble(self.n) * other.n / n)
        return Moments(n, mean, self.m2 + other.m2 + corr)

    def stderr(self) -> np.ndarray:
        if self.n < 2:
            return np.zeros(self.m2.shape)
        var = self.m2 / (self.n - 1)
        return np.sqrt(var.astype(float) / self.n)


def tree_merge(parts: Sequence[Moments]) -> Moments:
    """Pairwise merge in a fixed order (shape depends only on ``len(parts)``)."""
    level = list(parts)
    if not level:
        raise ValidationError("nothing to merge")
    while len(level) > 1:
        nxt = [level[i].merge(level[i + 1]) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def shard_sizes(n_samples: int, shard_size: int = SHARD_SIZE) -> list[int]:
    full, rest = divmod(n_samples, shard_size)
    return [shard_size] * full + ([rest] if rest else [])


def run_shards(
    sampler: Callable[[int, np.random.Generator], np.ndarray],
    n_samples: int,
    rng: RandomStream,
    *,
    shard_size: int = SHARD_SIZE,
    workers: int = 1,
) -> Moments:
    """Evaluate ``sampler(count, generator) -> (count, K)`` over shards and merge."""
    if n_samples <= 0:
        raise ValidationError("n_samples must be positive")
    sizes = shard_sizes(n_samples, shard_size)

    def one(j: int) -> Moments:
        return Moments.from_samples(sampler(sizes[j], rng.spawn(j).generator))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, range(len(sizes))))
    else:
        parts = [one(j) for j in range(len(sizes))]
    return tree_merge(parts)


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MCEstimate:
    """Sample mean with its standard error ``std / sqrt(n)``.

    For complex integrands ``stderr`` uses the total variance
    ``E|X - EX|^2 = Var(Re X) + Var(Im X)``.
    """

    mean: complex
    stderr: float
    n_samples: int
    seed: int
    level: int

    @classmethod
    def from_moments(cls, mom: Moments, j: int, seed: int, level: int) -> MCEstimate:
        return cls(complex(mom.mean[j]), float(mom.stderr()[j]), mom.n, seed, level)


def exact_row(
    name: str,
    value: complex,
    expected: complex,
    provenance: str,
    *,
    abs_tol: float = 0.0,
    seed: int = 0,
    level: int = 0,
    asserted: bool = True,
) -> CheckResult:
    """A deterministic (non-sampled) comparison in the common row format."""
    return CheckResult(
        name,
        MCEstimate(complex(value), 0.0, 1, seed, level),
        complex(expected),
        provenance,
        asserted=asserted,
        abs_tol=abs_tol,
    )


def two_sample(a: MCEstimate, b: MCEstimate) -> MCEstimate:
    """Difference ``a - b`` with pooled standard error ``sqrt(se_a^2 + se_b^2)``."""
    return MCEstimate(
        a.mean - b.mean,
        math.hypot(a.stderr, b.stderr),
        a.n_samples,
        a.seed,
        a.level,
    )


@dataclass(frozen=True)
class CheckResult:
    """One estimate compared with an expected value; ``passed`` derives from the fields.

    ``asserted=False`` marks experiment rows that are reported but never gate.
    ``rel_tol`` adds a relative-error requirement on top of the sigma test.
    ``abs_tol`` turns the row into a deterministic check: it passes iff
    ``|mean - expected| <= abs_tol`` and the sigma test is skipped.
    """

    name: str
    estimate: MCEstimate
    expected: complex
    provenance: str
    asserted: bool = True
    rel_tol: float | None = None
    abs_tol: float | None = None
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def error(self) -> float:
        return abs(self.estimate.mean - self.expected)

    @property
    def sigma_distance(self) -> float:
        floor = NUMERICAL_FLOOR * max(1.0, abs(self.expected))
        return self.error / max(self.estimate.stderr, floor)

    @property
    def relative_error(self) -> float:
        return self.error / abs(self.expected) if self.expected else math.inf

    @property
    def passed(self) -> bool:
        if self.abs_tol is not None:
            ok = self.error <= self.abs_tol
        else:
            ok = self.sigma_distance <= SIGMA_THRESHOLD
        if self.rel_tol is not None:
            ok = ok and self.error <= self.rel_tol * abs(self.expected)
        return ok

    def to_row(self) -> dict:
        sigma = self.sigma_distance
        return {
            "name": self.name,
            "expected": [self.expected.real, self.expected.imag],
            "expected_provenance": self.provenance,
            "mean_re": self.estimate.mean.real,
            "mean_im": self.estimate.mean.imag,
            "stderr": self.estimate.stderr,
            "sigma_distance": sigma if math.isfinite(sigma) else None,
            "n_samples": self.estimate.n_samples,
            "level": self.estimate.level,
            "seed": self.estimate.seed,
            "pass": self.passed,
            "asserted": self.asserted,
        }

    def line(self) -> str:
        status = ("PASS" if self.passed else "FAIL") if self.asserted else "info"
        return (
            f"[{status}] {self.name}: mean={self.estimate.mean:.6g} "
            f"expected={self.expected:.6g} se={self.estimate.stderr:.3g} "
            f"sigma={self.sigma_distance:.2f}"
        )


# ---------------------------------------------------------------------------
# Generic integration
# ---------------------------------------------------------------------------


def mc_integrate(
    integrand: Callable,
    level: int,
    n_samples: int,
    rng: RandomStream,
    *,
    vectorized: bool = False,
    shard_size: int = SHARD_SIZE,
    workers: int = 1,
) -> MCEstimate:
    """Haar average of a cylindrical integrand at sampling level ``level``.

    ``integrand`` takes a :class:`GroupElement`, or, with ``vectorized=True``,
    a ``(N, level, level)`` array of unitaries returning ``N`` values. The
    caller guarantees the integrand is determined at a level ``<= level``.
    """
    if n_samples <= 0:
        raise ValidationError("n_samples must be positive")

    def sampler(count: int, gen: np.random.Generator) -> np.ndarray:
        us = haar_batch(level, count, gen)
        if vectorized:
            return np.asarray(integrand(us), dtype=complex)
        return np.array(
            [integrand(GroupElement(level, UnitaryMatrix(a, check=False))) for a in us],
            dtype=complex,
        )

    mom = run_shards(sampler, n_samples, rng, shard_size=shard_size, workers=workers)
    return MCEstimate.from_moments(mom, 0, rng.seed, level)


def _first_columns(level: int, count: int, gen: np.random.Generator) -> np.ndarray:
    return haar_batch(level, count, gen)[:, :, 0]


def sphere_moment_check(
    key: BasisKey,
    level: int,
    n_samples: int,
    rng: RandomStream,
    *,
    rel_tol: float | None = None,
    workers: int = 1,
) -> CheckResult:
    """``E|eps_key|^2`` on Haar U(level) against ``lambda!(level-1)!/(n+level-1)!``."""
    if key.max_index > level:
        raise ValidationError(f"key index {key.max_index} exceeds level {level}")

    def sampler(count, gen):
        e = epsilon_table(_first_columns(level, count, gen), [key])[:, 0]
        return (e * e.conj()).real

    mom = run_shards(sampler, n_samples, rng, workers=workers)
    expected = float(sphere_moment(key.partition, level))
    est = MCEstimate.from_moments(mom, 0, rng.seed, level)
    lam = ",".join(map(str, key.partition.parts))
    return CheckResult(
        f"sphere_moment[lambda=({lam}),m={level}]",
        est,
        complex(expected),
        "claimed: lambda!(m-1)!/(n+m-1)!",
        rel_tol=rel_tol,
    )


# ---------------------------------------------------------------------------
# Schur averaging
# ---------------------------------------------------------------------------


def _homogeneous_degree(psi: FockVector) -> int:
    degs = psi.degrees()
    if len(degs) > 1:
        raise ValidationError(f"input is not homogeneous (degrees {degs})")
    return degs[0] if degs else 0


def schur_average(
    psi: FockVector,
    phi: FockVector,
    m: int,
    n_samples: int,
    rng: RandomStream,
    *,
    workers: int = 1,
) -> MCEstimate:
    """Estimate ``E_v[phi*(v e_1) conj(psi*(v e_1))]`` over Haar ``v`` in U(m).

    The exact value is ``n!(m-1)!/(n+m-1)! <psi|phi>`` (see :func:`schur_expected`).
    """
    n_psi, n_phi = _homogeneous_degree(psi), _homogeneous_degree(phi)
    if psi and phi and n_psi != n_phi:
        raise ValidationError(f"degrees differ: {n_psi} vs {n_phi}")
    for vec in (psi, phi):
        if any(k.max_index > m for k in vec):
            raise ValidationError(f"support exceeds the indices 1..{m}")

    def sampler(count, gen):
        x = _first_columns(m, count, gen)
        return evaluate_hs_batch(phi, x) * evaluate_hs_batch(psi, x).conj()

    mom = run_shards(sampler, n_samples, rng, workers=workers)
    return MCEstimate.from_moments(mom, 0, rng.seed, m)


def schur_expected(psi: FockVector, phi: FockVector, m: int) -> complex:
    n = _homogeneous_degree(psi) if psi else _homogeneous_degree(phi)
    return complex(float(schur_constant(n, m)) * complex(fock_inner(psi, phi)))


# ---------------------------------------------------------------------------
# Livsic pushforward
# ---------------------------------------------------------------------------


def unitary_moment_panel(u: np.ndarray) -> tuple[list[str], np.ndarray]:
    """Columns ``|u11|^2, |u11|^4, u11 conj(u21), |tr u|^2`` for a stack of unitaries."""
    k = u.shape[-1]
    u11 = u[:, 0, 0]
    a2 = (u11 * u11.conj()).real
    names = ["E|u11|^2", "E|u11|^4"]
    cols = [a2, a2**2]
    if k >= 2:
        names.append("E[u11 conj(u21)]")
        cols.append(u11 * u[:, 1, 0].conj())
    tr = np.trace(u, axis1=1, axis2=2)
    names.append("E|tr|^2")
    cols.append((tr * tr.conj()).real)
    return names, np.stack([np.asarray(c, dtype=complex) for c in cols], axis=1)


def haar_panel_exact(k: int) -> list[complex]:
    """Exact Haar values of :func:`unitary_moment_panel` on U(k)."""
    vals = [1 / k, 2 / (k * (k + 1))]
    if k >= 2:
        vals.append(0.0)
    vals.append(1.0)
    return [complex(v) for v in vals]


def pushforward_check(
    m: int, n_samples: int, rng: RandomStream, *, workers: int = 1
) -> list[CheckResult]:
    """Compare Livsic-projected Haar U(m) draws with direct Haar U(m-1) draws.

    For every panel moment three rows are produced: projected vs exact,
    direct vs exact, and the two-sample difference projected - direct.
    """
    if not 2 <= m <= 16:
        raise CapacityError("pushforward check supports 2 <= m <= 16")
    k = m - 1
    names, _ = unitary_moment_panel(np.eye(k, dtype=complex)[None])
    width = len(names)
    singular = [0]

    def sampler(count, gen):
        full = haar_batch(m, count, gen)
        t = full[:, m - 1, m - 1]
        singular[0] += int(np.sum(np.abs(1 + t) <= SINGULAR_TOL))
        proj = livsic_project_batch(full)
        direct = haar_batch(k, count, gen)
        return np.concatenate(
            [unitary_moment_panel(proj)[1], unitary_moment_panel(direct)[1]], axis=1
        )

    mom = run_shards(sampler, n_samples, rng, workers=workers)
    if singular[0]:
        log.info("pushforward m=%d: %d near-singular draws took the t=-1 branch", m, singular[0])
    exact = haar_panel_exact(k)
    out = []
    for j, name in enumerate(names):
        proj = MCEstimate.from_moments(mom, j, rng.seed, m)
        direct = MCEstimate.from_moments(mom, width + j, rng.seed, k)
        tag = f"pushforward[m={m}]{name}"
        out.append(CheckResult(f"{tag}:projected", proj, exact[j], "exact Haar moment on U(m-1)"))
        out.append(CheckResult(f"{tag}:direct", direct, exact[j], "exact Haar moment on U(m-1)"))
        out.append(
            CheckResult(
                f"{tag}:projected-direct",
                two_sample(proj, direct),
                0j,
                "claimed: pushforward of Haar is Haar (two-sample)",
            )
        )
    return out


# ---------------------------------------------------------------------------
# Orthogonality
# ---------------------------------------------------------------------------


@dataclass
class OrthogonalityReport:
    keys: list[BasisKey]
    level: int
    gram: np.ndarray
    stderr: np.ndarray
    offdiagonal: list[CheckResult]
    diagonal: list[CheckResult]

    def checks(self) -> list[CheckResult]:
        return self.offdiagonal + self.diagonal


def _key_label(key: BasisKey) -> str:
    pairs = sorted(key.pairs, key=lambda p: (-p[1], p[0]))
    lam = ",".join(str(e) for _, e in pairs)
    iota = ",".join(str(i) for i, _ in pairs)
    return f"(({lam}),({iota}))"


def orthogonality_matrix(
    n_max: int,
    d: int,
    level: int,
    n_samples: int,
    rng: RandomStream,
    *,
    workers: int = 1,
) -> OrthogonalityReport:
    """Monte Carlo Gram matrix ``E[eps_k conj(eps_k')]`` for all keys ``|lambda| <= n_max``.

    Off-diagonal entries are asserted to vanish at 4 sigma. Diagonal entries
    are experiment rows compared with the sphere moment at ``level``; the
    declared model norm is reported next to it and ``extra["matches"]`` tags
    which candidate, if either, the estimate agrees with.
    """
    if level < d:
        raise ValidationError(f"level {level} must be >= d = {d}")
    keys = keys_up_to(n_max, d)
    K = len(keys)
    if K > MAX_GRAM_KEYS:
        raise CapacityError(f"{K} keys exceed the Gram matrix bound {MAX_GRAM_KEYS}")
    shard = max(256, min(SHARD_SIZE, (1 << 22) // (K * K)))

    def sampler(count, gen):
        e = epsilon_table(_first_columns(level, count, gen), keys)
        return (e[:, :, None] * e.conj()[:, None, :]).reshape(count, K * K)

    mom = run_shards(sampler, n_samples, rng, shard_size=shard, workers=workers)
    gram = np.asarray(mom.mean, dtype=complex).reshape(K, K)
    se = mom.stderr().reshape(K, K)
    off, diag = [], []
    for a in range(K):
        for b in range(a, K):
            est = MCEstimate(complex(gram[a, b]), float(se[a, b]), mom.n, rng.seed, level)
            if a != b:
                off.append(
                    CheckResult(
                        f"gram[L={level}]{_key_label(keys[a])}x{_key_label(keys[b])}",
                        est,
                        0j,
                        "claimed: orthogonality of the monomial system",
                    )
                )
                continue
            key = keys[a]
            norm_value = float(hardy_weight(key))
            level_value = float(sphere_moment(key.partition, level))
            tol = SIGMA_THRESHOLD * max(est.stderr, NUMERICAL_FLOOR)
            hits = [
                label
                for label, val in (("norm", norm_value), ("level", level_value))
                if abs(est.mean - val) <= tol
            ]
            matches = "both" if len(hits) == 2 else (hits[0] if hits else "neither")
            diag.append(
                CheckResult(
                    f"gram_diag[L={level}]{_key_label(key)}",
                    est,
                    complex(level_value),
                    "derived: sphere moment at sampling level",
                    asserted=False,
                    extra={
                        "key": _key_label(key),
                        "norm_value": norm_value,
                        "level_value": level_value,
                        "matches": matches,
                    },
                )
            )
    return OrthogonalityReport(keys, level, gram, se, off, diag)


# ---------------------------------------------------------------------------
# Invariance
# ---------------------------------------------------------------------------


def invariance_check(
    key: BasisKey,
    g: tuple[UnitaryMatrix, UnitaryMatrix] | None,
    level: int,
    n_samples: int,
    rng: RandomStream,
    *,
    phase: bool = False,
    transform_rng: RandomStream | None = None,
    workers: int = 1,
) -> CheckResult:
    """Compare ``E|eps_key|^2`` before and after the right action of ``g = (v, w)``.

    With ``phase=True`` the transformation is ``u -> exp(i theta) u`` with
    ``theta`` uniform on ``(-pi, pi]`` instead. By default both estimates use
    the same draws (so ``g = (I, I)`` gives a difference of exactly 0); pass
    ``transform_rng`` to draw the transformed sample from an independent stream.
    The difference is judged with the pooled standard error.
    """
    if g is not None:
        v, w = g
        if v.dim != w.dim:
            raise ValidationError("g = (v, w) needs equal sizes")
        if v.dim > level:
            raise ValidationError(f"g has size {v.dim} > level {level}")
    if key.max_index > level:
        raise ValidationError(f"key index {key.max_index} exceeds level {level}")

    def transform(us, gen):
        if phase:
            theta = -np.pi + 2 * np.pi * (1.0 - gen.random(us.shape[0]))
            return us * np.exp(1j * theta)[:, None, None]
        if g is None:
            return us
        return right_action_batch(us, g[0].entries, g[1].entries)

    def moment(us):
        e = epsilon_table(us[:, :, 0], [key])[:, 0]
        return (e * e.conj()).real

    if transform_rng is None:

        def sampler(count, gen):
            us = haar_batch(level, count, gen)
            return np.stack([moment(us), moment(transform(us, gen))], axis=1)

        mom = run_shards(sampler, n_samples, rng, workers=workers)
        raw = MCEstimate.from_moments(mom, 0, rng.seed, level)
        moved = MCEstimate.from_moments(mom, 1, rng.seed, level)
    else:
        raw_m = run_shards(
            lambda c, gen: moment(haar_batch(level, c, gen)), n_samples, rng, workers=workers
        )
        moved_m = run_shards(
            lambda c, gen: moment(transform(haar_batch(level, c, gen), gen)),
            n_samples,
            transform_rng,
            workers=workers,
        )
        raw = MCEstimate.from_moments(raw_m, 0, rng.seed, level)
        moved = MCEstimate.from_moments(moved_m, 0, transform_rng.seed, level)
    variant = "phase" if phase else "right_action"
    return CheckResult(
        f"invariance[{variant},L={level}]{_key_label(key)}",
        two_sample(moved, raw),
        0j,
        "claimed: invariance of the measure (two-sample)",
        extra={"raw": raw.mean, "transformed": moved.mean},
    )


# ---------------------------------------------------------------------------
# Reproducing kernels
# ---------------------------------------------------------------------------


def reproducing_check(
    v: GroupElement,
    key: BasisKey,
    form: str,
    level: int,
    n_samples: int,
    rng: RandomStream,
    *,
    workers: int = 1,
) -> CheckResult:
    """Estimate ``int h_n(v, u) eps_key(u) dchi(u)`` with the chosen kernel form.

    The row is asserted against ``eps_key(v)`` only where the reproducing
    property is established independently: sampling level 1 (circle
    integrals) and the vacuum key with the multinomial kernel. Everything
    else is an experiment row.
    """
    if form not in KERNEL_FORMS:
        raise ValidationError(f"unknown kernel form {form!r}")
    if key.max_index > level:
        raise ValidationError(f"key index {key.max_index} exceeds level {level}")
    n = key.degree
    q = min(v.level, level)
    zv = zeta(v)

    def sampler(count, gen):
        cols = _first_columns(level, count, gen)
        h = kernel_hn_batch(form, zv, cols, n, q)
        return h * epsilon_table(cols, [key])[:, 0]

    mom = run_shards(sampler, n_samples, rng, workers=workers)
    est = MCEstimate.from_moments(mom, 0, rng.seed, level)
    target = epsilon_basis(v, key)
    asserted = level == 1 or (n == 0 and form == FOCK_SUM)
    return CheckResult(
        f"reproducing[{form},L={level},q={q}]{_key_label(key)}",
        est,
        target,
        "claimed: reproducing property" if asserted else "experiment: reproducing property",
        asserted=asserted,
        extra={"q": q, "form": form},
    )
