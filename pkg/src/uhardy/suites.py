"""Named verification suites assembled from the exact and Monte Carlo checks.

Every check draws from its own stream, identified by a CRC of its label, so
adding or reordering checks never shifts the randomness of the others.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import comb
from typing import Callable

import numpy as np

from uhardy.errors import ValidationError
from uhardy.fock import (
    EVector,
    FockVector,
    basis_vector,
    coherent_state,
    symmetrize_permutations,
    symmetrize_polarization,
)
from uhardy.hardy import (
    BINOMIAL_SUM,
    FOCK_SUM,
    PRODUCT,
    HardyFunction,
    boundary_gap,
    extend,
    h2_norm,
    j_map,
    j_star,
    kernel_compare,
    kernel_hn_fock,
    radial_norm_sq,
    radial_transform,
    zeta_overlap,
)
from uhardy.montecarlo import (
    CheckResult,
    MCEstimate,
    exact_row,
    invariance_check,
    orthogonality_matrix,
    pushforward_check,
    reproducing_check,
    run_shards,
    schur_average,
    schur_expected,
    sphere_moment_check,
)
from uhardy.partitions import (
    BasisKey,
    canonicalize_key,
    enumerate_basis_keys,
    enumerate_partitions,
    fock_weight,
    hardy_weight,
    jstar_ratio,
    keys_up_to,
)
from uhardy.unitary import (
    GroupElement,
    RandomStream,
    UnitaryMatrix,
    embed,
    haar_batch,
    haar_sample,
    livsic_chain,
    livsic_project,
    unitarity_defect,
)

SUITES = (
    "exact",
    "haar",
    "schur",
    "pushforward",
    "orthogonality",
    "invariance",
    "kernels",
    "transforms",
    "all",
)

# p(n) for n = 0..12, the classical partition numbers
PARTITION_COUNTS = (1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77)


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 0
    samples: int = 200_000
    level: int = 6
    degree: int = 6
    dim: int = 4
    out_path: str | None = None
    format: str = "json"
    workers: int = 1

    def __post_init__(self) -> None:
        if self.samples <= 0:
            raise ValidationError("samples must be positive")
        if self.level < self.dim:
            raise ValidationError(f"level ({self.level}) must be >= dim ({self.dim})")
        if not 0 <= self.degree <= 12:
            raise ValidationError(f"degree must lie in 0..12, got {self.degree}")
        if self.dim < 1:
            raise ValidationError("dim must be positive")
        if self.format not in ("json", "csv"):
            raise ValidationError(f"format must be json or csv, got {self.format!r}")

    def as_dict(self) -> dict:
        return asdict(self)


def stream(config: SuiteConfig, label: str) -> RandomStream:
    return RandomStream(config.seed, zlib.crc32(label.encode()))


SuiteOutput = tuple[list[CheckResult], dict[str, list]]


# ---------------------------------------------------------------------------
# Random inputs
# ---------------------------------------------------------------------------


def random_complex(gen: np.random.Generator, size) -> np.ndarray:
    z = gen.standard_normal(np.shape(np.empty(size)) + (2,))
    return z[..., 0] + 1j * z[..., 1]


def random_fock(gen, keys, *, unit: bool = True) -> FockVector:
    c = random_complex(gen, len(keys))
    psi = FockVector(dict(zip(keys, c.tolist())))
    return psi * (1 / psi.norm()) if unit and psi.norm() else psi


def random_hardy(gen, keys, *, unit: bool = True) -> HardyFunction:
    c = random_complex(gen, len(keys))
    f = HardyFunction(dict(zip(keys, c.tolist())))
    return f * (1 / f.norm()) if unit and f.norm() else f


def random_ball_point(gen, d: int, max_radius: float) -> np.ndarray:
    u = random_complex(gen, d)
    return u / np.linalg.norm(u) * max_radius * gen.random() ** (1 / (2 * d))


# ---------------------------------------------------------------------------
# exact
# ---------------------------------------------------------------------------


def suite_exact(config: SuiteConfig) -> SuiteOutput:
    rows = []
    for n in range(13):
        parts = enumerate_partitions(n)
        bad = [p for p in parts if hardy_weight(p) * jstar_ratio(p) != fock_weight(p)]
        rows.append(
            exact_row(
                f"weights[n={n}]:hardy*jstar==fock",
                len(bad),
                0,
                "exact rational identity over all partitions of n",
            )
        )
        rows.append(
            exact_row(f"partitions[n={n}]:count", len(parts), PARTITION_COUNTS[n], "classical p(n)")
        )
    for n in range(7):
        for d in range(1, 5):
            keys = enumerate_basis_keys(n, d)
            distinct = len(set(keys)) == len(keys)
            rows.append(
                exact_row(
                    f"keys[n={n},d={d}]:count",
                    len(keys) if distinct else -1,
                    comb(n + d - 1, n),
                    "monomials of degree n in d variables, no duplicates",
                )
            )

    def lam(*p):
        return p

    weight_examples = [
        ("fock_weight(2,1)", fock_weight(lam(2, 1)), Fraction(1, 3)),
        ("fock_weight(1,1,1)", fock_weight(lam(1, 1, 1)), Fraction(1, 6)),
        ("hardy_weight(2,1)", hardy_weight(lam(2, 1)), Fraction(1, 12)),
        ("hardy_weight(1,1)", hardy_weight(lam(1, 1)), Fraction(1, 6)),
        ("jstar_ratio(2,1)", jstar_ratio(lam(2, 1)), Fraction(4)),
        ("jstar_ratio(1,1,1)", jstar_ratio(lam(1, 1, 1)), Fraction(10)),
    ]
    for name, got, want in weight_examples:
        rows.append(exact_row(f"example:{name}", float(got - want), 0, "hand evaluation"))

    swap = UnitaryMatrix([[0, 1], [1, 0]])
    gen = stream(config, "exact:livsic").generator
    u2 = haar_sample(2, gen)
    livsic_examples = [
        ("livsic(I2)", livsic_project(UnitaryMatrix.identity(2)), [[1]]),
        ("livsic(swap)", livsic_project(swap), [[-1]]),
        ("livsic(diag(1,-1))", livsic_project(UnitaryMatrix([[1, 0], [0, -1]])), [[1]]),
        ("chain(I4,2)", livsic_chain(UnitaryMatrix.identity(4), 2), np.eye(2)),
        ("chain(embed(u2,4),2)", livsic_chain(embed(u2, 4), 2), u2.entries),
    ]
    for name, got, want in livsic_examples:
        diff = float(np.max(np.abs(got.entries - np.asarray(want))))
        rows.append(exact_row(f"example:{name}", diff, 0, "hand evaluation of the block map"))
    return rows, {}


# ---------------------------------------------------------------------------
# haar
# ---------------------------------------------------------------------------


SPHERE_PARTITIONS = ((1,), (2,), (2, 1), (1, 1))


def suite_haar(config: SuiteConfig) -> SuiteOutput:
    rows = []
    for m in (2, 3, 4):
        for parts in SPHERE_PARTITIONS:
            key = BasisKey.from_partition(parts, range(1, len(parts) + 1))
            label = f"haar:sphere:{parts}:{m}"
            rows.append(
                sphere_moment_check(
                    key, m, config.samples, stream(config, label), rel_tol=0.02,
                    workers=config.workers,
                )
            )
    for m in (1, 2, 3, 5):
        us = haar_batch(m, 200, stream(config, f"haar:unitarity:{m}").generator)
        worst = max(unitarity_defect(u) for u in us)
        rows.append(exact_row(f"haar[m={m}]:unitarity_defect", worst, 0, "unitary by construction", abs_tol=1e-10))
    for m in (1, 3):
        rng = stream(config, f"haar:column:{m}")

        def sampler(count, gen, m=m):
            u = haar_batch(m, count, gen)
            return np.stack([np.abs(u[:, 0, 0]) ** 2, u[:, 0, 0]], axis=1)

        mom = run_shards(sampler, config.samples, rng, workers=config.workers)
        rows.append(
            CheckResult(
                f"haar[m={m}]:E|u11|^2",
                MCEstimate.from_moments(mom, 0, rng.seed, m),
                complex(1 / m),
                "claimed: sphere moment with lambda=(1)",
            )
        )
        rows.append(
            CheckResult(
                f"haar[m={m}]:E[u11]",
                MCEstimate.from_moments(mom, 1, rng.seed, m),
                0j,
                "trivial: phase symmetry",
            )
        )
    return rows, {}


# ---------------------------------------------------------------------------
# schur
# ---------------------------------------------------------------------------


def _schur_row(name, psi, phi, m, config, provenance) -> CheckResult:
    est = schur_average(psi, phi, m, config.samples, stream(config, name), workers=config.workers)
    return CheckResult(name, est, schur_expected(psi, phi, m), provenance)


def suite_schur(config: SuiteConfig) -> SuiteOutput:
    rows = []
    e1 = FockVector({canonicalize_key([(1, 1)]): 1})
    e2 = FockVector({canonicalize_key([(2, 1)]): 1})
    e12 = FockVector({canonicalize_key([(1, 1), (2, 1)]): 1})
    rows.append(_schur_row("schur:example:e1,e1,m=2", e1, e1, 2, config, "claimed: 1!1!/2!"))
    rows.append(_schur_row("schur:example:e1,e2,m=2", e1, e2, 2, config, "trivial: orthogonality"))
    rows.append(_schur_row("schur:example:e1e2,e1e2,m=2", e12, e12, 2, config, "derived: (1/3)(1/2)"))
    for m in (2, 3):
        for n in (1, 2, 3):
            keys = enumerate_basis_keys(n, m)
            gen = stream(config, f"schur:inputs:{m}:{n}").generator
            for j in range(5):
                psi = random_fock(gen, keys)
                phi = random_fock(gen, keys)
                rows.append(
                    _schur_row(
                        f"schur[m={m},n={n}]:pair{j}",
                        psi,
                        phi,
                        m,
                        config,
                        "claimed: n!(m-1)!/(n+m-1)! <psi|phi>",
                    )
                )
    return rows, {}


# ---------------------------------------------------------------------------
# pushforward, orthogonality, invariance
# ---------------------------------------------------------------------------


def suite_pushforward(config: SuiteConfig) -> SuiteOutput:
    rows = []
    for m in (2, 3, 4):
        rows.extend(
            pushforward_check(
                m, config.samples, stream(config, f"pushforward:{m}"), workers=config.workers
            )
        )
    return rows, {}


def suite_orthogonality(config: SuiteConfig) -> SuiteOutput:
    rows, diag = [], []
    for level in (4, 6):
        rep = orthogonality_matrix(
            3, 3, level, config.samples, stream(config, f"orthogonality:{level}"),
            workers=config.workers,
        )
        rows.extend(rep.offdiagonal)
        for c in rep.diagonal:
            row = c.to_row()
            row.update(c.extra)
            diag.append(row)
    return rows, {"orthogonality_diagonal": diag}


def suite_invariance(config: SuiteConfig) -> SuiteOutput:
    key = canonicalize_key([(1, 1)])
    i2 = UnitaryMatrix.identity(2)
    gen = stream(config, "invariance:g").generator
    g = (haar_sample(2, gen), haar_sample(2, gen))
    rows = [
        invariance_check(key, (i2, i2), 3, config.samples, stream(config, "invariance:identity"),
                         workers=config.workers),
        invariance_check(key, g, 3, config.samples, stream(config, "invariance:random"),
                         transform_rng=stream(config, "invariance:random:moved"),
                         workers=config.workers),
        invariance_check(key, None, 3, config.samples, stream(config, "invariance:phase"),
                         phase=True, transform_rng=stream(config, "invariance:phase:moved"),
                         workers=config.workers),
    ]
    key2 = canonicalize_key([(1, 2), (2, 1)])
    rows.append(
        invariance_check(key2, g, 5, config.samples, stream(config, "invariance:random:5"),
                         transform_rng=stream(config, "invariance:random:5:moved"),
                         workers=config.workers)
    )
    return rows, {}


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


def multinomial_kernel_rows(config: SuiteConfig, pairs: int = 100, level: int = 4, n_max: int = 6):
    """Max over Haar pairs of ``|fock-sum kernel - <zeta(v)|zeta(u)>^n|``, per degree."""
    gen = stream(config, "kernels:multinomial").generator
    us = haar_batch(level, 2 * pairs, gen)
    elems = [GroupElement(level, UnitaryMatrix(a, check=False)) for a in us]
    worst = [0.0] * (n_max + 1)
    for j in range(pairs):
        u, v = elems[2 * j], elems[2 * j + 1]
        c = zeta_overlap(v, u)
        for n in range(n_max + 1):
            worst[n] = max(worst[n], abs(kernel_hn_fock(u, v, n).value - c**n))
    return [
        exact_row(
            f"kernel[L={level},n={n}]:fock_sum==c^n",
            worst[n],
            0,
            f"multinomial theorem, max over {pairs} pairs",
            abs_tol=1e-10,
            seed=config.seed,
            level=level,
        )
        for n in range(n_max + 1)
    ]


def _comparison_record(rep) -> dict:
    return {
        "q": rep.q,
        "c": rep.c,
        "z": rep.z,
        "asserted": rep.asserted,
        "passed": rep.passed,
        "product_value": rep.product_value,
        "rows": rep.rows,
        "discrepancy_rows": rep.discrepancy_rows(),
    }


def suite_kernels(config: SuiteConfig) -> SuiteOutput:
    rows = multinomial_kernel_rows(config)
    compare = []
    for q in (1, 2, 3):
        gen = stream(config, f"kernels:compare:{q}").generator
        u = GroupElement.rho(haar_sample(q, gen))
        v = GroupElement.rho(haar_sample(q, gen))
        rep = kernel_compare(u, v, 8, 0.5)
        compare.append(_comparison_record(rep))
        if rep.asserted:
            worst = max(
                max(r[c] for c in ("fock_vs_binomial", "fock_vs_product", "binomial_vs_product"))
                for r in rep.rows
            )
            rows.append(
                exact_row("kernel_compare[q=1]:max_discrepancy", worst, 0,
                          "all forms reduce to c^n at q=1", abs_tol=1e-10, level=1)
            )
    gen = stream(config, "kernels:reproducing:v").generator
    v1 = GroupElement.rho(haar_sample(1, gen))
    v3 = GroupElement.rho(haar_sample(3, gen))
    for n in range(4):
        key = canonicalize_key([(1, n)]) if n else BasisKey(())
        for form in (FOCK_SUM, BINOMIAL_SUM, PRODUCT):
            rows.append(
                reproducing_check(v1, key, form, 1, config.samples,
                                  stream(config, f"kernels:reproducing:1:{n}:{form}"),
                                  workers=config.workers)
            )
    vac = BasisKey(())
    e1 = canonicalize_key([(1, 1)])
    for key in (vac, e1):
        for form in (FOCK_SUM, BINOMIAL_SUM, PRODUCT):
            rows.append(
                reproducing_check(v3, key, form, 3, config.samples,
                                  stream(config, f"kernels:reproducing:3:{key.degree}:{form}"),
                                  workers=config.workers)
            )
    return rows, {"kernel_compare": compare}


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


def coherent_rows(config: SuiteConfig, count: int = 20, N: int = 24, d: int = 3):
    """Exact-tail check of the truncated coherent-state norm.

    Real points are converted to exact rationals so both sides are compared
    without rounding; the truncation error equals the bound, so any slack in
    floating point would decide the outcome by rounding. Complex points are
    compared in floats against the finite geometric sum.
    """
    gen = stream(config, "transforms:coherent").generator
    rows = []
    for j in range(count):
        x = random_ball_point(gen, d, 0.8).real
        xq = EVector([Fraction(float(t)) for t in x])
        s = xq.norm_sq()
        if s >= Fraction(64, 100):
            xq = xq * Fraction(4, 5)
            s = xq.norm_sq()
        diff = abs(coherent_state(xq, N, d).norm_sq() - 1 / (1 - s))
        bound = s ** (N + 1) / (1 - s)
        excess = 0.0 if diff <= bound else max(float(diff - bound), math.ulp(0.0))
        rows.append(
            exact_row(
                f"coherent[N={N}]:real{j}:tail<=bound",
                excess,
                0,
                "claimed: |x|^(2(N+1))/(1-|x|^2), exact rationals",
            )
        )
    worst = 0.0
    for _ in range(count):
        x = EVector(random_ball_point(gen, d, 0.8).tolist())
        s = x.norm_sq()
        geometric = sum(s**n for n in range(N + 1))
        worst = max(worst, abs(coherent_state(x, N, d).norm_sq() - geometric) / geometric)
    rows.append(
        exact_row(f"coherent[N={N}]:complex:norm==geometric_sum", worst, 0,
                  "finite geometric sum, relative", abs_tol=1e-12)
    )
    return rows


def isomorphism_rows(config: SuiteConfig, degree: int = 8, dim: int = 6, count: int = 3):
    gen = stream(config, "transforms:isomorphism").generator
    keys = keys_up_to(degree, dim)
    iso = inv = ext = adj = 0.0
    for _ in range(count):
        psi = random_fock(gen, keys)
        f = random_hardy(gen, keys)
        jpsi = j_map(psi)
        iso = max(iso, abs(jpsi.norm() - psi.norm()))
        inv = max(inv, j_star(jpsi).max_abs_diff(psi), j_map(j_star(f)).max_abs_diff(f))
        ext = max(ext, abs(h2_norm(f) - f.norm()))
        adj = max(adj, abs(jpsi.inner(f) - j_star(f).inner(psi)))
    tag = f"[deg={degree},dim={dim}]"
    return [
        exact_row(f"isomorphism{tag}:isometry", iso, 0, "claimed: isometry", abs_tol=1e-12),
        exact_row(f"isomorphism{tag}:jstar_j==id", inv, 0, "inverse pair", abs_tol=1e-12),
        exact_row(f"isomorphism{tag}:extend_norm", ext, 0, "claimed: norm preserved", abs_tol=1e-12),
        exact_row(f"isomorphism{tag}:adjoint", adj, 0, "derived: finite-sum expansion", abs_tol=1e-12),
    ]


RADII = (0.5, 0.9, 0.99, 0.999)


def radial_rows(config: SuiteConfig, count: int = 20, degree: int = 6, dim: int = 3):
    gen = stream(config, "transforms:radial").generator
    keys = keys_up_to(degree, dim)
    ident = 0.0
    decreasing = small = bound_ok = 0
    for _ in range(count):
        f = random_hardy(gen, keys)
        gaps = [boundary_gap(f, r) for r in RADII]
        for r in RADII:
            ident = max(ident, abs(radial_transform(f, r).norm_sq() - radial_norm_sq(f, r)))
            bound_ok += radial_transform(f, r).norm_sq() <= (1 - r * r) ** -0.5 * f.norm()
        decreasing += all(a > b for a, b in zip(gaps, gaps[1:]))
        small += gaps[-1] < 1e-2 * f.norm()
    n_bound = count * len(RADII)
    return [
        exact_row("radial:norm_sq==sum r^2n|f_n|^2", ident, 0, "claimed: graded norm", abs_tol=1e-12),
        exact_row("radial:gap_strictly_decreasing", decreasing, count, "claimed: radial limit"),
        exact_row("radial:gap(0.999)<0.01|f|", small, count, "claimed: radial limit"),
        exact_row("radial:bound_unit_norm", bound_ok, n_bound, "claimed: bound, unit-norm inputs only"),
    ]


def polarization_rows(config: SuiteConfig, count: int = 20, d: int = 3):
    gen = stream(config, "transforms:polarization").generator
    rows = []
    for n in range(1, 5):
        worst = 0.0
        for _ in range(count):
            z = [EVector(random_complex(gen, d).tolist()) for _ in range(n)]
            worst = max(worst, symmetrize_polarization(z, d).max_abs_diff(symmetrize_permutations(z, d)))
        rows.append(
            exact_row(f"polarization[n={n}]:==permutation_average", worst, 0,
                      f"dense oracle, {count} inputs", abs_tol=1e-10)
        )
    return rows


def extend_rows() -> list[CheckResult]:
    f = HardyFunction({canonicalize_key([(1, 1)]): 1})
    x = EVector([0.3, 0])
    one = HardyFunction({BasisKey(()): 1})
    return [
        exact_row("example:extend(eps1)(0.3,0)", extend(f, x), 0.3, "derived", abs_tol=1e-15),
        exact_row("example:extend(C_0.5 eps1)(0.3,0)", extend(radial_transform(f, 0.5), x), 0.15,
                  "derived", abs_tol=1e-15),
        exact_row("example:extend(1)", extend(one, x), 1, "trivial", abs_tol=0),
    ]


def suite_transforms(config: SuiteConfig) -> SuiteOutput:
    rows = coherent_rows(config)
    rows += isomorphism_rows(config)
    rows += radial_rows(config)
    rows += polarization_rows(config)
    rows += extend_rows()
    e1 = basis_vector(1)
    rows.append(
        exact_row("example:coherent(0)", coherent_state(e1 * 0, 3, 2).norm_sq(), 1, "vacuum", abs_tol=0)
    )
    return rows, {}


RUNNERS: dict[str, Callable[[SuiteConfig], SuiteOutput]] = {
    "exact": suite_exact,
    "haar": suite_haar,
    "schur": suite_schur,
    "pushforward": suite_pushforward,
    "orthogonality": suite_orthogonality,
    "invariance": suite_invariance,
    "kernels": suite_kernels,
    "transforms": suite_transforms,
}


def run_suite(name: str, config: SuiteConfig) -> SuiteOutput:
    if name not in SUITES:
        raise ValidationError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    names = list(RUNNERS) if name == "all" else [name]
    rows: list[CheckResult] = []
    diagnostics: dict[str, list] = {}
    for n in names:
        r, d = RUNNERS[n](config)
        rows.extend(r)
        for k, v in d.items():
            diagnostics.setdefault(k, []).extend(v)
    return rows, diagnostics
