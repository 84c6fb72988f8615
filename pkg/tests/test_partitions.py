from fractions import Fraction
from itertools import product
from math import comb, factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from uhardy import CapacityError, ValidationError
from uhardy.partitions import (
    EMPTY,
    VACUUM,
    BasisKey,
    Partition,
    canonicalize_key,
    count_keys,
    enumerate_basis_keys,
    enumerate_partitions,
    fock_weight,
    hardy_weight,
    jstar_ratio,
    keys_up_to,
    partition_factorial,
    schur_constant,
    sphere_moment,
)


def brute_partitions(n):
    """Every nonincreasing composition of n, found by filtering all compositions."""
    out = set()
    for cuts in product((0, 1), repeat=max(n - 1, 0)):
        parts, run = [], 1
        for c in cuts:
            if c:
                parts.append(run)
                run = 1
            else:
                run += 1
        if n:
            parts.append(run)
        out.add(tuple(sorted(parts, reverse=True)))
    return out


def brute_monomials(n, d):
    """Exponent vectors of degree n over d variables, via multisets of indices."""
    seen = set()
    for idx in product(range(1, d + 1), repeat=n):
        seen.add(tuple(sorted(idx)))
    keys = set()
    for multiset in seen:
        counts = {}
        for i in multiset:
            counts[i] = counts.get(i, 0) + 1
        keys.add(tuple(sorted(counts.items())))
    return keys


def test_partition_validation():
    assert Partition((3, 1)).weight == 4
    assert Partition((3, 1)).length == 2
    assert EMPTY.weight == 0 and EMPTY.length == 0
    with pytest.raises(ValidationError):
        Partition((1, 2))
    with pytest.raises(ValidationError):
        Partition((2, 0))


@pytest.mark.parametrize("n", range(0, 11))
def test_enumerate_partitions_matches_brute_force(n):
    got = enumerate_partitions(n)
    assert len(got) == len(set(got))
    assert {p.parts for p in got} == brute_partitions(n)
    assert [p.parts for p in got] == sorted((p.parts for p in got), reverse=True)


def test_partition_examples():
    assert enumerate_partitions(0) == [EMPTY]
    assert [p.parts for p in enumerate_partitions(4)] == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    assert len(enumerate_partitions(8)) == 22


def test_partition_errors():
    with pytest.raises(ValidationError):
        enumerate_partitions(-1)
    with pytest.raises(CapacityError):
        enumerate_partitions(61)


@pytest.mark.parametrize("n,d", [(0, 1), (1, 3), (2, 2), (3, 3), (4, 2), (3, 4), (5, 3)])
def test_basis_keys_match_brute_force(n, d):
    keys = enumerate_basis_keys(n, d)
    assert len(keys) == len(set(keys)) == count_keys(n, d) == comb(n + d - 1, n)
    assert {k.pairs for k in keys} == brute_monomials(n, d)
    assert all(k.degree == n and k.max_index <= d for k in keys)


def test_basis_key_examples():
    def key(lam, iota):
        return BasisKey.from_partition(lam, iota)

    assert set(enumerate_basis_keys(1, 3)) == {key((1,), (1,)), key((1,), (2,)), key((1,), (3,))}
    assert set(enumerate_basis_keys(2, 2)) == {key((2,), (1,)), key((2,), (2,)), key((1, 1), (1, 2))}
    assert key((1, 1), (2, 1)) == key((1, 1), (1, 2))
    assert enumerate_basis_keys(0, 5) == [VACUUM]


def test_enumeration_caps():
    with pytest.raises(CapacityError):
        enumerate_basis_keys(21, 2)
    with pytest.raises(CapacityError):
        enumerate_basis_keys(2, 33)
    with pytest.raises(ValidationError):
        enumerate_basis_keys(1, 0)


def test_keys_up_to_grouped_by_degree():
    keys = keys_up_to(3, 2)
    assert [k.degree for k in keys] == sorted(k.degree for k in keys)
    assert len(keys) == sum(comb(n + 1, n) for n in range(4))


def test_canonicalize():
    k = canonicalize_key([(3, 1), (1, 2)])
    assert k.indices == (1, 3)
    assert k.exponents == (2, 1)
    assert k.partition == Partition((2, 1))
    assert canonicalize_key([(2, 1), (1, 1)]) == canonicalize_key([(1, 1), (2, 1)])
    with pytest.raises(ValidationError):
        canonicalize_key([(1, 1), (1, 2)])
    with pytest.raises(ValidationError):
        BasisKey(((2, 1), (1, 1)))
    with pytest.raises(ValidationError):
        BasisKey.from_partition((2, 1), (1,))


@given(st.lists(st.tuples(st.integers(1, 20), st.integers(1, 5)), max_size=6, unique_by=lambda p: p[0]))
def test_canonical_form_is_permutation_invariant(pairs):
    assert canonicalize_key(pairs) == canonicalize_key(list(reversed(pairs)))
    assert canonicalize_key(pairs).degree == sum(e for _, e in pairs)


def test_partition_factorial_examples():
    assert partition_factorial((2, 1)) == 2
    assert partition_factorial((3, 2, 1)) == 12
    assert partition_factorial(EMPTY) == 1


def test_weight_examples():
    assert fock_weight((2, 1)) == Fraction(1, 3)
    assert fock_weight((1, 1, 1)) == Fraction(1, 6)
    assert hardy_weight((2, 1)) == Fraction(1, 12)
    assert hardy_weight((1, 1)) == Fraction(1, 6)
    assert jstar_ratio((2, 1)) == 4
    assert jstar_ratio((1, 1, 1)) == 10
    for n in range(1, 9):
        assert fock_weight((n,)) == hardy_weight((n,)) == jstar_ratio((n,)) == 1
    assert hardy_weight(EMPTY) == fock_weight(EMPTY) == 1


def test_weights_accept_keys():
    k = canonicalize_key([(4, 1), (2, 2)])
    assert fock_weight(k) == fock_weight((2, 1))
    assert hardy_weight(k) == hardy_weight(Partition((2, 1)))


partitions_up_to_12 = st.integers(0, 12).flatmap(lambda n: st.sampled_from(enumerate_partitions(n)))


@given(partitions_up_to_12)
def test_weight_identity_and_closed_forms(lam):
    n, m = lam.weight, lam.length
    lam_fact = 1
    for p in lam:
        lam_fact *= factorial(p)
    assert hardy_weight(lam) * jstar_ratio(lam) == fock_weight(lam)
    assert fock_weight(lam) == Fraction(lam_fact, factorial(n))
    if m:
        assert hardy_weight(lam) == Fraction(factorial(m - 1) * lam_fact, factorial(m - 1 + n))


def test_sphere_moment_and_schur_constant():
    assert sphere_moment((1,), 2) == Fraction(1, 2)
    assert sphere_moment((2, 1), 3) == Fraction(1, 30)
    assert sphere_moment((1,), 4) == Fraction(1, 4)
    assert schur_constant(2, 2) == Fraction(1, 3)
    # the sphere moment of a single row equals the Schur scale divided by n!/lambda!
    for n in range(1, 6):
        for M in range(1, 5):
            assert sphere_moment((n,), M) == schur_constant(n, M)
    with pytest.raises(ValidationError):
        sphere_moment((1, 1, 1), 2)
