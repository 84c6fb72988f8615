from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uhardy import CapacityError, DomainError, ValidationError
from uhardy.fock import (
    EVector,
    FockVector,
    basis_vector,
    coherent_state,
    evaluate_hs,
    evaluate_hs_batch,
    fock_inner,
    monomial,
    symmetrize_permutations,
    symmetrize_polarization,
    tensor_power,
)
from uhardy.hardy import HardyFunction
from uhardy.partitions import VACUUM, canonicalize_key, enumerate_basis_keys, fock_weight, keys_up_to

K1 = canonicalize_key([(1, 1)])
K12 = canonicalize_key([(1, 1), (2, 1)])
K21 = canonicalize_key([(1, 2), (2, 1)])


def rand_vec(gen, d):
    return EVector((gen.standard_normal(d) + 1j * gen.standard_normal(d)).tolist())


def rand_fock(gen, keys):
    c = gen.standard_normal(len(keys)) + 1j * gen.standard_normal(len(keys))
    return FockVector(dict(zip(keys, c.tolist())))


def test_evector_basics():
    x = EVector([1, 0, 2j])
    assert x.dim == 3 and x[2] == 0 and x[3] == 2j
    assert x.norm_sq() == 5
    assert EVector({2: 1}) == basis_vector(2)
    assert x.inner(basis_vector(3)) == 2j
    with pytest.raises(ValidationError):
        EVector({0: 1})


def test_inner_examples(gen):
    v = FockVector({K21: 1})
    assert fock_inner(v, v) == Fraction(1, 3)
    assert fock_inner(FockVector({K1: 1}), FockVector({K12: 1})) == 0
    keys = keys_up_to(3, 3)
    psi, phi = rand_fock(gen, keys), rand_fock(gen, keys)
    a = complex(*gen.standard_normal(2))
    assert abs(fock_inner(psi * a, phi) - a * fock_inner(psi, phi)) < 1e-12
    assert abs(fock_inner(psi, phi * a) - a.conjugate() * fock_inner(psi, phi)) < 1e-12
    assert abs(fock_inner(phi, psi) - fock_inner(psi, phi).conjugate()) < 1e-12


def test_support_and_truncation():
    v = FockVector({K1: 1, K21: 0})
    assert list(v) == [K1]
    assert (v.max_degree, v.max_dim) == (1, 1)
    with pytest.raises(ValidationError):
        FockVector({K21: 1}, 2, 1)
    w = FockVector({K1: 1, K21: 2})
    assert w.component(3) == FockVector({K21: 2}, w.max_degree, w.max_dim)
    assert w.degrees() == [1, 3]


def test_monomial_examples():
    assert monomial(EVector([0.5, 0.5]), K12) == 0.25
    assert monomial(basis_vector(1), canonicalize_key([(1, 5)])) == 1
    assert monomial(basis_vector(2), K1) == 0
    assert monomial(EVector([3]), VACUUM) == 1


def dense_tensor_power(x, n):
    t = np.ones(())
    for _ in range(n):
        t = np.multiply.outer(t, x)
    return t


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_tensor_power_matches_dense_tensor(gen, n):
    d = 3
    x = rand_vec(gen, d)
    tp = tensor_power(x, n, d)
    t = dense_tensor_power(x.as_array(d), n)
    for key in enumerate_basis_keys(n, d):
        idx = tuple(i - 1 for i, e in key.pairs for _ in range(e))
        # a symmetric tensor basis vector has entry lambda!/n! at each multi-index of its type
        assert abs(complex(tp[key]) * float(fock_weight(key)) - t[idx]) < 1e-12
    assert abs(tp.norm_sq() - x.norm_sq() ** n) < 1e-10


def test_coherent_examples():
    vac = coherent_state(EVector(), 5, 2)
    assert dict(vac.items()) == {VACUUM: 1}
    x = EVector([Fraction(3, 5)])
    assert coherent_state(x, 10, 1).norm_sq() == sum(Fraction(9, 25) ** n for n in range(11))
    far = coherent_state(EVector([0.6, 0]), 50, 2).norm_sq()
    assert abs(far - 1.5625) < 1e-12
    with pytest.raises(DomainError):
        coherent_state(EVector([1.0]), 3, 1)


def test_coherent_norm_exact_geometric_sum():
    x = EVector([Fraction(1, 3), Fraction(-1, 4), Fraction(1, 5)])
    s = x.norm_sq()
    assert coherent_state(x, 12, 3).norm_sq() == sum(s**n for n in range(13))


def test_evaluate_hs_examples(gen):
    x = rand_vec(gen, 3)
    assert evaluate_hs(FockVector({K21: 1}), x) == monomial(x, K21)
    psi = rand_fock(gen, enumerate_basis_keys(3, 3))
    a = 0.7 - 0.2j
    assert abs(evaluate_hs(psi, x * a) - a**3 * evaluate_hs(psi, x)) < 1e-10
    # pairing with the coherent state realises the evaluation
    phi = rand_fock(gen, keys_up_to(3, 3))
    y = EVector([0.2, -0.1j, 0.3])
    assert abs(fock_inner(coherent_state(y, 3, 3), phi) - evaluate_hs(phi, y)) < 1e-12
    X = np.array([x.as_array(3), y.as_array(3)])
    batch = evaluate_hs_batch(phi, X)
    assert abs(batch[1] - evaluate_hs(phi, y)) < 1e-12
    assert abs(batch[0] - evaluate_hs(phi, x)) < 1e-10


def test_evaluate_hs_is_conjugate_linear_in_psi(gen):
    x = rand_vec(gen, 2)
    psi = rand_fock(gen, keys_up_to(2, 2))
    assert abs(evaluate_hs(psi * 1j, x) + 1j * evaluate_hs(psi, x)) < 1e-12


def test_symmetrize_examples(gen):
    z = rand_vec(gen, 3)
    assert symmetrize_polarization([z, z, z], 3).max_abs_diff(tensor_power(z, 3, 3)) < 1e-12
    s = symmetrize_polarization([basis_vector(1), basis_vector(2)], 2)
    assert dict(s.items()) == {K12: 1}
    assert s.norm_sq() == Fraction(1, 2)
    zs = [rand_vec(gen, 3) for _ in range(3)]
    ref = symmetrize_polarization(zs, 3)
    for perm in permutations(zs):
        assert symmetrize_polarization(list(perm), 3).max_abs_diff(ref) < 1e-12
    with pytest.raises(CapacityError):
        symmetrize_polarization([z] * 9, 3)


def test_e1_sym_e2_from_dense_average():
    # (e1 (x) e2 + e2 (x) e1)/2 has entries 1/2 = lambda!/n!: coefficient 1 at ((1,1),(1,2))
    s = symmetrize_permutations([basis_vector(1), basis_vector(2)], 2)
    assert dict(s.items()) == {K12: 1}
    assert abs(s.norm_sq() - 0.5) < 1e-15


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_polarization_matches_permutation_average(n, d, seed):
    g = np.random.default_rng(seed)
    zs = [rand_vec(g, d) for _ in range(n)]
    assert symmetrize_polarization(zs, d).max_abs_diff(symmetrize_permutations(zs, d)) < 1e-10


def test_json_round_trip(gen):
    psi = rand_fock(gen, keys_up_to(3, 3))
    back = FockVector.loads(psi.dumps())
    assert back.max_abs_diff(psi) == 0
    assert (back.max_degree, back.max_dim) == (psi.max_degree, psi.max_dim)
    rows = psi.to_json_obj()["coefficients"]
    assert all(r["lambda"] == sorted(r["lambda"], reverse=True) for r in rows)
    assert FockVector.from_json_obj(rows).max_abs_diff(psi) == 0


@pytest.mark.parametrize(
    "text,field",
    [
        ('{"space":"hardy","coefficients":[]}', "space"),
        ('{"space":"fock"}', "coefficients"),
        ('{"space":"fock","coefficients":[{"lambda":[1],"iota":[1],"re":1}]}', "coefficients[0].im"),
        ('{"space":"fock","coefficients":[{"lambda":[0],"iota":[1],"re":1,"im":0}]}', "coefficients[0].lambda"),
        ('{"space":"fock","coefficients":[{"lambda":[1,1],"iota":[2,2],"re":1,"im":0}]}', "coefficients[0].iota"),
        ('{"space":"fock","coefficients":[{"lambda":[1],"iota":[1],"re":"x","im":0}]}', "coefficients[0].re"),
        (
            '{"space":"fock","coefficients":[{"lambda":[1,1],"iota":[1,2],"re":1,"im":0},'
            '{"lambda":[1,1],"iota":[2,1],"re":1,"im":0}]}',
            "coefficients[1]",
        ),
    ],
)
def test_parse_errors_name_the_field(text, field):
    with pytest.raises(ValidationError, match=field.replace("[", r"\[").replace("]", r"\]")):
        FockVector.loads(text)


def test_cross_loading_is_rejected():
    text = HardyFunction({K1: 1}).dumps()
    with pytest.raises(ValidationError, match="space"):
        FockVector.loads(text)
    with pytest.raises(ValidationError, match="space"):
        HardyFunction.loads(FockVector({K1: 1}).dumps())
    with pytest.raises(ValidationError):
        FockVector.loads("{not json")
