"""Classification: fingerprints, certificates, and derivation-eigenbasis reduction."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hqds3.algebra import change_of_basis, from_named, zero_algebra
from hqds3.catalog import (
    canonical_algebra,
    conjugated_canonical,
    random_symmetric_algebra,
)
from hqds3.classify import (
    certificate_residual,
    classify,
    classify_via_derivation,
    fingerprint,
    pairwise_noniso_witness,
    polish_certificate,
    reduce_with_derivation,
)

CERT_TOL = 1e-8
REDUCTION_TOL = 1e-12

TAGS = ("A1", "A2", "A3", "A4")

# frozen invariant bundles for the four canonical tables
EXPECTED_FINGERPRINTS = {
    "A1": (0, 2, False, "two-lines", "n/a", 1, True, False, False, False),
    "A2": (2, 1, True, "plane", "n/a", 5, True, True, True, True),
    "A3": (1, 1, True, "two-planes", "indefinite", 4, True, True, True, True),
    "A4": (1, 1, True, "one-line", "definite", 4, True, True, True, True),
}


def _as_tuple(fp):
    return (
        fp.dim_ann,
        fp.dim_sq,
        fp.sq_in_ann,
        fp.nilcone_kind,
        fp.induced_form,
        fp.dim_der,
        fp.solvable,
        fp.nilpotent,
        fp.associative,
        fp.power_associative,
    )


def test_canonical_fingerprints_frozen():
    for tag in TAGS:
        fp = fingerprint(canonical_algebra(tag))
        assert _as_tuple(fp) == EXPECTED_FINGERPRINTS[tag], tag


def test_fingerprints_pairwise_distinct():
    for i, a in enumerate(TAGS):
        for b in TAGS[i + 1 :]:
            name, va, vb = pairwise_noniso_witness(a, b)
            assert va != vb
            assert isinstance(name, str) and name


def test_exact_tables_short_circuit():
    for tag in TAGS:
        res = classify(canonical_algebra(tag))
        assert res.tag == tag
        assert res.residual == 0.0
        assert res.method == "exact-table"
        np.testing.assert_allclose(res.certificate, np.eye(3))


def test_null_algebra_both_routes():
    assert classify(zero_algebra()).tag == "NullAlgebra"
    assert classify_via_derivation(zero_algebra()).tag == "NullAlgebra"


def test_scaled_table_still_classifies():
    for tag in TAGS:
        alg = canonical_algebra(tag)
        scaled = change_of_basis(alg, np.eye(3) * 0.5)  # constants doubled
        res = classify(scaled)
        assert res.tag == tag
        assert res.residual < CERT_TOL
        assert certificate_residual(scaled, tag, res.certificate) < CERT_TOL


def test_conjugated_round_trip_small():
    rng = np.random.default_rng(5)
    for tag in TAGS:
        for _ in range(10):
            alg, _ = conjugated_canonical(tag, rng)
            res = classify(alg)
            assert res.tag == tag
            assert res.residual < CERT_TOL
            # the certificate is independently checkable
            got = change_of_basis(alg, res.certificate)
            assert np.max(np.abs(got.c - canonical_algebra(tag).c)) < CERT_TOL


def test_via_derivation_round_trip_small():
    rng = np.random.default_rng(6)
    for tag in TAGS:
        for _ in range(10):
            alg, _ = conjugated_canonical(tag, rng)
            res = classify_via_derivation(alg)
            assert res.tag == tag
            assert res.residual < CERT_TOL


def test_random_algebras_not_in_family():
    rng = np.random.default_rng(7)
    for _ in range(10):
        alg = random_symmetric_algebra(rng)
        res = classify(alg)
        assert res.tag == "NotInFamily"
        assert res.certificate is None
        assert res.fingerprint is not None
        via = classify_via_derivation(alg)
        assert via.tag == "NotInFamily"
        assert via.method == "no-ssnd-found"


def test_polish_recovers_perturbed_certificate():
    rng = np.random.default_rng(8)
    alg, m = conjugated_canonical("A3", rng)
    cert = np.linalg.inv(m)  # exact certificate: canonical basis in input coords
    noisy = cert * (1.0 + 1e-6) + 1e-7
    polished = polish_certificate(alg, "A3", noisy)
    assert certificate_residual(alg, "A3", polished) < 1e-11


# --- explicit reductions on the two implemented spectrum representatives ---


def test_reduction_scaling_case_p2_q3():
    # spectrum (1,-1,2) leaves e1*e1 = p e3 and e2*e3 = q e1; p=2, q=3
    alg = from_named(c=2.0, s=3.0)
    d = np.diag([1.0, -1.0, 2.0])
    res = reduce_with_derivation(alg, d)
    assert res.tag == "A1"
    assert res.method == "derivation-reduction"
    got = change_of_basis(alg, res.certificate)
    assert np.max(np.abs(got.c - canonical_algebra("A1").c)) < REDUCTION_TOL
    # the textbook scaling columns work exactly
    direct = change_of_basis(alg, np.diag([1.0 / 2.0, 1.0 / 3.0, 1.0 / 2.0]))
    assert np.max(np.abs(direct.c - canonical_algebra("A1").c)) < REDUCTION_TOL


def test_reduction_spectrum_1_1_2_degenerate_to_a2():
    # only p survives: a single square feeds e3
    alg = from_named(c=1.0)
    res = reduce_with_derivation(alg, np.diag([1.0, 1.0, 2.0]))
    assert res.tag == "A2"
    got = change_of_basis(alg, res.certificate)
    assert np.max(np.abs(got.c - canonical_algebra("A2").c)) < REDUCTION_TOL


def test_reduction_indefinite_form_lambda_minus_one():
    # p = r = 1, q = -1: the quotient form has signature (+, -)
    alg = from_named(c=1.0, f=-1.0, n=1.0)
    res = reduce_with_derivation(alg, np.diag([1.0, 1.0, 2.0]))
    assert res.tag == "A3"
    got = change_of_basis(alg, res.certificate)
    assert np.max(np.abs(got.c - canonical_algebra("A3").c)) < REDUCTION_TOL


def test_reduction_definite_form_lambda_five():
    # p = r = 1, q = 5: definite quotient form
    alg = from_named(c=1.0, f=5.0, n=1.0)
    res = reduce_with_derivation(alg, np.diag([1.0, 1.0, 2.0]))
    assert res.tag == "A4"
    got = change_of_basis(alg, res.certificate)
    assert np.max(np.abs(got.c - canonical_algebra("A4").c)) < REDUCTION_TOL


def test_reduction_case_five_double_change():
    # q = 0, p and r nonzero: two chained basis changes land on A3
    alg = from_named(c=1.0, n=1.0)
    res = reduce_with_derivation(alg, np.diag([1.0, 1.0, 2.0]))
    assert res.tag == "A3"
    got = change_of_basis(alg, res.certificate)
    assert np.max(np.abs(got.c - canonical_algebra("A3").c)) < REDUCTION_TOL


def test_reduction_case_six_signs():
    # r = 0: same-sign squares are definite, opposite signs indefinite
    plus = from_named(c=1.0, f=1.0)
    res = reduce_with_derivation(plus, np.diag([1.0, 1.0, 2.0]))
    assert res.tag == "A4"
    assert np.max(np.abs(change_of_basis(plus, res.certificate).c
                         - canonical_algebra("A4").c)) < REDUCTION_TOL
    minus = from_named(c=1.0, f=-1.0)
    res = reduce_with_derivation(minus, np.diag([1.0, 1.0, 2.0]))
    assert res.tag == "A3"
    assert np.max(np.abs(change_of_basis(minus, res.certificate).c
                         - canonical_algebra("A3").c)) < REDUCTION_TOL


def test_reduce_rejects_non_derivation():
    with pytest.raises(ValueError):
        reduce_with_derivation(canonical_algebra("A1"), np.diag([1.0, 1.0, 2.0]))


def test_reduce_rejects_defective_matrix():
    alg = from_named(c=1.0)
    d = np.diag([1.0, 1.0, 2.0])
    d[0, 1] = 1e-3  # not a derivation and not semisimple for this algebra
    with pytest.raises(ValueError):
        reduce_with_derivation(alg, d)


def test_reduction_unimplemented_spectrum_falls_back():
    # mask of (2, 3) allows b and n; spectrum normalizes off families 1 and 3
    alg = from_named(b=0.8, n=-0.5)
    d = np.diag([1.0, 2.0, 3.0])
    assert reduce_with_derivation(alg, d) is None
    res = classify_via_derivation(alg)
    assert res.tag in ("A1", "A2", "A3", "A4", "NotInFamily")
    assert res.method in ("derivation-fallback", "invariant-recipe")


@settings(deadline=None, max_examples=12)
@given(st.sampled_from(TAGS), st.integers(min_value=0, max_value=10**6))
def test_conjugation_never_changes_tag(tag, seed):
    rng = np.random.default_rng(seed)
    alg, _ = conjugated_canonical(tag, rng)
    assert classify(alg).tag == tag


@settings(deadline=None, max_examples=10)
@given(st.integers(min_value=0, max_value=10**6))
def test_paths_never_disagree_on_definite_tags(seed):
    rng = np.random.default_rng(seed)
    alg = random_symmetric_algebra(rng)
    a = classify(alg)
    b = classify_via_derivation(alg)
    if a.is_definite and b.is_definite:
        assert a.tag == b.tag
