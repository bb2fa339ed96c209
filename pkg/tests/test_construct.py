import json
import warnings

import numpy as np
import pytest

from hadforge.construct import (
    BlockAssignment,
    MonomializationError,
    MUPreconditionError,
    affine_member,
    dita_build,
    dita_parameter_count,
    exact_product_equals,
    factor_b1_b2,
    hosoya_suzuki_build,
    product_basis_view,
    sqrt_as_cyclotomic,
    theorem1_build,
    trivial_affine_family,
    trivial_family,
)
from hadforge.cyclotomic import CyclotomicInteger
from hadforge.matrices import (
    ComplexMatrix,
    ExponentMatrix,
    as_complex,
    butson_min_root,
    dephase,
    is_unitary,
    to_complex,
)
from hadforge.mub import complete_mub_set, fourier


def asn(p, q, K, L):
    return BlockAssignment.from_labels(p, q, K, L)


def test_sqrt_as_cyclotomic_squares_to_q():
    for q in (2, 3, 5, 7, 11, 13):
        z = sqrt_as_cyclotomic(q)
        sq = z * z
        assert (sq - CyclotomicInteger.from_integer(q, sq.r)).is_zero()
        assert abs(z.to_complex() - q**0.5) < 1e-9


class TestBlockAssignment:
    def test_from_labels_roundtrip(self):
        a = asn(3, 5, ("I", "H1", "H2"), ("F", "H3", "H4"))
        assert BlockAssignment.from_json(a.to_json()).K_labels == a.K_labels
        assert a.d == 15

    def test_shared_hadamard_label_rejected(self):
        a = asn(2, 5, ("I", "H2"), ("F", "H2"))
        with pytest.raises(MUPreconditionError) as ei:
            a.validate()
        assert ei.value.pair == (1, 1)

    def test_shared_label_also_caught_without_labels(self):
        s = complete_mub_set(5)
        a = BlockAssignment(2, 5, (s["I"], s["H2"]), (s["F"], s["H2"]))
        with pytest.raises(MUPreconditionError):
            a.validate()

    def test_non_mu_float_pair_rejected(self):
        eye = ComplexMatrix(3, np.eye(3, dtype=complex))
        a = BlockAssignment(2, 3, (complete_mub_set(3)["I"], eye),
                            (complete_mub_set(3)["F"], eye))
        with pytest.raises(MUPreconditionError):
            a.validate()


class TestTheorem1Build:
    def test_exact_equals_float(self):
        a = asn(2, 5, ("I", "H1"), ("F", "H2"))
        He = theorem1_build(a, mode="exact")
        Hf = theorem1_build(a, mode="float")
        assert isinstance(He, ExponentMatrix)
        assert np.max(np.abs(to_complex(He).entries - Hf.entries)) < 1e-12

    def test_auto_picks_exact_for_label_input(self):
        H = theorem1_build(asn(2, 3, ("I", "H1"), ("F", "H2")))
        assert isinstance(H, ExponentMatrix)

    def test_exact_mode_refuses_float_blocks(self):
        s = complete_mub_set(3)
        third = to_complex(s["H1"])
        a = BlockAssignment(2, 3, (s["I"], third), (s["F"], s["H2"]))
        with pytest.raises(ValueError):
            theorem1_build(a, mode="exact")

    def test_auto_degrades_with_warning(self):
        s = complete_mub_set(3)
        a = BlockAssignment(2, 3, (s["I"], to_complex(s["H1"])), (s["F"], s["H2"]))
        with warnings.catch_warnings(record=True) as w:
            warnings.simplefilter("always")
            H = theorem1_build(a)
        assert isinstance(H, ComplexMatrix)
        assert any("float" in str(x.message) for x in w)

    def test_unitary_across_orders(self):
        for p, q, K, L in [
            (2, 3, ("I", "H1"), ("F", "H2")),
            (3, 3, ("I", "I", "H1"), ("F", "F", "H2")),
            (2, 7, ("I", "H3"), ("F", "H5")),
        ]:
            assert is_unitary(theorem1_build(asn(p, q, K, L), mode="exact"))

    def test_product_certificate(self):
        a = asn(3, 3, ("I", "I", "H1"), ("F", "F", "H2"))
        H = theorem1_build(a, mode="exact")
        assert exact_product_equals(a, H)
        # and it really distinguishes: a different assignment's matrix fails
        other = theorem1_build(asn(3, 3, ("I", "I", "H2"), ("F", "F", "H1")), mode="exact")
        assert not exact_product_equals(a, other)


def test_factorization_reproduces_product():
    a = asn(2, 5, ("I", "H1"), ("F", "H3"))
    pair = factor_b1_b2(a)
    H = theorem1_build(a, mode="float")
    prod = pair.b1.entries.conj().T @ pair.b2.entries
    assert np.max(np.abs(prod - H.entries)) < 1e-12
    for U in (pair.b1.entries, pair.b2.entries):
        assert np.max(np.abs(U.conj().T @ U - np.eye(10))) < 1e-12


def test_product_basis_views_are_the_factor_columns():
    a = asn(2, 3, ("I", "H1"), ("F", "H2"))
    pair = factor_b1_b2(a)
    v1, v2 = product_basis_view(a)
    assert np.allclose(v1.assemble().entries, pair.b1.entries)
    assert np.allclose(v2.assemble().entries, pair.b2.entries)
    # cross-Gram is flat: the two product bases are themselves MU
    g = np.abs(v1.assemble().entries.conj().T @ v2.assemble().entries) ** 2
    assert np.max(np.abs(g - 1 / 6)) < 1e-12


class TestFamilies:
    def test_trivial_family_parameter_count(self):
        fam = trivial_affine_family(3, 5)
        assert fam.n_params == 8
        assert is_unitary(fam.base)

    def test_member_at_zero_is_base(self):
        fam = trivial_affine_family(2, 3)
        m = affine_member(fam, [0.0] * fam.n_params)
        base = as_complex(fam.base)
        assert np.allclose(m.entries, base.entries)

    def test_members_stay_unitary(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            H = trivial_family(2, 5, rng.uniform(0, 2 * np.pi, size=4))
            assert is_unitary(H)

    def test_param_shape_checked(self):
        with pytest.raises(ValueError):
            trivial_family(2, 3, [0.1, 0.2, 0.3])


class TestOtherConstructions:
    def test_dita_matches_trivial_at_zero(self):
        H = dita_build(fourier(2), [fourier(3), fourier(3)], np.zeros((1, 2)))
        G = H.entries
        assert np.max(np.abs(G @ G.conj().T - np.eye(6))) < 1e-12

    def test_dita_parameter_count(self):
        assert dita_parameter_count(2, 3) == 2
        assert dita_parameter_count(4, 2, m=1, n=(1, 0, 2, 0)) == 7

    def test_dita_with_phases_is_unitary(self):
        rng = np.random.default_rng(0)
        H = dita_build(
            fourier(2),
            [fourier(5), to_complex(fourier(5))],
            rng.uniform(0, 2 * np.pi, (1, 4)),
        )
        assert is_unitary(H)

    def test_hosoya_suzuki_block_form(self):
        F2, F3 = fourier(2), fourier(3)
        H = hosoya_suzuki_build([F2, F2, F2], [F3, F3])
        assert H.entries.shape == (6, 6)
        assert is_unitary(H)


def test_dephased_build_matches_catalog_grid():
    from hadforge import catalog

    built = theorem1_build(asn(3, 3, ("I", "I", "H1"), ("F", "F", "H2")), mode="exact")
    reduced = butson_min_root(dephase(built)[0])[1]
    assert reduced == catalog.entry("S9").literal
