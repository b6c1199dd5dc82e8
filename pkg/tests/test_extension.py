"""Extension types: validation, the pair multiplication law, construction,
norms, and the equivalence-preserving transformations."""

from itertools import product

import pytest

from p4groups.extension import (
    ExtElement,
    ExtensionType,
    build_group,
    conjugate_type,
    ext_inverse,
    ext_power,
    identity_element,
    multiply,
    norm_apply,
    power_substitute,
    shift_generator,
    v_power,
    validate_type,
)
from p4groups.groups import abelian_invariants, isomorphic, subgroup_generated
from p4groups.residues import MixedModulusMatrix, ModulusProfile, mat_pow


def make_type(p, shape, rows, v, n=None):
    prof = ModulusProfile(p, shape)
    return ExtensionType(prof, n or p, MixedModulusMatrix(rows, prof), prof.element(v))


class TestValidateType:
    def test_catalog_row_is_valid(self):
        assert validate_type(make_type(3, "p2xp", ((1, 3), (0, 1)), (0, 0))) is None

    def test_unfixed_v(self):
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (0, 1))
        assert validate_type(t) == "v-not-fixed"

    def test_tau_power_mismatch(self):
        t = make_type(3, "p2xp", ((4, 0), (0, 1)), (0, 0), n=2)
        assert validate_type(t) == "tau-power-not-identity"

    def test_non_automorphism(self):
        t = make_type(3, "p2xp", ((3, 0), (0, 1)), (0, 0))
        assert validate_type(t) == "not-an-automorphism"

    def test_json_roundtrip(self):
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (0, 0))
        data = t.to_json_dict()
        assert data == {"p": 3, "shape": "p2xp", "n": 3, "tau": [[1, 3], [0, 1]], "v": [0, 0]}
        assert ExtensionType.from_json_dict(data) == t

    def test_general_n_accepted(self):
        # n need not equal p as long as tau^n = id and tau fixes v.
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (0, 0), n=9)
        assert validate_type(t) is None
        assert build_group(t).size == 27 * 9


class TestMultiply:
    def test_identity_element(self):
        t = make_type(3, "p2xp", ((1, 0), (1, 1)), (0, 1))
        e = identity_element(t)
        for x in t.profile.elements():
            for i in range(3):
                g = ExtElement(x, i)
                assert multiply(t, e, g) == g
                assert multiply(t, g, e) == g

    def test_wraparound_picks_up_v(self):
        t = make_type(3, "p2xp", ((1, 0), (1, 1)), (0, 1))
        g = ExtElement(t.profile.element((1, 0)), 2)
        h = ExtElement(t.profile.zero(), 1)
        assert multiply(t, g, h) == ExtElement(t.profile.element((1, 1)), 0)

    def test_first_row_product(self):
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (0, 0))
        g = ExtElement(t.profile.element((1, 0)), 1)
        h = ExtElement(t.profile.element((0, 1)), 1)
        assert multiply(t, g, h) == ExtElement(t.profile.element((4, 1)), 2)

    def test_two_case_form_agrees_with_floor_form(self):
        t = make_type(3, "p2xp", ((1, 3), (1, 1)), (0, 0))
        tau_pows = [mat_pow(t.tau, i) for i in range(3)]
        from p4groups.residues import mat_apply

        for x, y in product(t.profile.elements(), repeat=2):
            for i, j in product(range(3), repeat=2):
                g, h = ExtElement(x, i), ExtElement(y, j)
                if i + j < 3:
                    expected = ExtElement(x + mat_apply(tau_pows[i], y), i + j)
                else:
                    expected = ExtElement(x + mat_apply(tau_pows[i], y) + t.v, i + j - 3)
                assert multiply(t, g, h) == expected

    def test_associative_exhaustively_for_one_type(self):
        t = make_type(3, "p2xp", ((1, 0), (1, 1)), (0, 1))
        els = [ExtElement(x, i) for i in range(3) for x in t.profile.elements()]
        for g in els[:20]:
            for h in els:
                gh = multiply(t, g, h)
                for k in els[::7]:
                    assert multiply(t, gh, k) == multiply(t, g, multiply(t, h, k))


class TestExtInverse:
    def test_identity(self):
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (0, 0))
        assert ext_inverse(t, identity_element(t)) == identity_element(t)

    def test_trivial_v_coset_generator(self):
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (0, 0))
        a = ExtElement(t.profile.zero(), 1)
        assert ext_inverse(t, a) == ExtElement(t.profile.zero(), 2)

    def test_nontrivial_v(self):
        t = make_type(3, "p2xp", ((1, 0), (1, 1)), (0, 1))
        a = ExtElement(t.profile.zero(), 1)
        assert ext_inverse(t, a) == ExtElement(t.profile.element((0, 2)), 2)

    def test_inverse_law_exhaustive(self):
        t = make_type(3, "p2xp", ((1, 6), (1, 1)), (0, 0))
        e = identity_element(t)
        for x in t.profile.elements():
            for i in range(3):
                g = ExtElement(x, i)
                gi = ext_inverse(t, g)
                assert multiply(t, g, gi) == e
                assert multiply(t, gi, g) == e


class TestBuildGroup:
    def test_invalid_type_rejected_with_diagnostic(self):
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (0, 1))
        with pytest.raises(ValueError, match="v-not-fixed"):
            build_group(t)

    def test_elementary_direct_product(self):
        t = make_type(3, "pxpxp", ((1, 0, 0), (0, 1, 0), (0, 0, 1)), (0, 0, 0))
        g = build_group(t)
        assert abelian_invariants(g) == (3, 3, 3, 3)

    def test_identity_tau_with_v_gives_big_cyclic_factor(self):
        t = make_type(3, "p2xp", ((1, 0), (0, 1)), (1, 0))
        g = build_group(t)
        assert abelian_invariants(g) == (3, 27)

    def test_kernel_is_embedded_subgroup(self):
        t = make_type(3, "p2xp", ((1, 3), (1, 1)), (0, 0))
        g = build_group(t)
        kernel = subgroup_generated(g, range(27))
        assert kernel.order == 27
        assert kernel.invariant_factors() == (3, 9)

    def test_labels_and_payloads(self):
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (0, 0))
        g = build_group(t)
        assert g.labels[0] == "(0,0|a^0)"
        assert g.payloads[28].i == 1 and g.payloads[28].x.coords == (0, 1)

    def test_table_matches_multiply(self):
        t = make_type(3, "p2xp", ((1, 6), (1, 1)), (0, 0))
        g = build_group(t)
        for i in range(0, g.size, 5):
            for j in range(0, g.size, 7):
                prod = multiply(t, g.payloads[i], g.payloads[j])
                assert g.payloads[g.mul(i, j)] == prod


class TestNormApply:
    def test_identity_element(self):
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (0, 0))
        assert norm_apply(t, t.profile.zero()) == t.profile.zero()

    def test_shear_norm_value(self):
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (0, 0))
        assert norm_apply(t, t.profile.element((1, 0))).coords == (3, 0)

    def test_full_jordan_p5_norm_vanishes(self):
        t = make_type(5, "pxpxp", ((1, 1, 0), (0, 1, 1), (0, 0, 1)), (0, 0, 0))
        for x in list(t.profile.elements())[::7]:
            assert norm_apply(t, x).is_zero()

    def test_power_norm_law_exhaustive(self):
        t = make_type(3, "p2xp", ((1, 0), (1, 1)), (0, 1))
        for x in t.profile.elements():
            lhs = ext_power(t, ExtElement(x, 1), 3)
            assert lhs == ExtElement(norm_apply(t, x) + t.v, 0)


class TestTransformations:
    def test_shift_generator_zero_is_noop(self):
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (0, 0))
        assert shift_generator(t, t.profile.zero()) == t

    def test_shift_generator_adds_norm(self):
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (0, 0))
        shifted = shift_generator(t, t.profile.element((1, 0)))
        assert shifted.v.coords == (3, 0)

    def test_shift_generator_preserves_class(self):
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (0, 0))
        shifted = shift_generator(t, t.profile.element((1, 0)))
        ok, _ = isomorphic(build_group(t), build_group(shifted))
        assert ok

    def test_power_substitute_identity(self):
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (1, 0))
        assert power_substitute(t, 1) == t

    def test_power_substitute_squares(self):
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (1, 0))
        t2 = power_substitute(t, 2)
        assert t2.tau.entries == ((1, 6), (0, 1))
        assert t2.v.coords == (2, 0)

    def test_power_substitute_gcd_violation(self):
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (0, 0))
        with pytest.raises(ValueError):
            power_substitute(t, 3)

    def test_power_substitute_preserves_class(self):
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (1, 0))
        for i in (1, 2, 4, 5, 7):
            ok, _ = isomorphic(build_group(t), build_group(power_substitute(t, i)))
            assert ok, i

    def test_v_power_scales_v(self):
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (1, 0))
        assert v_power(t, 2).v.coords == (2, 0)
        assert v_power(t, 1) == t

    def test_v_power_gcd_violation(self):
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (1, 0))
        with pytest.raises(ValueError):
            v_power(t, 6)

    def test_v_power_preserves_class(self):
        t = make_type(3, "p2xp", ((4, 0), (0, 1)), (0, 1))
        for i in (2, 4, 5):
            ok, _ = isomorphic(build_group(t), build_group(v_power(t, i)))
            assert ok, i

    def test_conjugate_by_identity(self):
        t = make_type(3, "p2xp", ((1, 3), (1, 1)), (0, 0))
        ident = MixedModulusMatrix.identity(t.profile)
        assert conjugate_type(t, ident) == t

    def test_conjugate_upper_type(self):
        t = make_type(3, "p2xp", ((4, 3), (0, 1)), (0, 0))
        phi = MixedModulusMatrix(((1, 0), (1, 1)), t.profile)
        conj = conjugate_type(t, phi)
        assert conj.tau.entries == ((1, 3), (0, 1))  # alpha - beta = 4 - 3

    def test_conjugate_lower_type(self):
        t = make_type(5, "p2xp", ((6, 5), (1, 1)), (0, 0))
        phi = MixedModulusMatrix(((1, -5), (0, 1)), t.profile)
        conj = conjugate_type(t, phi)
        assert conj.tau.entries == ((1, 5), (1, 1))  # alpha - p = 6 - 5

    def test_conjugate_requires_automorphism(self):
        t = make_type(3, "p2xp", ((1, 3), (0, 1)), (0, 0))
        with pytest.raises(ValueError):
            conjugate_type(t, MixedModulusMatrix(((3, 0), (0, 1)), t.profile))

    def test_conjugate_preserves_class(self):
        t = make_type(3, "p2xp", ((1, 0), (1, 1)), (0, 1))
        phi = MixedModulusMatrix(((2, 3), (1, 1)), t.profile)
        conj = conjugate_type(t, phi)
        assert validate_type(conj) is None
        ok, _ = isomorphic(build_group(t), build_group(conj))
        assert ok
