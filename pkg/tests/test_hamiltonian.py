"""Poisson structures, Hamiltonian fields, bi-Hamiltonian constructions."""

from __future__ import annotations

import random

import pytest

from sigma_forge.expr import is_zero, parse, simplify, to_string
from sigma_forge.geometry import (
    XI,
    directional_derivative,
    form_is_zero,
    make_surface,
    one_form,
    pair,
    vector_is_zero,
    vector_to_coordinates,
    volume_form,
    wedge,
)
from sigma_forge.hamiltonian import (
    PreconditionError,
    bihamiltonian_pair,
    bivector,
    cross_product_field,
    hamiltonian_field,
    hamiltonian_field_coordinates,
    jacobi_residual,
    lambda_mu,
    make_system,
    omega1,
    omega2,
    omega2_poisson_check,
    poisson_one_form,
    reeb_bihamiltonian,
)

from conftest import random_polynomial


def _multivector_pairing_oracle(s, b, v):
    """<vol, B ^ v> computed as a determinant expansion, independent of the
    component transcription in poisson_one_form."""
    parts = [
        (b.b23, XI[1], XI[2]),
        (b.b31, XI[2], XI[0]),
        (b.b12, XI[0], XI[1]),
    ]
    total = parse("0")
    for coeff, e1, e2 in parts:
        det = pair(volume_form(), e1, e2, v)
        total = simplify(total + coeff * det)
    return total


class TestPoissonOneForm:
    def test_canonical_bivector_gives_eta3(self):
        s = make_surface(parse("x*y*p"))
        j = poisson_one_form(s, omega1(s))
        assert form_is_zero(j - one_form(0, 0, 1))

    def test_second_structure_gives_lambda_eta1(self):
        s = make_surface(parse("x + p^2"))
        H = parse("x*p")
        lam, mu = lambda_mu(s, H)
        assert is_zero(mu)
        j = poisson_one_form(s, omega2(s, H))
        assert form_is_zero(j - one_form(lam, 0, 0))

    def test_zero_bivector(self):
        s = make_surface(parse("0"))
        assert form_is_zero(poisson_one_form(s, bivector(0, 0, 0)))

    def test_matches_volume_pairing_oracle(self):
        rng = random.Random(61)
        s = make_surface(parse("x*y*p"))
        b = bivector(random_polynomial(rng), random_polynomial(rng), random_polynomial(rng))
        j = poisson_one_form(s, b)
        for v in XI:
            assert is_zero(pair(j, v) - _multivector_pairing_oracle(s, b, v))


class TestJacobiResidual:
    def test_eta3_residual_is_2fy(self, corpus_surfaces):
        for s in corpus_surfaces:
            got = jacobi_residual(s, one_form(0, 0, 1))
            assert is_zero(got - simplify(2 * s.fy)), to_string(s.f)

    def test_quadratic_y(self):
        s = make_surface(parse("y^2"))
        assert is_zero(jacobi_residual(s, one_form(0, 0, 1)) - parse("4*y"))

    def test_sasakian_case_vanishes(self):
        s = make_surface(parse("x + p"))
        assert is_zero(jacobi_residual(s, one_form(0, 0, 1)))

    def test_displayed_residual_for_second_structure(self):
        # lambda eta1 + mu eta2 has residual mu xi3(lam) - lam xi3(mu) - 2 mu^2
        from sigma_forge.geometry import xi_derivative

        s = make_surface(parse("x*y*p"))
        H = parse("x*y + y*p^2 - x")
        lam, mu = lambda_mu(s, H)
        got = jacobi_residual(s, poisson_one_form(s, omega2(s, H)))
        want = simplify(
            mu * xi_derivative(s, 3, lam) - lam * xi_derivative(s, 3, mu) - 2 * mu * mu
        )
        assert is_zero(got - want)

    def test_needs_degree_one(self):
        s = make_surface(parse("0"))
        with pytest.raises(ValueError):
            jacobi_residual(s, volume_form())


class TestHamiltonianField:
    def test_H_equals_y(self):
        # lambda = xi1(y) = 2p, mu = xi2(y) = 2 -> v = 2p xi2 - 2 xi1
        s = make_surface(parse("x*p - y"))
        v = hamiltonian_field(s, omega1(s), parse("y"))
        want = XI[1].scale(parse("2*p")) - XI[0].scale(2)
        assert vector_is_zero(v - want)
        coords = hamiltonian_field_coordinates(s, parse("y"))
        assert is_zero(coords[0] + 4)
        assert is_zero(coords[1])
        assert is_zero(coords[2] - simplify(-4 * s.f))

    def test_H_minus_half_p(self):
        s = make_surface(parse("x + p^2"))
        v = hamiltonian_field(s, omega1(s), parse("-p/2"))
        assert vector_is_zero(v - XI[1].scale(simplify(-s.f)))

    def test_reeb_from_half_x(self):
        s = make_surface(parse("x"))
        v = hamiltonian_field(s, omega1(s), parse("x/2"))
        assert vector_is_zero(v - XI[1])

    @pytest.mark.parametrize("seed", range(6))
    def test_three_representations_agree(self, seed):
        rng = random.Random(9300 + seed)
        s = make_surface(random_polynomial(rng))
        H = random_polynomial(rng, vars_=(0, 2))  # H = H(x, p)
        frame_form = hamiltonian_field(s, omega1(s), H)
        coords = hamiltonian_field_coordinates(s, H)
        from_frame = vector_to_coordinates(s, frame_form)
        for a, b in zip(from_frame, coords):
            assert is_zero(a - b)
        crossed = cross_product_field(s, omega1(s), H)
        assert vector_is_zero(frame_form - crossed)

    @pytest.mark.parametrize("seed", range(6))
    def test_field_annihilates_hamiltonian(self, seed):
        rng = random.Random(9700 + seed)
        s = make_surface(random_polynomial(rng))
        H = random_polynomial(rng)
        sys_ = make_system(s, omega1(s), H)
        assert is_zero(directional_derivative(s, sys_.field, H))


class TestOmega2Verdict:
    def test_poisson_for_xp_hamiltonians(self):
        s = make_surface(parse("y*p"))
        assert omega2_poisson_check(s, parse("x + p^3")).is_poisson

    def test_fails_for_y_dependence(self):
        s = make_surface(parse("0"))
        verdict = omega2_poisson_check(s, parse("y"))
        assert not verdict.is_poisson
        assert to_string(verdict.mu) == "2"

    def test_degenerate_constant(self):
        s = make_surface(parse("x"))
        assert omega2_poisson_check(s, parse("5")).is_poisson

    def test_flips_exactly_on_Hy(self, corpus_surfaces):
        rng = random.Random(431)
        for s in corpus_surfaces[:8]:
            H = random_polynomial(rng)
            from sigma_forge.expr import diff

            assert omega2_poisson_check(s, H).is_poisson == is_zero(diff(H, "y"))


class TestBiHamiltonianPair:
    def test_H_equals_f(self):
        s = make_surface(parse("x + p^2"))
        out = bihamiltonian_pair(s, s.f)
        want = XI[1].scale(parse("2*(1 + 2*p*(x + p^2))"))
        assert vector_is_zero(out.field - want)
        assert out.compatible
        assert not out.degenerate
        assert is_zero(out.independence_witness - parse("2 + 4*p*x + 4*p^3"))

    def test_reduces_to_reeb_case(self):
        s = make_surface(parse("x"))
        out = bihamiltonian_pair(s, parse("x/2"))
        assert vector_is_zero(out.field - XI[1])
        assert out.compatible

    def test_second_hamiltonian_is_minus_half_p(self):
        s = make_surface(parse("x*p"))
        out = bihamiltonian_pair(s, s.f)
        assert is_zero(out.system2.H - parse("-p/2"))

    def test_rejects_y_dependent_H(self):
        s = make_surface(parse("x + p^2"))
        with pytest.raises(PreconditionError) as err:
            bihamiltonian_pair(s, parse("y"))
        assert to_string(err.value.witness) == "2"

    def test_rejects_non_sasakian_rhs(self):
        with pytest.raises(PreconditionError):
            bihamiltonian_pair(make_surface(parse("y")), parse("x"))

    def test_degenerate_flagged_not_rejected(self):
        s = make_surface(parse("x"))
        out = bihamiltonian_pair(s, parse("3"))
        assert out.degenerate
        assert vector_is_zero(out.field)

    @pytest.mark.parametrize("seed", range(5))
    def test_compatibility_whenever_Hy_zero(self, seed):
        rng = random.Random(8800 + seed)
        s = make_surface(random_polynomial(rng, vars_=(0, 2)))  # f = f(x, p)
        H = random_polynomial(rng, vars_=(0, 2))
        out = bihamiltonian_pair(s, H)
        assert out.compatible

    def test_compatibility_residual_route(self):
        # (eta3 + eta) ^ d(eta3 + eta) through the raw wedge engine
        s = make_surface(parse("x + p^2"))
        H = s.f
        eta = poisson_one_form(s, omega2(s, H))
        total = one_form(0, 0, 1) + eta
        from sigma_forge.geometry import exterior_derivative

        residual = wedge(total, exterior_derivative(s, total))
        assert is_zero(residual.coeffs[0])

    def test_json_shape(self):
        out = bihamiltonian_pair(make_surface(parse("x*p")), parse("x*p"))
        doc = out.to_json()
        assert doc["H1"] == "-(1/2)*p"
        assert doc["compatible"] is True
        assert "preconditions" in doc


class TestReebBiHamiltonian:
    def test_linear_rhs(self):
        out = reeb_bihamiltonian(make_surface(parse("x")))
        assert is_zero(out.H - parse("x/2"))
        assert is_zero(out.H1 - parse("x^2/4 - p/2"))
        assert vector_is_zero(out.J2 - XI[0])
        assert vector_is_zero(out.field - XI[1])
        assert out.compatible

    def test_flat_case(self):
        out = reeb_bihamiltonian(make_surface(parse("0")))
        assert is_zero(out.H1 - parse("-p/2"))
        assert vector_is_zero(out.field - XI[1])

    def test_quadratic_rhs(self):
        out = reeb_bihamiltonian(make_surface(parse("x^2")))
        assert is_zero(out.H1 - parse("x^3/6 - p/2"))

    def test_gradient_of_H1_is_minus_xi3(self):
        from sigma_forge.geometry import gradient

        s = make_surface(parse("x"))
        out = reeb_bihamiltonian(s)
        assert vector_is_zero(gradient(s, out.H1) + XI[2])

    def test_rejects_p_dependence(self):
        with pytest.raises(PreconditionError):
            reeb_bihamiltonian(make_surface(parse("p")))

    def test_rejects_y_dependence(self):
        with pytest.raises(PreconditionError):
            reeb_bihamiltonian(make_surface(parse("y + x")))

    def test_rejects_non_polynomial(self):
        with pytest.raises(PreconditionError, match="polynomial"):
            reeb_bihamiltonian(make_surface(parse("sin(x)")))

    def test_json_round_trip_strings(self):
        doc = reeb_bihamiltonian(make_surface(parse("x"))).to_json()
        assert doc["H"] == "(1/2)*x"
        assert doc["compatible"] is True
