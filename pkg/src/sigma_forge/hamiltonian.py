"""Poisson structures, Hamiltonian vector fields and bi-Hamiltonian pairs.

A bivector B = b23 xi2^xi3 + b31 xi3^xi1 + b12 xi1^xi2 is encoded by the
1-form iota_B vol, whose frame components are exactly (b23, b31, b12); the
Jacobi identity becomes the vanishing of the volume coefficient of J ^ dJ.

For the canonical bivector xi1 ^ xi2 the associated 1-form is eta3 and the
Hamiltonian field of H is

    v = xi1(H) xi2 - xi2(H) xi1
      = -4 [ H_y d/dx - (H_x + f H_p) d/dy + f H_y d/dp ]
      = (eta3)# x grad H.

On the slice f_y = 0, H = H(x, p) the field is a multiple of the Reeb field
and pairs with the second structure lambda xi2^xi3 (partner Hamiltonian
-p/2) into a compatible bi-Hamiltonian system; in particular H = f works
whenever xi1(f) != 0.  When additionally f = f(x), the coframe has constant
structure coefficients (a Heisenberg model) and H = x/2 generates the Reeb
field with partner Hamiltonian (1/2) int f dx - p/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .expr import (
    Const,
    Expr,
    P,
    X,
    antiderivative_in_x,
    as_expr,
    diff,
    is_zero,
    simplify,
    to_string,
)
from .geometry import (
    FrameVector,
    KForm,
    OdeSurface,
    XI,
    cross,
    exterior_derivative,
    gradient,
    one_form,
    sharp,
    vector_to_json,
    wedge,
    xi_derivative,
)

__all__ = [
    "BiVector",
    "HamiltonianSystem",
    "Omega2Verdict",
    "BiHamiltonianPair",
    "ReebBiHamiltonian",
    "PreconditionError",
    "bivector",
    "omega1",
    "omega2",
    "lambda_mu",
    "poisson_one_form",
    "jacobi_residual",
    "hamiltonian_field",
    "hamiltonian_field_coordinates",
    "cross_product_field",
    "make_system",
    "omega2_poisson_check",
    "bihamiltonian_pair",
    "reeb_bihamiltonian",
]

_HALF = Const(Fraction(1, 2))


class PreconditionError(ValueError):
    """A construction was asked for outside its hypotheses; carries the
    offending expression as a witness."""

    def __init__(self, message: str, witness: Expr):
        super().__init__(f"{message} (witness: {to_string(witness)})")
        self.witness = witness


@dataclass(frozen=True)
class BiVector:
    """Skew 2-vector with components over (xi2^xi3, xi3^xi1, xi1^xi2)."""

    b23: Expr
    b31: Expr
    b12: Expr

    def to_json(self) -> dict:
        return {
            "xi2^xi3": to_string(self.b23),
            "xi3^xi1": to_string(self.b31),
            "xi1^xi2": to_string(self.b12),
        }


def bivector(b23, b31, b12) -> BiVector:
    return BiVector(as_expr(b23), as_expr(b31), as_expr(b12))


def omega1(s: OdeSurface) -> BiVector:
    """The canonical bivector xi1 ^ xi2."""
    return bivector(0, 0, 1)


def lambda_mu(s: OdeSurface, H) -> tuple[Expr, Expr]:
    """(xi1(H), xi2(H)); always recomputed from H."""
    H = as_expr(H)
    return xi_derivative(s, 1, H), xi_derivative(s, 2, H)


def omega2(s: OdeSurface, H) -> BiVector:
    """The second structure mu xi3^xi1 + lambda xi2^xi3 attached to H."""
    lam, mu = lambda_mu(s, H)
    return bivector(lam, mu, 0)


def poisson_one_form(s: OdeSurface, b: BiVector) -> KForm:
    """iota_B vol; a component-wise transcription of the bivector."""
    return one_form(b.b23, b.b31, b.b12)


def jacobi_residual(s: OdeSurface, j: KForm) -> Expr:
    """Volume coefficient of j ^ dj; the bivector behind j is Poisson iff
    this vanishes identically."""
    if j.degree != 1:
        raise ValueError("the Jacobi residual takes a 1-form")
    return simplify(wedge(j, exterior_derivative(s, j)).coeffs[0])


def hamiltonian_field(s: OdeSurface, b: BiVector, H) -> FrameVector:
    """v = B(dH, .) over the frame."""
    H = as_expr(H)
    d = [xi_derivative(s, i, H) for i in (1, 2, 3)]
    return FrameVector(
        (
            simplify(b.b31 * d[2] - b.b12 * d[1]),
            simplify(b.b12 * d[0] - b.b23 * d[2]),
            simplify(b.b23 * d[1] - b.b31 * d[0]),
        )
    )


def hamiltonian_field_coordinates(s: OdeSurface, H) -> tuple[Expr, Expr, Expr]:
    """Equations of motion of the canonical structure over (d/dx, d/dy, d/dp):
    dx/dt = -4 H_y, dy/dt = 4 (H_x + f H_p), dp/dt = -4 f H_y."""
    H = as_expr(H)
    Hx, Hy, Hp = diff(H, "x"), diff(H, "y"), diff(H, "p")
    return (
        simplify(-4 * Hy),
        simplify(4 * (Hx + s.f * Hp)),
        simplify(-4 * s.f * Hy),
    )


def cross_product_field(s: OdeSurface, b: BiVector, H) -> FrameVector:
    """v = (iota_B vol)# x grad H; agrees with the bivector contraction."""
    return cross(sharp(poisson_one_form(s, b)), gradient(s, H))


@dataclass(frozen=True)
class HamiltonianSystem:
    surface: OdeSurface
    H: Expr
    poisson: BiVector
    field: FrameVector

    def to_json(self) -> dict:
        return {
            "H": to_string(self.H),
            "poisson": self.poisson.to_json(),
            "field": vector_to_json(self.field),
        }


def make_system(s: OdeSurface, b: BiVector, H) -> HamiltonianSystem:
    H = as_expr(H)
    return HamiltonianSystem(surface=s, H=H, poisson=b, field=hamiltonian_field(s, b, H))


@dataclass(frozen=True)
class Omega2Verdict:
    is_poisson: bool
    mu: Expr
    jacobi: Expr  # residual of the associated 1-form, for reporting

    def to_json(self) -> dict:
        return {
            "poisson": self.is_poisson,
            "mu": to_string(self.mu),
            "jacobi_residual": to_string(self.jacobi),
        }


def omega2_poisson_check(s: OdeSurface, H) -> Omega2Verdict:
    """The second structure is Poisson exactly when mu = xi2(H) vanishes."""
    _, mu = lambda_mu(s, H)
    residual = jacobi_residual(s, poisson_one_form(s, omega2(s, H)))
    return Omega2Verdict(is_poisson=is_zero(mu), mu=mu, jacobi=residual)


@dataclass(frozen=True)
class BiHamiltonianPair:
    """Two Hamiltonian representations of the same field, plus the
    compatibility verdict of the summed structure."""

    system1: HamiltonianSystem  # (xi1^xi2, H)
    system2: HamiltonianSystem  # (lambda xi2^xi3, -p/2)
    field: FrameVector
    compatible: bool
    # lambda == 0 means the field vanishes and the two structures are nowhere
    # independent; accepted, but flagged
    degenerate: bool
    independence_witness: Expr  # lambda; independence fails on its zero locus

    def to_json(self) -> dict:
        return {
            "H": to_string(self.system1.H),
            "H1": to_string(self.system2.H),
            "omega1": self.system1.poisson.to_json(),
            "omega2": self.system2.poisson.to_json(),
            "field": vector_to_json(self.field),
            "compatible": self.compatible,
            "degenerate": self.degenerate,
            "independence_witness": to_string(self.independence_witness),
            "preconditions": ["f_y = 0", "H_y = 0"],
        }


def bihamiltonian_pair(s: OdeSurface, H) -> BiHamiltonianPair:
    """Bi-Hamiltonian representation of v = xi1(H) xi2 for H = H(x, p) on a
    structure with f_y = 0.

    Raises :class:`PreconditionError` off that slice.  A Hamiltonian with
    xi1(H) = 0 is accepted but flagged degenerate.
    """
    H = as_expr(H)
    if not is_zero(s.fy):
        raise PreconditionError("the canonical structure is Poisson only for f_y = 0", s.fy)
    lam, mu = lambda_mu(s, H)
    if not is_zero(mu):
        raise PreconditionError("H must not depend on y (the second structure fails Jacobi)", mu)

    sys1 = make_system(s, omega1(s), H)
    sys2 = make_system(s, omega2(s, H), simplify(-(_HALF * P)))
    mismatch = sys1.field - sys2.field
    if not all(is_zero(c) for c in mismatch.components):
        raise AssertionError("the two Hamiltonian representations disagree")

    total = poisson_one_form(s, sys1.poisson) + poisson_one_form(s, sys2.poisson)
    return BiHamiltonianPair(
        system1=sys1,
        system2=sys2,
        field=sys1.field,
        compatible=is_zero(jacobi_residual(s, total)),
        degenerate=is_zero(lam),
        independence_witness=lam,
    )


@dataclass(frozen=True)
class ReebBiHamiltonian:
    """Bi-Hamiltonian data of the Reeb field for polynomial f = f(x)."""

    H: Expr  # x/2
    H1: Expr  # (1/2) int_0^x f - p/2
    J2: FrameVector
    field: FrameVector  # xi2, through both representations
    compatible: bool

    def to_json(self) -> dict:
        return {
            "H": to_string(self.H),
            "H1": to_string(self.H1),
            "J2": vector_to_json(self.J2),
            "field": vector_to_json(self.field),
            "compatible": self.compatible,
        }


def reeb_bihamiltonian(s: OdeSurface) -> ReebBiHamiltonian:
    """Bi-Hamiltonian structure of the Reeb field xi2 when f = f(x) is a
    polynomial: H = x/2 and H1 = (1/2) F(x) - p/2 with F' = f, F(0) = 0.

    Both cross-product representations xi3 x grad H and J2 x grad H1 are
    verified to equal xi2 symbolically before returning.  The base point of F
    is immaterial: a constant shift does not change grad H1.
    """
    if not is_zero(s.fp):
        raise PreconditionError("Reeb construction needs f independent of p", s.fp)
    if not is_zero(s.fy):
        raise PreconditionError("Reeb construction needs f independent of y", s.fy)
    try:
        F = antiderivative_in_x(s.f)
    except ValueError as err:
        raise PreconditionError("f must be polynomial in x", s.f) from err

    H = simplify(_HALF * X)
    H1 = simplify(_HALF * F - _HALF * P)
    rep1 = cross(XI[2], gradient(s, H))
    J2 = sharp(poisson_one_form(s, omega2(s, H)))
    rep2 = cross(J2, gradient(s, H1))
    for rep, label in ((rep1, "xi3 x grad H"), (rep2, "J2 x grad H1")):
        delta = rep - XI[1]
        if not all(is_zero(c) for c in delta.components):
            raise AssertionError(f"{label} failed to reproduce the Reeb field")

    eta = poisson_one_form(s, omega2(s, H))
    eta3 = one_form(0, 0, 1)
    return ReebBiHamiltonian(
        H=H,
        H1=H1,
        J2=J2,
        field=rep1,
        compatible=is_zero(jacobi_residual(s, eta3 + eta)),
    )
