"""Contact metric structure of the ODE manifold and its classification.

eta2 is a contact form with Reeb field xi2.  The structure tensor

    phi = eta3 (x) xi1 - eta1 (x) xi3

makes (phi, xi2, eta2, g) a contact metric structure for every right-hand
side f.  The deformation tensor h = (1/2) L_{xi2} phi and the Lie derivative
of the metric are computed from first principles (brackets and directional
derivatives); their closed forms

    h        = -f_y (eta1 (x) xi1 - eta3 (x) xi3)
    L_xi2 g  = -2 f_y (eta1 (x) eta3 + eta3 (x) eta1)

serve as regression oracles in the test suite.  The Reeb field is Killing,
equivalently the structure is K-contact, equivalently Sasakian (dimension 3),
exactly when f_y = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .expr import Const, Expr, ZERO, as_expr, is_zero, simplify, to_string
from .geometry import (
    ETA,
    FrameVector,
    KForm,
    OdeSurface,
    XI,
    exterior_derivative,
    frame_vector,
    lie_bracket,
    metric_frame,
    pair,
)
from .residuals import ResidualEntry, ResidualReport

__all__ = [
    "EndoField",
    "Classification",
    "phi",
    "phi_apply",
    "h_tensor",
    "lie_derivative_phi",
    "lie_derivative_metric",
    "classify",
    "verify_contact_identities",
]

_HALF = Const(Fraction(1, 2))


@dataclass(frozen=True)
class EndoField:
    """(1,1) tensor field as a 3x3 matrix over the frame basis; column j
    holds the frame components of the image of xi_j."""

    matrix: tuple[tuple[Expr, Expr, Expr], ...]

    def apply(self, v: FrameVector) -> FrameVector:
        rows = []
        for i in range(3):
            rows.append(
                simplify(
                    sum(
                        (self.matrix[i][j] * v.components[j] for j in range(3)),
                        start=ZERO,
                    )
                )
            )
        return frame_vector(*rows)

    def compose(self, other: "EndoField") -> "EndoField":
        out = []
        for i in range(3):
            row = []
            for j in range(3):
                row.append(
                    simplify(
                        sum(
                            (self.matrix[i][k] * other.matrix[k][j] for k in range(3)),
                            start=ZERO,
                        )
                    )
                )
            out.append(tuple(row))
        return EndoField(tuple(out))

    def __add__(self, other: "EndoField") -> "EndoField":
        return EndoField(
            tuple(
                tuple(simplify(a + b) for a, b in zip(ra, rb))
                for ra, rb in zip(self.matrix, other.matrix)
            )
        )

    def scale(self, factor) -> "EndoField":
        factor = as_expr(factor)
        return EndoField(
            tuple(tuple(simplify(factor * a) for a in row) for row in self.matrix)
        )

    def trace(self) -> Expr:
        return simplify(sum((self.matrix[i][i] for i in range(3)), start=ZERO))

    def entry(self, i: int, j: int) -> Expr:
        return self.matrix[i - 1][j - 1]


def endo_field(matrix) -> EndoField:
    return EndoField(tuple(tuple(as_expr(c) for c in row) for row in matrix))


_IDENTITY = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def phi(s: OdeSurface) -> EndoField:
    """phi(xi1) = -xi3, phi(xi2) = 0, phi(xi3) = xi1."""
    return endo_field(((0, 0, 1), (0, 0, 0), (-1, 0, 0)))


def phi_apply(s: OdeSurface, v: FrameVector) -> FrameVector:
    return phi(s).apply(v)


def lie_derivative_endo(s: OdeSurface, direction: FrameVector, t: EndoField) -> EndoField:
    """(L_V T)(X) = [V, T(X)] - T([V, X]), assembled column by column on the
    frame basis (the non-tensorial parts cancel, so basis columns suffice)."""
    cols = []
    for j in range(3):
        tx = t.apply(XI[j])
        first = lie_bracket(s, direction, tx)
        second = t.apply(lie_bracket(s, direction, XI[j]))
        cols.append((first - second).components)
    return EndoField(tuple(tuple(cols[j][i] for j in range(3)) for i in range(3)))


def lie_derivative_phi(s: OdeSurface) -> EndoField:
    return lie_derivative_endo(s, XI[1], phi(s))


def h_tensor(s: OdeSurface) -> EndoField:
    """h = (1/2) L_{xi2} phi, from first principles."""
    return lie_derivative_phi(s).scale(_HALF)


def lie_derivative_metric(s: OdeSurface):
    """(L_{xi2} g)(xi_i, xi_j) as a symmetric 3x3 matrix of expressions."""
    out = []
    brackets = [lie_bracket(s, XI[1], XI[i]) for i in range(3)]
    for i in range(3):
        row = []
        for j in range(3):
            # xi2(g(xi_i, xi_j)) = 0 since the frame is orthonormal
            val = -(brackets[i].components[j]) - (brackets[j].components[i])
            row.append(simplify(val))
        out.append(tuple(row))
    return tuple(out)


@dataclass(frozen=True)
class Classification:
    """Verdict for the contact metric structure of a right-hand side."""

    is_contact_metric: bool
    is_k_contact: bool
    is_sasakian: bool
    witness: Expr  # f_y; the obstruction to the Reeb field being Killing

    def to_json(self) -> dict:
        return {
            "contact_metric": self.is_contact_metric,
            "k_contact": self.is_k_contact,
            "sasakian": self.is_sasakian,
            "witness": to_string(self.witness),
        }


def classify(s: OdeSurface) -> Classification:
    killing = is_zero(s.fy)
    return Classification(
        is_contact_metric=True,
        is_k_contact=killing,
        is_sasakian=killing,
        witness=s.fy,
    )


def _two_form_pairing(s: OdeSurface, omega: KForm, v: FrameVector, w: FrameVector) -> Expr:
    # alternation normalization: d(eta)(X,Y) = (1/2)(X eta(Y) - Y eta(X) - eta([X,Y])),
    # the convention under which d(eta2)(X,Y) = g(X, phi Y) holds on the nose
    return simplify(_HALF * pair(omega, v, w))


def verify_contact_identities(
    s: OdeSurface, structure: EndoField | None = None
) -> ResidualReport:
    """Symbolic check of the contact-metric identities on the frame basis.

    Passing a custom ``structure`` tensor re-runs the suite against it (used
    as a negative control in the tests).
    """
    ph = structure if structure is not None else phi(s)
    h = lie_derivative_endo(s, XI[1], ph).scale(_HALF)
    entries: list[ResidualEntry] = []

    def record(identity: str, component: str, value: Expr):
        value = simplify(value)
        entries.append(
            ResidualEntry(
                identity=identity,
                component=component,
                expression=to_string(value),
                zero=is_zero(value),
            )
        )

    phi2 = ph.compose(ph)
    d_eta2 = exterior_derivative(s, ETA[1])
    for i in range(3):
        for j in range(3):
            want = -(as_expr(_IDENTITY[i][j])) + (ETA[1].coeffs[j] if i == 1 else ZERO)
            record(
                "phi^2 = -id + eta2 (x) xi2",
                f"({i + 1},{j + 1})",
                phi2.matrix[i][j] - want,
            )
    for i in range(3):
        for j in range(3):
            gpp = metric_frame(ph.apply(XI[i]), ph.apply(XI[j]))
            want = metric_frame(XI[i], XI[j]) - pair(ETA[1], XI[i]) * pair(ETA[1], XI[j])
            record("g(phi X, phi Y) = g(X,Y) - eta2(X) eta2(Y)", f"({i + 1},{j + 1})", gpp - want)
    for i in range(3):
        for j in range(3):
            lhs = _two_form_pairing(s, d_eta2, XI[i], XI[j])
            rhs = metric_frame(XI[i], ph.apply(XI[j]))
            record("d(eta2)(X,Y) = g(X, phi Y)", f"({i + 1},{j + 1})", lhs - rhs)
    anti = h.compose(ph) + ph.compose(h)
    for i in range(3):
        for j in range(3):
            record("h phi + phi h = 0", f"({i + 1},{j + 1})", anti.matrix[i][j])
    record("tr h = 0", "scalar", h.trace())
    for i in range(3):
        for j in range(i + 1, 3):
            record("h symmetric", f"({i + 1},{j + 1})", h.matrix[i][j] - h.matrix[j][i])
    for i, c in enumerate(h.apply(XI[1]).components):
        record("h(xi2) = 0", f"xi{i + 1}", c)
    eta2_phi = [
        simplify(sum((ETA[1].coeffs[i] * ph.matrix[i][j] for i in range(3)), start=ZERO))
        for j in range(3)
    ]
    for j, c in enumerate(eta2_phi):
        record("eta2 o phi = 0", f"xi{j + 1}", c)
    return ResidualReport(name="contact metric identities", entries=tuple(entries))
