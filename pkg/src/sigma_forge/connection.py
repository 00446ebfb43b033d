"""Metric connection of the ODE manifold, in connection-form language.

The Levi-Civita connection of g is encoded by the so(3)-valued matrix of
1-forms theta solving d(eta) = -theta ^ eta:

    alpha = (f_y + 1) eta3
    beta  = (f_y + 1) eta2 + 2 f_p eta3
    delta = -(f_y - 1) eta1

with theta^1_2 = -alpha, theta^1_3 = -beta, theta^2_3 = -delta.  Covariant
derivatives of arbitrary fields extend the frame table by function-linearity
and the Leibniz rule; no Christoffel symbols in coordinates are ever built.

The module also carries the induced geometry of the rank-2 bundle annihilated
by the contact form (spanned by xi1 and xi3): its adapted connection form
omega^1_2 = -2 f_p eta3, the curvature two-form, and the triviality test for
the associated line-bundle class.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .expr import Expr, ZERO, diff, is_zero, simplify, to_string
from .geometry import (
    ETA,
    FrameVector,
    KForm,
    OdeSurface,
    exterior_derivative,
    frame_vector,
    one_form,
    pair,
    two_form,
    wedge,
    xi_derivative,
    zero_form,
)
from .residuals import ResidualEntry, ResidualReport

__all__ = [
    "ConnectionForms",
    "NormalBundleConnection",
    "ChernVerdict",
    "connection_forms",
    "theta_matrix",
    "covariant_derivative",
    "verify_first_structure",
    "normal_connection",
    "chern_trivial",
]


@dataclass(frozen=True)
class ConnectionForms:
    """The three independent connection 1-forms."""

    alpha: KForm
    beta: KForm
    delta: KForm

    def theta(self, i: int, j: int) -> KForm:
        """Entry theta^i_j of the antisymmetric connection matrix (1-based)."""
        table = {
            (1, 2): -self.alpha,
            (1, 3): -self.beta,
            (2, 3): -self.delta,
            (2, 1): self.alpha,
            (3, 1): self.beta,
            (3, 2): self.delta,
        }
        if i == j:
            return zero_form(1)
        return table[(i, j)]


@lru_cache(maxsize=None)
def connection_forms(s: OdeSurface) -> ConnectionForms:
    fy, fp = s.fy, s.fp
    return ConnectionForms(
        alpha=one_form(0, 0, fy + 1),
        beta=one_form(0, fy + 1, 2 * fp),
        delta=one_form(-(fy - 1), 0, 0),
    )


@lru_cache(maxsize=None)
def _theta_table(forms: ConnectionForms):
    return tuple(tuple(forms.theta(i, j) for j in (1, 2, 3)) for i in (1, 2, 3))


def theta_matrix(s: OdeSurface, forms: ConnectionForms | None = None):
    return _theta_table(forms or connection_forms(s))


def covariant_derivative(
    s: OdeSurface,
    v: FrameVector,
    w: FrameVector,
    forms: ConnectionForms | None = None,
) -> FrameVector:
    """nabla_v w = sum_j [ v(w^j) + sum_k w^k theta^j_k(v) ] xi_j."""
    theta = _theta_table(forms or connection_forms(s))
    out = []
    for j in (1, 2, 3):
        total = sum(
            (a * xi_derivative(s, i + 1, w.components[j - 1]) for i, a in enumerate(v.components)),
            start=ZERO,
        )
        for k in (1, 2, 3):
            total = total + w.components[k - 1] * pair(theta[j - 1][k - 1], v)
        out.append(simplify(total))
    return frame_vector(*out)


def verify_first_structure(
    s: OdeSurface, forms: ConnectionForms | None = None
) -> ResidualReport:
    """Residuals of d(eta^i) + sum_j theta^i_j ^ eta^j, coefficient by
    coefficient (nine entries)."""
    theta = _theta_table(forms or connection_forms(s))
    entries = []
    labels = ("eta1^eta2", "eta1^eta3", "eta2^eta3")
    for i in (1, 2, 3):
        resid = exterior_derivative(s, ETA[i - 1])
        for j in (1, 2, 3):
            resid = resid + wedge(theta[i - 1][j - 1], ETA[j - 1])
        for label, c in zip(labels, resid.coeffs):
            entries.append(
                ResidualEntry(
                    identity=f"d(eta{i}) + theta{i}_j ^ eta^j",
                    component=label,
                    expression=to_string(c),
                    zero=is_zero(c),
                )
            )
    return ResidualReport(name="first structure equation", entries=tuple(entries))


# ---------------------------------------------------------------------------
# normal bundle of the contact distribution


@dataclass(frozen=True)
class NormalBundleConnection:
    """Adapted connection of the rank-2 bundle spanned by xi1, xi3.

    ``curvature`` is d(omega12) computed by the forms engine; ``closed_form``
    is the prediction -4 (f_x + f f_p)_p  eta1 ^ eta3, exact on the slice
    f_y = 0 (``matches_closed_form`` reports the symbolic comparison).
    """

    omega12: KForm
    curvature: KForm
    closed_form: KForm
    matches_closed_form: bool
    in_sasakian_hypothesis: bool


def normal_connection(s: OdeSurface) -> NormalBundleConnection:
    omega12 = one_form(0, 0, -2 * s.fp)
    curvature = exterior_derivative(s, omega12)
    w = simplify(s.fx + s.f * s.fp)
    closed = two_form(0, -4 * diff(w, "p"), 0)
    difference = curvature - closed
    return NormalBundleConnection(
        omega12=omega12,
        curvature=curvature,
        closed_form=closed,
        matches_closed_form=all(is_zero(c) for c in difference.coeffs),
        in_sasakian_hypothesis=is_zero(s.fy),
    )


@dataclass(frozen=True)
class ChernVerdict:
    """Triviality of the line-bundle class of the contact distribution.

    ``witness`` is f_x + f f_p; the class is trivial exactly when the witness
    depends on x alone, in which case ``psi`` carries it.  The criterion is
    stated for right-hand sides with f_y = 0; ``in_hypothesis`` reports
    whether the input sits on that slice.
    """

    trivial: bool
    witness: Expr
    psi: Expr | None
    curvature_coefficient: Expr
    in_hypothesis: bool

    def to_json(self) -> dict:
        return {
            "trivial": self.trivial,
            "witness": to_string(self.witness),
            "psi": to_string(self.psi) if self.psi is not None else None,
            "curvature_coefficient": to_string(self.curvature_coefficient),
            "in_hypothesis": self.in_hypothesis,
        }


def chern_trivial(s: OdeSurface) -> ChernVerdict:
    w = simplify(s.fx + s.f * s.fp)
    wp = diff(w, "p")
    wy = diff(w, "y")
    trivial = is_zero(wp) and is_zero(wy)
    return ChernVerdict(
        trivial=trivial,
        witness=w,
        psi=w if trivial else None,
        curvature_coefficient=simplify(-4 * wp),
        in_hypothesis=is_zero(s.fy),
    )
