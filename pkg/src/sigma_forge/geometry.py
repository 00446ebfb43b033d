"""The Riemannian 3-manifold attached to y'' = f(x, y, y').

The chart carries the orthonormal coframe

    eta1 = (1/2) dx,   eta2 = (1/2)(dy - p dx),   eta3 = (1/2)(dp - f dx)

dual to the frame

    xi1 = 2(d/dx + p d/dy + f d/dp),   xi2 = 2 d/dy,   xi3 = 2 d/dp,

with metric g = sum_i eta^i (x) eta^i, so the frame is orthonormal and every
tensor computation can stay in frame components.  The exterior derivative is
generated by the structure equations

    d eta1 = 0
    d eta2 = 2 eta1 ^ eta3
    d eta3 = 2 f_y eta1 ^ eta2 + 2 f_p eta1 ^ eta3

together with d(h) = sum_i xi_i(h) eta^i on functions.  Coordinates appear
only at the boundary (coordinate frames, the metric matrix, numeric
integration); the algebra itself is frame-native.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .expr import Const, Expr, ONE, P, ZERO, as_expr, diff, is_zero, simplify, to_string

_TWO = Const(2)
_HALF = Const(Fraction(1, 2))

__all__ = [
    "OdeSurface",
    "FrameVector",
    "KForm",
    "make_surface",
    "frame_vector",
    "kform",
    "zero_form",
    "one_form",
    "two_form",
    "three_form",
    "volume_form",
    "XI",
    "ETA",
    "BASIS_LABELS",
    "frame_in_coordinates",
    "coframe_in_coordinates",
    "vector_to_coordinates",
    "vector_from_coordinates",
    "metric_coordinate_matrix",
    "metric_frame",
    "xi_derivative",
    "directional_derivative",
    "wedge",
    "exterior_derivative",
    "interior_product",
    "pair",
    "sharp",
    "flat",
    "cross",
    "gradient",
    "lie_bracket",
    "form_is_zero",
    "vector_is_zero",
    "form_to_text",
    "form_to_json",
    "vector_to_json",
]

# sorted wedge bases of the coframe, by degree
_BASIS: dict[int, tuple[tuple[int, ...], ...]] = {
    0: ((),),
    1: ((1,), (2,), (3,)),
    2: ((1, 2), (1, 3), (2, 3)),
    3: ((1, 2, 3),),
}
_POS: dict[int, dict[tuple[int, ...], int]] = {
    deg: {idx: k for k, idx in enumerate(basis)} for deg, basis in _BASIS.items()
}

BASIS_LABELS: dict[int, tuple[str, ...]] = {
    0: ("1",),
    1: ("eta1", "eta2", "eta3"),
    2: ("eta1^eta2", "eta1^eta3", "eta2^eta3"),
    3: ("eta1^eta2^eta3",),
}


@dataclass(frozen=True)
class OdeSurface:
    """The manifold record: right-hand side f and its cached partials."""

    f: Expr
    fx: Expr
    fy: Expr
    fp: Expr


def make_surface(f) -> OdeSurface:
    f = as_expr(f)
    return OdeSurface(f=f, fx=diff(f, "x"), fy=diff(f, "y"), fp=diff(f, "p"))


@dataclass(frozen=True)
class FrameVector:
    """Vector field written over the orthonormal frame (xi1, xi2, xi3)."""

    components: tuple[Expr, Expr, Expr]

    def __add__(self, other: "FrameVector") -> "FrameVector":
        return frame_vector(*[a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "FrameVector") -> "FrameVector":
        return frame_vector(*[a - b for a, b in zip(self.components, other.components)])

    def scale(self, factor) -> "FrameVector":
        factor = as_expr(factor)
        return frame_vector(*[factor * a for a in self.components])

    def __neg__(self) -> "FrameVector":
        return self.scale(-1)


def frame_vector(a1, a2, a3) -> FrameVector:
    return FrameVector((as_expr(a1), as_expr(a2), as_expr(a3)))


XI: tuple[FrameVector, FrameVector, FrameVector] = (
    frame_vector(1, 0, 0),
    frame_vector(0, 1, 0),
    frame_vector(0, 0, 1),
)


@dataclass(frozen=True)
class KForm:
    """Differential form of degree 0..3 over the sorted coframe wedge basis.

    Degree-3 coefficients are relative to the volume form
    eta1 ^ eta2 ^ eta3.
    """

    degree: int
    coeffs: tuple[Expr, ...]

    def __post_init__(self):
        if self.degree not in _BASIS:
            raise ValueError(f"degree must be 0..3, got {self.degree}")
        if len(self.coeffs) != len(_BASIS[self.degree]):
            raise ValueError(
                f"degree {self.degree} needs {len(_BASIS[self.degree])} coefficients"
            )

    def __add__(self, other: "KForm") -> "KForm":
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        return kform(self.degree, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "KForm") -> "KForm":
        if self.degree != other.degree:
            raise ValueError("cannot subtract forms of different degree")
        return kform(self.degree, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def scale(self, factor) -> "KForm":
        factor = as_expr(factor)
        return kform(self.degree, [factor * c for c in self.coeffs])

    def __neg__(self) -> "KForm":
        return self.scale(-1)

    def coefficient(self, *indices: int) -> Expr:
        """Coefficient on eta^{i1} ^ ... ^ eta^{ik} for strictly increasing
        indices."""
        return self.coeffs[_POS[self.degree][tuple(indices)]]


def kform(degree: int, coeffs) -> KForm:
    return KForm(degree, tuple(as_expr(c) for c in coeffs))


def zero_form(degree: int) -> KForm:
    return KForm(degree, (ZERO,) * len(_BASIS[degree]))


def one_form(c1, c2, c3) -> KForm:
    return kform(1, (c1, c2, c3))


def two_form(c12, c13, c23) -> KForm:
    return kform(2, (c12, c13, c23))


def three_form(c) -> KForm:
    return kform(3, (c,))


ETA: tuple[KForm, KForm, KForm] = (
    one_form(1, 0, 0),
    one_form(0, 1, 0),
    one_form(0, 0, 1),
)


def volume_form() -> KForm:
    return three_form(ONE)


def form_is_zero(a: KForm) -> bool:
    return all(is_zero(c) for c in a.coeffs)


def vector_is_zero(v: FrameVector) -> bool:
    return all(is_zero(c) for c in v.components)


# ---------------------------------------------------------------------------
# coordinate boundary


def frame_in_coordinates(s: OdeSurface, i: int):
    """Components of xi_i over (d/dx, d/dy, d/dp)."""
    if i == 1:
        return (_TWO, simplify(_TWO * P), simplify(_TWO * s.f))
    if i == 2:
        return (ZERO, _TWO, ZERO)
    if i == 3:
        return (ZERO, ZERO, _TWO)
    raise ValueError("frame index must be 1, 2 or 3")


def coframe_in_coordinates(s: OdeSurface, i: int):
    """Components of eta^i over (dx, dy, dp)."""
    if i == 1:
        return (_HALF, ZERO, ZERO)
    if i == 2:
        return (simplify(-(_HALF * P)), _HALF, ZERO)
    if i == 3:
        return (simplify(-(_HALF * s.f)), ZERO, _HALF)
    raise ValueError("coframe index must be 1, 2 or 3")


def vector_to_coordinates(s: OdeSurface, v: FrameVector):
    """Expand a frame vector over (d/dx, d/dy, d/dp)."""
    a1, a2, a3 = v.components
    out = [ZERO, ZERO, ZERO]
    for a, i in ((a1, 1), (a2, 2), (a3, 3)):
        coords = frame_in_coordinates(s, i)
        out = [simplify(acc + a * c) for acc, c in zip(out, coords)]
    return tuple(out)


def vector_from_coordinates(s: OdeSurface, coords) -> FrameVector:
    """Frame components of A d/dx + B d/dy + C d/dp, via a^i = eta^i(V)."""
    A, B, C = (as_expr(c) for c in coords)
    return frame_vector(_HALF * A, _HALF * (B - P * A), _HALF * (C - s.f * A))


def metric_coordinate_matrix(s: OdeSurface):
    """The metric over (dx, dy, dp), expanded from sum_i eta^i (x) eta^i."""
    rows = [coframe_in_coordinates(s, i) for i in (1, 2, 3)]
    out = []
    for a in range(3):
        out.append(
            tuple(
                simplify(sum((row[a] * row[b] for row in rows), start=ZERO))
                for b in range(3)
            )
        )
    return tuple(out)


def metric_frame(v: FrameVector, w: FrameVector) -> Expr:
    """g(v, w); the frame is orthonormal so this is the component dot product."""
    return simplify(sum((a * b for a, b in zip(v.components, w.components)), start=ZERO))


# ---------------------------------------------------------------------------
# derivations


def xi_derivative(s: OdeSurface, i: int, h) -> Expr:
    """Directional derivative xi_i(h)."""
    h = as_expr(h)
    if i == 1:
        return simplify(2 * (diff(h, "x") + P * diff(h, "y") + s.f * diff(h, "p")))
    if i == 2:
        return simplify(2 * diff(h, "y"))
    if i == 3:
        return simplify(2 * diff(h, "p"))
    raise ValueError("frame index must be 1, 2 or 3")


def directional_derivative(s: OdeSurface, v: FrameVector, h) -> Expr:
    h = as_expr(h)
    return simplify(
        sum((a * xi_derivative(s, i + 1, h) for i, a in enumerate(v.components)), start=ZERO)
    )


def gradient(s: OdeSurface, h) -> FrameVector:
    """grad h = sum_i xi_i(h) xi_i."""
    return frame_vector(*[xi_derivative(s, i, h) for i in (1, 2, 3)])


def lie_bracket(s: OdeSurface, v: FrameVector, w: FrameVector) -> FrameVector:
    """[v, w], computed through coordinates and converted back to the frame."""
    vc = vector_to_coordinates(s, v)
    wc = vector_to_coordinates(s, w)
    names = ("x", "y", "p")
    out = []
    for i in range(3):
        total = ZERO
        for j in range(3):
            total = total + vc[j] * diff(wc[i], names[j]) - wc[j] * diff(vc[i], names[j])
        out.append(simplify(total))
    return vector_from_coordinates(s, out)


# ---------------------------------------------------------------------------
# exterior algebra


def _merge_sign(left: tuple[int, ...], right: tuple[int, ...]):
    """Sorted concatenation with permutation sign; None if an index repeats."""
    merged = left + right
    if len(set(merged)) != len(merged):
        return None, 0
    arr = list(merged)
    sign = 1
    for i in range(len(arr)):
        for j in range(i + 1, len(arr)):
            if arr[i] > arr[j]:
                sign = -sign
    return tuple(sorted(arr)), sign


def wedge(a: KForm, b: KForm) -> KForm:
    """Graded-antisymmetric product; degrees above 3 collapse to the zero
    3-form."""
    deg = a.degree + b.degree
    if deg > 3:
        return zero_form(3)
    coeffs = [ZERO] * len(_BASIS[deg])
    for ia, ca in zip(_BASIS[a.degree], a.coeffs):
        for ib, cb in zip(_BASIS[b.degree], b.coeffs):
            merged, sign = _merge_sign(ia, ib)
            if merged is None:
                continue
            k = _POS[deg][merged]
            coeffs[k] = coeffs[k] + sign * ca * cb
    return kform(deg, coeffs)


@lru_cache(maxsize=None)
def _structure_two_forms(s: OdeSurface) -> tuple[KForm, KForm, KForm]:
    return (
        zero_form(2),
        two_form(0, 2, 0),
        two_form(2 * s.fy, 2 * s.fp, 0),
    )


def exterior_derivative(s: OdeSurface, a: KForm) -> KForm:
    """d over the coframe: structure equations on basis forms, frame
    derivatives on coefficients, Leibniz on products."""
    if a.degree == 3:
        raise ValueError("exterior derivative of a top-degree form")
    d_eta = _structure_two_forms(s)

    def d_coeff(c: Expr) -> KForm:
        return one_form(*[xi_derivative(s, i, c) for i in (1, 2, 3)])

    if a.degree == 0:
        return d_coeff(a.coeffs[0])

    out = zero_form(a.degree + 1)
    for idx, c in zip(_BASIS[a.degree], a.coeffs):
        basis_form = kform(
            a.degree,
            [ONE if jdx == idx else ZERO for jdx in _BASIS[a.degree]],
        )
        out = out + wedge(d_coeff(c), basis_form)
        if a.degree == 1:
            out = out + d_eta[idx[0] - 1].scale(c)
        else:  # degree 2: d(eta^i ^ eta^j) = d eta^i ^ eta^j - eta^i ^ d eta^j
            i, j = idx
            out = out + (
                wedge(d_eta[i - 1], ETA[j - 1]) - wedge(ETA[i - 1], d_eta[j - 1])
            ).scale(c)
    return out


def interior_product(v: FrameVector, a: KForm) -> KForm:
    """Contraction in the first slot."""
    if a.degree == 0:
        raise ValueError("cannot contract a 0-form")
    comp = v.components
    if a.degree == 1:
        return kform(0, [sum((c * w for c, w in zip(a.coeffs, comp)), start=ZERO)])
    coeffs = [ZERO] * len(_BASIS[a.degree - 1])
    for idx, c in zip(_BASIS[a.degree], a.coeffs):
        for slot, i in enumerate(idx):
            rest = idx[:slot] + idx[slot + 1 :]
            sign = -1 if slot % 2 else 1
            k = _POS[a.degree - 1][rest]
            coeffs[k] = coeffs[k] + sign * c * comp[i - 1]
    return kform(a.degree - 1, coeffs)


def pair(a: KForm, *vectors: FrameVector) -> Expr:
    """Evaluate a k-form on k frame vectors by iterated contraction.

    This is the determinant normalization: the volume form returns the
    determinant of the component matrix, so pair(vol, xi1, xi2, xi3) = 1.
    """
    if len(vectors) != a.degree:
        raise ValueError(f"degree {a.degree} form needs {a.degree} vectors")
    out = a
    for v in vectors:
        out = interior_product(v, out)
    return simplify(out.coeffs[0])


def sharp(a: KForm) -> FrameVector:
    """Index raising; on the orthonormal frame the components carry over."""
    if a.degree != 1:
        raise ValueError("sharp is defined on 1-forms")
    return FrameVector(a.coeffs)


def flat(v: FrameVector) -> KForm:
    return KForm(1, v.components)


def cross(v: FrameVector, w: FrameVector) -> FrameVector:
    """Vector cross product of the oriented orthonormal frame:
    g(v x w, z) = vol(v, w, z)."""
    a1, a2, a3 = v.components
    b1, b2, b3 = w.components
    return frame_vector(a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1)


# ---------------------------------------------------------------------------
# serialization


def form_to_text(a: KForm) -> str:
    """Human-readable linear combination over the wedge basis labels."""
    pieces = []
    for label, c in zip(BASIS_LABELS[a.degree], a.coeffs):
        c = simplify(c)
        if isinstance(c, Const) and c.value == 0:
            continue
        if a.degree == 0 or label == "1":
            pieces.append(to_string(c))
        elif isinstance(c, Const) and c.value == 1:
            pieces.append(label)
        elif isinstance(c, Const) and c.value == -1:
            pieces.append(f"-{label}")
        else:
            cs = to_string(c)
            # sums need parens; plain terms multiply on directly
            pieces.append(f"({cs})*{label}" if " " in cs else f"{cs}*{label}")
    if not pieces:
        return "0"
    out = pieces[0]
    for piece in pieces[1:]:
        if piece.startswith("-"):
            out += " - " + piece[1:]
        else:
            out += " + " + piece
    return out


def form_to_json(a: KForm) -> dict:
    return {
        "degree": a.degree,
        "coefficients": {
            label: to_string(c) for label, c in zip(BASIS_LABELS[a.degree], a.coeffs)
        },
    }


def vector_to_json(v: FrameVector) -> dict:
    return {
        "frame": {
            label: to_string(c)
            for label, c in zip(("xi1", "xi2", "xi3"), v.components)
        }
    }
