"""Shared fixtures: the f-corpus, random fields, and independent oracles."""

from __future__ import annotations

import random

import pytest

from sigma_forge.expr import Const, P, X, Y, ZERO, add, diff, mul, parse, power, simplify
from sigma_forge.geometry import (
    OdeSurface,
    frame_in_coordinates,
    frame_vector,
    make_surface,
)

CORPUS_SEED = 20260810

#: the named members every suite must cover
FIXED_CORPUS = ("0", "y", "x + p^2", "x^2", "x*p", "sin(x) + p")


def random_polynomial(rng: random.Random, vars_=(0, 1, 2), density: float = 0.22):
    """Random polynomial of degree <= 3 in each allowed variable with
    coefficients in {-2..2} (zero coefficients drop the monomial)."""
    gens = (X, Y, P)
    terms = []
    for i in range(4):
        for j in range(4):
            for k in range(4):
                degs = (i, j, k)
                if any(d > 0 and axis not in vars_ for axis, d in enumerate(degs)):
                    continue
                if rng.random() < density:
                    c = rng.choice((-2, -1, 1, 2))
                    terms.append(
                        mul(Const(c), *[power(g, d) for g, d in zip(gens, degs) if d > 0])
                    )
    return add(*terms) if terms else ZERO


def build_corpus():
    rng = random.Random(CORPUS_SEED)
    fs = [random_polynomial(rng) for _ in range(50)]
    fs += [simplify(parse(text)) for text in FIXED_CORPUS]
    return fs


@pytest.fixture(scope="session")
def corpus():
    return build_corpus()


@pytest.fixture(scope="session")
def corpus_surfaces(corpus):
    return [make_surface(f) for f in corpus]


@pytest.fixture(scope="session")
def small_surfaces(corpus_surfaces):
    """A cheap deterministic slice for the heavier per-module suites."""
    return corpus_surfaces[:10] + corpus_surfaces[-6:]


def random_frame_field(rng: random.Random, density: float = 0.4):
    """Frame vector field with small random polynomial components."""

    def component():
        terms = [Const(rng.randint(-2, 2))]
        for g in (X, Y, P):
            if rng.random() < density:
                terms.append(mul(Const(rng.choice((-2, -1, 1, 2))), g))
        if rng.random() < density / 2:
            terms.append(mul(Const(rng.choice((-1, 1))), X, P))
        return add(*terms)

    return frame_vector(component(), component(), component())


def random_point(rng: random.Random):
    """Coordinates bounded away from zero, as in the zero-test sampler."""

    def coord():
        magnitude = rng.uniform(0.1, 2.0)
        return magnitude if rng.random() < 0.5 else -magnitude

    return (coord(), coord(), coord())


def coordinate_exterior_derivative_on_frame_pairs(s: OdeSurface, coeffs):
    """Independent route for d of a 1-form given by coordinate components
    (over dx, dy, dp): evaluate d(a) on frame pairs through partial
    derivatives only, never touching the structure equations.

    Returns {(i, j): d(a)(xi_i, xi_j)} for i < j, in the determinant
    convention matching the stored wedge-basis coefficients.
    """
    names = ("x", "y", "p")
    frames = [frame_in_coordinates(s, i) for i in (1, 2, 3)]

    def along(vec, h):
        return simplify(sum((vec[a] * diff(h, names[a]) for a in range(3)), start=ZERO))

    def d_pair(V, W):
        total = ZERO
        for idx in range(3):
            a = coeffs[idx]
            total = total + along(V, a) * W[idx] - along(W, a) * V[idx]
        return simplify(total)

    return {
        (i + 1, j + 1): d_pair(frames[i], frames[j])
        for i in range(3)
        for j in range(i + 1, 3)
    }
