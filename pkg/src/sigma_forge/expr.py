"""Minimal symbolic kernel for scalar fields in the coordinates x, y, p.

Expressions are immutable trees built from exact rational constants, the
three coordinate variables, the elementary functions sin/cos/exp/ln/sqrt
and the arithmetic operations.  Simplification is deliberately conservative:
constant folding, 0/1 identities, flattening of sums and products, and
collection of like terms (which cancels syntactically equal transcendental
subterms as well).  Identity-to-zero testing uses structural simplification
first and falls back to seeded numeric sampling.
"""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

__all__ = [
    "Expr",
    "Const",
    "Var",
    "Fun",
    "Add",
    "Mul",
    "Pow",
    "Point",
    "ExprError",
    "ParseError",
    "EvalDomainError",
    "parse",
    "to_string",
    "simplify",
    "diff",
    "evaluate",
    "is_zero",
    "compile_expr",
    "antiderivative_in_x",
    "X",
    "Y",
    "P",
    "ZERO",
    "ONE",
]

VARIABLES = ("x", "y", "p")
FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt")

#: number of sample points used by the numeric fallback of :func:`is_zero`
ZERO_TEST_SAMPLES = 12
#: absolute threshold below which a sampled value counts as zero
ZERO_TEST_TOL = 1e-9
#: default seed of the sampling stream; override with SIGMA_FORGE_SEED
ZERO_TEST_SEED = 75021
#: product-of-term-counts budget above which sums are not multiplied out
_EXPAND_LIMIT = 20000

Number = Union[int, float, Fraction]


class ExprError(Exception):
    """Base class for expression errors."""


class ParseError(ExprError):
    """Malformed or unrecognizable input text."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class EvalDomainError(ExprError):
    """Evaluation left the domain of definition (1/0, ln of a non-positive
    value, fractional power of a negative base, overflow)."""


# ---------------------------------------------------------------------------
# nodes


class Expr:
    """Immutable expression node.  Arithmetic operators return simplified
    (canonical) results; raw trees can be built through the subclass
    constructors and normalized later with :func:`simplify`."""

    __slots__ = ("_hash", "_canonical", "_key")

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or self._hash != other._hash:
            return False
        return self._payload() == other._payload()

    def __hash__(self):
        return self._hash

    def _payload(self):
        raise NotImplementedError

    def _build_key(self):
        raise NotImplementedError

    def __repr__(self):
        return to_string(self)

    # -- operator sugar (canonicalizing) ------------------------------------

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, mul(NEG_ONE, as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), mul(NEG_ONE, self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return mul(self, power(as_expr(other), NEG_ONE))

    def __rtruediv__(self, other):
        return mul(as_expr(other), power(self, NEG_ONE))

    def __pow__(self, other):
        return power(self, as_expr(other))

    def __neg__(self):
        return mul(NEG_ONE, self)


class Const(Expr):
    """Exact rational constant (a float is kept only if handed one)."""

    __slots__ = ("value",)

    def __init__(self, value: Number):
        if isinstance(value, int):
            value = Fraction(value)
        self.value = value
        self._hash = hash(("c", value))
        self._canonical = True
        self._key = None

    def _payload(self):
        return self.value

    def _build_key(self):
        return (0, self.value)


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        if name not in VARIABLES:
            raise ValueError(f"unknown variable {name!r}")
        self.name = name
        self._hash = hash(("v", name))
        self._canonical = True
        self._key = None

    def _payload(self):
        return self.name

    def _build_key(self):
        return (1, self.name)


class Fun(Expr):
    __slots__ = ("name", "arg")

    def __init__(self, name: str, arg: Expr):
        if name not in FUNCTIONS:
            raise ValueError(f"unknown function {name!r}")
        self.name = name
        self.arg = arg
        self._hash = hash(("f", name, arg))
        self._canonical = False
        self._key = None

    def _payload(self):
        return (self.name, self.arg)

    def _build_key(self):
        return (2, self.name, _key(self.arg))


class Pow(Expr):
    __slots__ = ("base", "exponent")

    def __init__(self, base: Expr, exponent: Expr):
        self.base = base
        self.exponent = exponent
        self._hash = hash(("p", base, exponent))
        self._canonical = False
        self._key = None

    def _payload(self):
        return (self.base, self.exponent)

    def _build_key(self):
        return (3, _key(self.base), _key(self.exponent))


class Mul(Expr):
    __slots__ = ("args",)

    def __init__(self, *args: Expr):
        self.args = tuple(args)
        self._hash = hash(("m", self.args))
        self._canonical = False
        self._key = None

    def _payload(self):
        return self.args

    def _build_key(self):
        return (4, tuple(_key(a) for a in self.args))


class Add(Expr):
    __slots__ = ("args",)

    def __init__(self, *args: Expr):
        self.args = tuple(args)
        self._hash = hash(("a", self.args))
        self._canonical = False
        self._key = None

    def _payload(self):
        return self.args

    def _build_key(self):
        return (5, tuple(_key(a) for a in self.args))


def _key(e: Expr):
    k = e._key
    if k is None:
        k = e._build_key()
        e._key = k
    return k


X = Var("x")
Y = Var("y")
P = Var("p")
ZERO = Const(0)
ONE = Const(1)
NEG_ONE = Const(-1)


def as_expr(v) -> Expr:
    if isinstance(v, Expr):
        return simplify(v)
    if isinstance(v, (int, float, Fraction)):
        return Const(v)
    raise TypeError(f"cannot interpret {v!r} as an expression")


# ---------------------------------------------------------------------------
# canonicalization

_SIMPLIFY_CACHE: dict[Expr, Expr] = {}


def simplify(e: Expr) -> Expr:
    """Return the canonical form of ``e``.

    Canonical trees are flattened, constant-folded sums of coefficient *
    monomial terms with deterministic ordering.  The transformation preserves
    the value of the expression at every point of its domain.
    """
    if e._canonical:
        return e
    cached = _SIMPLIFY_CACHE.get(e)
    if cached is not None:
        return cached
    if isinstance(e, Add):
        out = add(*e.args)
    elif isinstance(e, Mul):
        out = mul(*e.args)
    elif isinstance(e, Pow):
        out = power(e.base, e.exponent)
    elif isinstance(e, Fun):
        out = fun(e.name, e.arg)
    else:  # Const, Var
        out = e
    _SIMPLIFY_CACHE[e] = out
    return out


def _mark(e: Expr) -> Expr:
    e._canonical = True
    return e


def _coeff_split(term: Expr):
    """Split a canonical term into (rational/float coefficient, factor tuple)."""
    if isinstance(term, Const):
        return term.value, ()
    if isinstance(term, Mul):
        if isinstance(term.args[0], Const):
            return term.args[0].value, term.args[1:]
        return Fraction(1), term.args
    return Fraction(1), (term,)


def _make_term(coeff, factors) -> Expr:
    if coeff == 0:
        return ZERO
    if not factors:
        return Const(coeff)
    if coeff == 1 and len(factors) == 1:
        return factors[0]
    if coeff == 1:
        return _mark(Mul(*factors))
    return _mark(Mul(Const(coeff), *factors))


def add(*args) -> Expr:
    """Canonical sum: flatten, fold constants, collect like terms."""
    acc: dict[tuple, list] = {}
    order: list[tuple] = []

    def put(coeff, factors):
        k = tuple(_key(f) for f in factors)
        slot = acc.get(k)
        if slot is None:
            acc[k] = [coeff, factors]
            order.append(k)
        else:
            slot[0] = slot[0] + coeff

    for raw in args:
        a = as_expr(raw) if not isinstance(raw, Expr) else simplify(raw)
        if isinstance(a, Add):
            for t in a.args:
                put(*_coeff_split(t))
        else:
            put(*_coeff_split(a))

    terms = []
    for k in sorted(order):
        coeff, factors = acc[k]
        if coeff == 0:
            continue
        terms.append(_make_term(coeff, factors))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return _mark(Add(*terms))


def mul(*args) -> Expr:
    """Canonical product: flatten, fold constants, collect powers of a common
    base, and multiply out sums (within a term-count budget)."""
    coeff = Fraction(1)
    pending: list[Expr] = []
    for raw in args:
        a = as_expr(raw) if not isinstance(raw, Expr) else simplify(raw)
        if isinstance(a, Mul):
            pending.extend(a.args)
        else:
            pending.append(a)

    powers: dict[Expr, Expr] = {}
    porder: list[Expr] = []

    def put(base, exp):
        if base in powers:
            powers[base] = add(powers[base], exp)
        else:
            powers[base] = exp
            porder.append(base)

    for a in pending:
        if isinstance(a, Const):
            if a.value == 0:
                return ZERO
            coeff = coeff * a.value
        elif isinstance(a, Pow):
            put(a.base, a.exponent)
        else:
            put(a, ONE)

    factors: list[Expr] = []
    for base in porder:
        f = power(base, powers[base])
        if isinstance(f, Const):
            if f.value == 0:
                return ZERO
            coeff = coeff * f.value
        elif isinstance(f, Mul):
            # power() may distribute over a product; refold its pieces
            for piece in f.args:
                if isinstance(piece, Const):
                    coeff = coeff * piece.value
                else:
                    factors.append(piece)
        else:
            factors.append(f)

    if coeff == 0:
        return ZERO

    # scalar times a single sum: rescale term coefficients directly (term
    # keys are unchanged, so ordering and collection are already settled)
    if len(factors) == 1 and isinstance(factors[0], Add) and coeff != 1:
        terms = []
        for t in factors[0].args:
            c0, mono = _coeff_split(t)
            scaled = _make_term(coeff * c0, mono)
            if not (isinstance(scaled, Const) and scaled.value == 0):
                terms.append(scaled)
        if not terms:
            return ZERO
        if len(terms) == 1:
            return terms[0]
        return _mark(Add(*terms))

    # distribute over sums when the result stays small
    budget = 1
    for f in factors:
        if isinstance(f, Add):
            budget *= len(f.args)
    if budget > 1 and budget <= _EXPAND_LIMIT:
        for i, f in enumerate(factors):
            if isinstance(f, Add):
                rest = factors[:i] + factors[i + 1 :]
                return add(*[mul(Const(coeff), t, *rest) for t in f.args])

    factors.sort(key=_key)
    return _make_term(coeff, tuple(factors))


def _rational_pow(b: Fraction, n: int):
    if abs(n) > 256:
        return None
    if n >= 0:
        return b**n
    if b == 0:
        return None
    return b**n


def _exact_root(b: Fraction, r: int):
    """Exact r-th root of a nonnegative rational, or None."""
    if b < 0:
        return None

    def iroot(n: int):
        if n in (0, 1):
            return n
        k = round(n ** (1.0 / r))
        for c in (k - 1, k, k + 1):
            if c >= 0 and c**r == n:
                return c
        return None

    num = iroot(b.numerator)
    den = iroot(b.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def power(base, exponent) -> Expr:
    """Canonical power; integer powers of products and small sums expand."""
    b = as_expr(base) if not isinstance(base, Expr) else simplify(base)
    e = as_expr(exponent) if not isinstance(exponent, Expr) else simplify(exponent)

    if isinstance(e, Const):
        if e.value == 0:
            return ONE
        if e.value == 1:
            return b
        if isinstance(b, Const):
            bv, ev = b.value, e.value
            if isinstance(bv, Fraction) and isinstance(ev, Fraction):
                if ev.denominator == 1:
                    folded = _rational_pow(bv, ev.numerator)
                    if folded is not None:
                        return Const(folded)
                else:
                    root = _exact_root(bv, ev.denominator)
                    if root is not None:
                        folded = _rational_pow(root, ev.numerator)
                        if folded is not None:
                            return Const(folded)
            else:
                try:
                    return Const(float(bv) ** float(ev))
                except (OverflowError, ValueError, ZeroDivisionError):
                    pass
        if isinstance(e.value, Fraction) and e.value.denominator == 1:
            n = e.value.numerator
            if isinstance(b, Mul):
                return mul(*[power(f, e) for f in b.args])
            if isinstance(b, Pow) and isinstance(b.exponent, Const):
                return power(b.base, mul(b.exponent, e))
            if isinstance(b, Add) and 2 <= n <= 8 and len(b.args) ** n <= _EXPAND_LIMIT:
                # term-by-term convolution; going through mul() would re-collect
                # the equal sum factors into this same power
                out: Expr = b
                for _ in range(n - 1):
                    terms = out.args if isinstance(out, Add) else (out,)
                    out = add(*[mul(t, u) for t in terms for u in b.args])
                return out
    if isinstance(b, Const) and b.value == 1:
        return ONE
    return _mark(Pow(b, e))


def fun(name: str, arg) -> Expr:
    a = as_expr(arg) if not isinstance(arg, Expr) else simplify(arg)
    if isinstance(a, Const) and isinstance(a.value, Fraction):
        v = a.value
        if name == "sin" and v == 0:
            return ZERO
        if name == "cos" and v == 0:
            return ONE
        if name == "exp" and v == 0:
            return ONE
        if name == "ln" and v == 1:
            return ZERO
        if name == "sqrt":
            root = _exact_root(v, 2)
            if root is not None:
                return Const(root)
    return _mark(Fun(name, a))


# ---------------------------------------------------------------------------
# differentiation


def diff(e: Expr, v) -> Expr:
    """Partial derivative of ``e`` with respect to the variable ``v``
    (a :class:`Var` or one of the names "x", "y", "p"); simplified."""
    name = v.name if isinstance(v, Var) else v
    if name not in VARIABLES:
        raise ValueError(f"unknown variable {name!r}")
    return _diff(simplify(e), name)


def _diff(e: Expr, v: str) -> Expr:
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == v else ZERO
    if isinstance(e, Add):
        return add(*[_diff(t, v) for t in e.args])
    if isinstance(e, Mul):
        terms = []
        for i, f in enumerate(e.args):
            df = _diff(f, v)
            if df is ZERO or (isinstance(df, Const) and df.value == 0):
                continue
            terms.append(mul(df, *e.args[:i], *e.args[i + 1 :]))
        return add(*terms) if terms else ZERO
    if isinstance(e, Pow):
        db = _diff(e.base, v)
        de = _diff(e.exponent, v)
        if isinstance(de, Const) and de.value == 0:
            # b' * n * b^(n-1)
            return mul(e.exponent, power(e.base, add(e.exponent, NEG_ONE)), db)
        # general: b^e * (e' ln b + e b'/b)
        return mul(
            power(e.base, e.exponent),
            add(mul(de, fun("ln", e.base)), mul(e.exponent, db, power(e.base, NEG_ONE))),
        )
    if isinstance(e, Fun):
        da = _diff(e.arg, v)
        if isinstance(da, Const) and da.value == 0:
            return ZERO
        if e.name == "sin":
            outer = fun("cos", e.arg)
        elif e.name == "cos":
            outer = mul(NEG_ONE, fun("sin", e.arg))
        elif e.name == "exp":
            outer = fun("exp", e.arg)
        elif e.name == "ln":
            outer = power(e.arg, NEG_ONE)
        else:  # sqrt
            outer = mul(Const(Fraction(1, 2)), power(fun("sqrt", e.arg), NEG_ONE))
        return mul(outer, da)
    raise TypeError(f"cannot differentiate {e!r}")


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class Point:
    """A point of the coordinate chart; all coordinates finite."""

    x: float
    y: float
    p: float

    def __post_init__(self):
        for c in (self.x, self.y, self.p):
            if not math.isfinite(c):
                raise ValueError("point coordinates must be finite")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.p)


def _point_env(q) -> dict[str, float]:
    if isinstance(q, Point):
        return {"x": q.x, "y": q.y, "p": q.p}
    qx, qy, qp = q
    return {"x": float(qx), "y": float(qy), "p": float(qp)}


def evaluate(e: Expr, q) -> float:
    """Evaluate ``e`` at a point (a :class:`Point` or an (x, y, p) triple).

    Raises :class:`EvalDomainError` instead of returning NaN or infinity.
    """
    env = _point_env(q)

    def rec(n: Expr) -> float:
        if isinstance(n, Const):
            return float(n.value)
        if isinstance(n, Var):
            return env[n.name]
        if isinstance(n, Add):
            return math.fsum(rec(a) for a in n.args)
        if isinstance(n, Mul):
            out = 1.0
            for a in n.args:
                out *= rec(a)
            return out
        if isinstance(n, Pow):
            b = rec(n.base)
            ex = rec(n.exponent)
            if b == 0.0 and ex < 0.0:
                raise EvalDomainError("division by zero")
            if b < 0.0 and not float(ex).is_integer():
                raise EvalDomainError("fractional power of a negative base")
            try:
                return b**ex
            except OverflowError as err:
                raise EvalDomainError("overflow in power") from err
        if isinstance(n, Fun):
            a = rec(n.arg)
            if n.name == "ln":
                if a <= 0.0:
                    raise EvalDomainError("ln of a non-positive value")
                return math.log(a)
            if n.name == "sqrt":
                if a < 0.0:
                    raise EvalDomainError("sqrt of a negative value")
                return math.sqrt(a)
            try:
                return getattr(math, n.name)(a)
            except OverflowError as err:
                raise EvalDomainError(f"overflow in {n.name}") from err
        raise TypeError(f"cannot evaluate {n!r}")

    out = rec(e)
    if not math.isfinite(out):
        raise EvalDomainError("non-finite result")
    return out


def compile_expr(e: Expr) -> Callable[[float, float, float], float]:
    """Compile to a plain ``f(x, y, p) -> float`` for tight numeric loops.

    Domain violations surface as ValueError/ZeroDivisionError/OverflowError
    from the generated code.
    """
    src = _pycode(simplify(e))
    code = compile(f"lambda x, y, p: ({src})", "<sigma-forge expr>", "eval")
    return eval(code, {"math": math})  # noqa: S307 - code built from our own AST


def _pycode(e: Expr) -> str:
    if isinstance(e, Const):
        v = e.value
        if isinstance(v, Fraction):
            if v.denominator == 1:
                return f"({v.numerator})"
            return f"({v.numerator}/{v.denominator})"
        return f"({v!r})"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Add):
        return "(" + " + ".join(_pycode(a) for a in e.args) + ")"
    if isinstance(e, Mul):
        return "(" + " * ".join(_pycode(a) for a in e.args) + ")"
    if isinstance(e, Pow):
        return f"({_pycode(e.base)} ** {_pycode(e.exponent)})"
    if isinstance(e, Fun):
        pyname = "math.log" if e.name == "ln" else f"math.{e.name}"
        return f"{pyname}({_pycode(e.arg)})"
    raise TypeError(f"cannot compile {e!r}")


# ---------------------------------------------------------------------------
# zero testing


def _zero_test_seed() -> int:
    raw = os.environ.get("SIGMA_FORGE_SEED")
    if raw is not None:
        try:
            return int(raw)
        except ValueError:
            pass
    return ZERO_TEST_SEED


def _sample_coordinate(rng: random.Random) -> float:
    # uniform on [-2, -0.1] U [0.1, 2]
    magnitude = rng.uniform(0.1, 2.0)
    return magnitude if rng.random() < 0.5 else -magnitude


def is_zero(e: Expr, *, samples: int = ZERO_TEST_SAMPLES, tol: float = ZERO_TEST_TOL) -> bool:
    """Decide whether ``e`` vanishes identically.

    Structural simplification decides the common cases exactly; otherwise the
    expression is evaluated at ``samples`` seeded pseudo-random points with
    coordinates away from zero, and declared zero iff every defined value has
    magnitude below ``tol``.  Expressions that cannot be evaluated at enough
    sample points are conservatively reported as non-zero.
    """
    s = simplify(e)
    if isinstance(s, Const):
        return s.value == 0
    rng = random.Random(_zero_test_seed())
    found = 0
    attempts = 0
    while found < samples and attempts < 40 * samples:
        attempts += 1
        q = (
            _sample_coordinate(rng),
            _sample_coordinate(rng),
            _sample_coordinate(rng),
        )
        try:
            v = evaluate(s, q)
        except EvalDomainError:
            continue
        if abs(v) > tol:
            return False
        found += 1
    return found >= samples


# ---------------------------------------------------------------------------
# parsing


_OPS = set("+-*/^()")


def _tokenize(text: str):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                if text[j] == ".":
                    seen_dot = True
                j += 1
            tokens.append(("num", text[i:j], i))
            i = j
            continue
        if c.isalpha():
            j = i
            while j < n and text[j].isalpha():
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
            continue
        if c in _OPS:
            tokens.append(("op", c, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    tokens.append(("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, value, at = self.peek()
        if kind == "op" and value == op:
            return self.advance()
        raise ParseError(f"expected {op!r}", at)

    def expression(self) -> Expr:
        node = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                rhs = self.term()
                node = add(node, rhs) if value == "+" else add(node, mul(NEG_ONE, rhs))
            else:
                return node

    def term(self) -> Expr:
        node = self.factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                rhs = self.factor()
                node = mul(node, rhs) if value == "*" else mul(node, power(rhs, NEG_ONE))
            else:
                return node

    def factor(self) -> Expr:
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            # unary minus applies to the whole power: -x^2 == -(x^2)
            return mul(NEG_ONE, self.factor())
        node = self.base()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            return power(node, self.factor())
        return node

    def base(self) -> Expr:
        kind, value, at = self.advance()
        if kind == "num":
            return Const(Fraction(value))
        if kind == "ident":
            if value in VARIABLES:
                return Var(value)
            if value in FUNCTIONS:
                self.expect_op("(")
                arg = self.expression()
                self.expect_op(")")
                return fun(value, arg)
            raise ParseError(f"unknown identifier {value!r}", at)
        if kind == "op" and value == "(":
            node = self.expression()
            self.expect_op(")")
            return node
        raise ParseError("expected a number, variable, function or '('", at)


def parse(text: str) -> Expr:
    """Parse an expression in x, y, p.

    Grammar: ``+ -`` < ``* /`` < ``^`` (right associative); unary minus binds
    the whole power, so ``-x^2`` means ``-(x^2)``.  Raises :class:`ParseError`
    with the failing offset.
    """
    parser = _Parser(text)
    node = parser.expression()
    kind, _, at = parser.peek()
    if kind != "eof":
        raise ParseError("unexpected trailing input", at)
    return node


# ---------------------------------------------------------------------------
# printing

_PREC_ADD = 10
_PREC_MUL = 20
_PREC_POW = 30
_PREC_ATOM = 100


def _const_str(v) -> tuple[str, int]:
    if isinstance(v, Fraction):
        if v.denominator == 1:
            s = str(v.numerator)
        else:
            s = f"{v.numerator}/{v.denominator}"
    else:
        s = repr(v)
    if s.startswith("-"):
        return s, _PREC_ADD  # bare as a sum term / at top level, else parens
    if "/" in s or "." in s:
        return s, _PREC_MUL
    return s, _PREC_ATOM


def _fmt(e: Expr, parent: int) -> str:
    if isinstance(e, Const):
        s, prec = _const_str(e.value)
        return f"({s})" if prec < parent else s
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Fun):
        return f"{e.name}({_fmt(e.arg, 0)})"
    if isinstance(e, Pow):
        base = _fmt(e.base, _PREC_POW + 1)
        exponent = _fmt(e.exponent, _PREC_POW + 1)
        s = f"{base}^{exponent}"
        return f"({s})" if parent > _PREC_POW else s
    if isinstance(e, Mul):
        args = list(e.args)
        prefix = ""
        if isinstance(args[0], Const) and args[0].value < 0 and len(args) > 1:
            prefix = "-"
            if args[0].value == -1:
                args = args[1:]
            else:
                args[0] = Const(-args[0].value)
        s = prefix + "*".join(_fmt(a, _PREC_MUL + 1) for a in args)
        cutoff = _PREC_MUL if not prefix else _PREC_ADD
        return f"({s})" if parent > cutoff else s
    if isinstance(e, Add):
        parts = []
        for i, t in enumerate(e.args):
            # terms are never sums themselves; render at sum level so a
            # leading minus can be spliced into the join
            piece = _fmt(t, _PREC_ADD)
            if i == 0:
                parts.append(piece)
            elif piece.startswith("-"):
                parts.append(" - " + piece[1:])
            else:
                parts.append(" + " + piece)
        s = "".join(parts)
        return f"({s})" if parent > _PREC_ADD else s
    raise TypeError(f"cannot print {e!r}")


def to_string(e: Expr) -> str:
    """Render ``e`` in the input grammar; parse(to_string(e)) preserves value."""
    return _fmt(e, 0)


# ---------------------------------------------------------------------------
# polynomial antiderivative (used by the Reeb-flow construction)


def antiderivative_in_x(e: Expr) -> Expr:
    """Antiderivative of a polynomial in x alone, vanishing at x = 0.

    Raises ValueError if the canonical form contains y, p, any function node
    or a negative/fractional power of x.
    """
    s = simplify(e)
    terms = s.args if isinstance(s, Add) else (s,)
    out = []
    for t in terms:
        coeff, factors = _coeff_split(t)
        if not factors:
            out.append(mul(Const(coeff), X))
            continue
        if len(factors) != 1:
            raise ValueError(f"not a polynomial in x: {to_string(e)}")
        f = factors[0]
        if isinstance(f, Var) and f.name == "x":
            n = 1
        elif (
            isinstance(f, Pow)
            and isinstance(f.base, Var)
            and f.base.name == "x"
            and isinstance(f.exponent, Const)
            and isinstance(f.exponent.value, Fraction)
            and f.exponent.value.denominator == 1
            and f.exponent.value >= 1
        ):
            n = f.exponent.value.numerator
        else:
            raise ValueError(f"not a polynomial in x: {to_string(e)}")
        out.append(mul(Const(Fraction(coeff) / (n + 1)), power(X, Const(n + 1))))
    return add(*out)
