"""Minimal symbolic-expression core.

Immutable expression trees over named real variables with exact rational
constants.  Supports parsing, differentiation, canonical simplification,
scalar and vectorized numeric evaluation, and seeded random equivalence
testing.  All coordinate variables are assumed to range over the open
domains declared by their charts; simplification of sqrt uses positivity
of its argument on those domains (sqrt(x^2) -> x).
"""

from __future__ import annotations

import math
import os
from fractions import Fraction

import numpy as np

__all__ = [
    "Expr", "Const", "Var", "FieldAtom", "Add", "Mul", "Pow", "Neg", "Div",
    "Func", "FUNCTIONS", "ZERO", "ONE",
    "const", "var", "add", "mul", "neg", "sub", "div", "pow_", "func",
    "sin", "cos", "tan", "sqrt", "exp", "log", "arctan", "arccos",
    "parse_expr", "print_expr", "to_latex", "diff", "simplify",
    "eval_expr", "lambdify", "free_vars", "equivalent", "substitute",
    "SymExprError", "ParseError", "UnknownFunctionError", "EvalError",
    "UnboundVariableError", "EvalDomainError", "IllConditionedError",
    "DEFAULT_DOMAIN", "default_seed",
]

FUNCTIONS = ("sin", "cos", "tan", "sqrt", "exp", "log", "arctan", "arccos")

DEFAULT_DOMAIN = (0.1, 2.0)


def default_seed() -> int:
    """Seed for randomized equivalence checks (CURVMAX_SEED overrides)."""
    return int(os.environ.get("CURVMAX_SEED", "20120196"))


class SymExprError(Exception):
    pass


class ParseError(SymExprError):
    def __init__(self, msg, line, col):
        super().__init__(f"{msg} (line {line}, column {col})")
        self.line = line
        self.col = col


class UnknownFunctionError(ParseError):
    pass


class EvalError(SymExprError):
    def __init__(self, msg, subexpr):
        super().__init__(f"{msg} in {print_expr(subexpr)}")
        self.subexpr = subexpr


class UnboundVariableError(EvalError):
    pass


class EvalDomainError(EvalError):
    pass


class IllConditionedError(SymExprError):
    pass


# ---------------------------------------------------------------------------
# Node types
# ---------------------------------------------------------------------------

class Expr:
    """Base class; all nodes are immutable and hashable."""

    __slots__ = ("_hash",)

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented
        return self._parts() == other._parts()

    def __hash__(self):
        h = getattr(self, "_hash", None)
        if h is None:
            h = hash((type(self).__name__, self._parts()))
            object.__setattr__(self, "_hash", h)
        return h

    def _parts(self):
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {print_expr(self)}>"

    # arithmetic sugar; results are canonical given canonical operands
    def __add__(self, other):
        return add(self, _wrap(other))

    def __radd__(self, other):
        return add(_wrap(other), self)

    def __sub__(self, other):
        return sub(self, _wrap(other))

    def __rsub__(self, other):
        return sub(_wrap(other), self)

    def __mul__(self, other):
        return mul(self, _wrap(other))

    def __rmul__(self, other):
        return mul(_wrap(other), self)

    def __truediv__(self, other):
        return div(self, _wrap(other))

    def __rtruediv__(self, other):
        return div(_wrap(other), self)

    def __pow__(self, n):
        return pow_(self, n)

    def __neg__(self):
        return mul(Const(-1), self)


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        object.__setattr__(self, "value", value if isinstance(value, Fraction) else Fraction(value))

    def __setattr__(self, *a):
        raise AttributeError("Expr is immutable")

    def _parts(self):
        return (self.value,)


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name):
        object.__setattr__(self, "name", name)

    def __setattr__(self, *a):
        raise AttributeError("Expr is immutable")

    def _parts(self):
        return (self.name,)


class FieldAtom(Expr):
    """Opaque field component u(args...) with an optional partial-derivative
    multi-index.  Derivative variables are kept sorted, so mixed partials
    commute structurally.  Evaluation looks the atom up by ``name``."""

    __slots__ = ("base", "args", "derivs")

    def __init__(self, base, args, derivs=()):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "args", tuple(args))
        object.__setattr__(self, "derivs", tuple(sorted(derivs)))

    def __setattr__(self, *a):
        raise AttributeError("Expr is immutable")

    def _parts(self):
        return (self.base, self.args, self.derivs)

    @property
    def name(self):
        if not self.derivs:
            return self.base
        return "d_" + "_".join(self.derivs) + "_" + self.base


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, *terms):
        object.__setattr__(self, "terms", tuple(terms))

    def __setattr__(self, *a):
        raise AttributeError("Expr is immutable")

    def _parts(self):
        return self.terms


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, *factors):
        object.__setattr__(self, "factors", tuple(factors))

    def __setattr__(self, *a):
        raise AttributeError("Expr is immutable")

    def _parts(self):
        return self.factors


class Pow(Expr):
    """Integer power."""

    __slots__ = ("base", "exponent")

    def __init__(self, base, exponent):
        if not isinstance(exponent, int):
            raise TypeError("Pow exponent must be an integer")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, *a):
        raise AttributeError("Expr is immutable")

    def _parts(self):
        return (self.base, self.exponent)


class Neg(Expr):
    """Parser-level unary minus; simplifies to Mul(-1, x)."""

    __slots__ = ("arg",)

    def __init__(self, arg):
        object.__setattr__(self, "arg", arg)

    def __setattr__(self, *a):
        raise AttributeError("Expr is immutable")

    def _parts(self):
        return (self.arg,)


class Div(Expr):
    """Parser-level quotient; simplifies to Mul(a, Pow(b, -1))."""

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("Expr is immutable")

    def _parts(self):
        return (self.num, self.den)


class Func(Expr):
    __slots__ = ("fname", "arg")

    def __init__(self, fname, arg):
        if fname not in FUNCTIONS:
            raise ValueError(f"unknown function {fname!r}")
        object.__setattr__(self, "fname", fname)
        object.__setattr__(self, "arg", arg)

    def __setattr__(self, *a):
        raise AttributeError("Expr is immutable")

    def _parts(self):
        return (self.fname, self.arg)


ZERO = Const(0)
ONE = Const(1)


def _wrap(x):
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Const(x)
    if isinstance(x, float):
        return Const(Fraction(x))
    raise TypeError(f"cannot use {type(x).__name__} as an expression")


# ---------------------------------------------------------------------------
# Canonical ordering
# ---------------------------------------------------------------------------

_RANK = {Const: 0, Var: 1, FieldAtom: 2, Func: 3, Pow: 4, Mul: 5, Add: 6}


def _key(e):
    t = type(e)
    if t is Const:
        return (0, e.value.numerator, e.value.denominator)
    if t is Var:
        return (1, e.name)
    if t is FieldAtom:
        return (2, e.base, e.derivs)
    if t is Func:
        return (3, e.fname, _key(e.arg))
    if t is Pow:
        return (4, _key(e.base), e.exponent)
    if t is Mul:
        return (5, len(e.factors), tuple(_key(f) for f in e.factors))
    if t is Add:
        return (6, len(e.terms), tuple(_key(x) for x in e.terms))
    if t is Neg:
        return (7, _key(e.arg))
    return (8, _key(e.num), _key(e.den))


# ---------------------------------------------------------------------------
# Canonical builders (assume canonical children)
# ---------------------------------------------------------------------------

def const(x):
    return Const(Fraction(x))


def var(name):
    return Var(name)


def _as_unit(f):
    """Split a canonical factor into (base, integer exponent)."""
    if isinstance(f, Pow):
        return f.base, f.exponent
    return f, 1


def _unit(base, exp):
    if exp == 1:
        return base
    return Pow(base, exp)


def mul(*factors):
    coeff = Fraction(1)
    units = {}

    def absorb(f):
        nonlocal coeff
        if isinstance(f, Const):
            coeff *= f.value
        elif isinstance(f, Mul):
            for g in f.factors:
                absorb(g)
        else:
            b, n = _as_unit(f)
            if isinstance(b, Const):
                coeff *= b.value ** n
            else:
                units[b] = units.get(b, 0) + n

    for f in factors:
        absorb(_wrap(f))
    if coeff == 0:
        return ZERO
    parts = [_unit(b, n) for b, n in units.items() if n != 0]
    parts.sort(key=_key)
    if not parts:
        return Const(coeff)
    if coeff != 1:
        parts.insert(0, Const(coeff))
    if len(parts) == 1:
        return parts[0]
    return Mul(*parts)


def _term_split(t):
    """Canonical term -> (coeff, mono) with mono a dict base -> exponent."""
    if isinstance(t, Const):
        return t.value, {}
    if isinstance(t, Mul):
        coeff = Fraction(1)
        mono = {}
        for f in t.factors:
            if isinstance(f, Const):
                coeff *= f.value
            else:
                b, n = _as_unit(f)
                mono[b] = mono.get(b, 0) + n
        return coeff, mono
    b, n = _as_unit(t)
    return Fraction(1), {b: n}


def _mono_key(mono):
    return tuple(sorted((_key(b), n) for b, n in mono.items()))


def _term_build(coeff, mono):
    return mul(Const(coeff), *(_unit(b, n) for b, n in mono.items()))


def _pythagoras(terms):
    """Collapse X*sin(u)^2 + X*cos(u)^2 -> X inside a combined term map.

    ``terms`` maps mono-key -> [coeff, mono]; mutated in place until no
    rule fires.  Each application lowers total degree, so this terminates.
    """
    changed = True
    while changed:
        changed = False
        for k in list(terms.keys()):
            if k not in terms:
                continue
            coeff, mono = terms[k]
            for b, n in mono.items():
                if not (isinstance(b, Func) and b.fname == "sin" and n >= 2):
                    continue
                partner = dict(mono)
                partner[b] = n - 2
                if partner[b] == 0:
                    del partner[b]
                cb = Func("cos", b.arg)
                partner[cb] = partner.get(cb, 0) + 2
                pk = _mono_key(partner)
                if pk in terms and pk != k and terms[pk][0] == coeff:
                    reduced = dict(mono)
                    reduced[b] = n - 2
                    if reduced[b] == 0:
                        del reduced[b]
                    del terms[k]
                    del terms[pk]
                    rk = _mono_key(reduced)
                    if rk in terms:
                        terms[rk][0] += coeff
                        if terms[rk][0] == 0:
                            del terms[rk]
                    else:
                        terms[rk] = [coeff, reduced]
                    changed = True
                    break
            if changed:
                break


def add(*terms):
    combined = {}

    def absorb(t):
        if isinstance(t, Add):
            for u in t.terms:
                absorb(u)
            return
        coeff, mono = _term_split(t)
        if coeff == 0:
            return
        k = _mono_key(mono)
        if k in combined:
            combined[k][0] += coeff
            if combined[k][0] == 0:
                del combined[k]
        else:
            combined[k] = [coeff, mono]

    for t in terms:
        absorb(_wrap(t))
    _pythagoras(combined)
    parts = [_term_build(c, m) for c, m in combined.values()]
    parts = [p for p in parts if p != ZERO]
    parts.sort(key=_key)
    if not parts:
        return ZERO
    if len(parts) == 1:
        return parts[0]
    return Add(*parts)


def pow_(base, exponent):
    if not isinstance(exponent, int):
        raise TypeError("exponent must be an integer")
    base = _wrap(base)
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Const):
        if base.value == 0 and exponent < 0:
            raise ZeroDivisionError("0 raised to a negative power")
        return Const(base.value ** exponent)
    if isinstance(base, Pow):
        return pow_(base.base, base.exponent * exponent)
    if isinstance(base, Mul):
        return mul(*(pow_(f, exponent) for f in base.factors))
    return Pow(base, exponent)


def neg(x):
    return mul(Const(-1), _wrap(x))


def sub(a, b):
    return add(_wrap(a), neg(b))


def div(a, b):
    return mul(_wrap(a), pow_(_wrap(b), -1))


def _sqrt_rational(v):
    """Exact square root of a nonnegative Fraction, or None."""
    n, d = v.numerator, v.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def func(fname, arg):
    arg = _wrap(arg)
    if isinstance(arg, Const):
        v = arg.value
        folds = {
            ("sin", 0): ZERO, ("cos", 0): ONE, ("tan", 0): ZERO,
            ("exp", 0): ONE, ("log", 1): ZERO, ("arctan", 0): ZERO,
            ("arccos", 1): ZERO,
        }
        if (fname, v) in folds:
            return folds[(fname, v)]
        if fname == "sqrt" and v >= 0:
            r = _sqrt_rational(v)
            if r is not None:
                return Const(r)
    if fname == "sqrt":
        # domain positivity assumed: sqrt(x^2) -> x, sqrt(a*b) -> sqrt(a)*sqrt(b)
        if isinstance(arg, Pow):
            b, n = arg.base, arg.exponent
            if n % 2 == 0:
                return pow_(b, n // 2)
            return mul(pow_(b, (n - 1) // 2), Func("sqrt", b))
        if isinstance(arg, Mul):
            return mul(*(func("sqrt", f) for f in arg.factors))
        if isinstance(arg, Func) and arg.fname == "sqrt":
            return arg  # leave nested sqrt alone
    return Func(fname, arg)


def sin(x):
    return func("sin", x)


def cos(x):
    return func("cos", x)


def tan(x):
    return func("tan", x)


def sqrt(x):
    return func("sqrt", x)


def exp(x):
    return func("exp", x)


def log(x):
    return func("log", x)


def arctan(x):
    return func("arctan", x)


def arccos(x):
    return func("arccos", x)


# ---------------------------------------------------------------------------
# Simplification
# ---------------------------------------------------------------------------

def simplify(e):
    """Canonical form: rational folding, like-term/factor collection,
    deterministic ordering, sin^2+cos^2 -> 1.  Idempotent."""
    e = _wrap(e)
    t = type(e)
    if t in (Const, Var, FieldAtom):
        return e
    if t is Add:
        return add(*(simplify(x) for x in e.terms))
    if t is Mul:
        return mul(*(simplify(x) for x in e.factors))
    if t is Pow:
        return pow_(simplify(e.base), e.exponent)
    if t is Neg:
        return neg(simplify(e.arg))
    if t is Div:
        return div(simplify(e.num), simplify(e.den))
    if t is Func:
        return func(e.fname, simplify(e.arg))
    raise TypeError(f"unknown node {t!r}")


# ---------------------------------------------------------------------------
# Differentiation
# ---------------------------------------------------------------------------

def diff(e, v):
    """Partial derivative of ``e`` with respect to variable name ``v``,
    simplified.  Derivative with respect to an absent variable is 0."""
    if isinstance(v, Var):
        v = v.name
    return simplify(_diff(_wrap(e), v))


def _diff(e, v):
    t = type(e)
    if t is Const:
        return ZERO
    if t is Var:
        return ONE if e.name == v else ZERO
    if t is FieldAtom:
        if v in e.args:
            return FieldAtom(e.base, e.args, e.derivs + (v,))
        return ZERO
    if t is Add:
        return add(*(_diff(x, v) for x in e.terms))
    if t is Mul:
        parts = []
        for i, f in enumerate(e.factors):
            rest = e.factors[:i] + e.factors[i + 1:]
            parts.append(mul(_diff(f, v), *rest))
        return add(*parts)
    if t is Pow:
        return mul(Const(e.exponent), pow_(e.base, e.exponent - 1), _diff(e.base, v))
    if t is Neg:
        return neg(_diff(e.arg, v))
    if t is Div:
        return div(sub(mul(_diff(e.num, v), e.den), mul(e.num, _diff(e.den, v))),
                   pow_(e.den, 2))
    if t is Func:
        u = e.arg
        du = _diff(u, v)
        if du == ZERO:
            return ZERO
        f = e.fname
        if f == "sin":
            outer = cos(u)
        elif f == "cos":
            outer = neg(sin(u))
        elif f == "tan":
            outer = pow_(cos(u), -2)
        elif f == "sqrt":
            outer = div(ONE, mul(Const(2), sqrt(u)))
        elif f == "exp":
            outer = exp(u)
        elif f == "log":
            outer = pow_(u, -1)
        elif f == "arctan":
            outer = div(ONE, add(ONE, pow_(u, 2)))
        else:  # arccos
            outer = neg(div(ONE, sqrt(sub(ONE, pow_(u, 2)))))
        return mul(outer, du)
    raise TypeError(f"unknown node {t!r}")


# ---------------------------------------------------------------------------
# Free variables, evaluation
# ---------------------------------------------------------------------------

def free_vars(e):
    """Names of all variables and field atoms appearing in ``e``."""
    out = set()
    stack = [_wrap(e)]
    while stack:
        x = stack.pop()
        t = type(x)
        if t is Var:
            out.add(x.name)
        elif t is FieldAtom:
            out.add(x.name)
        elif t is Add:
            stack.extend(x.terms)
        elif t is Mul:
            stack.extend(x.factors)
        elif t is Pow:
            stack.append(x.base)
        elif t is Neg:
            stack.append(x.arg)
        elif t is Div:
            stack.extend((x.num, x.den))
        elif t is Func:
            stack.append(x.arg)
    return out


def substitute(e, mapping):
    """Replace variables and field atoms by name with expressions.

    Values may be Expr or numbers; the result is simplified.
    """
    mapping = {k: _wrap(v) for k, v in mapping.items()}

    def visit(x):
        t = type(x)
        if t is Var or t is FieldAtom:
            return mapping.get(x.name, x)
        if t is Const:
            return x
        if t is Add:
            return add(*(visit(u) for u in x.terms))
        if t is Mul:
            return mul(*(visit(u) for u in x.factors))
        if t is Pow:
            return pow_(visit(x.base), x.exponent)
        if t is Neg:
            return neg(visit(x.arg))
        if t is Div:
            return div(visit(x.num), visit(x.den))
        if t is Func:
            return func(x.fname, visit(x.arg))
        raise TypeError(f"unknown node {t!r}")

    return simplify(visit(_wrap(e)))


_MATH_FUNCS = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan, "exp": math.exp,
    "arctan": math.atan,
}


def eval_expr(e, binding):
    """Evaluate to an IEEE double with every free variable bound.

    Raises UnboundVariableError or EvalDomainError (division by zero,
    sqrt/log/arccos out of domain) naming the offending subexpression.
    """
    e = _wrap(e)
    t = type(e)
    if t is Const:
        return float(e.value)
    if t is Var or t is FieldAtom:
        name = e.name
        if name not in binding:
            if name == "pi":
                return math.pi
            raise UnboundVariableError(f"unbound variable {name!r}", e)
        return float(binding[name])
    if t is Add:
        return math.fsum(eval_expr(x, binding) for x in e.terms)
    if t is Mul:
        out = 1.0
        for x in e.factors:
            out *= eval_expr(x, binding)
        return out
    if t is Pow:
        b = eval_expr(e.base, binding)
        if b == 0.0 and e.exponent < 0:
            raise EvalDomainError("division by zero", e)
        return b ** e.exponent
    if t is Neg:
        return -eval_expr(e.arg, binding)
    if t is Div:
        den = eval_expr(e.den, binding)
        if den == 0.0:
            raise EvalDomainError("division by zero", e)
        return eval_expr(e.num, binding) / den
    if t is Func:
        u = eval_expr(e.arg, binding)
        f = e.fname
        if f == "sqrt":
            if u < 0:
                raise EvalDomainError("sqrt of negative value", e)
            return math.sqrt(u)
        if f == "log":
            if u <= 0:
                raise EvalDomainError("log of non-positive value", e)
            return math.log(u)
        if f == "arccos":
            if not -1.0 <= u <= 1.0:
                raise EvalDomainError("arccos argument outside [-1, 1]", e)
            return math.acos(u)
        try:
            return _MATH_FUNCS[f](u)
        except (ValueError, OverflowError) as err:
            raise EvalDomainError(str(err), e) from err
    raise TypeError(f"unknown node {t!r}")


_NP_FUNCS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "sqrt": np.sqrt,
    "exp": np.exp, "log": np.log, "arctan": np.arctan, "arccos": np.arccos,
}


def lambdify(e):
    """Compile to a function of a dict of numpy arrays (or scalars).

    Out-of-domain points yield nan/inf rather than raising; callers mask.
    """
    e = _wrap(e)
    t = type(e)
    if t is Const:
        v = float(e.value)
        return lambda b: v
    if t is Var or t is FieldAtom:
        name = e.name
        if name == "pi":
            return lambda b: b.get("pi", math.pi)
        return lambda b: b[name]
    if t is Add:
        fs = [lambdify(x) for x in e.terms]
        return lambda b: sum(f(b) for f in fs)
    if t is Mul:
        fs = [lambdify(x) for x in e.factors]

        def _mul(b):
            out = fs[0](b)
            for f in fs[1:]:
                out = out * f(b)
            return out
        return _mul
    if t is Pow:
        fb = lambdify(e.base)
        n = e.exponent
        if n < 0:
            def _ipow(b):
                with np.errstate(divide="ignore", invalid="ignore"):
                    return np.float_power(fb(b), n)
            return _ipow
        return lambda b: fb(b) ** n
    if t is Neg:
        f = lambdify(e.arg)
        return lambda b: -f(b)
    if t is Div:
        fn, fd = lambdify(e.num), lambdify(e.den)

        def _div(b):
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.true_divide(fn(b), fd(b))
        return _div
    if t is Func:
        f = lambdify(e.arg)
        g = _NP_FUNCS[e.fname]

        def _func(b):
            with np.errstate(invalid="ignore", divide="ignore"):
                return g(f(b))
        return _func
    raise TypeError(f"unknown node {t!r}")


# ---------------------------------------------------------------------------
# Randomized equivalence
# ---------------------------------------------------------------------------

def equivalent(a, b, domains=None, n=100, rtol=1e-10, seed=None):
    """True iff ``a`` and ``b`` agree at ``n`` seeded pseudo-random points.

    ``domains`` maps variable names to (lo, hi) sampling intervals; unlisted
    variables use DEFAULT_DOMAIN.  Points where either side fails to
    evaluate are skipped; more than 50% failures raises IllConditionedError.
    """
    a, b = _wrap(a), _wrap(b)
    names = sorted(free_vars(a) | free_vars(b))
    if not names:
        va, vb = eval_expr(a, {}), eval_expr(b, {})
        return abs(va - vb) <= rtol * max(1.0, abs(va), abs(vb))
    domains = domains or {}
    rng = np.random.default_rng(seed if seed is not None else default_seed())
    binding = {}
    for name in names:
        lo, hi = domains.get(name, DEFAULT_DOMAIN)
        binding[name] = rng.uniform(lo, hi, size=n)
    fa, fb = lambdify(a), lambdify(b)
    va = np.broadcast_to(np.asarray(fa(binding), dtype=float), (n,))
    vb = np.broadcast_to(np.asarray(fb(binding), dtype=float), (n,))
    finite = np.isfinite(va) & np.isfinite(vb)
    if np.count_nonzero(~finite) > n // 2:
        raise IllConditionedError(
            "ill-conditioned comparison: sampling repeatedly hits singular points")
    scale = np.maximum(1.0, np.maximum(np.abs(va), np.abs(vb)))
    return bool(np.all(np.abs(va - vb)[finite] <= rtol * scale[finite]))


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Tokenizer:
    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1
        self.tokens = []
        self._scan()
        self.idx = 0

    def _advance(self, k):
        for ch in self.text[self.pos:self.pos + k]:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += k

    def _scan(self):
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch in " \t\r\n":
                self._advance(1)
                continue
            line, col = self.line, self.col
            if ch.isdigit() or (ch == "." and self.pos + 1 < len(text)
                                and text[self.pos + 1].isdigit()):
                j = self.pos
                seen_dot = False
                while j < len(text) and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                    if text[j] == ".":
                        seen_dot = True
                    j += 1
                lit = text[self.pos:j]
                self.tokens.append(("num", lit, line, col))
                self._advance(j - self.pos)
                continue
            if ch.isalpha() or ch == "_":
                j = self.pos
                while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.tokens.append(("ident", text[self.pos:j], line, col))
                self._advance(j - self.pos)
                continue
            if ch in "+-*/^()":
                self.tokens.append((ch, ch, line, col))
                self._advance(1)
                continue
            raise ParseError(f"unexpected character {ch!r}", line, col)
        self.tokens.append(("eof", "", self.line, self.col))

    def peek(self):
        return self.tokens[self.idx]

    def next(self):
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok


def _parse_number(lit):
    if "." in lit:
        intpart, frac = lit.split(".")
        den = 10 ** len(frac)
        num = int(intpart or "0") * den + int(frac or "0")
        return Const(Fraction(num, den))
    return Const(int(lit))


class _Parser:
    """expr := term (('+'|'-') term)*
    term := factor (('*'|'/') factor)*
    factor := '-' factor | base ('^' integer)?
    base := number | ident | ident '(' expr ')' | '(' expr ')'

    Unary minus binds looser than '^', so -x^2 reads as -(x^2).
    """

    def __init__(self, text):
        self.toks = _Tokenizer(text)

    def parse(self):
        e = self.expr()
        tok = self.toks.peek()
        if tok[0] != "eof":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2], tok[3])
        return e

    def expr(self):
        e = self.term()
        while self.toks.peek()[0] in ("+", "-"):
            op = self.toks.next()[0]
            rhs = self.term()
            e = Add(e, rhs) if op == "+" else Add(e, Neg(rhs))
        return e

    def term(self):
        e = self.factor()
        while self.toks.peek()[0] in ("*", "/"):
            op = self.toks.next()[0]
            rhs = self.factor()
            e = Mul(e, rhs) if op == "*" else Div(e, rhs)
        return e

    def factor(self):
        if self.toks.peek()[0] == "-":
            self.toks.next()
            return Neg(self.factor())
        e = self.base()
        if self.toks.peek()[0] == "^":
            self.toks.next()
            sign = 1
            if self.toks.peek()[0] == "-":
                self.toks.next()
                sign = -1
            tok = self.toks.next()
            if tok[0] != "num" or "." in tok[1]:
                raise ParseError("exponent must be an integer", tok[2], tok[3])
            e = Pow(e, sign * int(tok[1]))
        return e

    def base(self):
        tok = self.toks.next()
        kind, lit, line, col = tok
        if kind == "num":
            return _parse_number(lit)
        if kind == "(":
            e = self.expr()
            closing = self.toks.next()
            if closing[0] != ")":
                raise ParseError("expected ')'", closing[2], closing[3])
            return e
        if kind == "ident":
            if self.toks.peek()[0] == "(":
                if lit not in FUNCTIONS:
                    raise UnknownFunctionError(f"unknown function {lit!r}", line, col)
                self.toks.next()
                arg = self.expr()
                closing = self.toks.next()
                if closing[0] != ")":
                    raise ParseError("expected ')'", closing[2], closing[3])
                return Func(lit, arg)
            return Var(lit)
        raise ParseError(f"unexpected {lit or kind!r}", line, col)


def parse_expr(text):
    """Parse per the module grammar; round-trips through print_expr."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Printers
# ---------------------------------------------------------------------------

def _print_const(v):
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _paren_for_mul(x):
    s = print_expr(x)
    if isinstance(x, (Add, Neg, Div)) or (isinstance(x, Const) and (x.value < 0 or x.value.denominator != 1)):
        return f"({s})"
    return s


def print_expr(e):
    """Plain-text form that reparses to the same tree (after simplify)."""
    e = _wrap(e)
    t = type(e)
    if t is Const:
        return _print_const(e.value)
    if t is Var:
        return e.name
    if t is FieldAtom:
        return e.name
    if t is Func:
        return f"{e.fname}({print_expr(e.arg)})"
    if t is Pow:
        b = print_expr(e.base)
        if not isinstance(e.base, (Var, FieldAtom, Func)):
            b = f"({b})"
        return f"{b}^{e.exponent}"
    if t is Neg:
        s = print_expr(e.arg)
        if isinstance(e.arg, (Add, Neg)):
            s = f"({s})"
        return f"-{s}"
    if t is Div:
        num = _paren_for_mul(e.num)
        den = print_expr(e.den)
        if not isinstance(e.den, (Var, FieldAtom, Func, Pow)) or isinstance(e.den, Pow):
            den = f"({den})"
        return f"{num}/{den}"
    if t is Mul:
        factors = list(e.factors)
        sign = ""
        if isinstance(factors[0], Const) and factors[0].value < 0:
            if factors[0].value == -1 and len(factors) > 1:
                factors = factors[1:]
            else:
                factors = [Const(-factors[0].value)] + factors[1:]
            sign = "-"
        return sign + "*".join(_paren_for_mul(f) for f in factors)
    if t is Add:
        out = print_expr(e.terms[0])
        for term in e.terms[1:]:
            s = print_expr(term)
            if s.startswith("-"):
                out += " - " + s[1:]
            else:
                out += " + " + s
        return out
    raise TypeError(f"unknown node {t!r}")


_LATEX_NAMES = {
    "phi": r"\varphi", "theta": r"\vartheta", "vartheta": r"\vartheta",
    "rho": r"\rho", "psi": r"\psi", "alpha": r"\alpha", "beta": r"\beta",
    "lambda": r"\lambda", "mu": r"\mu", "epsilon": r"\varepsilon",
    "omega": r"\omega", "pi": r"\pi",
}

_LATEX_FUNCS = {
    "sin": r"\sin", "cos": r"\cos", "tan": r"\tan", "exp": r"\exp",
    "log": r"\ln", "arctan": r"\arctan", "arccos": r"\arccos",
}


def _latex_name(name):
    if "_" in name:
        head, _, sub = name.partition("_")
        return f"{_LATEX_NAMES.get(head, head)}_{{{_latex_sub(sub)}}}"
    return _LATEX_NAMES.get(name, name)


def _latex_sub(sub):
    return " ".join(_LATEX_NAMES.get(p, p) for p in sub.split("_"))


def to_latex(e):
    e = _wrap(e)
    t = type(e)
    if t is Const:
        v = e.value
        if v.denominator == 1:
            return str(v.numerator)
        s = rf"\frac{{{abs(v.numerator)}}}{{{v.denominator}}}"
        return ("-" if v < 0 else "") + s
    if t is Var:
        return _latex_name(e.name)
    if t is FieldAtom:
        base = _latex_name(e.base)
        for d in e.derivs:
            base = rf"\partial_{{{_latex_name(d)}}} " + base
        return base
    if t is Func:
        if e.fname == "sqrt":
            return rf"\sqrt{{{to_latex(e.arg)}}}"
        return rf"{_LATEX_FUNCS[e.fname]}\left({to_latex(e.arg)}\right)"
    if t is Pow:
        if e.exponent < 0:
            return rf"\frac{{1}}{{{to_latex(pow_(e.base, -e.exponent))}}}"
        b = to_latex(e.base)
        if isinstance(e.base, Func) and e.base.fname != "sqrt":
            # \sin^{2}\left(...\right) style
            return rf"{_LATEX_FUNCS[e.base.fname]}^{{{e.exponent}}}\left({to_latex(e.base.arg)}\right)"
        if not isinstance(e.base, (Var, FieldAtom)):
            b = rf"\left({b}\right)"
        return rf"{b}^{{{e.exponent}}}"
    if t is Neg:
        return "-" + to_latex(e.arg)
    if t is Div:
        return rf"\frac{{{to_latex(e.num)}}}{{{to_latex(e.den)}}}"
    if t is Mul:
        num, den = [], []
        coeff = Fraction(1)
        for f in e.factors:
            if isinstance(f, Const):
                coeff *= f.value
            elif isinstance(f, Pow) and f.exponent < 0:
                den.append(pow_(f.base, -f.exponent))
            else:
                num.append(f)

        def render(parts):
            out = []
            for p in parts:
                s = to_latex(p)
                if isinstance(p, Add):
                    s = rf"\left({s}\right)"
                out.append(s)
            return " \\, ".join(out) if out else "1"

        sign = "-" if coeff < 0 else ""
        coeff = abs(coeff)
        cnum = "" if coeff.numerator == 1 else str(coeff.numerator)
        if coeff.denominator != 1:
            den.insert(0, Const(coeff.denominator))
        if den:
            body = rf"\frac{{{(cnum + ' ') if cnum else ''}{render(num)}}}{{{render(den)}}}"
        else:
            body = ((cnum + " ") if cnum else "") + render(num)
        return sign + body
    if t is Add:
        out = to_latex(e.terms[0])
        for term in e.terms[1:]:
            s = to_latex(term)
            if s.startswith("-"):
                out += " - " + s[1:]
            else:
                out += " + " + s
        return out
    raise TypeError(f"unknown node {t!r}")
