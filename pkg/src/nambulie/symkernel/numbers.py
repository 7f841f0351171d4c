"""Exact scalars: Gaussian rationals and polynomials in named parameters.

The rational backend is ``gmpy2.mpq`` when importable and
:class:`fractions.Fraction` otherwise.  Set ``NAMBULIE_PURE_PYTHON=1`` to force
the fallback (the benchmark in ``benchmarks/`` compares both).
"""

from __future__ import annotations

import os
from fractions import Fraction
from typing import Mapping, Union

BACKEND = "fraction"
if not os.environ.get("NAMBULIE_PURE_PYTHON"):
    try:
        from gmpy2 import mpq as _mpq

        BACKEND = "gmpy2"
    except ImportError:  # pragma: no cover - depends on the environment
        _mpq = None
else:
    _mpq = None

Q = _mpq if _mpq is not None else Fraction
_QTYPE = type(Q(0))


class UnboundParameter(KeyError):
    """A parameter needed for an exact or numeric operation has no binding."""

    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"unbound parameter {self.name!r}"


def as_rational(value) -> "Fraction":
    """Coerce ints, Fractions, mpq and ``"p/q"`` strings to the backend rational.

    Floats are rejected so that no binary rounding leaks into exact code.
    """
    if isinstance(value, _QTYPE):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Q(value)
    if isinstance(value, Fraction):
        return Q(value.numerator, value.denominator)
    if isinstance(value, str):
        f = Fraction(value.strip())
        if "." in value or "e" in value.lower():
            raise ValueError(f"expected an exact p/q literal, got {value!r}")
        return Q(f.numerator, f.denominator)
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted in exact code")
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Q(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def format_rational(q) -> str:
    n, d = int(q.numerator), int(q.denominator)
    return str(n) if d == 1 else f"{n}/{d}"


_Q0 = Q(0)
_Q1 = Q(1)


class GaussianRational:
    """Exact complex number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = as_rational(re)
        self.im = as_rational(im)

    @classmethod
    def _raw(cls, re, im) -> "GaussianRational":
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    @property
    def real(self) -> "GaussianRational":
        return GaussianRational._raw(self.re, _Q0)

    @property
    def imag(self) -> "GaussianRational":
        return GaussianRational._raw(self.im, _Q0)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self.re, -self.im)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational._raw(-self.re, -self.im)

    def __add__(self, other):
        if type(other) is GaussianRational:
            return GaussianRational._raw(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction, _QTYPE)):
            return GaussianRational._raw(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is GaussianRational:
            return GaussianRational._raw(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction, _QTYPE)):
            return GaussianRational._raw(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction, _QTYPE)):
            return GaussianRational._raw(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if type(other) is GaussianRational:
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b and not d:
                return GaussianRational._raw(a * c, _Q0)
            return GaussianRational._raw(a * c - b * d, a * d + b * c)
        if isinstance(other, (int, Fraction, _QTYPE)):
            return GaussianRational._raw(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational._raw(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, _QTYPE)):
            other = GaussianRational(other)
        if type(other) is not GaussianRational:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return GaussianRational(other) * self.inverse()

    def __eq__(self, other) -> bool:
        if type(other) is GaussianRational:
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction, _QTYPE)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def sort_key(self):
        return (0, self.re, self.im)

    def __repr__(self) -> str:
        return f"GaussianRational({format_rational(self.re)}, {format_rational(self.im)})"

    def __str__(self) -> str:
        re, im = format_rational(self.re), format_rational(self.im)
        if not self.im:
            return re
        if not self.re:
            return f"{im}*I" if self.im != 1 else "I"
        sign = "+" if self.im > 0 else "-"
        mag = format_rational(abs(self.im))
        return f"{re}{sign}{mag}*I" if mag != "1" else f"{re}{sign}I"


ZERO = GaussianRational._raw(_Q0, _Q0)
ONE = GaussianRational._raw(_Q1, _Q0)
IUNIT = GaussianRational._raw(_Q0, _Q1)


def gr(value) -> GaussianRational:
    if type(value) is GaussianRational:
        return value
    return GaussianRational(value)


Monomial = tuple  # sorted tuple of (name, exponent)


class ParamPoly:
    """Polynomial in real parameters with Gaussian-rational coefficients.

    Only used before parameters are bound; a polynomial with no parameter
    content is always collapsed back to a :class:`GaussianRational`.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, GaussianRational]):
        self.terms = {m: c for m, c in terms.items() if c}
        self._hash = None

    @staticmethod
    def symbol(name: str) -> "ParamPoly":
        return ParamPoly({((name, 1),): ONE})

    @staticmethod
    def _coerce(x) -> "ParamPoly":
        if type(x) is ParamPoly:
            return x
        return ParamPoly({(): gr(x)})

    def params(self) -> set:
        return {n for m in self.terms for n, _ in m}

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.terms.values())

    @property
    def real(self):
        return collapse(ParamPoly({m: c.real for m, c in self.terms.items()}))

    @property
    def imag(self):
        return collapse(ParamPoly({m: c.imag for m, c in self.terms.items()}))

    def conjugate(self):
        return ParamPoly({m: c.conjugate() for m, c in self.terms.items()})

    def __neg__(self):
        return ParamPoly({m: -c for m, c in self.terms.items()})

    def __add__(self, other):
        other = ParamPoly._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return collapse(ParamPoly(out))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-ParamPoly._coerce(other))

    def __rsub__(self, other):
        return ParamPoly._coerce(other) + (-self)

    def __mul__(self, other):
        other = ParamPoly._coerce(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                c = c1 * c2
                out[m] = out[m] + c if m in out else c
        return collapse(ParamPoly(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if type(other) is ParamPoly:
            raise ZeroDivisionError("division by a parameter expression")
        inv = gr(other).inverse()
        return collapse(ParamPoly({m: c * inv for m, c in self.terms.items()}))

    def substitute(self, env: Mapping[str, object], strict: bool = True):
        """Replace bound parameters by their values.

        With ``strict`` every parameter must be bound; otherwise unbound ones
        survive and the result may remain a :class:`ParamPoly`.
        """
        out = ParamPoly({})
        for m, c in self.terms.items():
            term = ParamPoly({(): c})
            rest = []
            for name, k in m:
                if name in env:
                    term = term * _gpow(gr(env[name]), k)
                elif strict:
                    raise UnboundParameter(name)
                else:
                    rest.append((name, k))
            if rest:
                term = ParamPoly._coerce(term) * ParamPoly({tuple(rest): ONE})
            out = ParamPoly._coerce(out + term)
        return collapse(out)

    def evaluate(self, env: Mapping[str, object]) -> complex:
        total = 0j
        for m, c in self.terms.items():
            v = complex(c)
            for name, k in m:
                if name not in env:
                    raise UnboundParameter(name)
                v *= complex(env[name]) ** k
            total += v
        return total

    def sort_key(self):
        return (1, tuple((m, c.re, c.im) for m, c in sorted(self.terms.items(), key=lambda t: t[0])))

    def __eq__(self, other):
        if type(other) is ParamPoly:
            return self.terms == other.terms
        return False

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        return f"ParamPoly({self})"

    def __str__(self):
        from .printer import format_scalar

        return format_scalar(self)


def _gpow(z: GaussianRational, k: int) -> GaussianRational:
    out = ONE
    for _ in range(k):
        out = out * z
    return out


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for n, k in m2:
        d[n] = d.get(n, 0) + k
    return tuple(sorted(d.items()))


def collapse(p):
    """Return a GaussianRational when ``p`` carries no parameter content."""
    if type(p) is not ParamPoly:
        return p
    if not p.terms:
        return ZERO
    if len(p.terms) == 1 and () in p.terms:
        return p.terms[()]
    return p


Scalar = Union[GaussianRational, ParamPoly]


def scalar_params(s) -> set:
    return s.params() if type(s) is ParamPoly else set()


def substitute_scalar(s, env, strict=True):
    if type(s) is ParamPoly:
        return s.substitute(env, strict)
    return s
