"""The closed function class ``sum c * x^k * exp(lambda . x)``.

Sines and cosines live here as conjugate pairs of complex exponentials, which
keeps the class closed under products and partial derivatives and makes
equality a comparison of normal forms.
"""

from __future__ import annotations

import cmath
from typing import Iterable, Mapping, NamedTuple, Sequence

from .numbers import (
    ONE,
    ZERO,
    GaussianRational,
    ParamPoly,
    Q,
    UnboundParameter,
    collapse,
    gr,
    scalar_params,
    substitute_scalar,
)

MAX_AXES = 8

Powers = tuple  # ((axis, k), ...) sorted by axis, k > 0
Freq = tuple  # ((axis, scalar), ...) sorted by axis, scalar != 0


class NonRealResult(ValueError):
    """Numeric evaluation left an imaginary residue above tolerance."""


class ExpPolyTerm(NamedTuple):
    coeff: object
    powers: Powers
    freq: Freq

    def degree(self) -> int:
        return sum(k for _, k in self.powers)


def _merge_powers(a: Powers, b: Powers) -> Powers:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for ax, k in b:
        d[ax] = d.get(ax, 0) + k
    return tuple(sorted(d.items()))


def _merge_freq(a: Freq, b: Freq) -> Freq:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for ax, lam in b:
        if ax in d:
            s = d[ax] + lam
            if s:
                d[ax] = s
            else:
                del d[ax]
        else:
            d[ax] = lam
    return tuple(sorted(d.items()))


def _scalar_key(s):
    return s.sort_key()


def term_sort_key(key):
    powers, freq = key
    dense = [0] * MAX_AXES
    for ax, k in powers:
        dense[ax - 1] = k
    zero = (0, Q(0), Q(0))
    fre = [zero] * MAX_AXES
    fim = [zero] * MAX_AXES
    for ax, lam in freq:
        if type(lam) is GaussianRational:
            fre[ax - 1] = (0, lam.re, Q(0))
            fim[ax - 1] = (0, lam.im, Q(0))
        else:
            fre[ax - 1] = lam.real.sort_key() if type(lam.real) is ParamPoly else (0, lam.real.re, Q(0))
            fim[ax - 1] = lam.imag.sort_key() if type(lam.imag) is ParamPoly else (0, lam.imag.re, Q(0))
    return (sum(dense), tuple(dense), tuple(fre), tuple(fim))


class ExpPoly:
    """Immutable exp-polynomial in normal form.

    ``terms`` maps ``(powers, freq)`` to a nonzero coefficient.  Coefficients and
    frequencies are Gaussian rationals, or parameter polynomials before
    :meth:`substitute` is applied.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | None = None):
        self._terms = {} if terms is None else {k: c for k, c in terms.items() if c}
        self._hash = None

    @classmethod
    def _wrap(cls, terms: dict) -> "ExpPoly":
        obj = object.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    # constructors
    @classmethod
    def const(cls, c) -> "ExpPoly":
        c = c if type(c) is ParamPoly else gr(c)
        return cls._wrap({((), ()): c} if c else {})

    @classmethod
    def coord(cls, axis: int) -> "ExpPoly":
        _check_axis(axis)
        return cls._wrap({(((axis, 1),), ()): ONE})

    @classmethod
    def monomial(cls, powers: Mapping[int, int], coeff=1) -> "ExpPoly":
        for ax in powers:
            _check_axis(ax)
        p = tuple(sorted((ax, k) for ax, k in powers.items() if k))
        return cls({(p, ()): gr(coeff)})

    @classmethod
    def exp_linear(cls, freq: Mapping[int, object], coeff=1) -> "ExpPoly":
        """``coeff * exp(sum freq[ax] * x_ax)``."""
        f = []
        for ax, lam in sorted(freq.items()):
            _check_axis(ax)
            lam = lam if type(lam) is ParamPoly else gr(lam)
            if lam:
                f.append((ax, lam))
        return cls({((), tuple(f)): gr(coeff)})

    @classmethod
    def from_terms(cls, terms: Iterable[ExpPolyTerm]) -> "ExpPoly":
        out: dict = {}
        for t in terms:
            key = (t.powers, t.freq)
            out[key] = out[key] + t.coeff if key in out else t.coeff
        return cls(out)

    # inspection
    @property
    def terms(self) -> list:
        return [
            ExpPolyTerm(self._terms[k], k[0], k[1])
            for k in sorted(self._terms, key=term_sort_key)
        ]

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and ((), ()) in self._terms)

    def constant_value(self):
        """Coefficient of the ``x^0 e^0`` term."""
        return self._terms.get(((), ()), ZERO)

    def is_unit(self) -> bool:
        """True for ``c * exp(lambda . x)`` with ``c`` a nonzero number."""
        if len(self._terms) != 1:
            return False
        (powers, _), c = next(iter(self._terms.items()))
        return not powers and type(c) is GaussianRational

    def unit_inverse(self) -> "ExpPoly":
        if not self.is_unit():
            raise ZeroDivisionError("not a unit of the exp-polynomial class")
        (_, freq), c = next(iter(self._terms.items()))
        return ExpPoly._wrap({((), tuple((ax, -lam) for ax, lam in freq)): c.inverse()})

    def axes(self) -> set:
        out = set()
        for powers, freq in self._terms:
            out.update(ax for ax, _ in powers)
            out.update(ax for ax, _ in freq)
        return out

    def params(self) -> set:
        out = set()
        for (_, freq), c in self._terms.items():
            out |= scalar_params(c)
            for _, lam in freq:
                out |= scalar_params(lam)
        return out

    def is_numeric(self) -> bool:
        return not self.params()

    def frequencies(self) -> set:
        return {freq for _, freq in self._terms}

    def max_degree(self) -> int:
        return max((sum(k for _, k in p) for p, _ in self._terms), default=0)

    # arithmetic
    def __add__(self, other) -> "ExpPoly":
        if type(other) is not ExpPoly:
            other = _lift(other)
            if other is NotImplemented:
                return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            if k in out:
                s = out[k] + c
                if s:
                    out[k] = s
                else:
                    del out[k]
            else:
                out[k] = c
        return ExpPoly._wrap(out)

    __radd__ = __add__

    def __neg__(self) -> "ExpPoly":
        return ExpPoly._wrap({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "ExpPoly":
        if type(other) is not ExpPoly:
            other = _lift(other)
            if other is NotImplemented:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "ExpPoly":
        return (-self) + other

    def scale(self, c) -> "ExpPoly":
        if not c:
            return ZERO_POLY
        out = {}
        for k, v in self._terms.items():
            p = v * c
            if p:
                out[k] = p
        return ExpPoly._wrap(out)

    def __mul__(self, other) -> "ExpPoly":
        if type(other) is not ExpPoly:
            if isinstance(other, (GaussianRational, ParamPoly, int)) or hasattr(other, "denominator"):
                c = other if type(other) in (GaussianRational, ParamPoly) else gr(other)
                return self.scale(c)
            return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return ZERO_POLY
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        for (p1, f1), c1 in a.items():
            for (p2, f2), c2 in b.items():
                key = (_merge_powers(p1, p2), _merge_freq(f1, f2))
                c = c1 * c2
                if key in out:
                    s = out[key] + c
                    if s:
                        out[key] = s
                    else:
                        del out[key]
                elif c:
                    out[key] = c
        return ExpPoly._wrap(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "ExpPoly":
        if not isinstance(n, int) or n < 0:
            if isinstance(n, int) and self.is_unit():
                return self.unit_inverse() ** (-n)
            raise ValueError("only nonnegative integer powers of non-units")
        out = ONE_POLY
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __truediv__(self, other) -> "ExpPoly":
        if type(other) is not ExpPoly:
            other = _lift(other)
        return self * other.unit_inverse()

    def __eq__(self, other) -> bool:
        if type(other) is not ExpPoly:
            other = _lift(other)
            if other is NotImplemented:
                return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # calculus
    def diff(self, axis: int) -> "ExpPoly":
        """Exact partial derivative along coordinate ``axis`` (1-based)."""
        out: dict = {}
        for (powers, freq), c in self._terms.items():
            for ax, lam in freq:
                if ax == axis:
                    key = (powers, freq)
                    v = c * lam
                    out[key] = out[key] + v if key in out else v
                    break
            for i, (ax, k) in enumerate(powers):
                if ax == axis:
                    if k == 1:
                        p = powers[:i] + powers[i + 1 :]
                    else:
                        p = powers[:i] + ((ax, k - 1),) + powers[i + 1 :]
                    key = (p, freq)
                    v = c * k
                    out[key] = out[key] + v if key in out else v
                    break
        return ExpPoly({k: v for k, v in out.items()})

    # conjugation and substitution
    def conjugate(self) -> "ExpPoly":
        return ExpPoly._wrap(
            {
                (p, tuple((ax, lam.conjugate()) for ax, lam in f)): c.conjugate()
                for (p, f), c in self._terms.items()
            }
        )

    def is_real(self) -> bool:
        return self == self.conjugate()

    def real_part(self) -> "ExpPoly":
        return (self + self.conjugate()).scale(GaussianRational(1, 0) / 2)

    def substitute(self, env: Mapping[str, object], strict: bool = False) -> "ExpPoly":
        out: dict = {}
        for (powers, freq), c in self._terms.items():
            c = substitute_scalar(c, env, strict)
            f = []
            for ax, lam in freq:
                lam = substitute_scalar(lam, env, strict)
                if lam:
                    f.append((ax, lam))
            key = (powers, tuple(f))
            out[key] = out[key] + c if key in out else c
        return ExpPoly(out)

    def value_at_origin(self):
        """Exact value at ``x = 0`` (sum of the degree-0 coefficients)."""
        total = ZERO
        for (powers, _), c in self._terms.items():
            if not powers:
                total = total + c
        return collapse(total) if type(total) is ParamPoly else total

    def evaluate(self, point: Sequence[float], env: Mapping[str, object] | None = None, tol: float = 1e-12) -> float:
        """Numeric value at ``point`` (``point[0]`` is ``x1``).

        The imaginary residue must stay below ``tol`` relative to the sum of
        term magnitudes; otherwise :class:`NonRealResult` is raised.
        """
        total = self.evaluate_complex(point, env)
        scale = self._magnitude(point, env)
        if abs(total.imag) > tol * max(1.0, scale):
            raise NonRealResult(f"imaginary residue {total.imag!r} at {tuple(point)!r}")
        return total.real

    def evaluate_complex(self, point: Sequence[float], env: Mapping[str, object] | None = None) -> complex:
        env = env or {}
        total = 0j
        for (powers, freq), c in self._terms.items():
            total += self._term_value(c, powers, freq, point, env)
        return total

    def _magnitude(self, point, env) -> float:
        env = env or {}
        return sum(abs(self._term_value(c, p, f, point, env)) for (p, f), c in self._terms.items())

    @staticmethod
    def _term_value(c, powers, freq, point, env) -> complex:
        v = _scalar_value(c, env)
        for ax, k in powers:
            v *= point[ax - 1] ** k
        if freq:
            arg = 0j
            for ax, lam in freq:
                arg += _scalar_value(lam, env) * point[ax - 1]
            v *= cmath.exp(arg)
        return v

    def __repr__(self) -> str:
        return f"ExpPoly({self})"

    def __str__(self) -> str:
        from .printer import to_text

        return to_text(self)


def _scalar_value(s, env) -> complex:
    if type(s) is ParamPoly:
        return s.evaluate(env)
    return complex(s)


def _check_axis(axis: int) -> None:
    if not isinstance(axis, int) or not 1 <= axis <= MAX_AXES:
        raise ValueError(f"axis must be an integer in 1..{MAX_AXES}, got {axis!r}")


def _lift(x):
    if type(x) is ExpPoly:
        return x
    if type(x) in (GaussianRational, ParamPoly):
        return ExpPoly.const(x)
    if isinstance(x, int) or hasattr(x, "denominator"):
        return ExpPoly.const(gr(x))
    return NotImplemented


ZERO_POLY = ExpPoly._wrap({})
ONE_POLY = ExpPoly._wrap({((), ()): ONE})


def coords(n: int = 4) -> list:
    """``[x1, ..., xn]`` as exp-polynomials."""
    return [ExpPoly.coord(i) for i in range(1, n + 1)]


def add(e1: ExpPoly, e2: ExpPoly) -> ExpPoly:
    return e1 + e2


def mul(e1: ExpPoly, e2: ExpPoly) -> ExpPoly:
    return e1 * e2


def differentiate(e: ExpPoly, axis: int) -> ExpPoly:
    _check_axis(axis)
    return e.diff(axis)


def evaluate(e: ExpPoly, point: Sequence[float], env: Mapping[str, object] | None = None) -> float:
    missing = e.params() - set(env or {})
    if missing:
        raise UnboundParameter(sorted(missing)[0])
    return e.evaluate(point, env)


def substitute_params(e: ExpPoly, env: Mapping[str, object]) -> ExpPoly:
    """Bind parameters exactly; every parameter of ``e`` must be in ``env``."""
    missing = e.params() - set(env)
    if missing:
        raise UnboundParameter(sorted(missing)[0])
    return e.substitute(env, strict=True)
