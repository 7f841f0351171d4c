"""Deterministic text form of exp-polynomials in the parser's grammar.

Conjugate frequency pairs ``e^{(mu + i nu).x}`` and ``e^{(mu - i nu).x}`` are
folded back into ``exp(mu.x)*cos(nu.x)`` and ``exp(mu.x)*sin(nu.x)``.
"""

from __future__ import annotations

from .numbers import IUNIT, ONE, GaussianRational, ParamPoly, format_rational


def _is_neg(s) -> bool:
    """True when ``s`` prints naturally with a leading minus sign."""
    if type(s) is GaussianRational:
        if s.re:
            return s.re < 0
        return s.im < 0
    if len(s.terms) == 1:
        return _is_neg(next(iter(s.terms.values())))
    return False


def _is_atomic(s) -> bool:
    """True when ``s`` can be used as a factor without parentheses."""
    if type(s) is GaussianRational:
        return not (s.re and s.im)
    if len(s.terms) != 1:
        return False
    c = next(iter(s.terms.values()))
    return _is_atomic(c)


def _format_monomial(m) -> str:
    return "*".join(n if k == 1 else f"{n}^{k}" for n, k in m)


def format_scalar(s) -> str:
    """Text for a Gaussian rational or parameter polynomial."""
    if type(s) is GaussianRational:
        return str(s)
    parts = []
    for m in sorted(s.terms, key=lambda m: (sum(k for _, k in m), m)):
        c = s.terms[m]
        if not m:
            body, neg = (str(-c), True) if _is_neg(c) else (str(c), False)
        else:
            neg = _is_neg(c)
            cc = -c if neg else c
            mono = _format_monomial(m)
            if cc == ONE:
                body = mono
            elif _is_atomic(cc):
                body = f"{cc}*{mono}"
            else:
                body = f"({cc})*{mono}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("-" if neg else "+") + body)
    return "".join(parts) if parts else "0"


def _factor_text(s) -> str:
    text = format_scalar(s)
    return text if _is_atomic(s) else f"({text})"


def _linear_text(freq) -> str:
    """``sum lam_ax * x_ax`` for a frequency map with real entries."""
    out = []
    for ax, lam in freq:
        neg = _is_neg(lam)
        mag = -lam if neg else lam
        body = f"x{ax}" if mag == ONE else f"{_factor_text(mag)}*x{ax}"
        out.append(("-" if neg else ("+" if out else "")) + body)
    return "".join(out)


def _split_freq(freq):
    """Split a frequency tuple into real and imaginary parts (both real maps)."""
    re, im = [], []
    for ax, lam in freq:
        r, i = lam.real, lam.imag
        if r:
            re.append((ax, r))
        if i:
            im.append((ax, i))
    return tuple(re), tuple(im)


def _canonical_im(im) -> bool:
    """True when the first nonzero imaginary component is the positive one."""
    if not im:
        return True
    v = im[0][1]
    return v.sort_key() > (-v).sort_key()


def _join_terms(pieces) -> str:
    out = []
    for coeff, factors in pieces:
        neg = _is_neg(coeff)
        mag = -coeff if neg else coeff
        if not factors:
            body = format_scalar(mag) if _is_atomic(mag) else f"({format_scalar(mag)})"
        elif mag == ONE:
            body = "*".join(factors)
        else:
            body = "*".join([_factor_text(mag)] + factors)
        out.append(("-" if neg else ("+" if out else "")) + body)
    return "".join(out) if out else "0"


def to_text(e) -> str:
    """Print ``e`` in the input grammar; ``parse(to_text(e)) == e``."""
    from .exppoly import term_sort_key

    items = dict(e.items())
    keys = sorted(items, key=term_sort_key)
    done = set()
    pieces = []
    for key in keys:
        if key in done:
            continue
        powers, freq = key
        re, im = _split_freq(freq)
        mono = [f"x{ax}" if k == 1 else f"x{ax}^{k}" for ax, k in powers]
        if not im:
            done.add(key)
            factors = mono + ([f"exp({_linear_text(re)})"] if re else [])
            pieces.append((items[key], factors))
            continue
        conj_freq = tuple((ax, lam.conjugate()) for ax, lam in freq)
        partner = (powers, conj_freq)
        c_here = items[key]
        c_partner = items.get(partner)
        done.add(key)
        done.add(partner)
        # c1 multiplies e^{(mu + i nu).x} with nu canonical
        if _canonical_im(im):
            c1, c2 = c_here, c_partner
            nu = im
        else:
            c1, c2 = c_partner, c_here
            nu = tuple((ax, -v) for ax, v in im)
        c1 = c1 if c1 is not None else GaussianRational(0)
        c2 = c2 if c2 is not None else GaussianRational(0)
        cos_c = c1 + c2
        sin_c = (c1 - c2) * IUNIT
        base = mono + ([f"exp({_linear_text(re)})"] if re else [])
        arg = _linear_text(nu)
        if cos_c:
            pieces.append((cos_c, base + [f"cos({arg})"]))
        if sin_c:
            pieces.append((sin_c, base + [f"sin({arg})"]))
    return _join_terms(pieces)


def to_rational_text(q) -> str:
    return format_rational(q)
