"""Exact normal-ordered arithmetic for polynomial differential operators.

The algebra has generators z1..zn and d1..dn (di = d/dzi) subject to
[di, zj] = delta_ij, with all generators of distinct index commuting.
Every element is kept in normal order: z factors to the left of d
factors.  A monomial is a pair of exponent vectors, an element a finite
rational combination of monomials.  Coefficients are `fractions.Fraction`
throughout; this module never touches floating point.

Reordering a single variable uses the closed form

    d^p z^q = sum_{j>=0} C(p,j) C(q,j) j! z^(q-j) d^(p-j)

and distinct variables reorder independently.  The formula is
cross-checked in the tests against `apply`, the action of an element on
an ordinary polynomial, which is defined without any reordering.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Dict, Iterable, Mapping, Tuple

Exponents = Tuple[int, ...]
#: plain commutative polynomial in z1..zn: exponent vector -> coefficient
Polynomial = Dict[Exponents, Fraction]


@dataclass(frozen=True)
class WeylMonomial:
    """Normal-ordered monomial z^z_exp d^d_exp in n variables."""

    n: int
    z_exp: Exponents
    d_exp: Exponents

    def __post_init__(self) -> None:
        if len(self.z_exp) != self.n or len(self.d_exp) != self.n:
            raise ValueError("exponent vectors must have length n")
        if any(e < 0 for e in self.z_exp) or any(e < 0 for e in self.d_exp):
            raise ValueError("exponents must be non-negative")

    @property
    def sort_key(self) -> tuple:
        # lexicographic on (z_exp, d_exp); used for canonical term order
        return (self.z_exp, self.d_exp)

    def is_unit(self) -> bool:
        return not any(self.z_exp) and not any(self.d_exp)


def _merge_terms(n: int, terms: Iterable[Tuple[WeylMonomial, Fraction]]):
    acc: Dict[WeylMonomial, Fraction] = {}
    for mono, coeff in terms:
        if mono.n != n:
            raise ValueError("mixed variable counts in one element")
        c = acc.get(mono, Fraction(0)) + coeff
        if c:
            acc[mono] = c
        elif mono in acc:
            del acc[mono]
    return tuple(sorted(acc.items(), key=lambda mc: mc[0].sort_key, reverse=True))


@dataclass(frozen=True)
class WeylElement:
    """Finite rational combination of normal-ordered monomials."""

    n: int
    terms: Tuple[Tuple[WeylMonomial, Fraction], ...]

    @staticmethod
    def from_terms(n: int, terms: Iterable[Tuple[WeylMonomial, Fraction]]) -> "WeylElement":
        return WeylElement(n, _merge_terms(n, terms))

    def is_zero(self) -> bool:
        return not self.terms

    def leading(self) -> Tuple[WeylMonomial, Fraction]:
        """Largest term in the canonical order (element must be nonzero)."""
        if not self.terms:
            raise ValueError("zero element has no leading term")
        return self.terms[0]

    @property
    def sort_key(self) -> tuple:
        return tuple((m.sort_key, c) for m, c in self.terms)

    def __add__(self, other: "WeylElement") -> "WeylElement":
        return add(self, other)

    def __sub__(self, other: "WeylElement") -> "WeylElement":
        return add(self, scale(Fraction(-1), other))

    def __neg__(self) -> "WeylElement":
        return scale(Fraction(-1), self)

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return mul(self, other)

    def __rmul__(self, c) -> "WeylElement":
        return scale(Fraction(c), self)

    def __str__(self) -> str:
        return format_element(self)


def unit(n: int) -> WeylElement:
    mono = WeylMonomial(n, (0,) * n, (0,) * n)
    return WeylElement(n, ((mono, Fraction(1)),))


def zero(n: int) -> WeylElement:
    return WeylElement(n, ())


def z_var(i: int, n: int) -> WeylElement:
    """Generator z_i (1-indexed) in n variables."""
    if not 1 <= i <= n:
        raise ValueError(f"variable index {i} out of range 1..{n}")
    e = tuple(1 if j == i - 1 else 0 for j in range(n))
    return WeylElement(n, ((WeylMonomial(n, e, (0,) * n), Fraction(1)),))


def d_var(i: int, n: int) -> WeylElement:
    """Generator d_i = d/dz_i (1-indexed) in n variables."""
    if not 1 <= i <= n:
        raise ValueError(f"variable index {i} out of range 1..{n}")
    e = tuple(1 if j == i - 1 else 0 for j in range(n))
    return WeylElement(n, ((WeylMonomial(n, (0,) * n, e), Fraction(1)),))


def monomial(n: int, z_exp: Exponents, d_exp: Exponents, coeff=1) -> WeylElement:
    return WeylElement.from_terms(n, [(WeylMonomial(n, tuple(z_exp), tuple(d_exp)), Fraction(coeff))])


def add(a: WeylElement, b: WeylElement) -> WeylElement:
    if a.n != b.n:
        raise ValueError("cannot add elements with different variable counts")
    return WeylElement(a.n, _merge_terms(a.n, list(a.terms) + list(b.terms)))


def scale(c, a: WeylElement) -> WeylElement:
    c = Fraction(c)
    if not c:
        return zero(a.n)
    return WeylElement(a.n, tuple((m, c * k) for m, k in a.terms))


def _mul_monomials(a: WeylMonomial, b: WeylMonomial):
    """Expand (z^p d^q)(z^r d^s) into normal-ordered terms.

    Per variable, d^q z^r = sum_j C(q,j) C(r,j) j! z^(r-j) d^(q-j); the
    cross-variable factors commute, so contractions are independent and
    the result is the product over variables of the one-variable sums.
    """
    n = a.n
    ranges = [range(min(a.d_exp[i], b.z_exp[i]) + 1) for i in range(n)]

    def emit(i: int, js: list):
        if i == n:
            coeff = Fraction(1)
            for k, j in enumerate(js):
                coeff *= comb(a.d_exp[k], j) * comb(b.z_exp[k], j) * factorial(j)
            z_exp = tuple(a.z_exp[k] + b.z_exp[k] - js[k] for k in range(n))
            d_exp = tuple(a.d_exp[k] + b.d_exp[k] - js[k] for k in range(n))
            yield WeylMonomial(n, z_exp, d_exp), coeff
            return
        for j in ranges[i]:
            yield from emit(i + 1, js + [j])

    yield from emit(0, [])


def mul(a: WeylElement, b: WeylElement) -> WeylElement:
    if a.n != b.n:
        raise ValueError("cannot multiply elements with different variable counts")
    out = []
    for ma, ca in a.terms:
        for mb, cb in b.terms:
            for mono, corr in _mul_monomials(ma, mb):
                out.append((mono, ca * cb * corr))
    return WeylElement(a.n, _merge_terms(a.n, out))


def commutator(a: WeylElement, b: WeylElement) -> WeylElement:
    return add(mul(a, b), scale(-1, mul(b, a)))


def apply(a: WeylElement, p: Mapping[Exponents, Fraction]) -> Polynomial:
    """Act with a on a polynomial in z1..zn (the differential-operator action).

    This is the independent oracle for the reordering rule: the action of
    z^p d^q is defined directly by falling factorials, so
    apply(mul(a, b), f) == apply(a, apply(b, f)) exercises `mul` without
    assuming its closed form.
    """
    out: Polynomial = {}
    for mono, coeff in a.terms:
        for exps, pc in p.items():
            if len(exps) != a.n:
                raise ValueError("polynomial arity does not match element")
            c = coeff * pc
            ok = True
            new = []
            for i in range(a.n):
                q = mono.d_exp[i]
                m = exps[i]
                if q > m:
                    ok = False
                    break
                for r in range(q):
                    c *= m - r
                new.append(m - q + mono.z_exp[i])
            if not ok or not c:
                continue
            key = tuple(new)
            tot = out.get(key, Fraction(0)) + c
            if tot:
                out[key] = tot
            elif key in out:
                del out[key]
    return out


def disjoint_embed(a: WeylElement, offset: int, total: int) -> WeylElement:
    """Re-index a into the algebra on `total` variables, shifting by `offset`."""
    if offset < 0 or a.n + offset > total:
        raise ValueError("embedding does not fit in target algebra")
    pad_l = (0,) * offset
    pad_r = (0,) * (total - a.n - offset)
    terms = [
        (WeylMonomial(total, pad_l + m.z_exp + pad_r, pad_l + m.d_exp + pad_r), c)
        for m, c in a.terms
    ]
    return WeylElement(total, tuple(terms))


# ---------------------------------------------------------------------------
# text format: "3/2*z1^2*d1 + 1", "-z2 + 2/3", "0"
# ---------------------------------------------------------------------------

_FACTOR_RE = re.compile(r"^(?:(?P<num>\d+(?:/\d+)?)|(?P<gen>[zd])(?P<idx>\d+)(?:\^(?P<pow>\d+))?)$")


def _format_monomial(mono: WeylMonomial, coeff: Fraction) -> str:
    factors = []
    for i, e in enumerate(mono.z_exp):
        if e == 1:
            factors.append(f"z{i + 1}")
        elif e > 1:
            factors.append(f"z{i + 1}^{e}")
    for i, e in enumerate(mono.d_exp):
        if e == 1:
            factors.append(f"d{i + 1}")
        elif e > 1:
            factors.append(f"d{i + 1}^{e}")
    mag = abs(coeff)
    if not factors:
        return str(mag)
    if mag != 1:
        factors.insert(0, str(mag))
    return "*".join(factors)


def format_element(a: WeylElement) -> str:
    """Render in the canonical term order; inverse of `parse_element`."""
    if not a.terms:
        return "0"
    pieces = []
    for idx, (mono, coeff) in enumerate(a.terms):
        body = _format_monomial(mono, coeff)
        if idx == 0:
            pieces.append(body if coeff > 0 else "-" + body)
        else:
            pieces.append(("+ " if coeff > 0 else "- ") + body)
    return " ".join(pieces)


def parse_element(text: str, n: int | None = None) -> WeylElement:
    """Parse the text format.  If n is omitted, the highest index seen is used.

    Factors within a term are multiplied left to right in the algebra, so
    "z1*d1" is the normal-ordered monomial while "d1*z1" expands to
    z1*d1 + 1.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty element string")
    # split into signed terms at top level
    s = s.replace("- ", "-").replace("+ ", "+")
    raw_terms = re.findall(r"[+-]?[^+-]+", s)
    parsed: list[tuple[int, list[str]]] = []
    max_idx = 0
    for raw in raw_terms:
        raw = raw.strip()
        sign = 1
        if raw.startswith("+"):
            raw = raw[1:]
        elif raw.startswith("-"):
            sign = -1
            raw = raw[1:]
        factors = [f.strip() for f in raw.split("*")]
        for f in factors:
            m = _FACTOR_RE.match(f)
            if not m:
                raise ValueError(f"cannot parse factor {f!r} in {text!r}")
            if m.group("gen"):
                max_idx = max(max_idx, int(m.group("idx")))
        parsed.append((sign, factors))
    if n is None:
        n = max(max_idx, 1)
    elif max_idx > n:
        raise ValueError(f"element references z{max_idx}/d{max_idx} but n={n}")
    total = zero(n)
    for sign, factors in parsed:
        term = unit(n)
        for f in factors:
            m = _FACTOR_RE.match(f)
            assert m is not None
            if m.group("num"):
                term = scale(Fraction(m.group("num")), term)
            else:
                idx = int(m.group("idx"))
                power = int(m.group("pow") or 1)
                gen = z_var(idx, n) if m.group("gen") == "z" else d_var(idx, n)
                for _ in range(power):
                    term = mul(term, gen)
        total = add(total, scale(sign, term))
    return total
