"""Exact rational arithmetic for univariate polynomials.

Everything in this module is decision-grade: signs, root counts and isolating
intervals are computed over Q with no floating point anywhere.  Coefficients
are `fractions.Fraction` values; Sturm sequences are run on primitive integer
polynomials so that coefficient growth stays under control.

A polynomial is a dense list of coefficients, constant term first.  Degrees in
this package stay small (a few dozen), so density is harmless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import NotSquarefree, SignAmbiguous

Rational = Fraction

DEFAULT_ISOLATION_WIDTH = Fraction(1, 1024)


def parse_rational(text: str) -> Fraction:
    """Parse "n" or "n/d" in base 10.  Accepts the unicode minus sign."""
    return Fraction(text.strip().replace("−", "-"))


def format_rational(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class UniPoly:
    """Univariate polynomial with Fraction coefficients, constant term first.

    Immutable.  Trailing zero coefficients are trimmed on construction, so
    ``degree`` is always the index of the last nonzero coefficient (and -1 for
    the zero polynomial).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Fraction | int | str] = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("UniPoly is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> "UniPoly":
        return cls(())

    @classmethod
    def constant(cls, c) -> "UniPoly":
        return cls((Fraction(c),))

    @classmethod
    def variable(cls) -> "UniPoly":
        return cls((0, 1))

    @classmethod
    def monomial(cls, coeff, exponent: int) -> "UniPoly":
        return cls((0,) * exponent + (Fraction(coeff),))

    @classmethod
    def parse(cls, line: str) -> "UniPoly":
        """Parse the one-line text format: whitespace-separated coefficients,
        constant term first, each "n" or "n/d"."""
        return cls(parse_rational(tok) for tok in line.split())

    def format(self) -> str:
        """Inverse of :meth:`parse`.  The zero polynomial prints as "0"."""
        if not self.coeffs:
            return "0"
        return " ".join(format_rational(c) for c in self.coeffs)

    # -- basic structure ----------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def leading(self) -> Fraction:
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def coefficient(self, exponent: int) -> Fraction:
        if 0 <= exponent < len(self.coeffs):
            return self.coeffs[exponent]
        return Fraction(0)

    def __eq__(self, other) -> bool:
        return isinstance(other, UniPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"UniPoly({self.format()!r})"

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "UniPoly") -> "UniPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return UniPoly(out)

    def __neg__(self) -> "UniPoly":
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other) -> "UniPoly":
        if not isinstance(other, UniPoly):
            return self.scale(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UniPoly.zero()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
        return UniPoly(out)

    __rmul__ = __mul__

    def scale(self, c) -> "UniPoly":
        c = Fraction(c)
        return UniPoly(ci * c for ci in self.coeffs)

    def __pow__(self, n: int) -> "UniPoly":
        result = UniPoly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def derivative(self) -> "UniPoly":
        return UniPoly(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def shift_exponents(self, n: int) -> "UniPoly":
        """Multiply by u**n."""
        return UniPoly((0,) * n + tuple(self.coeffs))

    def compose_affine(self, alpha, beta) -> "UniPoly":
        """Return p(alpha*u + beta) as a polynomial in u."""
        lin = UniPoly((Fraction(beta), Fraction(alpha)))
        acc = UniPoly.zero()
        for c in reversed(self.coeffs):
            acc = acc * lin + UniPoly.constant(c)
        return acc

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return UniPoly.zero(), self
        quot = [Fraction(0)] * (dq + 1)
        lead = other.leading()
        for i in range(dq, -1, -1):
            top = len(other.coeffs) - 1 + i
            if top < len(rem) and rem[top]:
                f = rem[top] / lead
                quot[i] = f
                for j, c in enumerate(other.coeffs):
                    rem[i + j] -= f * c
        return UniPoly(quot), UniPoly(rem)

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        return self.scale(1 / self.leading())


def poly_arith(a: UniPoly, b: UniPoly, op: str) -> UniPoly:
    """Dispatch form of +, -, * used by callers that take the op as data."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd of a and b (not both zero)."""
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    ia, ib = _to_int_poly(a), _to_int_poly(b)
    g = _int_gcd(ia, ib)
    return UniPoly(g).monic()


def squarefree_and_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Alias kept for symmetry with the squarefree test: gcd(a, a') constant."""
    return gcd(a, b)


def is_squarefree(a: UniPoly) -> bool:
    if a.is_zero():
        return False
    if a.is_constant():
        return True
    return gcd(a, a.derivative()).is_constant()


# -- integer polynomial layer ----------------------------------------------
#
# Sturm sequences and sign evaluations run on primitive integer coefficient
# lists.  Scaling a polynomial by a positive rational changes no sign, so all
# counts computed here transfer to the Fraction-level polynomial.


def _to_int_poly(p: UniPoly) -> list[int]:
    if p.is_zero():
        return []
    denom = math.lcm(*(c.denominator for c in p.coeffs))
    ints = [int(c * denom) for c in p.coeffs]
    g = math.gcd(*ints)
    return [c // g for c in ints]


def _int_primitive(cs: list[int]) -> list[int]:
    while cs and cs[-1] == 0:
        cs.pop()
    if not cs:
        return cs
    g = math.gcd(*cs)
    return [c // g for c in cs]


def _int_pseudo_rem(a: list[int], b: list[int]) -> list[int]:
    """Positive-multiple remainder of a by b (both nonzero, deg a >= deg b).

    Returns r with r = c * (a mod b) for some rational c > 0.
    """
    lead = b[-1]
    rem = list(a)
    while len(rem) >= len(b):
        # rem <- lead*rem - top*b*u^shift, sign-fixed to stay a positive multiple
        top = rem[-1]
        shift = len(rem) - len(b)
        new = [c * lead for c in rem[:-1]]
        for j, c in enumerate(b[:-1]):
            new[shift + j] -= top * c
        if lead < 0:
            new = [-c for c in new]
        while new and new[-1] == 0:
            new.pop()
        rem = new
    return rem


def _int_gcd(a: list[int], b: list[int]) -> list[int]:
    a, b = _int_primitive(list(a)), _int_primitive(list(b))
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _int_pseudo_rem(a, b)
        a, b = b, _int_primitive(r)
    return a


def _int_sign_at(cs: Sequence[int], x: Fraction) -> int:
    """Exact sign of the integer polynomial at a rational point.

    Horner with denominator clearing: sign of sum c_i n^i d^(deg-i).
    """
    n, d = x.numerator, x.denominator
    acc = 0
    dp = 1
    for c in reversed(cs):
        acc = acc * n + c * dp
        dp *= d
    return (acc > 0) - (acc < 0)


def _sturm_chain(cs: list[int]) -> list[list[int]]:
    deriv = _int_primitive([i * c for i, c in enumerate(cs) if i > 0])
    chain = [list(cs), deriv]
    while chain[-1]:
        a, b = chain[-2], chain[-1]
        if len(b) == 1:
            break
        r = _int_pseudo_rem(a, b)
        r = _int_primitive([-c for c in r])
        if not r:
            break
        chain.append(r)
    return chain


def _variations(chain: list[list[int]], x: Fraction | None, at: int = 0) -> int:
    """Sign variations of the chain at x; at=+1/-1 means +/- infinity."""
    signs = []
    for cs in chain:
        if not cs:
            continue
        if at == 0:
            s = _int_sign_at(cs, x)
        else:
            s = 1 if cs[-1] > 0 else -1
            if at < 0 and (len(cs) - 1) % 2 == 1:
                s = -s
        if s != 0:
            signs.append(s)
    return sum(1 for s1, s2 in zip(signs, signs[1:]) if s1 != s2)


@dataclass(frozen=True)
class IsolatingInterval:
    """Open interval (lo, hi) with rational endpoints containing exactly one
    root of the target polynomial; the polynomial does not vanish at lo or hi.
    """

    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2


class _SturmContext:
    """Sturm chain plus helpers for one squarefree integer polynomial."""

    def __init__(self, cs: list[int]):
        self.cs = cs
        self.chain = _sturm_chain(cs)

    def count_open(self, lo: Fraction, hi: Fraction) -> int:
        """Number of roots in (lo, hi]; with nonvanishing endpoints this is
        the count in the open interval."""
        return _variations(self.chain, lo) - _variations(self.chain, hi)

    def sign_at(self, x: Fraction) -> int:
        return _int_sign_at(self.cs, x)

    def split_point(self, lo: Fraction, hi: Fraction) -> Fraction:
        """A nonroot strictly inside (lo, hi), preferring a power of two
        when the interval spans many octaves: roots of very different
        magnitudes then separate in logarithmically many steps."""
        cand = _dyadic_inside(lo, hi)
        if cand is not None and self.sign_at(cand) != 0:
            return cand
        return self.nonroot_between(lo, hi)

    def nonroot_between(self, lo: Fraction, hi: Fraction) -> Fraction:
        mid = (lo + hi) / 2
        if self.sign_at(mid) != 0:
            return mid
        n = len(self.cs) + 2
        for j in range(1, n + 1):
            x = lo + (hi - lo) * Fraction(2 * j - 1, 2 * n)
            if self.sign_at(x) != 0:
                return x
        raise AssertionError("polynomial vanished at more points than it has roots")


def _floor_log2(x: Fraction) -> int:
    """floor(log2(x)) for x > 0, computed exactly."""
    n, d = x.numerator, x.denominator
    e = n.bit_length() - d.bit_length()
    if (d << e if e >= 0 else d) > (n if e >= 0 else n << -e):
        e -= 1
    return e


def _dyadic_inside(lo: Fraction, hi: Fraction) -> Fraction | None:
    """A signed power of two (or 0) strictly inside (lo, hi), roughly
    balanced in exponent, or None when the interval spans few octaves."""
    if lo < 0 < hi:
        return Fraction(0)
    if hi <= 0:
        cand = _dyadic_inside(-hi, -lo)
        return None if cand is None else -cand
    ehi = _floor_log2(hi)
    if lo == 0:
        m = ehi // 2 if ehi > 1 else (ehi - 2 if ehi >= -1 else 2 * ehi)
    else:
        elo = _floor_log2(lo)
        if ehi - elo < 2:
            return None
        m = (elo + ehi) // 2
    cand = Fraction(2) ** m
    return cand if lo < cand < hi else None


def _root_bound(cs: list[int]) -> int:
    """Integer B with all real roots in (-B, B) and no root at +-B."""
    lead = abs(cs[-1])
    m = max(abs(c) for c in cs[:-1]) if len(cs) > 1 else 0
    return math.ceil(Fraction(m, lead)) + 2


def sturm_isolate(
    a: UniPoly,
    domain: tuple[Fraction, Fraction] | None = None,
    width: Fraction = DEFAULT_ISOLATION_WIDTH,
) -> list[IsolatingInterval]:
    """Isolate the distinct real roots of a squarefree polynomial.

    Returns sorted, pairwise disjoint open intervals, one per real root,
    each of width at most ``width``, with nonvanishing endpoints.  If
    ``domain`` is given, only roots inside it are reported (its endpoints
    must not be roots).
    """
    if a.is_zero():
        raise NotSquarefree("the zero polynomial is not squarefree")
    if not is_squarefree(a):
        raise NotSquarefree(f"gcd with derivative is nonconstant: {a.format()}")
    if a.is_constant():
        return []
    cs = _to_int_poly(a)
    ctx = _SturmContext(cs)
    if domain is None:
        b = Fraction(_root_bound(cs))
        lo, hi = -b, b
    else:
        lo, hi = Fraction(domain[0]), Fraction(domain[1])
        if ctx.sign_at(lo) == 0 or ctx.sign_at(hi) == 0:
            raise SignAmbiguous("domain endpoint is a root")
    result: list[IsolatingInterval] = []
    stack = [(lo, hi, ctx.count_open(lo, hi))]
    while stack:
        lo_, hi_, n = stack.pop()
        if n == 0:
            continue
        if n == 1 and hi_ - lo_ <= width:
            result.append(IsolatingInterval(lo_, hi_))
            continue
        mid = ctx.split_point(lo_, hi_)
        left = ctx.count_open(lo_, mid)
        stack.append((lo_, mid, left))
        stack.append((mid, hi_, n - left))
    result.sort(key=lambda iv: iv.lo)
    return result


def refine_interval(a: UniPoly, iv: IsolatingInterval, width: Fraction) -> IsolatingInterval:
    """Shrink an isolating interval for ``a`` to at most the requested width."""
    ctx = _SturmContext(_to_int_poly(a))
    lo, hi = iv.lo, iv.hi
    if ctx.count_open(lo, hi) != 1:
        raise SignAmbiguous("interval does not isolate exactly one root")
    while hi - lo > width:
        mid = ctx.split_point(lo, hi)
        if ctx.count_open(lo, mid) == 1:
            hi = mid
        else:
            lo = mid
    return IsolatingInterval(lo, hi)


def count_real_roots(a: UniPoly) -> int:
    """Number of distinct real roots of a squarefree polynomial."""
    return len(sturm_isolate(a, width=Fraction(10**9)))


def sign_at(a: UniPoly, x) -> int:
    v = a(Fraction(x))
    return (v > 0) - (v < 0)


def sign_on_interval(a: UniPoly, lo, hi) -> int:
    """Sign of ``a`` on the open interval (lo, hi), asserted root-free by the
    caller.  Evaluates at the midpoint; a zero there is a caller bug."""
    s = sign_at(a, (Fraction(lo) + Fraction(hi)) / 2)
    if s == 0:
        raise SignAmbiguous(
            f"polynomial vanishes at the midpoint of ({lo}, {hi}); interval is not root-free"
        )
    return s


def ordered_real_roots_of_cubic(
    p0, q0, width: Fraction = DEFAULT_ISOLATION_WIDTH
) -> list[IsolatingInterval]:
    """Isolating intervals for the real roots of x^3 + p0*x + q0, sorted.

    The cubic is squarefree iff 4*p0^3 + 27*q0^2 != 0; otherwise
    NotSquarefree is raised (double or triple root).
    """
    p0, q0 = Fraction(p0), Fraction(q0)
    if 4 * p0**3 + 27 * q0**2 == 0:
        raise NotSquarefree("cubic discriminant vanishes (repeated root)")
    cubic = UniPoly((q0, p0, 0, 1))
    return sturm_isolate(cubic, width=width)


def squarefree_part(a: UniPoly) -> UniPoly:
    """a divided by gcd(a, a'): same roots, all simple."""
    if a.is_zero() or a.is_constant():
        return a
    g = gcd(a, a.derivative())
    if g.is_constant():
        return a
    quot, rem = a.divmod(g)
    assert rem.is_zero()
    return quot


def sign_at_root(f: UniPoly, g: UniPoly, iv: IsolatingInterval) -> int:
    """Exact sign of f at the unique root of g inside iv.

    Requires gcd(f, g) constant (so f does not vanish at the root) and g
    squarefree.  Refines the isolating interval until f has constant sign
    on it.
    """
    if f.is_zero():
        raise ValueError("f is identically zero")
    if not gcd(f, g).is_constant():
        raise ValueError("f and g share a root; the sign may be zero")
    fs = _SturmContext(_to_int_poly(squarefree_part(f)))
    gs = _SturmContext(_to_int_poly(g))
    lo, hi = iv.lo, iv.hi
    while True:
        # no roots of f in (lo, hi] means f has the sign of f(hi) there
        if fs.count_open(lo, hi) == 0 and fs.sign_at(hi) != 0:
            return fs.sign_at(hi)
        mid = gs.nonroot_between(lo, hi)
        if gs.count_open(lo, mid) == 1:
            hi = mid
        else:
            lo = mid


def depressed_cubic(p0, q0) -> UniPoly:
    """The cubic x^3 + p0*x + q0 as a UniPoly in x."""
    return UniPoly((Fraction(q0), Fraction(p0), 0, 1))
