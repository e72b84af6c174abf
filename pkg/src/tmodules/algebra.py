"""Exact arithmetic in F_p, F_p[T] and the rational function field F_p(T).

Polynomials are backed by FLINT's ``nmod_poly``.  Elements of F_p(T) are
kept in canonical form (coprime numerator and denominator, monic
denominator), so equality is representational.

``T`` plays the role of theta, the image of t in the base field.
"""

import functools
import re

from flint import nmod_poly

__all__ = [
    "ParseError",
    "FunctionField",
    "get_field",
    "RatFunc",
    "frobenius",
    "try_frobenius_inverse",
    "is_prime",
]


def is_prime(p):
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def _spread(poly, step):
    # f(T) -> f(T^step); exact for Frobenius since F_p coefficients are fixed
    if step == 1 or poly.degree() <= 0:
        return poly
    coeffs = [int(c) for c in poly.coeffs()]
    out = [0] * ((len(coeffs) - 1) * step + 1)
    for i, c in enumerate(coeffs):
        out[i * step] = c
    return nmod_poly(out, poly.modulus())


def _shrink(poly, step):
    """Inverse of :func:`_spread`, or None when some exponent is not a multiple."""
    if poly.degree() <= 0:
        return poly
    coeffs = [int(c) for c in poly.coeffs()]
    for i, c in enumerate(coeffs):
        if c and i % step:
            return None
    return nmod_poly(coeffs[::step], poly.modulus())


class RatFunc:
    """An element of F_p(T) in canonical form.

    Instances are immutable.  Build them through a :class:`FunctionField`
    rather than directly.
    """

    __slots__ = ("num", "den", "_key", "_twists")

    def __init__(self, num, den=None, _canonical=False):
        p = num.modulus()
        if den is None:
            den = nmod_poly([1], p)
        if den.modulus() != p:
            raise ValueError("characteristic mismatch")
        if not _canonical:
            if den.is_zero():
                raise ZeroDivisionError("zero denominator")
            if num.is_zero():
                den = nmod_poly([1], p)
            else:
                if den.degree() > 0:
                    g = num.gcd(den)
                    if not g.is_one():
                        num = num // g
                        den = den // g
                lc = int(den.leading_coefficient())
                if lc != 1:
                    inv = pow(lc, -1, p)
                    num = num * inv
                    den = den * inv
        self.num = num
        self.den = den
        self._key = None
        self._twists = None

    # -- basic queries -------------------------------------------------

    @property
    def p(self):
        return self.num.modulus()

    def key(self):
        if self._key is None:
            self._key = (
                self.p,
                tuple(int(c) for c in self.num.coeffs()),
                tuple(int(c) for c in self.den.coeffs()),
            )
        return self._key

    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self.num.is_one() and self.den.is_one()

    def is_polynomial(self):
        return self.den.is_one()

    def is_constant(self):
        return self.num.degree() <= 0 and self.den.is_one()

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        if isinstance(other, int):
            other = self._coerce(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash(self.key())

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.p != self.p:
                raise ValueError(
                    f"characteristic mismatch: {self.p} vs {other.p}")
            return other
        if isinstance(other, int):
            return RatFunc(nmod_poly([other % self.p], self.p), _canonical=True)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den,
                       self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return RatFunc(nmod_poly([], self.p), _canonical=True)
        if self.is_one():
            return other
        if other.is_one():
            return self
        if self.den.is_one() and other.den.is_one():
            return RatFunc(self.num * other.num, self.den, _canonical=True)
        # cross-cancel before multiplying keeps intermediate degrees low
        g1 = self.num.gcd(other.den)
        g2 = other.num.gcd(self.den)
        num = (self.num // g1) * (other.num // g2)
        den = (self.den // g2) * (other.den // g1)
        return RatFunc(num, den)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("division by zero in F_p(T)")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = self._coerce(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- Frobenius -----------------------------------------------------

    def twist(self, k=1):
        """Return ``self ** (p ** k)``."""
        return frobenius(self, k)

    def untwist(self, k=1):
        """Return the ``p**k``-th root of ``self`` or None if it does not exist."""
        x = self
        for _ in range(k):
            x = try_frobenius_inverse(x)
            if x is None:
                return None
        return x

    def scale(self, b):
        return b * self

    # -- text ----------------------------------------------------------

    def __str__(self):
        return format_ratfunc(self)

    def __repr__(self):
        return f"RatFunc({format_ratfunc(self)!r}, p={self.p})"


def frobenius(x, k=1):
    """Return ``x ** (p ** k)`` computed by the substitution T -> T^(p^k)."""
    if k == 0 or x.is_constant():
        return x
    if x._twists is None:
        x._twists = {}
    cached = x._twists.get(k)
    if cached is None:
        step = x.p ** k
        cached = RatFunc(_spread(x.num, step), _spread(x.den, step),
                         _canonical=True)
        x._twists[k] = cached
    return cached


def try_frobenius_inverse(x):
    """Return y with ``y ** p == x`` when x lies in F_p(T^p), else None."""
    if x.is_constant():
        return x
    p = x.p
    num = _shrink(x.num, p)
    if num is None:
        return None
    den = _shrink(x.den, p)
    if den is None:
        return None
    return RatFunc(num, den, _canonical=True)


class FunctionField:
    """Factory for elements of F_p(T) with p prime."""

    def __init__(self, p):
        p = int(p)
        if not is_prime(p):
            raise ValueError(f"characteristic must be prime, got {p}")
        self.p = p
        self.zero = RatFunc(nmod_poly([], p), _canonical=True)
        self.one = RatFunc(nmod_poly([1], p), _canonical=True)
        self.theta = RatFunc(nmod_poly([0, 1], p), _canonical=True)

    def __eq__(self, other):
        return isinstance(other, FunctionField) and other.p == self.p

    def __hash__(self):
        return hash(("FunctionField", self.p))

    def __repr__(self):
        return f"FunctionField({self.p})"

    def __call__(self, x):
        if isinstance(x, RatFunc):
            if x.p != self.p:
                raise ValueError("characteristic mismatch")
            return x
        if isinstance(x, int):
            return RatFunc(nmod_poly([x % self.p], self.p), _canonical=True)
        if isinstance(x, str):
            return parse_ratfunc(x, self.p)
        raise TypeError(f"cannot convert {type(x).__name__} to F_{self.p}(T)")

    def poly(self, coeffs):
        """Polynomial from a coefficient list, index = degree in T."""
        return RatFunc(nmod_poly([int(c) % self.p for c in coeffs], self.p),
                       _canonical=True)

    def fraction(self, num_coeffs, den_coeffs):
        return RatFunc(nmod_poly([int(c) % self.p for c in num_coeffs], self.p),
                       nmod_poly([int(c) % self.p for c in den_coeffs], self.p))

    def random_poly(self, rng, max_degree=2):
        deg = rng.randint(0, max_degree)
        return self.poly([rng.randrange(self.p) for _ in range(deg + 1)])

    def random_element(self, rng, max_degree=2, fraction_rate=0.25):
        num = self.random_poly(rng, max_degree)
        if rng.random() < fraction_rate:
            den = self.random_poly(rng, max_degree)
            while den.is_zero():
                den = self.random_poly(rng, max_degree)
            return num / den
        return num

    def random_nonzero(self, rng, max_degree=2, fraction_rate=0.25):
        x = self.random_element(rng, max_degree, fraction_rate)
        while x.is_zero():
            x = self.random_element(rng, max_degree, fraction_rate)
        return x


@functools.lru_cache(maxsize=None)
def get_field(p):
    """Shared :class:`FunctionField` instance for characteristic p."""
    return FunctionField(p)


# -- text grammar --------------------------------------------------------
#
#   ratfunc := poly | poly "/" poly
#   poly    := term ("+" term)*
#   term    := coeff | coeff "*" "T" ("^" exp)? | "T" ("^" exp)?
#
# A leading "-" on a term and surrounding parentheses on a poly are also
# accepted on input; output never uses them.

_TERM_RE = re.compile(
    r"^(?P<sign>-)?\s*(?:(?P<coeff>\d+)\s*(?:\*\s*(?P<t1>T)(?:\s*\^\s*(?P<e1>\d+))?)?"
    r"|(?P<t2>T)(?:\s*\^\s*(?P<e2>\d+))?)$"
)


class ParseError(ValueError):
    """Malformed input text; ``line`` is set when the source line is known."""

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where = f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


def _split_terms(text):
    # split on top-level "+" and "-" that separate terms
    terms = []
    buf = ""
    for ch in text:
        if ch in "+-" and buf.strip():
            terms.append(buf.strip())
            buf = "-" if ch == "-" else ""
        else:
            buf += ch
    if not buf.strip():
        raise ParseError(f"dangling sign in {text!r}")
    terms.append(buf.strip())
    return terms


def _parse_poly(text, p):
    text = text.strip()
    while text.startswith("(") and text.endswith(")"):
        text = text[1:-1].strip()
    if not text:
        raise ParseError("empty polynomial")
    coeffs = {}
    for term in _split_terms(text.replace(" ", "")):
        m = _TERM_RE.match(term)
        if not m:
            raise ParseError(f"bad term {term!r}")
        if m.group("coeff") is not None:
            c = int(m.group("coeff"))
            e = 0
            if m.group("t1"):
                e = int(m.group("e1") or 1)
        else:
            c = 1
            e = int(m.group("e2") or 1)
        if m.group("sign"):
            c = -c
        coeffs[e] = coeffs.get(e, 0) + c
    out = [0] * (max(coeffs) + 1)
    for e, c in coeffs.items():
        out[e] = c % p
    return nmod_poly(out, p)


def parse_ratfunc(text, p):
    """Parse the ratfunc grammar into a canonical :class:`RatFunc`."""
    text = text.strip()
    parts = _split_top(text, "/")
    if len(parts) == 1:
        return RatFunc(_parse_poly(parts[0], p))
    if len(parts) == 2:
        den = _parse_poly(parts[1], p)
        if den.is_zero():
            raise ParseError(f"zero denominator in {text!r}")
        return RatFunc(_parse_poly(parts[0], p), den)
    raise ParseError(f"more than one '/' in {text!r}")


def _split_top(text, sep):
    parts, depth, buf = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append(buf)
            buf = ""
        else:
            buf += ch
    parts.append(buf)
    return parts


def format_poly(poly):
    coeffs = [int(c) for c in poly.coeffs()]
    if not any(coeffs):
        return "0"
    terms = []
    for e in range(len(coeffs) - 1, -1, -1):
        c = coeffs[e]
        if not c:
            continue
        if e == 0:
            terms.append(str(c))
        else:
            mono = "T" if e == 1 else f"T^{e}"
            terms.append(mono if c == 1 else f"{c}*{mono}")
    return " + ".join(terms)


def format_ratfunc(x):
    if x.den.is_one():
        return format_poly(x.num)
    return f"{format_poly(x.num)} / {format_poly(x.den)}"
