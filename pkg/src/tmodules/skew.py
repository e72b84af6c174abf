"""Twisted polynomials L{tau} with tau*c = c^p*tau, and matrices over L and L{tau}.

Matrices over L are plain tuples of tuples of :class:`RatFunc`; the helpers
``mat_*`` below operate on them.  Matrices over L{tau} are
:class:`SkewMatrix` instances.
"""

from .algebra import ParseError, RatFunc, _split_top, get_field, parse_ratfunc

__all__ = [
    "SkewPoly",
    "SkewMatrix",
    "SingularMatrixError",
    "identity_matrix",
    "zero_matrix",
    "mat_mul",
    "mat_add",
    "mat_sub",
    "mat_neg",
    "mat_inverse",
    "mat_twist",
    "mat_rank",
    "mat_rref",
    "mat_left_kernel",
    "mat_is_zero",
    "mat_is_nilpotent",
    "mat_is_invertible",
    "mat_scale",
    "mat_transpose",
    "mat_from",
    "mat_shape",
    "skew_mul",
    "skew_matrix_mul",
    "apply_point",
    "format_skewpoly",
    "parse_skewpoly",
]


class SingularMatrixError(ValueError):
    pass


# -- matrices over L ------------------------------------------------------

def zero_matrix(rows, cols, p):
    z = get_field(p).zero
    return tuple(tuple(z for _ in range(cols)) for _ in range(rows))


def identity_matrix(n, p, diag=None):
    F = get_field(p)
    d = F.one if diag is None else diag
    return tuple(tuple(d if i == j else F.zero for j in range(n)) for i in range(n))


def mat_from(rows, p):
    F = get_field(p)
    return tuple(tuple(F(x) for x in row) for row in rows)


def mat_shape(A):
    return len(A), (len(A[0]) if A else 0)


def mat_mul(A, B):
    n, m = mat_shape(A)
    m2, k = mat_shape(B)
    if m != m2:
        raise ValueError(f"shape mismatch: {n}x{m} times {m2}x{k}")
    zero = get_field(A[0][0].p).zero
    out = []
    for i in range(n):
        row = []
        Ai = A[i]
        for j in range(k):
            acc = None
            for s in range(m):
                a = Ai[s]
                if a.is_zero():
                    continue
                b = B[s][j]
                if b.is_zero():
                    continue
                t = a * b
                acc = t if acc is None else acc + t
            row.append(acc if acc is not None else zero)
        out.append(tuple(row))
    return tuple(out)


def mat_add(A, B):
    if mat_shape(A) != mat_shape(B):
        raise ValueError("shape mismatch in matrix sum")
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_neg(A):
    return tuple(tuple(-a for a in row) for row in A)


def mat_sub(A, B):
    return mat_add(A, mat_neg(B))


def mat_scale(c, A):
    return tuple(tuple(c * a for a in row) for row in A)


def mat_twist(A, k=1):
    """Entrywise Frobenius twist A^(k)."""
    if k == 0:
        return A
    return tuple(tuple(a.twist(k) for a in row) for row in A)


def mat_is_zero(A):
    return all(a.is_zero() for row in A for a in row)


def mat_transpose(A):
    return tuple(zip(*A)) if A else A


def _echelon(A):
    """Row-reduce a copy of A; returns (rows, pivot columns)."""
    M = [list(r) for r in A]
    n, m = mat_shape(A)
    pivots = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, n) if not M[i][c].is_zero()), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = M[r][c].inverse()
        M[r] = [x * inv for x in M[r]]
        for i in range(n):
            if i != r and not M[i][c].is_zero():
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    return M, pivots


def mat_rank(A):
    if not A or not A[0]:
        return 0
    return len(_echelon(A)[1])


def mat_rref(A):
    """Reduced row echelon form: (nonzero rows, pivot columns)."""
    M, pivots = _echelon(A)
    return tuple(tuple(r) for r in M[:len(pivots)]), pivots


def mat_left_kernel(A):
    """Rows x with x*A = 0, as a basis in reduced row echelon form."""
    n, m = mat_shape(A)
    p = A[0][0].p
    F = get_field(p)
    # right kernel of A^T from its reduced echelon form
    R, pivots = mat_rref(mat_transpose(A))
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = [F.zero] * n
        x[f] = F.one
        for row, pc in zip(R, pivots):
            x[pc] = -row[f]
        basis.append(tuple(x))
    if not basis:
        return ()
    return mat_rref(tuple(basis))[0]


def mat_inverse(A):
    n, m = mat_shape(A)
    if n != m:
        raise ValueError("only square matrices are invertible")
    p = A[0][0].p
    I = identity_matrix(n, p)
    aug = tuple(tuple(A[i]) + I[i] for i in range(n))
    M, pivots = _echelon(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular over F_p(T)")
    return tuple(tuple(M[i][n:]) for i in range(n))


def mat_is_invertible(A):
    n, m = mat_shape(A)
    return n == m and mat_rank(A) == n


def mat_is_nilpotent(A):
    """Exact test N^n == 0 for an n x n matrix (squaring up to n)."""
    n = len(A)
    if n == 0:
        return True
    P = A
    power = 1
    while power < n:
        P = mat_mul(P, P)
        power *= 2
    return mat_is_zero(P)


# -- twisted polynomials --------------------------------------------------

class SkewPoly:
    """An element sum_i c_i tau^i of L{tau}.

    ``coeffs[i]`` is the coefficient of tau^i; trailing zeros are stripped
    so the zero polynomial has no coefficients and degree -1.
    """

    __slots__ = ("coeffs", "p")

    def __init__(self, coeffs, p=None):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        if p is None:
            if not coeffs:
                raise ValueError("characteristic required for the zero polynomial")
            p = coeffs[0].p
        self.coeffs = tuple(coeffs)
        self.p = p

    @classmethod
    def zero(cls, p):
        return cls((), p)

    @classmethod
    def const(cls, c):
        return cls((c,), c.p)

    @classmethod
    def monomial(cls, c, k):
        F = get_field(c.p)
        return cls([F.zero] * k + [c], c.p)

    @classmethod
    def tau(cls, p, k=1):
        return cls.monomial(get_field(p).one, k)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def coeff(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return get_field(self.p).zero

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            other = SkewPoly.const(other)
        if not isinstance(other, SkewPoly):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __add__(self, other):
        if isinstance(other, RatFunc):
            other = SkewPoly.const(other)
        if not isinstance(other, SkewPoly):
            return NotImplemented
        if not other.coeffs:
            return self
        if not self.coeffs:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        return SkewPoly([self.coeff(i) + other.coeff(i) for i in range(n)], self.p)

    __radd__ = __add__

    def __neg__(self):
        return SkewPoly([-c for c in self.coeffs], self.p)

    def __sub__(self, other):
        if isinstance(other, RatFunc):
            other = SkewPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RatFunc):
            # w * b = sum w_i b^(i) tau^i
            return SkewPoly([c * other.twist(i) for i, c in enumerate(self.coeffs)],
                            self.p)
        if not isinstance(other, SkewPoly):
            return NotImplemented
        return skew_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, RatFunc):
            return self.scale(other)
        return NotImplemented

    def scale(self, b):
        """Left multiplication by a scalar b of L."""
        if b.is_zero():
            return SkewPoly.zero(self.p)
        if b.is_one():
            return self
        return SkewPoly([b * c for c in self.coeffs], self.p)

    def lmul_tau(self, k=1):
        """Return tau^k * self."""
        if k == 0 or not self.coeffs:
            return self
        F = get_field(self.p)
        return SkewPoly([F.zero] * k + [c.twist(k) for c in self.coeffs], self.p)

    def __call__(self, x):
        return apply_point(self, x)

    def __str__(self):
        return format_skewpoly(self)

    def __repr__(self):
        return f"SkewPoly({format_skewpoly(self)!r}, p={self.p})"


def skew_mul(a, b):
    """Product in L{tau}: (c tau^i)(d tau^j) = c d^(i) tau^(i+j)."""
    if not a.coeffs or not b.coeffs:
        return SkewPoly.zero(a.p)
    out = [None] * (len(a.coeffs) + len(b.coeffs) - 1)
    for i, c in enumerate(a.coeffs):
        if c.is_zero():
            continue
        for j, d in enumerate(b.coeffs):
            if d.is_zero():
                continue
            t = c * d.twist(i)
            out[i + j] = t if out[i + j] is None else out[i + j] + t
    z = get_field(a.p).zero
    return SkewPoly([z if x is None else x for x in out], a.p)


def apply_point(a, x):
    """Evaluate a as an F_p-linear map: sum c_i x^(p^i)."""
    acc = get_field(a.p).zero
    if x.is_zero():
        return acc
    for i, c in enumerate(a.coeffs):
        if not c.is_zero():
            acc = acc + c * x.twist(i)
    return acc


def format_skewpoly(a):
    if not a.coeffs:
        return "(0)"
    terms = []
    for i, c in enumerate(a.coeffs):
        if c.is_zero():
            continue
        terms.append(f"({c})" if i == 0 else f"({c})t#{i}")
    return " + ".join(terms)


def parse_skewpoly(text, p):
    """Parse ``sterm ("+" sterm)*`` with ``sterm := "(" ratfunc ")" ("t#" exp)? | "t#" exp?``."""
    F = get_field(p)
    text = text.strip()
    if not text:
        raise ParseError("empty skew polynomial")
    coeffs = {}
    for raw in _split_top(text, "+"):
        term = raw.strip()
        if not term:
            raise ParseError(f"empty term in {text!r}")
        if term.startswith("("):
            depth = 0
            for end, ch in enumerate(term):
                depth += ch == "("
                depth -= ch == ")"
                if depth == 0:
                    break
            else:
                raise ParseError(f"unbalanced parentheses in {term!r}")
            c = parse_ratfunc(term[1:end], p)
            rest = term[end + 1:].strip()
        else:
            c = F.one
            rest = term
        if not rest:
            e = 0
        elif rest.startswith("t#"):
            digits = rest[2:].strip()
            if digits and not digits.isdigit():
                raise ParseError(f"bad tau exponent in {term!r}")
            e = int(digits) if digits else 1
        else:
            raise ParseError(f"bad skew term {term!r}")
        coeffs[e] = coeffs.get(e, F.zero) + c
    out = [F.zero] * (max(coeffs) + 1)
    for e, c in coeffs.items():
        out[e] = c
    return SkewPoly(out, p)


# -- matrices over L{tau} -------------------------------------------------

class SkewMatrix:
    """A rows x cols matrix with entries in L{tau}."""

    __slots__ = ("entries", "rows", "cols", "p")

    def __init__(self, entries, p):
        self.entries = tuple(tuple(e for e in row) for row in entries)
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.rows else 0
        if self.rows == 0 or self.cols == 0:
            raise ValueError("matrix dimensions must be positive")
        if any(len(r) != self.cols for r in self.entries):
            raise ValueError("ragged matrix")
        self.p = p

    @classmethod
    def from_coeffs(cls, coeffs):
        """Build sum_i M_i tau^i from a list of matrices over L."""
        p = coeffs[0][0][0].p
        r, c = mat_shape(coeffs[0])
        F = get_field(p)
        entries = [[SkewPoly([M[i][j] if M is not None else F.zero for M in coeffs], p)
                    for j in range(c)] for i in range(r)]
        return cls(entries, p)

    @classmethod
    def scalar(cls, A):
        return cls([[SkewPoly.const(a) for a in row] for row in A], A[0][0].p)

    @classmethod
    def identity(cls, n, p):
        return cls.scalar(identity_matrix(n, p))

    @classmethod
    def zero(cls, rows, cols, p):
        return cls([[SkewPoly.zero(p)] * cols for _ in range(rows)], p)

    @property
    def shape(self):
        return self.rows, self.cols

    @property
    def degree(self):
        return max(e.degree for row in self.entries for e in row)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def coeff(self, k):
        return tuple(tuple(e.coeff(k) for e in row) for row in self.entries)

    def coeff_matrices(self):
        return [self.coeff(k) for k in range(max(self.degree, 0) + 1)]

    def partial(self):
        """Entrywise constant term."""
        return self.coeff(0)

    def __eq__(self, other):
        if not isinstance(other, SkewMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")
        return SkewMatrix([[a + b for a, b in zip(ra, rb)]
                           for ra, rb in zip(self.entries, other.entries)], self.p)

    def __neg__(self):
        return SkewMatrix([[-a for a in row] for row in self.entries], self.p)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, SkewMatrix):
            return NotImplemented
        return skew_matrix_mul(self, other)

    def apply_point(self, xs):
        return tuple(
            sum((apply_point(e, x) for e, x in zip(row, xs)), get_field(self.p).zero)
            for row in self.entries)

    def __str__(self):
        return "\n".join("[" + ", ".join(str(e) for e in row) + "]" for row in self.entries)

    def __repr__(self):
        return f"SkewMatrix({self.rows}x{self.cols}, p={self.p})"


def skew_matrix_mul(A, B):
    if A.cols != B.rows:
        raise ValueError(f"shape mismatch: {A.shape} times {B.shape}")
    zero = SkewPoly.zero(A.p)
    out = []
    for i in range(A.rows):
        row = []
        for j in range(B.cols):
            acc = zero
            for s in range(A.cols):
                a, b = A.entries[i][s], B.entries[s][j]
                if a.coeffs and b.coeffs:
                    acc = acc + skew_mul(a, b)
            row.append(acc)
        out.append(row)
    return SkewMatrix(out, A.p)
