"""Biderivations into the Carlitz module and their reduction modulo inner ones.

A biderivation delta: Phi -> C is determined by delta(t), a 1 x D row over
L{tau}.  The space Ext^1 is the quotient by the inner biderivations
delta^(U) = U Phi_t - C_t U.  Reduction subtracts inner biderivations until
every term sits in a fixed finite set of canonical slots (column, degree).

Coefficients are either concrete elements of F_p(T) or symbolic
:class:`CoeffTransform` values ``c -> sum w_i c^(p^i)`` of a formal input
``c``.  Symbolic runs are what produce action matrices, since the t-action
on a slot is read off from the reduction of a generic coefficient.

A reduction strategy assigns to every column a pivot: a row j of the
multiplier matrix P whose generators U = c tau^k E_j P hit that column at
the top of their expansion with a single monomial transform alpha*tau^e.
Subtracting that generator kills the offending term and only creates terms
that come earlier in the processing order, which makes the procedure
terminate and the canonical form unique.
"""

from dataclasses import dataclass, field

from .algebra import RatFunc, get_field
from .skew import (
    SkewMatrix,
    SkewPoly,
    identity_matrix,
    mat_inverse,
    mat_is_invertible,
    mat_is_zero,
    mat_left_kernel,
    mat_mul,
)

__all__ = [
    "CoeffTransform",
    "BiderState",
    "Generator",
    "Pivot",
    "PivotStrategy",
    "CanonicalShape",
    "Reduction",
    "ReductionError",
    "NoForwardPivot",
    "NoPivotSchedule",
    "ReductionLimitExceeded",
    "carlitz_t",
    "inner_biderivation",
    "strictly_pure_strategy",
    "dual_special_strategy",
    "generic_strategy",
    "reduce",
    "action_matrix",
    "certificate_sum",
]


class ReductionError(Exception):
    pass


class NoForwardPivot(ReductionError):
    """An offending term can only be removed through an inverse Frobenius."""

    def __init__(self, column, degree, message=None):
        self.column = column
        self.degree = degree
        super().__init__(message or (
            f"no forward pivot for column {column + 1} at tau^{degree}: "
            f"the coefficient has no p-th root in F_p(T)"))


class NoPivotSchedule(ReductionError):
    """No assignment of pivots to columns makes the reduction well-ordered."""


class ReductionLimitExceeded(ReductionError):
    """The pass counter exceeded its a priori bound; indicates a bad strategy."""


# -- coefficient transforms ------------------------------------------------

class CoeffTransform:
    """The map c -> sum_i w_i c^(p^i), stored as the twisted polynomial w.

    Twisting the output (c -> x(c)^p) is left multiplication of w by tau,
    and scaling the output by b is left multiplication by b.
    """

    __slots__ = ("poly",)

    def __init__(self, poly):
        self.poly = poly

    @classmethod
    def unit(cls, p):
        return cls(SkewPoly.const(get_field(p).one))

    @property
    def p(self):
        return self.poly.p

    def is_zero(self):
        return self.poly.is_zero()

    def __bool__(self):
        return not self.poly.is_zero()

    def twist(self, k=1):
        return CoeffTransform(self.poly.lmul_tau(k)) if k else self

    def untwist(self, k=1):
        """The transform u with u^(p^k) = self, or None if it does not exist."""
        if k == 0:
            return self
        cs = self.poly.coeffs
        if any(not c.is_zero() for c in cs[:k]):
            return None
        out = []
        for c in cs[k:]:
            r = c.untwist(k)
            if r is None:
                return None
            out.append(r)
        return CoeffTransform(SkewPoly(out, self.p))

    def scale(self, b):
        return CoeffTransform(self.poly.scale(b))

    def evaluate(self, c):
        return self.poly(c)

    def monomial(self):
        """(alpha, e) when the transform is alpha * c^(p^e), else None."""
        nz = [(i, a) for i, a in enumerate(self.poly.coeffs) if not a.is_zero()]
        if len(nz) != 1:
            return None
        e, a = nz[0]
        return a, e

    def __add__(self, other):
        return CoeffTransform(self.poly + other.poly)

    def __sub__(self, other):
        return CoeffTransform(self.poly - other.poly)

    def __neg__(self):
        return CoeffTransform(-self.poly)

    def __eq__(self, other):
        if not isinstance(other, CoeffTransform):
            return NotImplemented
        return self.poly == other.poly

    def __hash__(self):
        return hash(self.poly)

    def __str__(self):
        terms = []
        for i, a in enumerate(self.poly.coeffs):
            if a.is_zero():
                continue
            c = "c" if i == 0 else f"c^(p^{i})"
            terms.append(c if a.is_one() else f"({a})*{c}")
        return " + ".join(terms) if terms else "0"

    def __repr__(self):
        return f"CoeffTransform({self})"


# -- biderivation rows ---------------------------------------------------

class BiderState:
    """A 1 x width row over L{tau}, stored sparsely as column -> {degree: coeff}.

    Coefficients are RatFunc or CoeffTransform, never mixed in one state.
    """

    __slots__ = ("width", "p", "entries")

    def __init__(self, width, p, entries=None):
        self.width = width
        self.p = p
        self.entries = [dict() for _ in range(width)] if entries is None else entries

    @classmethod
    def unit(cls, width, col, degree, coeff):
        st = cls(width, coeff.p)
        st.add_term(col, degree, coeff)
        return st

    @classmethod
    def symbolic_slot(cls, width, col, degree, p):
        return cls.unit(width, col, degree, CoeffTransform.unit(p))

    @classmethod
    def from_row(cls, row, p=None):
        """From a sequence of SkewPoly with RatFunc coefficients."""
        if isinstance(row, SkewMatrix):
            if row.rows != 1:
                raise ValueError("a biderivation is a single row")
            p = row.p
            row = row.entries[0]
        row = list(row)
        if p is None:
            p = row[0].p
        st = cls(len(row), p)
        for j, poly in enumerate(row):
            for k, c in enumerate(poly.coeffs):
                st.add_term(j, k, c)
        return st

    def to_row(self):
        """Back to a tuple of SkewPoly; only for concrete coefficients."""
        F = get_field(self.p)
        out = []
        for col in self.entries:
            top = max(col, default=-1)
            out.append(SkewPoly([col.get(k, F.zero) for k in range(top + 1)], self.p))
        return tuple(out)

    def copy(self):
        return BiderState(self.width, self.p, [dict(c) for c in self.entries])

    def add_term(self, col, degree, value):
        if value.is_zero():
            return
        entry = self.entries[col]
        old = entry.get(degree)
        if old is None:
            entry[degree] = value
            return
        new = old + value
        if new.is_zero():
            del entry[degree]
        else:
            entry[degree] = new

    def get(self, col, degree):
        return self.entries[col].get(degree)

    def terms(self):
        for j, col in enumerate(self.entries):
            for k, v in col.items():
                yield j, k, v

    def is_zero(self):
        return not any(self.entries)

    @property
    def max_degree(self):
        return max((max(c) for c in self.entries if c), default=-1)

    def __add__(self, other):
        out = self.copy()
        for j, k, v in other.terms():
            out.add_term(j, k, v)
        return out

    def __neg__(self):
        return BiderState(self.width, self.p,
                          [{k: -v for k, v in c.items()} for c in self.entries])

    def __sub__(self, other):
        return self + (-other)

    def isub(self, other):
        for j, k, v in other.terms():
            self.add_term(j, k, -v)

    def left_mul(self, a):
        """a * row for a single twisted polynomial a."""
        out = BiderState(self.width, self.p)
        for j, k, v in self.terms():
            for s, coef in enumerate(a.coeffs):
                if not coef.is_zero():
                    out.add_term(j, k + s, v.twist(s).scale(coef))
        return out

    def right_mul(self, M):
        """row * M for a SkewMatrix M with ``width`` rows."""
        if M.rows != self.width:
            raise ValueError(f"row of width {self.width} times {M.rows}x{M.cols} matrix")
        out = BiderState(M.cols, self.p)
        for i, k, v in self.terms():
            for j in range(M.cols):
                for s, coef in enumerate(M.entries[i][j].coeffs):
                    if not coef.is_zero():
                        out.add_term(j, k + s, v.scale(coef.twist(k)))
        return out

    def evaluate(self, c):
        """Substitute a concrete value for the formal input of every transform."""
        out = BiderState(self.width, self.p)
        for j, k, v in self.terms():
            out.add_term(j, k, v.evaluate(c))
        return out

    def __eq__(self, other):
        if not isinstance(other, BiderState):
            return NotImplemented
        return self.width == other.width and self.entries == other.entries

    def __str__(self):
        parts = []
        for j, col in enumerate(self.entries):
            terms = [f"({col[k]})t#{k}" for k in sorted(col)]
            parts.append(" + ".join(terms) if terms else "(0)")
        return "[" + ", ".join(parts) + "]"

    def __repr__(self):
        return f"BiderState(width={self.width}, {self})"


def carlitz_t(p):
    F = get_field(p)
    return SkewPoly([F.theta, F.one], p)


def inner_biderivation(U, source):
    """delta^(U)(t) = U Phi_t - C_t U for a 1 x dim(source) row U."""
    if not isinstance(U, BiderState):
        U = BiderState.from_row(U)
    if U.width != source.dim:
        raise ValueError(f"U has width {U.width}, source has dimension {source.dim}")
    return U.right_mul(source.phi_t) - U.left_mul(carlitz_t(source.p))


# -- strategies ----------------------------------------------------------

@dataclass(frozen=True)
class Generator:
    """The inner biderivation of U = coeff * tau^power * E_row * P."""

    row: int
    power: int
    coeff: object
    tag: str

    def seed(self, P):
        width = len(P[0])
        st = BiderState(width, self.coeff.p)
        for col, entry in enumerate(P[self.row]):
            if not entry.is_zero():
                st.add_term(col, self.power, self.coeff.scale(entry.twist(self.power)))
        return st

    def expand(self, source, P):
        return inner_biderivation(self.seed(P), source)

    def __str__(self):
        return f"{self.tag}[row {self.row + 1}] * ({self.coeff}) * t#{self.power}"


@dataclass(frozen=True)
class Pivot:
    """Row ``row`` kills this column at relative degree ``top``.

    The generator's term there is alpha^(p^k) * c^(p^exponent) for power k.
    ``admissible0`` says whether the power-0 generator is an inner
    biderivation with vanishing tau^0 part (so it may be used on Der_0).
    """

    row: int
    top: int
    exponent: int
    alpha: RatFunc
    admissible0: bool


@dataclass(frozen=True)
class CanonicalShape:
    """For each column, the set of degrees allowed in a canonical form."""

    name: str
    allowed: tuple

    def contains(self, col, degree):
        return degree in self.allowed[col]

    def slots(self):
        """Canonical slots, column-major with ascending degree."""
        return [(j, k) for j, degs in enumerate(self.allowed) for k in sorted(degs)]

    def slots_by_degree(self):
        """Canonical slots, degree-major with ascending column."""
        return sorted(self.slots(), key=lambda s: (s[1], s[0]))

    @property
    def size(self):
        return sum(len(a) for a in self.allowed)


@dataclass
class PivotStrategy:
    name: str
    tag: str
    multiplier: tuple
    pivots: dict
    rank: dict
    source: object = field(repr=False, default=None)

    @property
    def width(self):
        return len(self.multiplier[0])

    def order_key(self, col, degree):
        return degree, self.rank[col]

    def shape(self, kind):
        if kind == "full":
            allowed = [frozenset(range(self.pivots[j].top)) for j in range(self.width)]
            return CanonicalShape("full", tuple(allowed))
        if kind == "zero":
            allowed = []
            for j in range(self.width):
                pv = self.pivots[j]
                degs = set(range(1, pv.top))
                if not pv.admissible0:
                    degs.add(pv.top)
                allowed.append(frozenset(degs))
            return CanonicalShape("zero", tuple(allowed))
        raise ValueError(f"unknown shape {kind!r}; use 'full' or 'zero'")

    def generator_for(self, col, degree, value, shape):
        pv = self.pivots[col]
        k = degree - pv.top
        if k < 0 or (k == 0 and shape.name == "zero" and not pv.admissible0):
            raise ReductionError(
                f"term at column {col + 1}, tau^{degree} cannot be reduced; "
                f"the state is not in the domain of the {shape.name} reduction")
        c = value.scale(pv.alpha.twist(k).inverse())
        if pv.exponent:
            c = c.untwist(pv.exponent)
            if c is None:
                raise NoForwardPivot(col, degree)
        return Generator(pv.row, k, c, self.tag)


def _top_pattern(source, P, row):
    """Top relative degree and its transforms for the power-0 generator of ``row``."""
    gen = Generator(row, 0, CoeffTransform.unit(source.p), "")
    st = gen.expand(source, P)
    top = st.max_degree
    cols = {j: v for j, k, v in st.terms() if k == top}
    return top, cols


def _check_pivots(source, P, pivots, rank, name):
    """Confirm that every claimed pivot is the leading term of its generator."""
    for col, pv in pivots.items():
        top, cols = _top_pattern(source, P, pv.row)
        mono = cols.get(col)
        mono = mono.monomial() if mono is not None else None
        if top != pv.top or mono is None or mono != (pv.alpha, pv.exponent):
            raise NoPivotSchedule(
                f"{name}: row {pv.row + 1} does not lead at column {col + 1}")
        for other in cols:
            if other != col and rank[other] >= rank[col]:
                raise NoPivotSchedule(
                    f"{name}: row {pv.row + 1} also leads at column {other + 1}")


def _der0_adapted(source, P):
    """Recombine the rows of P so that power-0 generators split cleanly.

    The power-0 generator of a row x has tau^0 part c * x N, so the ones
    with vanishing tau^0 part are exactly the rows of the left kernel of
    P N.  The result lists an echelon basis of that kernel (admissible on
    Der_0) followed by unit rows for the non-pivot columns.  Returns the new
    multiplier, the admissibility flag of each row and the column each row
    leads at.
    """
    d = source.dim
    PN = mat_mul(P, source.nilpotent_part)
    if mat_is_zero(PN):
        return P, [True] * d, list(range(d))
    F = get_field(source.p)
    kernel = mat_left_kernel(PN)
    lead = [next(j for j, x in enumerate(row) if not x.is_zero()) for row in kernel]
    rest = [c for c in range(d) if c not in lead]
    units = [tuple(F.one if j == c else F.zero for j in range(d)) for c in rest]
    Q = tuple(kernel) + tuple(units)
    return mat_mul(Q, P), [True] * len(kernel) + [False] * len(rest), lead + rest


def strictly_pure_strategy(source):
    """Pivots from P = A_n^-1: row i leads at column i, degree n, coefficient c^(p^k).

    With a nilpotent part the rows are first recombined (see
    :func:`_der0_adapted`) so that Der_0 reductions stay well defined.  Needs a strictly pure source of tau-degree at least 2; in degree 1 the
    Carlitz side contributes to the top degree and the pivots collapse.
    """
    if not mat_is_invertible(source.leading) or source.degree < 1:
        raise NoPivotSchedule("source is not strictly pure")
    if source.degree < 2:
        raise NoPivotSchedule("strictly pure reduction needs tau-degree at least 2")
    P, flags, lead = _der0_adapted(source, mat_inverse(source.leading))
    one = get_field(source.p).one
    pivots = {lead[j]: Pivot(j, source.degree, 0, one, flags[j]) for j in range(source.dim)}
    # admissible rows may reach into the remaining columns at the top degree
    rank = {lead[j]: 1 if flags[j] else 0 for j in range(source.dim)}
    _check_pivots(source, P, pivots, rank, "strictly pure")
    return PivotStrategy("strictly-pure", "AnInverse", P, pivots, rank, source)


def dual_special_strategy(data):
    """Pivots for a dual-shaped source, with multiplier P = A-hat.

    ``data`` carries the original dimension ``d`` and degree ``n``, the
    dual module ``dual`` and the matrix ``a_hat``.  In block l the row at
    block position r >= 1 kills the interior column one to its left at
    relative degree 1, and the first row of the block kills the border
    (last) column at relative degree 2.  Interior columns outrank borders
    and, among interiors, the leftmost comes first, so residues are pushed
    rightwards and into the borders.
    """
    d, n, source, P = data.d, data.n, data.dual, data.a_hat
    if n < 2 or source.dim != d * (n - 1):
        raise NoPivotSchedule("source is not dual-shaped for the given d and n")
    one = get_field(source.p).one
    P2, flags, _ = _der0_adapted(source, P)
    if P2 is not P:
        raise NoPivotSchedule("a dual-shaped source has no nilpotent part")
    width = source.dim
    pivots = {}
    interior, borders = [], []
    for l in range(d):
        base = l * (n - 1)
        border = base + n - 2
        pivots[border] = Pivot(base, 2, 0, one, flags[base])
        borders.append(border)
        for r in range(1, n - 1):
            pivots[base + r - 1] = Pivot(base + r, 1, 0, one, flags[base + r])
            interior.append(base + r - 1)
    ranking = sorted(interior) + borders
    rank = {c: width - pos for pos, c in enumerate(ranking)}
    _check_pivots(source, P, pivots, rank, "dual special")
    return PivotStrategy("dual-special", "AHat", P, pivots, rank, source)


def _find_schedule(tops, patterns, width):
    """Match rows to columns so the induced 'outranks' relation is acyclic.

    Returns {col: (row, alpha, exponent)} and a column ranking, preferring
    as few backward (exponent > 0) pivots as possible.
    """
    rows = list(range(len(tops)))
    cands = {}
    for j in rows:
        opts = []
        for col, tr in patterns[j].items():
            mono = tr.monomial()
            if mono is not None:
                opts.append((mono[1], col, mono[0]))
        opts.sort(key=lambda o: (o[0], o[1]))
        cands[j] = opts
    order = sorted(rows, key=lambda j: len(cands[j]))

    def acyclic(edges):
        state = {}

        def visit(u):
            state[u] = 1
            for v in edges.get(u, ()):
                s = state.get(v)
                if s == 1 or (s is None and not visit(v)):
                    return False
            state[u] = 2
            return True

        return all(state.get(u) == 2 or visit(u) for u in list(edges))

    def search(i, used, edges, budget, chosen):
        if i == len(order):
            return dict(chosen), {u: set(v) for u, v in edges.items()}
        j = order[i]
        for e, col, alpha in cands[j]:
            if col in used or (e > 0 and budget == 0):
                continue
            others = [c for c in patterns[j] if c != col]
            new_edges = {u: set(v) for u, v in edges.items()}
            new_edges.setdefault(col, set()).update(others)
            if not acyclic(new_edges):
                continue
            chosen[col] = (j, alpha, e)
            found = search(i + 1, used | {col}, new_edges,
                           budget - (1 if e > 0 else 0), chosen)
            if found:
                return found
            del chosen[col]
        return None

    if len(rows) != width:
        return None
    for budget in range(width + 1):
        found = search(0, frozenset(), {}, budget, {})
        if found:
            chosen, edges = found
            # rank: columns that must outrank others come first; ties by column index
            remaining = set(range(width))
            ranking = []
            while remaining:
                free = sorted(c for c in remaining
                              if not any(c in edges.get(u, ()) for u in remaining))
                ranking.append(free[0])
                remaining.remove(free[0])
            rank = {c: width - pos for pos, c in enumerate(ranking)}
            return chosen, rank
    return None


def generic_strategy(source):
    """Search for a pivot schedule on an arbitrary source.

    Tries the multiplier P = I first and then P = M_top^-1 when the leading
    coefficient is invertible.  Backward pivots are allowed but only used
    when no schedule with fewer of them exists.
    """
    candidates = [("Identity", identity_matrix(source.dim, source.p))]
    if mat_is_invertible(source.leading):
        candidates.append(("AnInverse", mat_inverse(source.leading)))
    for tag, P in candidates:
        P, flags, _ = _der0_adapted(source, P)
        tops, patterns = [], []
        for j in range(source.dim):
            top, cols = _top_pattern(source, P, j)
            tops.append(top)
            patterns.append(cols)
        found = _find_schedule(tops, patterns, source.dim)
        if found is None:
            continue
        chosen, rank = found
        pivots = {col: Pivot(j, tops[j], e, alpha, flags[j])
                  for col, (j, alpha, e) in chosen.items()}
        _check_pivots(source, P, pivots, rank, "generic")
        return PivotStrategy("generic", tag, P, pivots, rank, source)
    raise NoPivotSchedule("no pivot schedule found for this source")


# -- the engine ----------------------------------------------------------

@dataclass
class Reduction:
    state: BiderState
    certificate: list
    passes: int


def reduce(state, source, strategy, shape="full"):
    """Reduce ``state`` modulo inner biderivations into ``shape``.

    Always kills the offending term that is highest in (degree, rank)
    order.  Returns the canonical state, the list of generators subtracted
    and the number of passes.
    """
    if isinstance(shape, str):
        shape = strategy.shape(shape)
    if not isinstance(state, BiderState):
        state = BiderState.from_row(state)
    if state.width != source.dim:
        raise ValueError(f"state has width {state.width}, source has dimension {source.dim}")
    work = state.copy()
    certificate = []
    passes = 0
    guard = (max(work.max_degree, 0) + 1) * work.width * (source.degree + 2)
    while True:
        worst = None
        for j, k, _ in work.terms():
            if not shape.contains(j, k):
                key = strategy.order_key(j, k)
                if worst is None or key > worst[0]:
                    worst = (key, j, k)
        if worst is None:
            break
        _, col, deg = worst
        gen = strategy.generator_for(col, deg, work.get(col, deg), shape)
        work.isub(gen.expand(source, strategy.multiplier))
        if work.get(col, deg) is not None:
            raise ReductionError(
                f"generator did not clear column {col + 1}, tau^{deg}")
        certificate.append(gen)
        passes += 1
        if passes > guard:
            raise ReductionLimitExceeded(f"more than {guard} passes")
    return Reduction(work, certificate, passes)


def certificate_sum(certificate, source, strategy):
    """The sum of the inner biderivations listed in a certificate."""
    total = BiderState(source.dim, source.p)
    for gen in certificate:
        total = total + gen.expand(source, strategy.multiplier)
    return total


def action_matrix(source, strategy, shape, basis=None):
    """Matrix of t on the span of canonical slots.

    Column i is the canonical form of C_t times the unit at slot i, with
    coordinates read off at the same slots.  Entries are twisted
    polynomials: the entry at slot s is the transform that slot carries.
    """
    if isinstance(shape, str):
        shape = strategy.shape(shape)
    if basis is None:
        basis = shape.slots()
    index = {s: i for i, s in enumerate(basis)}
    if set(index) != set(shape.slots()):
        raise ValueError("basis must list exactly the canonical slots")
    p = source.p
    Ct = carlitz_t(p)
    zero = SkewPoly.zero(p)
    cols = []
    certificates = []
    for col, deg in basis:
        seed = BiderState.symbolic_slot(source.dim, col, deg, p).left_mul(Ct)
        red = reduce(seed, source, strategy, shape)
        image = [zero] * len(basis)
        for j, k, v in red.state.terms():
            image[index[(j, k)]] = v.poly
        cols.append(image)
        certificates.append(red)
    entries = [[cols[c][r] for c in range(len(basis))] for r in range(len(basis))]
    return SkewMatrix(entries, p), basis, certificates


def read_off(state, basis):
    """Coordinates of a concrete canonical state at the given slots."""
    F = get_field(state.p)
    return [state.get(j, k) or F.zero for j, k in basis]
