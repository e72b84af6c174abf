"""Duals, double duals and the Ext t-modules of strictly pure t-modules.

For Phi_t = theta*I_d + A_1 tau + ... + A_n tau^n with A_n invertible and
n >= 2, the dual is the t-module of extension classes with vanishing
tau^0 part.  It has dimension d(n-1) and is computed here twice: from a
closed formula and by reducing biderivations.  Coordinates of the dual
are grouped in d blocks of n-1; inside block i, position r stands for
the class of the biderivation c*tau^(r+1) in coordinate i.  The last
position of a block is its border, the others are interior.
"""

from dataclasses import dataclass, field

from .algebra import get_field
from .extcalc import (
    BiderState,
    action_matrix,
    dual_special_strategy,
    generic_strategy,
    reduce,
    strictly_pure_strategy,
)
from .samples import (
    nilpotent_example,
    nilpotent_example_dual,
    nilpotent_example_claimed_ext0,
)
from .skew import (
    SkewMatrix,
    SkewPoly,
    identity_matrix,
    mat_inverse,
    mat_is_invertible,
    mat_mul,
    mat_sub,
    mat_twist,
)
from .tmodule import Morphism, NotATModule, TModule, classify, conjugate, validate_tmodule

__all__ = [
    "DualityError",
    "VerificationError",
    "DualData",
    "ExtStructure",
    "BidualResult",
    "CounterexampleReport",
    "dual_closed_form",
    "dual_via_reduction",
    "ext_full",
    "bidual",
    "ext_full_of_dual",
    "dual_morphism",
    "counterexample_demo",
]


class DualityError(ValueError):
    """The input does not satisfy a hypothesis of the construction."""


class VerificationError(Exception):
    """A computed matrix differs from the expected one.

    ``entry`` is (row, column, tau-power), 0-based, of the first difference.
    """

    def __init__(self, message, entry=None, expected=None, actual=None):
        super().__init__(message)
        self.entry = entry
        self.expected = expected
        self.actual = actual


def _require(phi, no_nilpotence=True):
    c = classify(phi)
    if not c.strictly_pure:
        raise DualityError("source is not strictly pure: the leading coefficient is singular")
    if c.deg_tau < 2:
        raise DualityError(f"source has tau-degree {c.deg_tau}; at least 2 is needed")
    if no_nilpotence and c.has_nilpotence:
        raise DualityError("source has a nonzero nilpotent part")


def first_difference(A, B):
    """First (row, col, power) where two SkewMatrix values differ, or None."""
    if A.shape != B.shape:
        return ("shape", A.shape, B.shape)
    for i in range(A.rows):
        for j in range(A.cols):
            a, b = A[i, j], B[i, j]
            if a != b:
                for k in range(max(a.degree, b.degree) + 1):
                    if a.coeff(k) != b.coeff(k):
                        return (i, j, k)
    return None


def _assert_equal(actual, expected, what):
    diff = first_difference(actual, expected)
    if diff is not None:
        if diff[0] == "shape":
            raise VerificationError(f"{what}: shape {diff[1]} differs from expected {diff[2]}")
        i, j, k = diff
        raise VerificationError(
            f"{what}: entry ({i + 1},{j + 1}) at tau^{k} is "
            f"{actual[i, j].coeff(k)}, expected {expected[i, j].coeff(k)}",
            entry=diff, expected=expected, actual=actual)


# -- closed form -----------------------------------------------------------

def _dual_first(d, n, lower, p):
    """tau^1 coefficient: subdiagonal ones in each block, border columns from ``lower``.

    ``lower[r]`` supplies block position r: entry (block i, position r),
    (border of block j) is -lower[r][j][i].
    """
    F = get_field(p)
    D = d * (n - 1)
    A = [[F.zero] * D for _ in range(D)]
    for i in range(d):
        base = i * (n - 1)
        for r in range(n - 2):
            A[base + r + 1][base + r] = F.one
        for r in range(n - 1):
            for j in range(d):
                A[base + r][j * (n - 1) + n - 2] = -lower[r][j][i]
    return tuple(tuple(row) for row in A)


def _dual_second(d, n, X, p):
    """tau^2 coefficient: entry (block i, position 0), (border of block j) is X[j][i]."""
    F = get_field(p)
    D = d * (n - 1)
    A = [[F.zero] * D for _ in range(D)]
    for i in range(d):
        for j in range(d):
            A[i * (n - 1)][j * (n - 1) + n - 2] = X[j][i]
    return tuple(tuple(row) for row in A)


class DualData:
    """Everything derived from Phi that the dual and double dual need.

    ``B[j]`` is A_n^-1 A_j (with ``B[0]`` = A_n^-1), ``s`` is B_1 A_n^(1),
    ``a_hat`` the change of generators used to reduce on the dual, and
    ``dual`` the closed-form dual t-module.  The identities relating these
    are checked on construction.
    """

    def __init__(self, phi):
        _require(phi)
        self.source = phi
        self.p = p = phi.p
        self.d = d = phi.dim
        self.n = n = phi.degree
        An = phi.leading
        B0 = mat_inverse(An)
        self.B = [B0] + [mat_mul(B0, phi.coeff(j)) for j in range(1, n + 1)]
        for j in range(1, n + 1):
            if mat_mul(An, self.B[j]) != phi.coeff(j):
                raise VerificationError(f"A_n B_{j} != A_{j}")
        if self.B[n] != identity_matrix(d, p):
            raise VerificationError("B_n is not the identity")
        self.s = mat_mul(self.B[1], mat_twist(An, 1))
        self.A1 = _dual_first(d, n, self.B[1:n], p)
        self.A2 = _dual_second(d, n, mat_twist(B0, 1), p)
        F = get_field(p)
        self.dual = TModule([identity_matrix(self.dim, p, F.theta), self.A1, self.A2])
        self.a_hat = self._build_a_hat()
        self._check_a_hat()

    @property
    def dim(self):
        return self.d * (self.n - 1)

    def block_index(self, i, r):
        return i * (self.n - 1) + r

    @property
    def borders(self):
        return [self.block_index(i, self.n - 2) for i in range(self.d)]

    @property
    def interiors(self):
        return [self.block_index(i, r) for i in range(self.d) for r in range(self.n - 2)]

    def basis_labels(self):
        """(coordinate, tau-power) of each dual coordinate, 1-based."""
        return [(i + 1, r + 1) for i in range(self.d) for r in range(self.n - 1)]

    def _build_a_hat(self):
        # first row of block k carries a_n[l][k]^(1) at the first column of block l
        p, d, n = self.p, self.d, self.n
        An1 = mat_twist(self.source.leading, 1)
        H = [list(r) for r in identity_matrix(self.dim, p)]
        for k in range(d):
            for l in range(d):
                H[self.block_index(k, 0)][self.block_index(l, 0)] = An1[l][k]
        return tuple(tuple(r) for r in H)

    def _check_a_hat(self):
        d, n, p = self.d, self.n, self.p
        if not mat_is_invertible(self.a_hat):
            raise VerificationError("A-hat is singular")
        if mat_mul(self.a_hat, self.A2) != _dual_second(d, n, identity_matrix(d, p), p):
            raise VerificationError("A-hat * A2 differs from A2 built from the identity")
        lower = [self.s] + self.B[2:n]
        if mat_mul(self.a_hat, self.A1) != _dual_first(d, n, lower, p):
            raise VerificationError("A-hat * A1 differs from A1 built from s, B_2, ...")


def dual_closed_form(phi):
    """The dual of a strictly pure t-module with no nilpotence, from the closed formula.

    >>> from tmodules.tmodule import drinfeld
    >>> print(dual_closed_form(drinfeld(["T", 1], 3)))
    [(T) + (2*T)t#1 + (1)t#2]
    """
    return DualData(phi).dual


def dual_via_reduction(phi, return_details=False):
    """The dual as the t-action on canonical classes of Der_0 biderivations.

    Nilpotence is allowed; the result is validated as a t-module and
    :class:`NotATModule` propagates if it is not one.
    """
    _require(phi, no_nilpotence=False)
    strategy = strictly_pure_strategy(phi)
    matrix, basis, reductions = action_matrix(phi, strategy, "zero")
    module = validate_tmodule(matrix.coeff_matrices())
    if return_details:
        return module, basis, reductions
    return module


# -- Ext modules with their exact sequences -------------------------------

def _submatrix(M, rows, cols):
    return SkewMatrix([[M[i, j] for j in cols] for i in rows], M.p)


@dataclass
class ExtStructure:
    """Action on a full Ext module split into a submodule and a quotient.

    ``basis`` lists (column, tau-degree) slots, 0-based, in matrix order.
    """

    action: SkewMatrix
    basis: list
    sub_indices: list
    quotient_indices: list
    sub: SkewMatrix = field(init=False)
    quotient: SkewMatrix = field(init=False)
    reductions: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        self.sub = _submatrix(self.action, self.sub_indices, self.sub_indices)
        self.quotient = _submatrix(self.action, self.quotient_indices, self.quotient_indices)

    @property
    def dim(self):
        return len(self.basis)

    def check(self, expected_sub, quotient_dim):
        for q in self.quotient_indices:
            for s in self.sub_indices:
                if not self.action[q, s].is_zero():
                    raise VerificationError(
                        f"not block triangular: entry ({q + 1},{s + 1}) is {self.action[q, s]}",
                        entry=(q, s, None))
        _assert_equal(self.sub, expected_sub.phi_t, "submodule block")
        F = get_field(self.action.p)
        theta = SkewMatrix.scalar(identity_matrix(quotient_dim, self.action.p, F.theta))
        _assert_equal(self.quotient, theta, "quotient block")


def ext_full(phi):
    """All of Ext^1 on slots tau^0..tau^(n-1) per coordinate.

    Checks that the tau^(>=1) slots span a submodule equal to the dual and
    that the quotient on the tau^0 slots is theta*I_d.
    """
    _require(phi)
    strategy = strictly_pure_strategy(phi)
    matrix, basis, reductions = action_matrix(phi, strategy, "full")
    sub = [i for i, (_, k) in enumerate(basis) if k >= 1]
    quo = [i for i, (_, k) in enumerate(basis) if k == 0]
    ext = ExtStructure(matrix, basis, sub, quo, reductions=reductions)
    ext.check(dual_closed_form(phi), phi.dim)
    return ext


@dataclass
class BidualResult:
    module: TModule
    expected: TModule
    data: DualData
    basis: list
    reductions: list = field(repr=False)


def bidual(phi):
    """The dual of the dual, read on the border tau^1 slots.

    It must equal A_n^-1 Phi_t A_n exactly; a mismatch raises
    :class:`VerificationError` naming the entry.
    """
    data = DualData(phi)
    strategy = dual_special_strategy(data)
    matrix, basis, reductions = action_matrix(data.dual, strategy, "zero")
    expected = conjugate(phi, phi.leading)
    _assert_equal(matrix, expected.phi_t, "double dual")
    module = validate_tmodule(matrix.coeff_matrices())
    return BidualResult(module, expected, data, basis, reductions)


def ext_full_of_dual(phi):
    """All of Ext^1 of the dual: a copy of A_n^-1 Phi A_n with quotient theta*I_(d(n-1))."""
    data = DualData(phi)
    strategy = dual_special_strategy(data)
    shape = strategy.shape("full")
    interior = [(c, 0) for c in data.interiors]
    borders0 = [(c, 0) for c in data.borders]
    borders1 = [(c, 1) for c in data.borders]
    basis = interior + borders0 + borders1
    matrix, basis, reductions = action_matrix(data.dual, strategy, shape, basis)
    nq = len(interior) + len(borders0)
    ext = ExtStructure(matrix, basis, list(range(nq, len(basis))), list(range(nq)),
                       reductions=reductions)
    ext.check(conjugate(phi, phi.leading), data.dim)
    return ext


# -- functoriality -----------------------------------------------------------

def dual_morphism(f):
    """The dual of f: Phi -> Psi, a morphism Psi^dual -> Phi^dual.

    A class [delta] of the target is sent to [delta * f], reduced on the
    source side.
    """
    phi, psi = f.source, f.target
    _require(phi)
    _require(psi)
    strategy = strictly_pure_strategy(phi)
    shape = strategy.shape("zero")
    rows = shape.slots()
    index = {s: i for i, s in enumerate(rows)}
    cols = strictly_pure_strategy(psi).shape("zero").slots()
    zero = SkewPoly.zero(phi.p)
    images = []
    for col, deg in cols:
        seed = BiderState.symbolic_slot(psi.dim, col, deg, psi.p).right_mul(f.matrix)
        red = reduce(seed, phi, strategy, shape)
        image = [zero] * len(rows)
        for j, k, v in red.state.terms():
            image[index[(j, k)]] = v.poly
        images.append(image)
    F = SkewMatrix([[images[c][r] for c in range(len(cols))] for r in range(len(rows))],
                   phi.p)
    try:
        return Morphism(dual_closed_form(psi), dual_closed_form(phi), F)
    except ValueError as exc:
        raise VerificationError(f"dual of the morphism does not commute with t: {exc}") from None


# -- the nilpotent example ---------------------------------------------------

@dataclass
class CounterexampleReport:
    p: int
    a: object
    source: TModule
    dual: TModule
    expected_dual: SkewMatrix
    dual_matches: bool
    ext0_action: SkewMatrix
    ext0_basis: list
    claimed_ext0: SkewMatrix
    ext0_matches_claimed: bool
    rejection: object
    residue: tuple
    claimed_residue: tuple
    residue_matches_claimed: bool

    @property
    def not_a_tmodule(self):
        return isinstance(self.rejection, NotATModule)


def counterexample_demo(p, a):
    """Dual of theta*I_3 + a*E_31 + I_3 tau^3 and its Ext^1_0 against C.

    The dual exists but is not strictly pure, and the t-action on its own
    Ext^1_0 fails to be a t-module.  The report compares each stage with
    the expected matrices.
    """
    F = get_field(p)
    a = F(a)
    phi = nilpotent_example(p, a)
    dual = dual_via_reduction(phi)
    expected = nilpotent_example_dual(p, a)
    strategy = generic_strategy(dual)
    shape = strategy.shape("zero")
    action, basis, _ = action_matrix(dual, strategy, shape)
    claimed = nilpotent_example_claimed_ext0(p)
    try:
        validate_tmodule(action.coeff_matrices())
        rejection = None
    except NotATModule as exc:
        rejection = exc
    residue = mat_sub(action.coeff(0), identity_matrix(3, p, F.theta))
    claimed_residue = mat_sub(claimed.coeff(0), identity_matrix(3, p, F.theta))
    return CounterexampleReport(
        p=p, a=a, source=phi, dual=dual, expected_dual=expected,
        dual_matches=dual.phi_t == expected,
        ext0_action=action, ext0_basis=basis, claimed_ext0=claimed,
        ext0_matches_claimed=action == claimed,
        rejection=rejection, residue=residue, claimed_residue=claimed_residue,
        residue_matches_claimed=residue == claimed_residue,
    )
