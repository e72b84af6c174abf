"""Standard and random t-modules used by the CLI, the demos and the tests."""

from .algebra import frobenius, get_field
from .skew import (
    SkewMatrix,
    SkewPoly,
    identity_matrix,
    mat_inverse,
    mat_is_invertible,
    mat_is_nilpotent,
    zero_matrix,
)
from .tmodule import Morphism, TModule, conjugate

__all__ = [
    "random_matrix",
    "random_invertible",
    "random_strictly_pure",
    "random_conjugation",
    "worked_example",
    "worked_example_expected",
    "nilpotent_example",
    "nilpotent_example_dual",
    "nilpotent_example_claimed_ext0",
]


def random_matrix(F, rng, rows, cols, max_degree=1, fraction_rate=0.2, density=1.0):
    return tuple(
        tuple(F.random_element(rng, max_degree, fraction_rate)
              if rng.random() < density else F.zero for _ in range(cols))
        for _ in range(rows))


def random_invertible(F, rng, d, max_degree=1, fraction_rate=0.2):
    while True:
        A = random_matrix(F, rng, d, d, max_degree, fraction_rate)
        if mat_is_invertible(A):
            return A


def _random_nilpotent(F, rng, d, max_degree=1):
    # strictly lower triangular, which is nilpotent
    N = [[F.zero] * d for _ in range(d)]
    for i in range(d):
        for j in range(i):
            N[i][j] = F.random_element(rng, max_degree, 0.0)
    N = tuple(tuple(r) for r in N)
    assert mat_is_nilpotent(N)
    return N


def random_strictly_pure(rng, p, d, n, nilpotent=False, max_degree=1,
                         fraction_rate=0.2, density=0.7):
    """theta*I (+ N) + A_1 tau + ... + A_n tau^n with A_n invertible.

    Entries are low degree in T on purpose: twisting by p^k multiplies
    degrees by p^k, and the reduction twists up to p^(2n).
    """
    F = get_field(p)
    M0 = identity_matrix(d, p, F.theta)
    if nilpotent and d > 1:
        N = _random_nilpotent(F, rng, d, max_degree)
        M0 = tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(M0, N))
    coeffs = [M0]
    for _ in range(1, n):
        coeffs.append(random_matrix(F, rng, d, d, max_degree, fraction_rate, density))
    coeffs.append(random_invertible(F, rng, d, max_degree, fraction_rate))
    return TModule(coeffs)


def random_conjugation(rng, phi, max_degree=1):
    """A random morphism phi -> P^-1 phi P, given by the matrix P^-1."""
    F = get_field(phi.p)
    P = random_invertible(F, rng, phi.dim, max_degree, 0.0)
    return Morphism(phi, conjugate(phi, P), SkewMatrix.scalar(mat_inverse(P)))


# -- worked example: d = 2, n = 3 ------------------------------------------

def worked_example(p, alpha, beta, gamma):
    """theta*I_2 + [alpha] tau + [beta] tau^2 + [[1, 0], [gamma, 1]] tau^3."""
    F = get_field(p)
    a = [F(x) for x in alpha]
    b = [F(x) for x in beta]
    g = F(gamma)
    return TModule([
        identity_matrix(2, p, F.theta),
        ((a[0], a[1]), (a[2], a[3])),
        ((b[0], b[1]), (b[2], b[3])),
        ((F.one, F.zero), (g, F.one)),
    ])


def worked_example_expected(p, alpha, beta, gamma):
    """The dual coefficients and double dual of :func:`worked_example`, entry by entry.

    Written out from the explicit 4 x 4 and 2 x 2 patterns rather than from
    the general block recipe, so it serves as an independent oracle.
    """
    F = get_field(p)
    a1, a2, a3, a4 = (F(x) for x in alpha)
    b1, b2, b3, b4 = (F(x) for x in beta)
    g = F(gamma)
    z, o = F.zero, F.one
    bt3 = b3 - g * b1
    bt4 = b4 - g * b2
    A1 = ((z, -a1, z, -(a3 - g * a1)),
          (o, -b1, z, -bt3),
          (z, -a2, z, -(a4 - g * a2)),
          (z, -b2, o, -bt4))
    g1, g2, g3 = (frobenius(g, k) for k in (1, 2, 3))
    A2 = ((z, o, z, -g1),
          (z, z, z, z),
          (z, z, z, o),
          (z, z, z, z))
    # s = (A_3^-1 A_1) * [[1, 0], [gamma^(1), 1]]
    c1, c2, c3, c4 = a1, a2, a3 - g * a1, a4 - g * a2
    s = ((c1 + c2 * g1, c2), (c3 + c4 * g1, c4))
    bidual = TModule([
        identity_matrix(2, p, F.theta),
        s,
        ((b1 + b2 * g2, b2), (bt3 + bt4 * g2, bt4)),
        ((o, z), (g3, o)),
    ])
    return {"A1": A1, "A2": A2, "s": s, "bidual": bidual}


# -- strictly pure module with nilpotence whose dual is not strictly pure ---

def nilpotent_example(p, a):
    """theta*I_3 + a*E_31 + I_3 tau^3 for a != 0."""
    F = get_field(p)
    a = F(a)
    if a.is_zero():
        raise ValueError("a must be nonzero")
    M0 = [list(r) for r in identity_matrix(3, p, F.theta)]
    M0[2][0] = a
    Z = zero_matrix(3, 3, p)
    return TModule([tuple(tuple(r) for r in M0), Z, Z, identity_matrix(3, p)])


def nilpotent_example_dual(p, a):
    """Expected 7 x 7 dual of :func:`nilpotent_example`, written out by hand."""
    F = get_field(p)
    a = F(a)
    T = F.theta
    z = SkewPoly.zero(p)
    th = SkewPoly.const(T)
    tau = SkewPoly.tau(p)
    tau2 = SkewPoly.tau(p, 2)
    rows = [[z] * 7 for _ in range(7)]
    for i in range(7):
        rows[i][i] = th
    for blk in (0, 2):
        rows[blk][blk + 1] = tau2
        rows[blk + 1][blk] = tau
    rows[0][6] = SkewPoly.monomial(-frobenius(a, 1), 1)
    rows[4][6] = SkewPoly.monomial(T - frobenius(T, 1), 1)
    rows[5][4] = tau
    rows[5][6] = tau2
    rows[6][5] = tau
    return SkewMatrix(rows, p)


def nilpotent_example_claimed_ext0(p):
    """The claimed diag(theta + tau^3, theta + tau^3, theta + tau^3 - 1)."""
    F = get_field(p)
    z = SkewPoly.zero(p)
    d = SkewPoly([F.theta, F.zero, F.zero, F.one], p)
    last = SkewPoly([F.theta - F.one, F.zero, F.zero, F.one], p)
    return SkewMatrix([[d, z, z], [z, d, z], [z, z, last]], p)
