"""Anderson t-modules over F_p(T), their morphisms and standard constructors."""

from dataclasses import dataclass

from .algebra import get_field
from .skew import (
    SkewMatrix,
    SingularMatrixError,
    identity_matrix,
    mat_inverse,
    mat_is_invertible,
    mat_is_nilpotent,
    mat_is_zero,
    mat_mul,
    mat_shape,
    mat_sub,
    mat_twist,
)

__all__ = [
    "NotATModule",
    "TModule",
    "Classification",
    "Morphism",
    "validate_tmodule",
    "classify",
    "check_morphism",
    "conjugate",
    "carlitz",
    "drinfeld",
]


class NotATModule(ValueError):
    """The tau^0 coefficient is not theta*I plus a nilpotent matrix.

    ``residue`` holds M_0 - theta*I, the witness of the failure.
    """

    def __init__(self, message, residue=None):
        super().__init__(message)
        self.residue = residue


class TModule:
    """Phi_t = M_0 + M_1 tau + ... + M_n tau^n with M_0 = theta*I + N, N nilpotent.

    ``coeffs`` is the list M_0..M_n of d x d matrices over F_p(T).  Trailing
    zero coefficients are dropped so that ``degree`` is the tau-degree.
    Construction validates the t-module condition; use
    :func:`validate_tmodule` for the same thing as a function.
    """

    __slots__ = ("coeffs", "dim", "p", "_phi_t")

    def __init__(self, coeffs):
        coeffs = [tuple(tuple(row) for row in M) for M in coeffs]
        if not coeffs:
            raise ValueError("a t-module needs at least the tau^0 coefficient")
        d = len(coeffs[0])
        if d == 0:
            raise ValueError("dimension must be positive")
        for i, M in enumerate(coeffs):
            if mat_shape(M) != (d, d):
                raise ValueError(
                    f"coefficient M{i} has shape {mat_shape(M)}, expected {d}x{d}")
        while len(coeffs) > 1 and mat_is_zero(coeffs[-1]):
            coeffs.pop()
        p = coeffs[0][0][0].p
        residue = mat_sub(coeffs[0], identity_matrix(d, p, get_field(p).theta))
        if not mat_is_nilpotent(residue):
            raise NotATModule(
                "M0 - theta*I is not nilpotent", residue=residue)
        self.coeffs = tuple(coeffs)
        self.dim = d
        self.p = p
        self._phi_t = None

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def phi_t(self):
        if self._phi_t is None:
            self._phi_t = SkewMatrix.from_coeffs(list(self.coeffs))
        return self._phi_t

    @property
    def nilpotent_part(self):
        return mat_sub(self.coeffs[0], identity_matrix(self.dim, self.p, get_field(self.p).theta))

    @property
    def leading(self):
        return self.coeffs[-1]

    def coeff(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return tuple(tuple(get_field(self.p).zero for _ in range(self.dim))
                     for _ in range(self.dim))

    @classmethod
    def from_phi_t(cls, phi_t):
        if phi_t.rows != phi_t.cols:
            raise ValueError("Phi_t must be square")
        return cls(phi_t.coeff_matrices())

    def __eq__(self, other):
        if not isinstance(other, TModule):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __str__(self):
        return str(self.phi_t)

    def __repr__(self):
        return f"TModule(dim={self.dim}, degree={self.degree}, p={self.p})"


def validate_tmodule(coeffs, d=None):
    """Check ``coeffs`` (M_0..M_n) and return the corresponding TModule.

    Raises :class:`NotATModule` with the residue M_0 - theta*I when that
    residue is not nilpotent.
    """
    if isinstance(coeffs, SkewMatrix):
        coeffs = coeffs.coeff_matrices()
    if d is not None and coeffs and len(coeffs[0]) != d:
        raise ValueError(f"declared dimension {d} does not match matrices")
    return TModule(coeffs)


@dataclass(frozen=True)
class Classification:
    strictly_pure: bool
    has_nilpotence: bool
    deg_tau: int
    dim: int


def classify(phi):
    return Classification(
        strictly_pure=mat_is_invertible(phi.leading),
        has_nilpotence=not mat_is_zero(phi.nilpotent_part),
        deg_tau=phi.degree,
        dim=phi.dim,
    )


def check_morphism(f, source, target):
    """True when f * source_t == target_t * f.

    f has shape target.dim x source.dim: it maps the source's coordinates
    to the target's.
    """
    if not isinstance(f, SkewMatrix):
        f = SkewMatrix.scalar(f)
    if f.shape != (target.dim, source.dim):
        raise ValueError(
            f"morphism matrix has shape {f.shape}, expected "
            f"{(target.dim, source.dim)}")
    return f * source.phi_t == target.phi_t * f


class Morphism:
    """A morphism source -> target of t-modules, checked on construction."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source, target, matrix):
        if not isinstance(matrix, SkewMatrix):
            matrix = SkewMatrix.scalar(matrix)
        if not check_morphism(matrix, source, target):
            raise ValueError("matrix does not intertwine the t-actions")
        self.source = source
        self.target = target
        self.matrix = matrix

    def compose(self, other):
        """``self o other``: first ``other``, then ``self``."""
        if other.target != self.source:
            raise ValueError("morphisms are not composable")
        return Morphism(other.source, self.target, self.matrix * other.matrix)

    @classmethod
    def identity(cls, phi):
        return cls(phi, phi, SkewMatrix.identity(phi.dim, phi.p))

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.matrix == other.matrix)

    def __repr__(self):
        return f"Morphism({self.source!r} -> {self.target!r})"


def conjugate(phi, P):
    """The t-module P^-1 Phi_t P; coefficientwise M_i -> P^-1 M_i P^(i)."""
    try:
        Pinv = mat_inverse(P)
    except SingularMatrixError:
        raise SingularMatrixError("conjugating matrix is singular") from None
    return TModule([mat_mul(mat_mul(Pinv, M), mat_twist(P, i))
                    for i, M in enumerate(phi.coeffs)])


def carlitz(p):
    """The Carlitz module C_t = theta + tau."""
    F = get_field(p)
    return TModule([((F.theta,),), ((F.one,),)])


def drinfeld(coeffs, p):
    """Drinfeld module theta + a_1 tau + ... + a_r tau^r from [a_1, ..., a_r]."""
    F = get_field(p)
    return TModule([((F.theta,),)] + [((F(a),),) for a in coeffs])
