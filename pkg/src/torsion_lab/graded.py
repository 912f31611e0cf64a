"""Elements of Z-graded lines relative to fixed reference volumes.

A :class:`GradedLineElement` ``(s, n)`` stands for ``s * vol`` in a graded
line of degree ``n`` whose reference vector ``vol`` is fixed by the caller
(wedge of the chosen basis columns, ordered by increasing degree).  The dual
reference vector is ``vol^*`` with ``vol^*(vol) = 1``, so ``(s vol)^* =
s^{-1} vol^*``.

All graded signs used by the torsion code live here:

* ``swap``   the commutativity constraint, ``xi (x) eta -> (-1)^{nm} eta (x) xi``
* ``pair``   the monoidal constraint ``c`` of the dagger functor, which
  multiplies by ``(-1)^{nm}``
* ``evaluate`` the right inverse ``eps: xi (x) lambda -> lambda(xi)`` (no sign)
* :func:`mu_exponent` the sign exponent of the torsion isomorphism
"""

from __future__ import annotations

from dataclasses import dataclass

from torsion_lab.linalg import LogScalar


def parity_sign(k: int) -> int:
    return -1 if k % 2 else 1


@dataclass(frozen=True)
class GradedLineElement:
    """``scalar * vol`` in a graded line of the given degree."""

    scalar: LogScalar
    degree: int

    @classmethod
    def of(cls, value, degree: int) -> "GradedLineElement":
        if not isinstance(value, LogScalar):
            value = LogScalar.from_complex(complex(value))
        return cls(value, int(degree))

    @classmethod
    def unit(cls) -> "GradedLineElement":
        return cls(LogScalar(), 0)

    def tensor(self, other: "GradedLineElement") -> "GradedLineElement":
        return GradedLineElement(self.scalar * other.scalar, self.degree + other.degree)

    __matmul__ = tensor

    def swap(self, other: "GradedLineElement") -> "GradedLineElement":
        """psi(self (x) other) = (-1)^{nm} other (x) self."""
        out = other.tensor(self)
        if (self.degree * other.degree) % 2:
            return GradedLineElement(-out.scalar, out.degree)
        return out

    def dagger(self) -> "GradedLineElement":
        """The dual vector of ``self`` in ``(V^*, -n)``."""
        return GradedLineElement(LogScalar() / self.scalar, -self.degree)

    def pair(self, other: "GradedLineElement") -> "GradedLineElement":
        """c(self^dagger-side (x) other^dagger-side) as an element of the dual of the product.

        Both arguments are elements of dual lines of degrees ``-n`` and ``-m``;
        the result lives in ``((V,n) (x) (W,m))^dagger``.
        """
        out = self.tensor(other)
        if (self.degree * other.degree) % 2:
            return GradedLineElement(-out.scalar, out.degree)
        return out

    def evaluate(self, dual: "GradedLineElement") -> LogScalar:
        """eps(self (x) dual) = dual(self)."""
        if dual.degree != -self.degree:
            raise ValueError(
                f"cannot evaluate a degree {dual.degree} dual on a degree {self.degree} line"
            )
        return self.scalar * dual.scalar

    def scaled(self, factor) -> "GradedLineElement":
        if not isinstance(factor, LogScalar):
            factor = LogScalar.from_complex(complex(factor))
        return GradedLineElement(self.scalar * factor, self.degree)

    def ratio(self, other: "GradedLineElement") -> LogScalar:
        """The scalar s with self = s * other (same line)."""
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch {self.degree} vs {other.degree}")
        return self.scalar / other.scalar


def determinant_line_element(plus: LogScalar, dim_plus: int, minus: LogScalar, dim_minus: int) -> GradedLineElement:
    """The element ``(a vol^+) (x) (b vol^-)^dagger`` of ``|V^+| (x) |V^-|^dagger``."""
    return GradedLineElement(plus, dim_plus).tensor(GradedLineElement(minus, dim_minus).dagger())


def mu_exponent(e1p: int, e1m: int, e2p: int, e2m: int, ep: int, em: int) -> int:
    """Sign exponent of the torsion isomorphism.

    Arguments are the exterior degrees of the complement volumes
    ``t_1^+, t_1^-, t_2^+, t_2^-, t^+, t^-``.
    """
    return e2p * (e1m + e1p) + e1m * (ep + em) + em * (e2p + e2m) + ep
