"""Exact arithmetic with roots of unity.

Two carriers:

* :class:`RootExponent` — a single root of unity ``omega_r^k`` stored as the
  pair ``(k, r)``.  Multiplication is exponent addition mod r; mixed orders
  must be lifted to a common order first (`rescale`).
* :class:`CyclotomicInteger` — an integer combination of all r-th roots,
  stored as an *unreduced* length-r coefficient vector.  Multiplication is a
  cyclic convolution; the only subtle operation is the exact zero test, which
  reduces modulo the cyclotomic polynomial Phi_r.

Coefficients are Python ints throughout, so intermediate swell during
polynomial remainders is harmless.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import List, Tuple


class OrderMismatchError(ValueError):
    """Raised when combining roots of different orders without rescaling."""


class InvalidRescaleError(ValueError):
    """Raised when the target order is not a multiple of the current one."""


@dataclass(frozen=True)
class RootExponent:
    """The root of unity omega_r^k = exp(2*pi*i*k/r), canonicalized mod r."""

    k: int
    r: int

    def __post_init__(self) -> None:
        if self.r <= 0:
            raise ValueError("root order must be positive")
        object.__setattr__(self, "k", self.k % self.r)

    def to_complex(self) -> complex:
        import cmath

        return cmath.exp(2j * cmath.pi * self.k / self.r)

    def canonical(self) -> Tuple[int, int]:
        """Reduced form (k/g, r/g): the same root at its minimal order."""
        g = gcd(self.k, self.r)
        if self.k == 0:
            return (0, 1)
        return (self.k // g, self.r // g)


def root_mul(a: RootExponent, b: RootExponent) -> RootExponent:
    if a.r != b.r:
        raise OrderMismatchError(f"orders differ: {a.r} vs {b.r}; rescale to lcm first")
    return RootExponent((a.k + b.k) % a.r, a.r)


def root_inverse(a: RootExponent) -> RootExponent:
    return RootExponent((-a.k) % a.r, a.r)


def rescale(a: RootExponent, r_new: int) -> RootExponent:
    if r_new % a.r != 0:
        raise InvalidRescaleError(f"{r_new} is not a multiple of {a.r}")
    return RootExponent(a.k * (r_new // a.r), r_new)


@lru_cache(maxsize=None)
def cyclotomic_polynomial(r: int) -> Tuple[int, ...]:
    """Coefficients of Phi_r, low degree first; computed by exact division of
    x^r - 1 by the product of Phi_m over proper divisors m of r."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if r == 1:
        return (-1, 1)
    num = [0] * (r + 1)
    num[0], num[r] = -1, 1
    for m in range(1, r):
        if r % m == 0:
            num = _poly_exact_div(num, list(cyclotomic_polynomial(m)))
    return tuple(num)


def _poly_exact_div(num: List[int], den: List[int]) -> List[int]:
    """Exact division of integer polynomials (monic-or-unit divisor leading
    coefficient; remainder must vanish)."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        if c % lead != 0:
            raise ArithmeticError("non-exact polynomial division")
        q = c // lead
        out[i] = q
        if q:
            for j, dj in enumerate(den):
                num[i + j] -= q * dj
    if any(num[: len(den) - 1]):
        raise ArithmeticError("non-exact polynomial division (remainder)")
    return out


class CyclotomicInteger:
    """Sum_{k<r} coeffs[k] * omega_r^k with integer coefficients.

    The vector is kept unreduced (length exactly r); `is_zero` is the only
    operation that consults Phi_r.
    """

    __slots__ = ("r", "coeffs")

    def __init__(self, r: int, coeffs=None):
        if r <= 0:
            raise ValueError("root order must be positive")
        self.r = r
        if coeffs is None:
            self.coeffs = [0] * r
        else:
            coeffs = list(coeffs)
            if len(coeffs) != r:
                raise ValueError(f"need exactly {r} coefficients, got {len(coeffs)}")
            self.coeffs = coeffs

    # --- constructors -------------------------------------------------
    @staticmethod
    def zero(r: int) -> "CyclotomicInteger":
        return CyclotomicInteger(r)

    @staticmethod
    def one(r: int) -> "CyclotomicInteger":
        z = CyclotomicInteger(r)
        z.coeffs[0] = 1
        return z

    @staticmethod
    def from_integer(n: int, r: int) -> "CyclotomicInteger":
        z = CyclotomicInteger(r)
        z.coeffs[0] = n
        return z

    @staticmethod
    def from_root(a: RootExponent, r: int | None = None) -> "CyclotomicInteger":
        r = r if r is not None else a.r
        a = rescale(a, r) if r != a.r else a
        z = CyclotomicInteger(r)
        z.coeffs[a.k] = 1
        return z

    # --- ring operations ----------------------------------------------
    def _check(self, other: "CyclotomicInteger") -> None:
        if self.r != other.r:
            raise OrderMismatchError(
                f"orders differ: {self.r} vs {other.r}; lift_to_common first"
            )

    def __add__(self, other: "CyclotomicInteger") -> "CyclotomicInteger":
        self._check(other)
        return CyclotomicInteger(
            self.r, [a + b for a, b in zip(self.coeffs, other.coeffs)]
        )

    def __sub__(self, other: "CyclotomicInteger") -> "CyclotomicInteger":
        self._check(other)
        return CyclotomicInteger(
            self.r, [a - b for a, b in zip(self.coeffs, other.coeffs)]
        )

    def __neg__(self) -> "CyclotomicInteger":
        return CyclotomicInteger(self.r, [-a for a in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, int):
            return CyclotomicInteger(self.r, [other * a for a in self.coeffs])
        self._check(other)
        r = self.r
        out = [0] * r
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[(i + j) % r] += a * b
        return CyclotomicInteger(r, out)

    __rmul__ = __mul__

    def shifted(self, k: int) -> "CyclotomicInteger":
        """Multiplication by omega_r^k (cheap cyclic shift)."""
        k %= self.r
        return CyclotomicInteger(self.r, self.coeffs[-k:] + self.coeffs[:-k] if k else list(self.coeffs))

    def conj(self) -> "CyclotomicInteger":
        out = [0] * self.r
        for k, a in enumerate(self.coeffs):
            out[(-k) % self.r] += a
        return CyclotomicInteger(self.r, out)

    def rescaled(self, r_new: int) -> "CyclotomicInteger":
        if r_new % self.r != 0:
            raise InvalidRescaleError(f"{r_new} is not a multiple of {self.r}")
        step = r_new // self.r
        out = [0] * r_new
        for k, a in enumerate(self.coeffs):
            out[k * step] = a
        return CyclotomicInteger(r_new, out)

    # --- predicates ----------------------------------------------------
    def is_zero(self) -> bool:
        """Exact zero test: remainder of the coefficient polynomial under
        division by Phi_r vanishes (Phi_r is monic, so the remainder stays
        integral)."""
        if not any(self.coeffs):
            return True
        phi = cyclotomic_polynomial(self.r)
        rem = _poly_rem_monic(self.coeffs, phi)
        return not any(rem)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CyclotomicInteger):
            return NotImplemented
        if self.r != other.r:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("CyclotomicInteger is unhashable (equality is algebraic)")

    def to_complex(self) -> complex:
        import cmath

        return sum(
            a * cmath.exp(2j * cmath.pi * k / self.r)
            for k, a in enumerate(self.coeffs)
            if a
        )

    def __repr__(self) -> str:
        terms = [f"{a}*w{self.r}^{k}" for k, a in enumerate(self.coeffs) if a]
        return "CyclotomicInteger(" + (" + ".join(terms) or "0") + ")"


def _poly_rem_monic(coeffs: List[int], divisor: Tuple[int, ...]) -> List[int]:
    """Remainder of coeffs (low-first) modulo a monic integer polynomial."""
    rem = list(coeffs)
    deg = len(divisor) - 1
    for i in range(len(rem) - 1, deg - 1, -1):
        c = rem[i]
        if c:
            rem[i] = 0
            base = i - deg
            for j in range(deg):
                rem[base + j] -= c * divisor[j]
    return rem[:deg] if len(rem) >= deg else rem + [0] * (deg - len(rem))


def lift_to_common(
    a: CyclotomicInteger, b: CyclotomicInteger
) -> Tuple[CyclotomicInteger, CyclotomicInteger]:
    """Embed both operands in the cyclotomic ring of the lcm order."""
    if a.r == b.r:
        return a, b
    r = a.r * b.r // gcd(a.r, b.r)
    return a.rescaled(r), b.rescaled(r)


def cyc_add(a: CyclotomicInteger, b: CyclotomicInteger) -> CyclotomicInteger:
    a, b = lift_to_common(a, b)
    return a + b


def cyc_mul(a: CyclotomicInteger, b: CyclotomicInteger) -> CyclotomicInteger:
    a, b = lift_to_common(a, b)
    return a * b


def cyc_conj(a: CyclotomicInteger) -> CyclotomicInteger:
    return a.conj()
