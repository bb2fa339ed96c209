"""Fourier matrices and complete sets of mutually unbiased bases in prime
dimension, generated in exact exponent form.

The complete set in dimension q is {I, F, H_1 ... H_{q-1}} with
H_j = D^j F, D a diagonal of q-th roots.  For odd primes the diagonal
exponent pattern is triangular-number based, s_k = k(k-1)/2 mod q, except
q = 3 and q = 5 which use fixed patterns the rest of the package's catalog
recipes are pinned to.  q = 2 appends diag(1, i) F as the third basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .cyclotomic import CyclotomicInteger
from .matrices import ExponentMatrix, is_unitary

_FIXED_DIAGONALS: Dict[int, Tuple[int, ...]] = {
    3: (0, 1, 1),
    5: (0, 1, 4, 4, 1),
}


class NotPrimeError(ValueError):
    pass


class MubConstructionError(RuntimeError):
    """The generated set failed its own MU verification (must never fire)."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def fourier(d: int) -> ExponentMatrix:
    """Discrete Fourier matrix: exponent (j*k) mod d at root order d."""
    if d < 1:
        raise ValueError("order must be positive")
    return ExponentMatrix(
        d, d if d > 1 else 1, tuple(tuple((j * k) % d for k in range(d)) for j in range(d))
    )


@dataclass(frozen=True)
class IdentityBasis:
    """The computational basis.  Not unimodular, so it gets its own carrier
    instead of an ExponentMatrix; block builders treat it symbolically."""

    d: int


def standard_diagonal(q: int) -> Tuple[int, ...]:
    """Exponent vector of the diagonal D used to fan F_q into H_j = D^j F_q.

    q = 3 and q = 5 return the fixed catalog patterns; other odd primes use
    the triangular-number rule s_k = k(k-1)/2 mod q.
    """
    if not _is_prime(q):
        raise NotPrimeError(f"{q} is not prime")
    if q == 2:
        raise ValueError("q = 2 has no diagonal pattern; see complete_mub_set")
    if q in _FIXED_DIAGONALS:
        return _FIXED_DIAGONALS[q]
    return tuple(k * (k - 1) // 2 % q for k in range(q))


def triangular_diagonal(q: int) -> Tuple[int, ...]:
    """The k(k-1)/2 mod q rule for any odd prime (alternative set for q = 5,
    where the catalog's fixed pattern differs from the rule)."""
    if not _is_prime(q) or q == 2:
        raise NotPrimeError(f"{q} is not an odd prime")
    return tuple(k * (k - 1) // 2 % q for k in range(q))


def _fanned_basis(q: int, j: int, diag: Sequence[int]) -> ExponentMatrix:
    """H_j = D^j F_q in exponent form (row k of F_q shifted by j*s_k)."""
    return ExponentMatrix(
        q, q, tuple(tuple((j * diag[k] + k * m) % q for m in range(q)) for k in range(q))
    )


Basis = "ExponentMatrix | IdentityBasis"


@dataclass(frozen=True)
class MubSet:
    """Ordered complete MU set: labels[0] = "I", labels[1] = "F", then "H1"...
    Ordering and labels are frozen so block-assignment recipes stay stable."""

    q: int
    labels: Tuple[str, ...]
    bases: Tuple[ExponentMatrix | IdentityBasis, ...]

    def __getitem__(self, label: str) -> ExponentMatrix | IdentityBasis:
        try:
            return self.bases[self.labels.index(label)]
        except ValueError:
            raise KeyError(f"no basis labeled {label!r} in dimension {self.q}")

    def hadamard_members(self) -> List[Tuple[str, ExponentMatrix]]:
        return [
            (l, b)
            for l, b in zip(self.labels, self.bases)
            if isinstance(b, ExponentMatrix)
        ]

    def to_json(self) -> dict:
        from .matrices import matrix_to_json

        return {
            "q": self.q,
            "bases": [
                {
                    "label": l,
                    "matrix": matrix_to_json(b, raw=True)
                    if isinstance(b, ExponentMatrix)
                    else None,
                }
                for l, b in zip(self.labels, self.bases)
            ],
        }


def complete_mub_set(q: int, diagonal: str = "standard") -> MubSet:
    """All q + 1 pairwise-MU bases in prime dimension q, verified exactly.

    diagonal = "standard" uses the catalog patterns; "triangular" forces the
    k(k-1)/2 rule (only differs for q = 5).
    """
    if not _is_prime(q):
        raise NotPrimeError(f"{q} is not prime")
    F = fourier(q)
    if q == 2:
        third = ExponentMatrix(2, 4, ((0, 0), (1, 3)))  # diag(1, i) F_2
        bases: List[ExponentMatrix | IdentityBasis] = [IdentityBasis(2), F, third]
        labels = ("I", "F", "H1")
    else:
        if diagonal == "standard":
            diag = standard_diagonal(q)
        elif diagonal == "triangular":
            diag = triangular_diagonal(q)
        else:
            raise ValueError(f"unknown diagonal rule {diagonal!r}")
        bases = [IdentityBasis(q), F] + [_fanned_basis(q, j, diag) for j in range(1, q)]
        labels = ("I", "F") + tuple(f"H{j}" for j in range(1, q))
    out = MubSet(q, labels, tuple(bases))
    _verify_set(out)
    return out


def _verify_set(s: MubSet) -> None:
    for label, b in s.hadamard_members():
        if not is_unitary(b):
            raise MubConstructionError(
                f"non-unitary basis {label} in dimension {s.q}"
            )
    n = len(s.bases)
    for a in range(n):
        for b in range(a + 1, n):
            if not is_mu_pair(s.bases[a], s.bases[b]):
                raise MubConstructionError(
                    f"bases {s.labels[a]}, {s.labels[b]} not MU in dimension {s.q}"
                )


def is_mu_pair(
    A: ExponentMatrix | IdentityBasis, B: ExponentMatrix | IdentityBasis
) -> bool:
    """Exact mutual unbiasedness: every cross inner product has squared
    modulus 1/q.  Columns of an exponent matrix are the basis vectors (scaled
    by 1/sqrt(q)); the unscaled product z must satisfy z * conj(z) = q.
    Unbiasedness against the computational basis is exactly unimodularity,
    automatic for exponent matrices."""
    if A.d != B.d:
        return False
    if isinstance(A, IdentityBasis) or isinstance(B, IdentityBasis):
        return not (isinstance(A, IdentityBasis) and isinstance(B, IdentityBasis))
    q = A.d
    from .matrices import _lcm

    r = _lcm(A.r, B.r)
    Ae, Be = A.rescaled(r), B.rescaled(r)
    target = CyclotomicInteger.from_integer(q, r)
    for i in range(q):
        for j in range(q):
            z = CyclotomicInteger(r)
            for k in range(q):
                z.coeffs[(Be.exp[k][j] - Ae.exp[k][i]) % r] += 1
            if not (z * z.conj() - target).is_zero():
                return False
    return True
