"""Matrix carriers and equivalence plumbing for complex Hadamard matrices.

A matrix of order d is stored either exactly (`ExponentMatrix`: integer
exponents of a fixed root of unity, global scale 1/sqrt(d)) or numerically
(`ComplexMatrix`: a complex ndarray).  Equivalence moves H -> D1 P1 H P2 D2
act on both kinds; dephasing, unitarity checks and minimal Butson-root
detection live here too.
"""

from __future__ import annotations

import cmath
import json
import random
from dataclasses import dataclass, field
from math import gcd, sqrt
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .cyclotomic import CyclotomicInteger, _poly_rem_monic, cyclotomic_polynomial

UNITARY_TOL = 1e-9  # scaled by d in the float unitarity test
ENTRY_TOL = 1e-9


class NotHadamardFormError(ValueError):
    """Entries are not unimodular (times 1/sqrt(d)) within tolerance."""


class DimensionMismatchError(ValueError):
    pass


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class ExponentMatrix:
    """d x d matrix with entries omega_r^{exp[i][j]} / sqrt(d)."""

    d: int
    r: int
    exp: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.exp) != self.d or any(len(row) != self.d for row in self.exp):
            raise ValueError("exponent grid shape does not match order")
        object.__setattr__(
            self,
            "exp",
            tuple(tuple(e % self.r for e in row) for row in self.exp),
        )

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]], r: int) -> "ExponentMatrix":
        return ExponentMatrix(len(rows), r, tuple(tuple(row) for row in rows))

    def rescaled(self, r_new: int) -> "ExponentMatrix":
        if r_new % self.r != 0:
            raise ValueError(f"{r_new} is not a multiple of {self.r}")
        m = r_new // self.r
        return ExponentMatrix(
            self.d, r_new, tuple(tuple(e * m for e in row) for row in self.exp)
        )

    def to_array(self) -> np.ndarray:
        """Integer exponent grid as an ndarray (copy)."""
        return np.array(self.exp, dtype=np.int64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExponentMatrix):
            return NotImplemented
        if self.d != other.d:
            return False
        r = _lcm(self.r, other.r)
        return self.rescaled(r).exp == other.rescaled(r).exp

    def __hash__(self):
        root, reduced = butson_min_root(self)
        return hash((self.d, root, reduced.exp))


@dataclass(frozen=True)
class ComplexMatrix:
    """Plain complex-float carrier; entries include the 1/sqrt(d) scale."""

    d: int
    entries: np.ndarray = field(compare=False)

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=np.complex128)
        if arr.shape != (self.d, self.d):
            raise ValueError("entry grid shape does not match order")
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueError("non-finite entries")
        object.__setattr__(self, "entries", arr)


Matrix = Union[ExponentMatrix, ComplexMatrix]


def to_complex(H: ExponentMatrix) -> ComplexMatrix:
    E = np.array(H.exp, dtype=np.float64)
    return ComplexMatrix(H.d, np.exp(2j * np.pi * E / H.r) / sqrt(H.d))


def as_complex(H: Matrix) -> ComplexMatrix:
    return H if isinstance(H, ComplexMatrix) else to_complex(H)


# ----------------------------------------------------------------------
# equivalence moves
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class EquivalenceMove:
    """result[i][j] = rowPhase[i] * H[rowPerm[i]][colPerm[j]] * colPhase[j].

    For exact moves `r` is the phase root order and the phase lists hold
    integer exponents; for float moves `r` is None and they hold angles in
    radians.
    """

    row_perm: Tuple[int, ...]
    col_perm: Tuple[int, ...]
    row_phases: Tuple[Union[int, float], ...]
    col_phases: Tuple[Union[int, float], ...]
    r: Optional[int] = None

    @property
    def d(self) -> int:
        return len(self.row_perm)

    @property
    def exact(self) -> bool:
        return self.r is not None

    @staticmethod
    def identity(d: int, r: Optional[int] = 1) -> "EquivalenceMove":
        idp = tuple(range(d))
        zeros = (0,) * d if r is not None else (0.0,) * d
        return EquivalenceMove(idp, idp, zeros, zeros, r)


def apply_equivalence(H: Matrix, m: EquivalenceMove) -> Matrix:
    if H.d != m.d:
        raise DimensionMismatchError("move and matrix orders differ")
    if isinstance(H, ExponentMatrix):
        if not m.exact:
            raise ValueError("float move applied to exact matrix")
        r = _lcm(H.r, m.r)
        He = H.rescaled(r)
        lift = r // m.r
        rp = [p * lift for p in m.row_phases]
        cp = [p * lift for p in m.col_phases]
        new = tuple(
            tuple(
                (rp[i] + He.exp[m.row_perm[i]][m.col_perm[j]] + cp[j]) % r
                for j in range(H.d)
            )
            for i in range(H.d)
        )
        return ExponentMatrix(H.d, r, new)
    rp = (
        [cmath.exp(2j * cmath.pi * p / m.r) for p in m.row_phases]
        if m.exact
        else [cmath.exp(1j * p) for p in m.row_phases]
    )
    cp = (
        [cmath.exp(2j * cmath.pi * p / m.r) for p in m.col_phases]
        if m.exact
        else [cmath.exp(1j * p) for p in m.col_phases]
    )
    A = H.entries[np.ix_(m.row_perm, m.col_perm)]
    return ComplexMatrix(H.d, np.array(rp)[:, None] * A * np.array(cp)[None, :])


def compose_moves(first: EquivalenceMove, second: EquivalenceMove) -> EquivalenceMove:
    """The single move equivalent to applying `first`, then `second`."""
    if first.d != second.d:
        raise DimensionMismatchError("move orders differ")
    if first.exact != second.exact:
        raise ValueError("cannot mix exact and float moves")
    d = first.d
    row_perm = tuple(first.row_perm[second.row_perm[i]] for i in range(d))
    col_perm = tuple(first.col_perm[second.col_perm[j]] for j in range(d))
    if first.exact:
        r = _lcm(first.r, second.r)
        l1, l2 = r // first.r, r // second.r
        rp = tuple(
            (second.row_phases[i] * l2 + first.row_phases[second.row_perm[i]] * l1) % r
            for i in range(d)
        )
        cp = tuple(
            (first.col_phases[second.col_perm[j]] * l1 + second.col_phases[j] * l2) % r
            for j in range(d)
        )
        return EquivalenceMove(row_perm, col_perm, rp, cp, r)
    rp = tuple(
        second.row_phases[i] + first.row_phases[second.row_perm[i]] for i in range(d)
    )
    cp = tuple(
        first.col_phases[second.col_perm[j]] + second.col_phases[j] for j in range(d)
    )
    return EquivalenceMove(row_perm, col_perm, rp, cp, None)


def invert_move(m: EquivalenceMove) -> EquivalenceMove:
    d = m.d
    inv_rp = [0] * d
    inv_cp = [0] * d
    for i in range(d):
        inv_rp[m.row_perm[i]] = i
        inv_cp[m.col_perm[i]] = i
    row_perm = tuple(inv_rp)
    col_perm = tuple(inv_cp)
    if m.exact:
        rph = tuple((-m.row_phases[row_perm[i]]) % m.r for i in range(d))
        cph = tuple((-m.col_phases[col_perm[j]]) % m.r for j in range(d))
        return EquivalenceMove(row_perm, col_perm, rph, cph, m.r)
    rph = tuple(-m.row_phases[row_perm[i]] for i in range(d))
    cph = tuple(-m.col_phases[col_perm[j]] for j in range(d))
    return EquivalenceMove(row_perm, col_perm, rph, cph, None)


def random_move(d: int, r: Optional[int], rng: random.Random) -> EquivalenceMove:
    """Uniformly random equivalence move: two permutations plus diagonal
    phases (exponents mod r, or angles when r is None)."""
    rp = list(range(d))
    cp = list(range(d))
    rng.shuffle(rp)
    rng.shuffle(cp)
    if r is not None:
        rph = tuple(rng.randrange(r) for _ in range(d))
        cph = tuple(rng.randrange(r) for _ in range(d))
    else:
        rph = tuple(rng.uniform(0.0, 2.0 * cmath.pi) for _ in range(d))
        cph = tuple(rng.uniform(0.0, 2.0 * cmath.pi) for _ in range(d))
    return EquivalenceMove(tuple(rp), tuple(cp), rph, cph, r)


# ----------------------------------------------------------------------
# dephasing
# ----------------------------------------------------------------------

def dephase(H: Matrix) -> Tuple[Matrix, EquivalenceMove]:
    """Normalize the first row and column to 1/sqrt(d).

    Convention: divide each row by the phase of its column-0 entry, then each
    column by the phase of the resulting row-0 entry.  Returns the dephased
    matrix together with the move that realizes it.
    """
    d = H.d
    idp = tuple(range(d))
    if isinstance(H, ExponentMatrix):
        rp = tuple((-H.exp[i][0]) % H.r for i in range(d))
        cp = tuple((-(H.exp[0][j] - H.exp[0][0])) % H.r for j in range(d))
        move = EquivalenceMove(idp, idp, rp, cp, H.r)
        return apply_equivalence(H, move), move
    A = H.entries
    mags = np.abs(A)
    if np.max(np.abs(mags - 1 / sqrt(d))) > ENTRY_TOL:
        raise NotHadamardFormError("entries are not unimodular/sqrt(d)")
    rp = tuple(-cmath.phase(A[i, 0]) for i in range(d))
    row_fixed = A * np.exp(1j * np.array(rp))[:, None]
    cp = tuple(-cmath.phase(row_fixed[0, j]) for j in range(d))
    move = EquivalenceMove(idp, idp, rp, cp, None)
    return apply_equivalence(H, move), move


def is_dephased(H: Matrix, tol: float = ENTRY_TOL) -> bool:
    if isinstance(H, ExponentMatrix):
        return all(H.exp[i][0] == 0 for i in range(H.d)) and all(
            e == 0 for e in H.exp[0]
        )
    A = H.entries
    target = 1 / sqrt(H.d)
    return bool(
        np.max(np.abs(A[0, :] - target)) <= tol and np.max(np.abs(A[:, 0] - target)) <= tol
    )


# ----------------------------------------------------------------------
# unitarity
# ----------------------------------------------------------------------

def is_unitary(H: Matrix) -> bool:
    """Exact Gram test for exponent matrices, float test otherwise.

    Exact mode: for every row pair the unscaled inner product
    sum_k omega^{e_ik - e_jk} must be algebraically zero (off-diagonal) or d
    (diagonal); zero tests reduce modulo the cyclotomic polynomial of the
    root order.
    """
    if isinstance(H, ComplexMatrix):
        G = H.entries @ H.entries.conj().T
        return bool(np.max(np.abs(G - np.eye(H.d))) <= UNITARY_TOL * H.d)
    d, r = H.d, H.r
    phi = cyclotomic_polynomial(r)
    for i in range(d):
        for j in range(i, d):
            counts = [0] * r
            for k in range(d):
                counts[(H.exp[i][k] - H.exp[j][k]) % r] += 1
            if i == j:
                continue  # each term is omega^0 iff rows equal; diagonal is d by construction
            if any(_poly_rem_monic(counts, phi)):
                return False
    return True


def gram_entry(H: ExponentMatrix, i: int, j: int) -> CyclotomicInteger:
    """Unscaled row inner product <row_i, row_j> * d as a cyclotomic integer."""
    counts = [0] * H.r
    for k in range(H.d):
        counts[(H.exp[i][k] - H.exp[j][k]) % H.r] += 1
    return CyclotomicInteger(H.r, counts)


# ----------------------------------------------------------------------
# Butson type
# ----------------------------------------------------------------------

def butson_min_root(H: ExponentMatrix) -> Tuple[int, ExponentMatrix]:
    """Smallest root order expressing all entries, with the re-expressed grid.

    Expects a dephased matrix (callers dephase first); the minimal root is
    r / gcd(r, all exponents).
    """
    g = H.r
    for row in H.exp:
        for e in row:
            g = gcd(g, e)
            if g == 1:
                return H.r, H
    root = H.r // g
    reduced = ExponentMatrix(
        H.d, root, tuple(tuple(e // g for e in row) for row in H.exp)
    )
    return root, reduced


def is_butson(H: Matrix, r: int) -> bool:
    """True when every entry is an r-th root of unity (times 1/sqrt(d))."""
    if isinstance(H, ExponentMatrix):
        root, _ = butson_min_root(H)
        return r % root == 0
    ang = np.angle(H.entries * sqrt(H.d)) * r / (2 * np.pi)
    return bool(np.max(np.abs(ang - np.rint(ang))) < 1e-7)


# ----------------------------------------------------------------------
# small-order brute-force equivalence
# ----------------------------------------------------------------------

_SEARCH_LIMIT = 6


def _canonical_form(H: ExponentMatrix) -> Tuple[tuple, EquivalenceMove]:
    """Lexicographically minimal dephased grid over all row permutations and
    anchor-column choices, with column sorting; returns the realizing move."""
    from itertools import permutations

    d, r = H.d, H.r
    idp = tuple(range(d))
    zeros = (0,) * d
    best_key = None
    best_move = None
    for P in permutations(range(d)):
        for c in range(d):
            cols = (c,) + tuple(j for j in range(d) if j != c)
            m1 = EquivalenceMove(P, cols, zeros, zeros, r)
            A = apply_equivalence(H, m1)
            B, m2 = dephase(A)
            order = sorted(range(d), key=lambda j: tuple(B.exp[i][j] for i in range(d)))
            m3 = EquivalenceMove(idp, tuple(order), zeros, zeros, r)
            C = apply_equivalence(B, m3)
            if best_key is None or C.exp < best_key:
                best_key = C.exp
                best_move = compose_moves(compose_moves(m1, m2), m3)
    return best_key, best_move


def equivalence_search_small(
    A: ExponentMatrix, B: ExponentMatrix
) -> Optional[EquivalenceMove]:
    """Exhaustive equivalence witness search for orders up to 6.

    Returns a move with apply_equivalence(A, move) == B, or None when the
    canonical forms differ.
    """
    if A.d != B.d:
        raise DimensionMismatchError("orders differ")
    if A.d > _SEARCH_LIMIT:
        raise ValueError(f"search restricted to d <= {_SEARCH_LIMIT}")
    rr = _lcm(A.r, B.r)
    Ae, Be = A.rescaled(rr), B.rescaled(rr)
    key_a, move_a = _canonical_form(Ae)
    key_b, move_b = _canonical_form(Be)
    if key_a != key_b:
        return None
    witness = compose_moves(move_a, invert_move(move_b))
    assert apply_equivalence(Ae, witness) == Be
    return witness


# ----------------------------------------------------------------------
# tensor products
# ----------------------------------------------------------------------

def tensor(A: ExponentMatrix, B: ExponentMatrix) -> ExponentMatrix:
    """Kronecker product in exponent form (root orders lifted to the lcm)."""
    r = _lcm(A.r, B.r)
    la, lb = r // A.r, r // B.r
    d = A.d * B.d
    rows = []
    for i1 in range(A.d):
        for i2 in range(B.d):
            rows.append(
                tuple(
                    (A.exp[i1][j1] * la + B.exp[i2][j2] * lb) % r
                    for j1 in range(A.d)
                    for j2 in range(B.d)
                )
            )
    return ExponentMatrix(d, r, tuple(rows))


# ----------------------------------------------------------------------
# JSON interchange
# ----------------------------------------------------------------------

def matrix_to_json(H: Matrix, raw: bool = False) -> dict:
    if isinstance(H, ExponentMatrix):
        obj = {"d": H.d, "root": H.r, "exponents": [list(row) for row in H.exp]}
        if raw or not is_dephased(H):
            obj["raw"] = True
        return obj
    return {
        "d": H.d,
        "re": H.entries.real.tolist(),
        "im": H.entries.imag.tolist(),
    }


def matrix_from_json(obj: dict) -> Matrix:
    if "exponents" in obj:
        return ExponentMatrix(
            int(obj["d"]), int(obj["root"]), tuple(tuple(r) for r in obj["exponents"])
        )
    if "re" in obj and "im" in obj:
        return ComplexMatrix(
            int(obj["d"]), np.array(obj["re"]) + 1j * np.array(obj["im"])
        )
    raise ValueError("unrecognized matrix JSON (want exponents or re/im)")


def load_matrix(path: str) -> Matrix:
    with open(path) as fh:
        return matrix_from_json(json.load(fh))


def dump_matrix(H: Matrix, path: str, raw: bool = False) -> None:
    with open(path, "w") as fh:
        json.dump(matrix_to_json(H, raw=raw), fh, separators=(",", ":"), sort_keys=True)
        fh.write("\n")


def move_to_json(m: EquivalenceMove) -> dict:
    return {
        "row_perm": list(m.row_perm),
        "col_perm": list(m.col_perm),
        "row_phases": list(m.row_phases),
        "col_phases": list(m.col_phases),
        "root": m.r,
    }


def move_from_json(obj: dict) -> EquivalenceMove:
    r = obj.get("root")
    phases = (
        (lambda xs: tuple(int(x) for x in xs))
        if r is not None
        else (lambda xs: tuple(float(x) for x in xs))
    )
    return EquivalenceMove(
        tuple(int(i) for i in obj["row_perm"]),
        tuple(int(i) for i in obj["col_perm"]),
        phases(obj["row_phases"]),
        phases(obj["col_phases"]),
        int(r) if r is not None else None,
    )
