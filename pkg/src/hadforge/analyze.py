"""Invariant analysis for complex Hadamard matrices.

Covers the defect (dimension of the first-order unitarity-preserving
deformation space at a dephased point), isolation certificates, the
Haagerup set of quadruple phase products, invariant-based inequivalence
screening, and exhaustive search over mutually unbiased block assignments.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ._exactrank import certify_rank
from .construct import BlockAssignment, theorem1_build
from .cyclotomic import RootExponent
from .matrices import (
    ComplexMatrix,
    ExponentMatrix,
    Matrix,
    butson_min_root,
    dephase,
    is_dephased,
    to_complex,
)
from .mub import complete_mub_set

# float rank cut: tau = sigma_max * max(m, n) * eps * 64; the verdict is
# refused when any singular value lands within GAP_FACTOR of the cut
CUT_FACTOR = 64.0
GAP_FACTOR = 1000.0


class IndeterminateRankError(RuntimeError):
    """A singular value sits too close to the rank cut for a float verdict."""

    def __init__(self, msg: str, singular_values=None, tau: float = 0.0):
        super().__init__(msg)
        self.singular_values = singular_values
        self.tau = tau


@dataclass(frozen=True)
class DefectReport:
    defect: int
    variables: int
    rank: int
    mode: str  # "float" or "exact"
    evidence: dict = field(compare=False)

    @property
    def isolated(self) -> bool:
        return self.defect == 0


# ----------------------------------------------------------------------
# defect
# ----------------------------------------------------------------------

def _float_system(Hc: np.ndarray) -> np.ndarray:
    """First-order unitarity system at a dephased matrix: variables R[i,k]
    (i, k >= 1), one Re and one Im row per row pair (u < v)."""
    d = Hc.shape[0]
    n = (d - 1) ** 2
    M = np.zeros((d * (d - 1), n))
    row = 0
    for u in range(d):
        su = slice((u - 1) * (d - 1), u * (d - 1))
        for v in range(u + 1, d):
            c = Hc[u] * np.conj(Hc[v])
            sv = slice((v - 1) * (d - 1), v * (d - 1))
            if u >= 1:
                M[row, su] = c[1:].real
                M[row + 1, su] = c[1:].imag
            M[row, sv] -= c[1:].real
            M[row + 1, sv] -= c[1:].imag
            row += 2
    return M


def _exact_rows(E: Sequence[Sequence[int]], r: int, d: int):
    """Same system over Z[omega_r]: the Re/Im split is rescaled to the
    conjugation-symmetric pair omega^delta +/- omega^-delta, which spans the
    same row space (diagonal scaling by 2 and 2i), so ranks agree."""
    rows = []
    for u in range(d):
        for v in range(u + 1, d):
            plus, minus = [], []
            for k in range(1, d):
                delta = (E[u][k] - E[v][k]) % r
                nd = (-delta) % r
                col_v = (v - 1) * (d - 1) + k - 1
                if u >= 1:
                    col_u = (u - 1) * (d - 1) + k - 1
                    plus.append((col_u, [(delta, 1), (nd, 1)]))
                    minus.append((col_u, [(delta, 1), (nd, -1)]))
                plus.append((col_v, [(delta, -1), (nd, -1)]))
                minus.append((col_v, [(delta, -1), (nd, 1)]))
            rows.append(plus)
            rows.append(minus)
    return rows


def _defect_float(Hc: np.ndarray) -> DefectReport:
    d = Hc.shape[0]
    M = _float_system(Hc)
    n = M.shape[1]
    if n == 0:
        return DefectReport(0, 0, 0, "float", {"system_shape": [0, 0]})
    sv = np.linalg.svd(M, compute_uv=False)
    tau = sv[0] * max(M.shape) * np.finfo(float).eps * CUT_FACTOR
    inband = sv[(sv > tau / GAP_FACTOR) & (sv < tau * GAP_FACTOR)]
    if inband.size:
        raise IndeterminateRankError(
            f"{inband.size} singular value(s) within {GAP_FACTOR:g}x of the "
            f"rank cut {tau:.3e}; use exact mode",
            singular_values=sv,
            tau=tau,
        )
    rank = int((sv > tau).sum())
    below = sv[sv <= tau]
    ev = {
        "system_shape": list(M.shape),
        "sigma_max": float(sv[0]),
        "tau": float(tau),
        "sigma_min_above": float(sv[rank - 1]) if rank else 0.0,
        "sigma_max_below": float(below.max()) if below.size else 0.0,
    }
    return DefectReport(n - rank, n, rank, "float", ev)


def _defect_exact(E: ExponentMatrix) -> DefectReport:
    d, r = E.d, E.r
    n = (d - 1) ** 2
    if n == 0:
        return DefectReport(0, 0, 0, "exact", {"root": r})
    rows = _exact_rows(E.exp, r, d)
    rank, ev = certify_rank(rows, n, r)
    ev["root"] = r
    return DefectReport(n - rank, n, rank, "exact", ev)


def defect(H: Matrix, mode: str = "auto") -> DefectReport:
    """Defect of H, computed at its dephased representative.

    mode "auto" certifies exactly for exponent-form input and falls back to
    the float SVD (with the gap guard) for complex input; "float"/"exact"
    force a path.  Exact mode on complex input raises.
    """
    if mode not in ("auto", "float", "exact"):
        raise ValueError(f"unknown mode {mode!r}")
    if isinstance(H, ExponentMatrix):
        Hd = H if is_dephased(H) else dephase(H)[0]
        _, reduced = butson_min_root(Hd)
        if mode == "float":
            return _defect_float(to_complex(reduced).entries)
        return _defect_exact(reduced)
    if mode == "exact":
        raise ValueError("exact defect needs an exponent-form matrix")
    Hc = H if is_dephased(H) else dephase(H)[0]
    return _defect_float(Hc.entries)


def is_isolated(H: Matrix, mode: str = "auto") -> bool:
    """True when the defect vanishes (no first-order deformations at all)."""
    return defect(H, mode=mode).defect == 0


# ----------------------------------------------------------------------
# Haagerup set
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class HaagerupSet:
    """All quadruple products H[i,j] H[k,l] conj(H[i,l]) conj(H[k,j]).

    Exact sets store canonical (numerator, denominator) pairs of the phase
    as a fraction of a full turn; float sets store angles in (-pi, pi].
    """

    members: tuple
    r: Optional[int] = None  # common root order for exact sets, else None

    @property
    def exact(self) -> bool:
        return self.r is not None

    def __len__(self) -> int:
        return len(self.members)

    def digest(self) -> str:
        if not self.exact:
            raise ValueError("fingerprints are defined for exact sets only")
        blob = json.dumps(list(self.members), separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def haagerup_set(H: Matrix) -> HaagerupSet:
    d = H.d
    if isinstance(H, ExponentMatrix):
        E = np.array(H.exp, dtype=np.int64)
        r = H.r
        found: set = set()
        for i in range(d):
            D = (E[i][None, :] - E) % r
            X = (D[:, :, None] - D[:, None, :]) % r
            found.update(int(k) for k in np.unique(X))
        pairs = {RootExponent(k, r).canonical() for k in found}
        members = tuple(sorted(pairs, key=lambda p: Fraction(p[0], p[1])))
        return HaagerupSet(members=members, r=r)
    Hc = H.entries
    seen: set = set()
    for i in range(d):
        C = Hc[i][None, :] * np.conj(Hc)
        X = C[:, :, None] * np.conj(C[:, None, :])
        seen.update(np.unique(np.round(np.angle(X), 8)).tolist())
    vals = sorted(seen)
    merged: List[float] = []
    for a in vals:
        if not merged or a - merged[-1] > 1e-7:
            merged.append(a)
    if len(merged) > 1 and (np.pi - merged[-1]) + (merged[0] + np.pi) < 1e-7:
        merged.pop()  # cluster straddling the +/-pi seam
    return HaagerupSet(members=tuple(merged), r=None)


def fingerprint(H: Matrix) -> str:
    """sha256 over the sorted canonical Haagerup phases (exact input only);
    invariant under equivalence moves and root rescaling."""
    return haagerup_set(H).digest()


# ----------------------------------------------------------------------
# invariant-based comparison
# ----------------------------------------------------------------------

def inequivalent_by_invariants(A: Matrix, B: Matrix, details: bool = False):
    """Screen two matrices with equivalence invariants.

    Returns "inequivalent" when some invariant (order, minimal Butson root,
    Haagerup set, defect) separates them, else "inconclusive" — matching
    invariants never prove equivalence.  With details=True, returns
    (verdict, info dict).
    """
    reasons: List[str] = []
    info: Dict[str, tuple] = {"order": (A.d, B.d)}
    if A.d != B.d:
        reasons.append("order")
    else:
        Ad = A if is_dephased(A) else dephase(A)[0]
        Bd = B if is_dephased(B) else dephase(B)[0]
        if isinstance(Ad, ExponentMatrix) and isinstance(Bd, ExponentMatrix):
            ra, Ar = butson_min_root(Ad)
            rb, Br = butson_min_root(Bd)
            info["butson_root"] = (ra, rb)
            if ra != rb:
                reasons.append("butson_root")
            ha, hb = haagerup_set(Ar), haagerup_set(Br)
            info["haagerup_size"] = (len(ha), len(hb))
            if ha.members != hb.members:
                reasons.append("haagerup")
            da, db = _defect_exact(Ar), _defect_exact(Br)
        else:
            da, db = defect(Ad, mode="float"), defect(Bd, mode="float")
        info["defect"] = (da.defect, db.defect)
        if da.defect != db.defect:
            reasons.append("defect")
    verdict = "inequivalent" if reasons else "inconclusive"
    info["reasons"] = tuple(reasons)
    return (verdict, info) if details else verdict


# ----------------------------------------------------------------------
# assignment search
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class SearchFinding:
    """One isolated matrix class discovered by the search."""

    assignment: BlockAssignment
    report: DefectReport
    butson_root: int
    fingerprint: str


@dataclass
class SearchResult:
    findings: List[SearchFinding]            # isolated classes, canonical order
    classes: List[Tuple[str, int]]           # every distinct (fingerprint, defect)
    examined: int
    partial: bool


def _candidate_assignments(p: int, q: int):
    """Canonical enumeration with K0 = I and L0 = F pinned: the free slots
    are sorted multisets over {I, H1..H_{q-1}} and {F, H1..H_{q-1}}; a
    Fourier-conjugate label shared by both sides breaks unitarity, so those
    pairs are skipped."""
    mub = complete_mub_set(q)
    n_h = len(mub.labels) - 2
    choices = list(range(n_h + 1))  # 0 = I or F, j >= 1 = Hj
    for kc in itertools.combinations_with_replacement(choices, p - 1):
        k_h = {j for j in kc if j}
        for lc in itertools.combinations_with_replacement(choices, p - 1):
            if k_h & {j for j in lc if j}:
                continue
            k_labels = ("I",) + tuple("I" if j == 0 else f"H{j}" for j in kc)
            l_labels = ("F",) + tuple("F" if j == 0 else f"H{j}" for j in lc)
            yield BlockAssignment.from_labels(p, q, k_labels, l_labels, mub=mub)


def _examine(a: BlockAssignment, cache: dict):
    H = theorem1_build(a, mode="exact", _cache=cache)
    Hd, _ = dephase(H)
    root, reduced = butson_min_root(Hd)
    fp = haagerup_set(reduced).digest()
    try:
        rep = _defect_float(to_complex(reduced).entries)
        if rep.defect == 0:
            rep = _defect_exact(reduced)  # cheap full-rank certificate
    except IndeterminateRankError:
        rep = _defect_exact(reduced)
    return a, root, fp, rep


def assignment_search(
    p: int,
    q: int,
    budget: Optional[int] = None,
    time_limit: Optional[float] = None,
    workers: Optional[int] = None,
) -> SearchResult:
    """Enumerate valid block assignments, analyze each, and report every
    isolated equivalence-invariant class.

    Classes are keyed by (Haagerup fingerprint, defect); `budget` caps the
    number of assignments examined and `time_limit` (seconds) caps wall
    time — hitting either flags the result as partial.  Output order is the
    canonical enumeration order, independent of worker scheduling.
    """
    if workers is None:
        workers = int(os.environ.get("HF_THREADS", "0")) or 1
    deadline = time.monotonic() + time_limit if time_limit else None
    cache: dict = {}
    gen = _candidate_assignments(p, q)
    findings: List[SearchFinding] = []
    classes: List[Tuple[str, int]] = []
    seen: set = set()
    examined = 0
    partial = False

    def handle(res) -> None:
        nonlocal examined
        a, root, fp, rep = res
        examined += 1
        key = (fp, rep.defect)
        if key in seen:
            return
        seen.add(key)
        classes.append(key)
        if rep.defect == 0:
            findings.append(SearchFinding(a, rep, root, fp))

    def out_of_budget() -> bool:
        return (budget is not None and examined >= budget) or (
            deadline is not None and time.monotonic() > deadline
        )

    if workers <= 1:
        for a in gen:
            handle(_examine(a, cache))
            if out_of_budget():
                partial = next(gen, None) is not None
                break
    else:
        batch = max(2 * workers, 4)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            while True:
                chunk = list(itertools.islice(gen, batch))
                if not chunk:
                    break
                for res in pool.map(lambda a: _examine(a, cache), chunk):
                    handle(res)
                if out_of_budget():
                    partial = next(gen, None) is not None
                    break
    return SearchResult(findings, classes, examined, partial)
