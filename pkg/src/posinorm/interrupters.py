"""Interrupter pairs (Q, P) and exact verification of their defining identities.

For a factorable matrix M with strictly positive coefficients and rho_k =
a_k/c_k strictly decreasing to 0, the canonical diagonal pair is

    p_k     = (c_{k+1} a_k - c_k a_{k+1}) / (c_k c_{k+1} a_k^2)
    q_0     = 1 / (c_0 a_0)
    q_{k+1} = (c_{k+1} a_k - c_k a_{k+1}) / (c_{k+1}^2 a_k a_{k+1})

and both M Q M* and M* P M equal the symmetric Gram grid with entry
c_min(i,j) a_max(i,j).  The M Q M* side is a finite sum; the M* P M side is an
infinite series whose tail telescopes, because a_k^2 p_k = rho_k - rho_{k+1}:

    sum_{k >= m} a_k^2 p_k = rho_m          (rho -> 0)
    sum_{k <= m} c_k^2 q_k = c_m / a_m

Naive n x n truncation of M* P M silently drops those tails and is wrong; all
verification here goes through the telescoped closed form, with exact
corrections for finitely many overridden diagonal entries.

For a weighted shift W with w_n != 0 for all n, the pair is Q = diag{w_1^2,
w_2^2, ...} and P = diag{p_0, 0, w_0^2, w_1^2, ...}; then W Q W* = W* P W,
both diagonal.  Truncated shift products distort the last row/column (the top
basis vector's image leaves the window), so those comparisons run on the
leading (n-1) x (n-1) compression.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from .rationals import RAT
from typing import Optional

from .matrixcore import (
    DiagonalOperator,
    TruncatedOperator,
    build_shift,
    multiply,
    _exact_grid,
)
from .rationals import format_rational
from .sequences import HypothesisViolation, SequenceFamily, WeightSequence, rho


@dataclass(frozen=True, eq=False)
class InterrupterPair:
    q: DiagonalOperator
    p: DiagonalOperator
    source: str  # "factorable" | "shift" | "user"
    dense_range_side: str  # "Q" | "P" | "both"
    family: Optional[SequenceFamily] = None  # tail provenance for factorable pairs

    def with_override(self, side: str, k: int, value) -> "InterrupterPair":
        if side.upper() == "Q":
            return InterrupterPair(self.q.with_override(k, value), self.p,
                                   "user", self.dense_range_side, self.family)
        if side.upper() == "P":
            return InterrupterPair(self.q, self.p.with_override(k, value),
                                   "user", self.dense_range_side, self.family)
        raise ValueError("side must be 'Q' or 'P'")

    def swapped(self) -> "InterrupterPair":
        """The pair read for the adjoint: A* carries (P, Q)."""
        side = {"Q": "P", "P": "Q"}.get(self.dense_range_side, self.dense_range_side)
        return InterrupterPair(self.p, self.q, self.source, side, self.family)


@lru_cache(maxsize=512)
def _difference_core(fam: SequenceFamily, k: int):
    """Integer numerator/denominator data for c_{k+1} a_k - c_k a_{k+1} > 0.

    Works on raw integers with a single rational reduction at the caller; the
    intermediate gcd normalizations dominate runtime for bigint families
    (Fibonacci coefficients near index 10^4 have thousands of digits).
    """
    ak, ak1 = fam.a(k), fam.a(k + 1)
    ck, ck1 = fam.c(k), fam.c(k + 1)
    diff_num = (ck1.numerator * ak.numerator * ck.denominator * ak1.denominator
                - ck.numerator * ak1.numerator * ck1.denominator * ak.denominator)
    if diff_num <= 0:
        raise HypothesisViolation(
            "rho is not strictly decreasing at k=%d for family %s" % (k, fam.name)
        )
    diff_den = ck.denominator * ak1.denominator * ck1.denominator * ak.denominator
    return ak, ak1, ck, ck1, diff_num, diff_den


def canonical_p(fam: SequenceFamily, k: int) -> RAT:
    ak, _ak1, ck, ck1, diff_num, diff_den = _difference_core(fam, k)
    num = diff_num * ck.denominator * ck1.denominator * ak.denominator**2
    den = diff_den * ck.numerator * ck1.numerator * ak.numerator**2
    return RAT(num, den)


def canonical_q(fam: SequenceFamily, k: int) -> RAT:
    if k == 0:
        return 1 / (fam.c(0) * fam.a(0))
    j = k - 1
    aj, aj1, _cj, cj1, diff_num, diff_den = _difference_core(fam, j)
    num = diff_num * cj1.denominator**2 * aj.denominator * aj1.denominator
    den = diff_den * cj1.numerator**2 * aj.numerator * aj1.numerator
    return RAT(num, den)


def factorable_pair(fam: SequenceFamily) -> InterrupterPair:
    """Canonical strictly positive pair for a factorable matrix."""
    if fam.kind != "factorable":
        raise ValueError("factorable_pair needs a factorable family")
    if not fam.rho_limit_zero:
        raise HypothesisViolation(
            "family %s does not declare rho -> 0; the pair's defining series "
            "has no finitely checkable tail" % fam.name
        )
    q = DiagonalOperator(lambda k: canonical_q(fam, k), "strict", (), "Q(%s)" % fam.name)
    p = DiagonalOperator(lambda k: canonical_p(fam, k), "strict", (), "P(%s)" % fam.name)
    return InterrupterPair(q, p, "factorable", "both", fam)


def shift_pair(w: WeightSequence, p0: RAT = RAT(1)) -> InterrupterPair:
    """Pair for an injective weighted shift; Q is the dense-range side."""
    p0 = RAT(p0)
    if p0 <= 0:
        raise ValueError("p0 must be positive")

    def qgen(k: int) -> RAT:
        v = RAT(w.w(k + 1))
        if v == 0:
            raise ValueError("weights are not injective: w_%d = 0" % (k + 1))
        return v * v

    def pgen(k: int) -> RAT:
        if k == 0:
            return p0
        if k == 1:
            return RAT(0)
        v = RAT(w.w(k - 2))
        return v * v

    q = DiagonalOperator(qgen, "strict", (), "Q(%s)" % w.name)
    p = DiagonalOperator(pgen, "semidefinite", (), "P(%s)" % w.name)
    return InterrupterPair(q, p, "shift", "Q", None)


def gram_matrix(fam: SequenceFamily, n: int) -> TruncatedOperator:
    """Symmetric grid with entry (i, j) = c_min(i,j) * a_max(i,j)."""
    if fam.kind != "factorable":
        raise ValueError("gram_matrix needs a factorable family")
    grid = _exact_grid(n)
    a = [fam.a(i) for i in range(n)]
    c = [fam.c(j) for j in range(n)]
    for i in range(n):
        for j in range(n):
            grid[i, j] = c[min(i, j)] * a[max(i, j)]
    return TruncatedOperator(n, grid, provenance="gram(%s, n=%d)" % (fam.name, n))


@dataclass
class IdentityReport:
    passed: bool
    first_failure: Optional[tuple] = None
    lhs: str = ""
    rhs: str = ""
    n: int = 0
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "first_failure": None if self.first_failure is None else list(self.first_failure),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "n": self.n,
            "detail": self.detail,
        }


def _require_tail_rule(fam: SequenceFamily, pair: InterrupterPair) -> None:
    if pair.family is None or pair.family.key() != fam.key():
        raise HypothesisViolation(
            "pair has no telescoping tail rule for family %s; the M*PM series "
            "cannot be finitely certified" % fam.name
        )
    if not fam.rho_limit_zero:
        raise HypothesisViolation(
            "family %s does not declare rho -> 0; tail sum unavailable" % fam.name
        )


def verify_factorable_identity(fam: SequenceFamily, pair: InterrupterPair,
                               n: int) -> IdentityReport:
    """Check M Q M* = Gram = M* P M exactly on the n x n window.

    The Q side is the finite sum a_i a_j sum_{k <= min(i,j)} c_k^2 q_k.  The P
    side is c_i c_j sum_{k >= max(i,j)} a_k^2 p_k, evaluated as rho_max plus
    exact corrections at overridden indices.  Reports the lexicographically
    first failing entry.
    """
    _require_tail_rule(fam, pair)
    a = [fam.a(i) for i in range(n)]
    c = [fam.c(j) for j in range(n)]
    # monotone rho on the window guards the tail formula
    prev = rho(fam, 0)
    for k in range(1, n + 1):
        cur = rho(fam, k)
        if cur >= prev:
            raise HypothesisViolation(
                "rho is not strictly decreasing at k=%d for family %s" % (k - 1, fam.name)
            )
        prev = cur

    prefix = []
    acc = RAT(0)
    for k in range(n):
        acc += c[k] * c[k] * pair.q[k]
        prefix.append(acc)

    # tail corrections: overridden p entries replace the canonical ones
    p_corr = []
    for k, _ in pair.p.overrides:
        delta = pair.p[k] - canonical_p(fam, k)
        if delta != 0:
            p_corr.append((k, fam.a(k) ** 2 * delta))

    def tail(m: int) -> RAT:
        t = rho(fam, m)
        for k, corr in p_corr:
            if k >= m:
                t += corr
        return t

    tails = [tail(m) for m in range(n)]

    for i in range(n):
        for j in range(n):
            lo, hi = (i, j) if i <= j else (j, i)
            gram = c[lo] * a[hi]
            left = a[i] * a[j] * prefix[lo]
            if left != gram:
                return IdentityReport(False, (i, j), format_rational(left),
                                      format_rational(gram), n, "M Q M* side")
            right = c[i] * c[j] * tails[hi]
            if right != gram:
                return IdentityReport(False, (i, j), format_rational(right),
                                      format_rational(gram), n, "M* P M side")
    return IdentityReport(True, None, "M Q M* = M* P M", "Gram grid", n, "both sides")


def verify_shift_identity(w: WeightSequence, pair: InterrupterPair,
                          n: int) -> IdentityReport:
    """Check W Q W* = W* P W on the leading (n-1) x (n-1) compression."""
    if n < 2:
        raise ValueError("need n >= 2")
    shift = build_shift(w, n)
    q_op = pair.q.as_operator(n)
    p_op = pair.p.as_operator(n)
    lhs = multiply(multiply(shift, q_op), shift.adjoint())
    rhs = multiply(multiply(shift.adjoint(), p_op), shift)
    m = n - 1
    for i in range(m):
        for j in range(m):
            if lhs.entries[i, j] != rhs.entries[i, j]:
                return IdentityReport(False, (i, j),
                                      format_rational(lhs.entries[i, j]),
                                      format_rational(rhs.entries[i, j]),
                                      m, "W Q W* vs W* P W")
    return IdentityReport(True, None, "W Q W*", "W* P W", m, "leading compression")


# ---------------------------------------------------------------------------
# shifted identity: the same pair serving A - r for several real r


def _shift_by(a: TruncatedOperator, r: RAT) -> TruncatedOperator:
    grid = a.entries.copy()
    for i in range(a.n):
        grid[i, i] = grid[i, i] - r
    return TruncatedOperator(a.n, grid, a.backend, "(%s - %s I)" % (a.provenance, r))


@dataclass
class ShiftedIdentityReport:
    n: int
    r: RAT
    base_pass: bool  # A Q A* = A* P A
    shifted_pass: bool  # (A-r) Q (A-r)* = (A-r)* P (A-r)
    expansion_consistent: bool  # shifted difference == B - r X + r^2 Y entrywise
    reduced_pass: bool  # X == r Y

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "r": format_rational(self.r),
            "base_pass": self.base_pass,
            "shifted_pass": self.shifted_pass,
            "expansion_consistent": self.expansion_consistent,
            "reduced_pass": self.reduced_pass,
        }


def _identity_pieces(a: TruncatedOperator, q: DiagonalOperator, p: DiagonalOperator):
    n = a.n
    q_op = q.as_operator(n)
    p_op = p.as_operator(n)
    astar = a.adjoint()
    b = multiply(multiply(a, q_op), astar).entries - multiply(multiply(astar, p_op), a).entries
    x = (multiply(a, q_op).entries + multiply(q_op, astar).entries
         - multiply(astar, p_op).entries - multiply(p_op, a).entries)
    y = q_op.entries - p_op.entries
    return b, x, y


def shifted_identity_report(a: TruncatedOperator, q: DiagonalOperator,
                            p: DiagonalOperator, r) -> ShiftedIdentityReport:
    """Evaluate the identity for A and for A - r, plus its algebraic expansion.

    (A-r) Q (A-r)* - (A-r)* P (A-r) expands to B - r X + r^2 Y with
    B = A Q A* - A* P A, X = A Q + Q A* - A* P - P A, Y = Q - P.  When B = 0
    and r != 0, the shifted identity is equivalent to X = r Y.
    """
    r = RAT(r)
    n = a.n
    b, x, y = _identity_pieces(a, q, p)
    shifted = _shift_by(a, r)
    sstar = shifted.adjoint()
    q_op = q.as_operator(n)
    p_op = p.as_operator(n)
    diff = (multiply(multiply(shifted, q_op), sstar).entries
            - multiply(multiply(sstar, p_op), shifted).entries)
    predicted = b - r * x + r * r * y
    return ShiftedIdentityReport(
        n=n,
        r=r,
        base_pass=bool((b == 0).all()),
        shifted_pass=bool((diff == 0).all()),
        expansion_consistent=bool((diff == predicted).all()),
        reduced_pass=bool((x == r * y).all()),
    )


def equal_interrupter_verdict(q: DiagonalOperator, p: DiagonalOperator,
                              r1, r2, base_pass: bool, pass_r1: bool,
                              pass_r2: bool, n: int) -> dict:
    """Conclusion when one pair serves A, A - r1 and A - r2 together.

    Passing at 0 and two distinct nonzero translates forces X = r1 Y = r2 Y,
    hence Q = P entrywise.  Returns "equal-confirmed" when the window agrees,
    "contradiction" when the premises hold but the diagonals differ (i.e. the
    supplied pass flags are inconsistent with exact arithmetic), and
    "no-conclusion" when the premises are not all satisfied.
    """
    r1, r2 = RAT(r1), RAT(r2)
    premises = base_pass and pass_r1 and pass_r2 and r1 != r2 and r1 != 0 and r2 != 0
    if not premises:
        return {"verdict": "no-conclusion", "witness": None}
    for k in range(n):
        if q[k] != p[k]:
            return {"verdict": "contradiction", "witness": k}
    return {"verdict": "equal-confirmed", "witness": None}
