"""Float falsification lane: compressions of gamma^2 A*A - AA* with rigorous
tail bounds, PSD checks, and minimal-gamma estimation.

Only falsification happens here; proofs live in the exact certificate lane.
Soundness rests on two facts: compressions of a PSD operator are PSD, and the
omitted series mass is bounded by an exact per-family tail.  A "falsified"
verdict therefore never flips back as the window or the cutoff grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from .rationals import RAT
from typing import Optional, Union

import numpy as np

from .matrixcore import TruncatedOperator, DiagonalOperator
from .sequences import SequenceFamily, WeightSequence

# relative envelope for accumulated float rounding in the partial sums;
# deliberately coarse next to the PSD slack below
_ROUNDING_REL = 1e-12
# slack added to every PSD threshold: 2^-30 * n * max|entry| (adjustable)
PSD_SLACK_SCALE = 2.0**-30


@dataclass
class TailBound:
    """Spectral-norm bound on the error of a computed compression.

    Covers the omitted series tail past index `start` plus the float rounding
    of the partial sums.  The entrywise omission for the A*A grid is exactly
    tau * c_i c_j with 0 <= tau <= tail(K), so its spectral norm is at most
    tail(K) * sum_i c_i^2.
    """

    start: int
    bound: float
    method: str

    def to_json(self) -> dict:
        return {"start": self.start, "bound": self.bound, "method": self.method}


def _safe_float(x: RAT) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf if x > 0 else -math.inf


def _a_sq_floats(fam: SequenceFamily, lo: int, hi: int) -> np.ndarray:
    if fam.a_sq_floats is not None:
        return np.asarray(fam.a_sq_floats(lo, hi), dtype=np.float64)
    return np.array([_safe_float(fam.a(k)) ** 2 for k in range(lo, hi)],
                    dtype=np.float64)


def _compression_parts(operand: Union[SequenceFamily, WeightSequence],
                       n: int, cutoff: Optional[int]):
    """(AA* grid, A*A grid, gamma-free spectral tail, method, K)."""
    if isinstance(operand, WeightSequence):
        w_sq = np.array([float(RAT(operand.w(k)) ** 2) for k in range(n)],
                        dtype=np.float64)
        aa_star = np.diag(np.concatenate(([0.0], w_sq[:-1])))
        a_star_a = np.diag(w_sq)
        return aa_star, a_star_a, 0.0, "closed-form", n

    fam = operand
    if fam.squared_tail is None:
        raise ValueError("family %s has no tail method; A*A-based checks are "
                         "rejected rather than silently truncated" % fam.name)
    K = fam.squared_tail.default_cutoff if cutoff is None else cutoff
    if K < n:
        raise ValueError("cutoff K must be >= n")

    a = [fam.a(i) for i in range(n)]
    c = [fam.c(j) for j in range(n)]

    # AA* entries: exact prefix sums of c_k^2, rounded once
    prefix = []
    acc = RAT(0)
    for k in range(n):
        acc += c[k] * c[k]
        prefix.append(acc)
    aa_star = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1):
            v = float(a[i] * a[j] * prefix[j])
            aa_star[i, j] = v
            aa_star[j, i] = v

    # A*A entries: float partial sums of a_k^2 from max(i,j) through K
    terms = _a_sq_floats(fam, 0, K + 1)
    suffix = np.cumsum(terms[::-1])[::-1]  # suffix[m] = sum_{k=m}^{K} a_k^2
    cf = np.array([_safe_float(x) for x in c], dtype=np.float64)
    idx = np.arange(n)
    maxij = np.maximum(idx[:, None], idx[None, :])
    a_star_a = cf[:, None] * cf[None, :] * suffix[maxij]

    tail = fam.squared_tail.bound(K)
    c_sq_sum = sum(x * x for x in c)
    return aa_star, a_star_a, float(tail * c_sq_sum), fam.squared_tail.method, K


def commutator_compression(operand: Union[SequenceFamily, WeightSequence],
                           gamma: float, n: int,
                           cutoff: Optional[int] = None):
    """n x n compression of gamma^2 A*A - AA* with a rigorous error bound.

    For a factorable matrix, (AA*)_{ij} = a_i a_j sum_{k <= min(i,j)} c_k^2 is
    finite and computed exactly before rounding; (A*A)_{ij} = c_i c_j
    sum_{k >= max(i,j)} a_k^2 is summed in float to the cutoff K with the
    family's exact tail bound folded into the result.  Shift products are
    banded and exact, so no tail is needed there.

    Returns (matrix, TailBound).
    """
    aa_star, a_star_a, tail_part, method, K = _compression_parts(operand, n, cutoff)
    matrix = (gamma * gamma) * a_star_a - aa_star
    spectral_tail = (gamma * gamma) * tail_part
    rounding = _ROUNDING_REL * n * float(np.max(np.abs(matrix)) + 1.0)
    return matrix, TailBound(K, spectral_tail + rounding, method)


@dataclass
class PsdVerdict:
    lambda_min: float
    threshold: float
    falsified: bool
    witness: list

    def to_json(self) -> dict:
        return {
            "lambda_min": self.lambda_min,
            "threshold": self.threshold,
            "falsified": self.falsified,
            "witness": self.witness,
        }


def psd_check(matrix: np.ndarray, error_bound: float = 0.0) -> PsdVerdict:
    """Decide whether a symmetric compression is negative beyond its error bar.

    falsified means lambda_min < -(error_bound + slack): the underlying exact
    compression cannot be PSD, so neither can the infinite operator.  Anything
    else is "consistent"; it proves nothing.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("need a square matrix")
    if not np.allclose(m, m.T, rtol=0.0, atol=0.0):
        m = 0.5 * (m + m.T)
    values, vectors = np.linalg.eigh(m)
    lam = float(values[0])
    slack = PSD_SLACK_SCALE * m.shape[0] * float(np.max(np.abs(m)) + 1.0)
    threshold = error_bound + slack
    return PsdVerdict(lam, threshold, lam < -threshold, [float(x) for x in vectors[:, 0]])


@dataclass
class GammaEstimate:
    gamma: float  # smallest gamma found consistent on the compression
    certified_floor: float  # largest gamma the falsifier rejected (true constant exceeds it)
    n: int
    iterations: int

    def to_json(self) -> dict:
        return {"gamma": self.gamma, "certified_floor": self.certified_floor,
                "n": self.n, "iterations": self.iterations}


def gamma_estimate(operand: Union[SequenceFamily, WeightSequence], n: int,
                   cutoff: Optional[int] = None,
                   rel_tol: float = 1e-9) -> GammaEstimate:
    """Bisect for the smallest gamma whose compression of gamma^2 A*A - AA*
    passes the PSD check.  Monotone in gamma, and non-decreasing in n, so the
    result is a lower estimate of any true posinormality constant.
    """
    aa_star, a_star_a, tail_part, _method, _K = _compression_parts(operand, n, cutoff)

    def consistent(g: float) -> bool:
        matrix = (g * g) * a_star_a - aa_star
        rounding = _ROUNDING_REL * n * float(np.max(np.abs(matrix)) + 1.0)
        return not psd_check(matrix, (g * g) * tail_part + rounding).falsified

    iterations = 0
    if consistent(0.0):
        return GammaEstimate(0.0, 0.0, n, iterations)
    lo, hi = 0.0, 1.0
    while not consistent(hi):
        lo, hi = hi, hi * 2.0
        iterations += 1
        if hi > 2.0**40:
            return GammaEstimate(math.inf, lo, n, iterations)
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        iterations += 1
        if consistent(mid):
            hi = mid
        else:
            lo = mid
    return GammaEstimate(hi, lo, n, iterations)


@dataclass
class NormalSandwichReport:
    max_commutator: float
    budget: float
    consistent: bool

    def to_json(self) -> dict:
        return {"max_commutator": self.max_commutator, "budget": self.budget,
                "consistent": self.consistent}


def check_normal_sandwich(a: TruncatedOperator, p: DiagonalOperator,
                          extra_budget: float = 0.0) -> NormalSandwichReport:
    """Check that B = sqrt(P) A sqrt(P) commutes with its adjoint in float.

    Meaningful when (P, P) is an interrupter pair for A; then B is normal and
    the commutator must vanish up to rounding.  Finite matrices only; callers
    with their own tail analysis can widen the budget.
    """
    n = a.n
    af = a.to_float().entries
    roots = np.sqrt(np.array([float(p[k]) for k in range(n)], dtype=np.float64))
    b = roots[:, None] * af * roots[None, :]
    comm = b.T @ b - b @ b.T
    scale = float(np.max(np.abs(b)) + 1.0)
    budget = extra_budget + 2.0**-40 * n * n * scale * scale
    max_comm = float(np.max(np.abs(comm)))
    return NormalSandwichReport(max_comm, budget, max_comm <= budget)
