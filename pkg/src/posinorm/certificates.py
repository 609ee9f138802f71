"""Diagonal-inequality certificates and the delta-interval feasibility search.

Everything here is exact: a certificate is a finite set of rational
inequalities, each retained as an evidence row that re-evaluates to a true
statement.  Finite scans yield "certified-to-N"; upgrading to "certified"
requires the family's declared entrywise bounds (which the scan checks too).
Falsification of hyponormality is never decided here; that belongs to the
float lane in `numerics`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numbers

from .rationals import RAT
from typing import Optional

from .interrupters import InterrupterPair, canonical_p, canonical_q
from .matrixcore import DiagonalOperator
from .rationals import format_rational
from .sequences import (
    DeclaredBounds,
    HypothesisViolation,
    SequenceFamily,
    WeightSequence,
    rho,
)


class CertificateError(ValueError):
    """A certificate route cannot be evaluated on the given data."""


def _fmt(x) -> str:
    if isinstance(x, numbers.Rational) or type(x) is type(RAT(0)):
        return format_rational(x)
    return str(x)


@dataclass
class EvidenceRow:
    index: object  # int for entrywise rows, str for summary rows
    inequality: str
    lhs: object
    rhs: object

    def to_json(self) -> dict:
        return {"index": self.index, "inequality": self.inequality,
                "lhs": _fmt(self.lhs), "rhs": _fmt(self.rhs)}


@dataclass
class Certificate:
    claim: str  # posinormal | hyponormal | coposinormal | supraposinormal
    verdict: str  # certified | certified-to-N | falsified | infeasible | inconclusive
    delta1: Optional[RAT] = None
    delta2: Optional[RAT] = None
    evidence: list = field(default_factory=list)
    n_checked: int = 0

    def to_json(self) -> dict:
        return {
            "claim": self.claim,
            "verdict": self.verdict,
            "delta1": None if self.delta1 is None else format_rational(self.delta1),
            "delta2": None if self.delta2 is None else format_rational(self.delta2),
            "evidence": [row.to_json() for row in self.evidence],
            "n_checked": self.n_checked,
        }


def _window_extremes(d: DiagonalOperator, n: int):
    """(min value, argmin, max value, argmax) over indices < n, first attaining."""
    vmin = vmax = d[0]
    imin = imax = 0
    for k in range(1, n):
        v = d[k]
        if v < vmin:
            vmin, imin = v, k
        if v > vmax:
            vmax, imax = v, k
    return vmin, imin, vmax, imax


def pair_certify(pair: InterrupterPair, claim: str, n: int,
                 declared: Optional[DeclaredBounds] = None) -> Certificate:
    """Certify posinormality (delta1 Q >= I >= delta2 P), coposinormality (the
    same with the pair swapped) or hyponormality (additionally delta1 <= delta2)
    from the extremal delta choice over a window of n diagonal entries.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if claim not in ("posinormal", "coposinormal", "hyponormal"):
        raise CertificateError("unsupported claim %r" % claim)

    if claim == "coposinormal":
        # A* carries the pair (P, Q); certify posinormality of A*.
        work = pair.swapped()
        q_name, p_name = "P", "Q"
    else:
        work = pair
        q_name, p_name = "Q", "P"

    qmin, qmin_at, qmax, qmax_at = _window_extremes(work.q, n)
    pmin, pmin_at, pmax, pmax_at = _window_extremes(work.p, n)

    evidence = [
        EvidenceRow("window", "inf %s over scan" % q_name, qmin, "at k=%d" % qmin_at),
        EvidenceRow("window", "sup %s over scan" % q_name, qmax, "at k=%d" % qmax_at),
        EvidenceRow("window", "sup %s over scan" % p_name, pmax, "at k=%d" % pmax_at),
    ]

    if qmin == 0:
        raise CertificateError(
            "zero diagonal entry at k=%d where delta1*%s >= I needs strict positivity"
            % (qmin_at, q_name)
        )

    verdict = "certified-to-N"
    if claim == "coposinormal" and declared is not None:
        declared = DeclaredBounds(q_lower=declared.p_lower, q_upper=declared.p_upper,
                                  p_lower=declared.q_lower, p_upper=declared.q_upper)
    if declared is not None and declared.q_lower is not None and declared.p_upper is not None:
        if qmin < declared.q_lower:
            raise HypothesisViolation(
                "declared %s lower bound fails at k=%d: %s < %s"
                % (q_name, qmin_at, format_rational(qmin), format_rational(declared.q_lower))
            )
        if pmax > declared.p_upper:
            raise HypothesisViolation(
                "declared %s upper bound fails at k=%d: %s > %s"
                % (p_name, pmax_at, format_rational(pmax), format_rational(declared.p_upper))
            )
        delta1 = 1 / declared.q_lower
        delta2 = None if declared.p_upper == 0 else 1 / declared.p_upper
        verdict = "certified"
        evidence.append(EvidenceRow("declared", "%s >= q_lower entrywise on window" % q_name,
                                    qmin, declared.q_lower))
        evidence.append(EvidenceRow("declared", "%s <= p_upper entrywise on window" % p_name,
                                    pmax, declared.p_upper))
    else:
        delta1 = 1 / qmin
        delta2 = None if pmax == 0 else 1 / pmax

    evidence.append(EvidenceRow(qmin_at, "delta1 * %s_k >= 1" % q_name.lower(),
                                delta1 * qmin, RAT(1)))
    if delta2 is not None:
        evidence.append(EvidenceRow(pmax_at, "delta2 * %s_k <= 1" % p_name.lower(),
                                    delta2 * pmax, RAT(1)))

    if claim == "hyponormal":
        if delta2 is not None and delta1 > delta2:
            evidence.append(EvidenceRow("summary", "delta1 <= delta2 fails", delta1, delta2))
            return Certificate(claim, "inconclusive", delta1, delta2, evidence, n)
        evidence.append(EvidenceRow("summary", "delta1 <= delta2", delta1,
                                    delta2 if delta2 is not None else "unconstrained"))
    return Certificate(claim, verdict, delta1, delta2, evidence, n)


def sandwich_window_certify(q: DiagonalOperator, d: DiagonalOperator,
                            p: DiagonalOperator, n: int,
                            pair_bounds: Optional[DeclaredBounds] = None,
                            d_bounds: Optional[tuple] = None) -> Certificate:
    """Entrywise Q >= D >= P >= 0 over the window; the sandwich sqrt(D) M
    sqrt(D) is then hyponormal.  Falsified with the first offending index.

    The upgrade past the window needs global bounds: d inside [d_lower,
    d_upper] with d_upper <= declared q_lower and d_lower >= declared p_upper.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    for k in range(n):
        qk, dk, pk = q[k], d[k], p[k]
        if dk > qk:
            return Certificate("hyponormal", "falsified", None, None,
                               [EvidenceRow(k, "d_k <= q_k fails", dk, qk)], n)
        if pk > dk:
            return Certificate("hyponormal", "falsified", None, None,
                               [EvidenceRow(k, "p_k <= d_k fails", pk, dk)], n)
    evidence = [EvidenceRow("window", "q_k >= d_k >= p_k >= 0 for k < n", n, "all pass")]
    verdict = "certified-to-N"
    if (pair_bounds is not None and d_bounds is not None
            and pair_bounds.q_lower is not None and pair_bounds.p_upper is not None):
        d_lower, d_upper = (RAT(d_bounds[0]), RAT(d_bounds[1]))
        if d_upper <= pair_bounds.q_lower and d_lower >= pair_bounds.p_upper:
            verdict = "certified"
            evidence.append(EvidenceRow("declared", "d range inside [p_upper, q_lower]",
                                        (format_rational(d_lower), format_rational(d_upper)),
                                        (format_rational(pair_bounds.p_upper),
                                         format_rational(pair_bounds.q_lower))))
    return Certificate("hyponormal", verdict, None, None, evidence, n)


@dataclass
class DeltaBound:
    value: RAT
    witness: int  # constraint index k; -1 marks the base constraint delta >= c_0 a_0

    def to_json(self) -> dict:
        return {"value": format_rational(self.value), "witness": self.witness}


@dataclass
class DeltaInterval:
    """Running intersection of the per-k delta constraints.

    Constraint k contributes delta >= 1/q_{k+1} and delta <= 1/p_k; the base
    constraint is delta >= c_0 a_0 = 1/q_0.  Closed endpoints: a point
    interval is feasible.  The scan halts at the first empty intersection,
    freezing the witnesses that prove emptiness.
    """

    lower: DeltaBound
    upper: Optional[DeltaBound]
    feasible: bool
    k_checked: int
    p_sup_info: Optional[RAT] = None  # informational only, never enforced
    limit_lower: Optional[RAT] = None
    limit_upper: Optional[RAT] = None
    limit_feasible: Optional[bool] = None

    @property
    def point(self) -> Optional[RAT]:
        if self.feasible and self.upper is not None and self.lower.value == self.upper.value:
            return self.lower.value
        return None

    def to_json(self) -> dict:
        return {
            "lower": self.lower.to_json(),
            "upper": None if self.upper is None else self.upper.to_json(),
            "feasible": self.feasible,
            "k_checked": self.k_checked,
            "p_sup_info": None if self.p_sup_info is None else format_rational(self.p_sup_info),
            "limit_lower": None if self.limit_lower is None else format_rational(self.limit_lower),
            "limit_upper": None if self.limit_upper is None else format_rational(self.limit_upper),
            "limit_feasible": self.limit_feasible,
        }


def delta_search(fam: SequenceFamily, k_max: int) -> DeltaInterval:
    """Intersect the delta windows of the first k_max + 1 constraints.

    Feasibility certifies hyponormality up to the scan: any delta in the
    interval satisfies delta * q_k >= 1 and delta * p_k <= 1 entrywise for the
    canonical pair, which is the single-delta diagonal certificate.
    """
    if fam.kind != "factorable":
        raise CertificateError("delta_search needs a factorable family")
    if not fam.rho_limit_zero:
        raise HypothesisViolation(
            "family %s does not declare rho -> 0" % fam.name)
    if k_max < 0:
        raise ValueError("k_max must be >= 0")

    lower = DeltaBound(fam.c(0) * fam.a(0), -1)
    upper: Optional[DeltaBound] = None
    p_sup: Optional[RAT] = None
    feasible = True
    k_checked = 0

    for k in range(k_max + 1):
        # canonical_p / canonical_q raise HypothesisViolation on non-monotone rho
        pk = canonical_p(fam, k)
        qk1 = canonical_q(fam, k + 1)
        p_sup = pk if p_sup is None or pk > p_sup else p_sup
        cand_low = 1 / qk1
        cand_up = 1 / pk
        if cand_low > lower.value:
            lower = DeltaBound(cand_low, k)
        if upper is None or cand_up < upper.value:
            upper = DeltaBound(cand_up, k)
        k_checked = k + 1
        if lower.value > upper.value:
            feasible = False
            break

    interval = DeltaInterval(lower, upper, feasible, k_checked, p_sup)

    db = fam.declared_bounds
    if db is not None and db.q_lower is not None and db.p_upper is not None:
        limit_lower = 1 / db.q_lower
        limit_upper = 1 / db.p_upper
        if feasible and (lower.value > limit_lower or
                         (upper is not None and upper.value < limit_upper)):
            raise HypothesisViolation(
                "scan interval contradicts declared bounds for family %s" % fam.name
            )
        interval.limit_lower = limit_lower
        interval.limit_upper = limit_upper
        interval.limit_feasible = limit_lower <= limit_upper
    return interval


def shift_posinormal_conditions(w: WeightSequence, n_zero: int,
                                k_max: int) -> Certificate:
    """Zero-prefix posinormality conditions for a weighted shift.

    Requires w_k = 0 for 0 <= k <= n_zero and w_k != 0 for n_zero < k <= k_max
    + 1, then evaluates the running sup of |w_k / w_{k+1}| past the prefix.
    A declared closed-form ratio bound upgrades to "certified"; a declared
    divergence falsifies for injective shifts (empty prefix).
    """
    if k_max <= n_zero:
        raise ValueError("k_max must exceed n_zero")
    for k in range(0, max(n_zero + 1, 0)):
        if w.w(k) != 0:
            raise CertificateError("declared zero prefix violated: w_%d != 0" % k)
    for k in range(n_zero + 1, k_max + 2):
        if w.w(k) == 0:
            raise CertificateError("zero weight after the prefix at index %d" % k)

    sup = None
    sup_at = None
    for k in range(max(n_zero + 1, 0), k_max + 1):
        ratio = abs(RAT(w.w(k)) / RAT(w.w(k + 1)))
        if sup is None or ratio > sup:
            sup, sup_at = ratio, k
    evidence = [EvidenceRow(sup_at, "running sup |w_k / w_{k+1}|", sup, "over scan")]

    if w.ratio_unbounded:
        evidence.append(EvidenceRow("declared", "sup |w_k / w_{k+1}| unbounded", "+inf", 1))
        if n_zero < 0:
            # injective: bounded ratio is equivalent to posinormality
            return Certificate("posinormal", "falsified", None, None, evidence, k_max + 1)
        return Certificate("posinormal", "inconclusive", None, None, evidence, k_max + 1)
    if w.ratio_sup is not None:
        if sup is not None and sup > w.ratio_sup:
            raise HypothesisViolation(
                "declared ratio bound %s fails at k=%d (ratio %s)"
                % (format_rational(w.ratio_sup), sup_at, format_rational(sup))
            )
        evidence.append(EvidenceRow("declared", "sup |w_k / w_{k+1}| <= bound",
                                    sup, w.ratio_sup))
        return Certificate("posinormal", "certified", None, None, evidence, k_max + 1)
    return Certificate("posinormal", "certified-to-N", None, None, evidence, k_max + 1)
