"""Scalar dominance falsification quantity for factorable matrices.

For n >= 3 the quantity is

    c_n a_1 * prod_{j=2}^{n-1} (c_0 a_0 - c_j a_j) / (c_0 a_0)^n.

A value exceeding 1 falsifies dominance (and hence hyponormality) by the
cited external criterion; this module only evaluates the quantity exactly and
reports the comparison, it does not re-prove the criterion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from .rationals import RAT

from .rationals import format_rational
from .sequences import SequenceFamily


@dataclass
class DominanceReport:
    n: int
    value: RAT
    exceeds_one: bool
    factors: list = field(default_factory=list)  # the product terms, exact

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "value": format_rational(self.value),
            "exceeds_one": self.exceeds_one,
            "factors": [format_rational(f) for f in self.factors],
        }


def dominance_quantity(fam: SequenceFamily, n: int) -> DominanceReport:
    if fam.kind != "factorable":
        raise ValueError("dominance quantity needs a factorable family")
    if n < 3:
        raise ValueError("the quantity is defined for n >= 3")
    head = fam.c(0) * fam.a(0)
    factors = [fam.c(n) * fam.a(1)]
    for j in range(2, n):
        factors.append(head - fam.c(j) * fam.a(j))
    value = RAT(1)
    for f in factors:
        value *= f
    value /= head**n
    return DominanceReport(n, value, value > 1, factors)
