"""Classification of unilateral weighted shifts at finite truncation.

The dichotomy is driven entirely by the zero pattern of the weights: a shift
with w_0 != 0 and any vanishing weight has witnesses in both kernel
differences, so it cannot carry an interrupter pair; a zero prefix followed by
nonzero weights is posinormal when the weight ratios stay bounded.  Verdicts
are window-honest: "certified-to-N" unless the family declares a closed-form
ratio bound or divergence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from .rationals import RAT
from typing import Optional

from .certificates import shift_posinormal_conditions
from .matrixcore import FLOAT, TruncatedOperator
from .rationals import format_rational
from .sequences import WeightSequence


# ---------------------------------------------------------------------------
# exact linear algebra over RAT


def _rref(rows):
    """In-place reduced row echelon form; returns the pivot column list."""
    if not rows:
        return []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for col in range(ncols):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return pivots


def rational_rank(mat) -> int:
    rows = [[RAT(x) for x in row] for row in mat]
    return len(_rref(rows))


def rational_nullspace(mat) -> list:
    """Basis of the nullspace of a rows x cols rational matrix."""
    rows = [[RAT(x) for x in row] for row in mat]
    if not rows:
        return []
    ncols = len(rows[0])
    pivots = _rref(rows)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [RAT(0)] * ncols
        vec[free] = RAT(1)
        for r, col in enumerate(pivots):
            vec[col] = -rows[r][free]
        basis.append(vec)
    return basis


def _mat_vec(mat, vec):
    return [sum(row[j] * vec[j] for j in range(len(vec))) for row in mat]


@dataclass
class KernelReport:
    n: int
    boundary: int
    ker_basis_indices: list  # standard basis vectors e_i in Ker A
    ker_adj_basis_indices: list  # e_i in Ker A*
    ker_in_ker_adj: bool
    ker_adj_in_ker: bool
    witness_ker_not_adj: Optional[list] = None  # v with Av = 0, A*v != 0
    witness_adj_not_ker: Optional[list] = None

    def to_json(self) -> dict:
        def vec(v):
            return None if v is None else [format_rational(x) for x in v]

        return {
            "n": self.n,
            "boundary": self.boundary,
            "ker_basis_indices": self.ker_basis_indices,
            "ker_adj_basis_indices": self.ker_adj_basis_indices,
            "ker_in_ker_adj": self.ker_in_ker_adj,
            "ker_adj_in_ker": self.ker_adj_in_ker,
            "witness_ker_not_adj": vec(self.witness_ker_not_adj),
            "witness_adj_not_ker": vec(self.witness_adj_not_ker),
        }


def kernel_witness(a: TruncatedOperator, tol: float = 0.0,
                   boundary: int = 0) -> KernelReport:
    """Exact kernel memberships and inclusion verdicts at truncation.

    Float entries with |x| <= tol are snapped to zero before exact
    elimination.  The last `boundary` basis directions are dropped from the
    domain: the image of a basis vector near the window edge is not fully
    visible in the truncation, so raw finite sections acquire spurious kernel
    vectors there.
    """
    n = a.n
    cols = n - boundary
    if cols < 1:
        raise ValueError("boundary leaves no columns")

    def snap(x):
        if a.backend == FLOAT:
            return RAT(0) if abs(x) <= tol else RAT(x)
        return RAT(x)

    full = [[snap(a.entries[i, j]) for j in range(n)] for i in range(n)]
    mat_a = [row[:cols] for row in full]
    mat_astar = [[full[j][i] for j in range(cols)] for i in range(n)]  # A* restricted

    ker_a = [j for j in range(cols) if all(mat_a[i][j] == 0 for i in range(n))]
    ker_astar = [j for j in range(cols) if all(mat_astar[i][j] == 0 for i in range(n))]

    def inclusion(first, second):
        basis = rational_nullspace(first)
        for v in basis:
            image = _mat_vec(second, v)
            if any(x != 0 for x in image):
                return False, v + [RAT(0)] * boundary
        return True, None

    a_in_astar, wit_a = inclusion(mat_a, mat_astar)
    astar_in_a, wit_astar = inclusion(mat_astar, mat_a)
    return KernelReport(
        n=n,
        boundary=boundary,
        ker_basis_indices=ker_a,
        ker_adj_basis_indices=ker_astar,
        ker_in_ker_adj=a_in_astar,
        ker_adj_in_ker=astar_in_a,
        witness_ker_not_adj=wit_a,
        witness_adj_not_ker=wit_astar,
    )


# ---------------------------------------------------------------------------
# classification


@dataclass
class ShiftClassification:
    injective: bool
    supraposinormal: str  # "yes" | "no" | "yes-via-conditions"
    posinormal: str  # "certified-to-N" | "falsified" | "unknown"
    coposinormal_falsified: bool
    kernel_evidence: list = field(default_factory=list)
    ratio_window_sup: Optional[RAT] = None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "injective": self.injective,
            "supraposinormal": self.supraposinormal,
            "posinormal": self.posinormal,
            "coposinormal_falsified": self.coposinormal_falsified,
            "kernel_evidence": self.kernel_evidence,
            "ratio_window_sup": (None if self.ratio_window_sup is None
                                 else format_rational(self.ratio_window_sup)),
            "notes": self.notes,
        }


def classify_shift(w: WeightSequence, n: int) -> ShiftClassification:
    """Classify a weighted shift from its first n weights.

    Witness bookkeeping: e_m with w_m = 0 after a nonzero weight lies in
    Ker W but not Ker W*; e_0 lies in Ker W* and escapes Ker W exactly when
    w_0 != 0 (which also falsifies coposinormality); for w_0 = 0 patterns the
    second witness is e_{m'+1} where a nonzero weight follows a zero.
    """
    if n < 2:
        raise ValueError("need n >= 2 weights to classify")
    weights = [RAT(w.w(k)) for k in range(n)]
    zeros = [k for k, v in enumerate(weights) if v == 0]
    injective = not zeros

    cls = ShiftClassification(
        injective=injective,
        supraposinormal="yes",
        posinormal="unknown",
        coposinormal_falsified=False,
    )

    if weights[0] != 0:
        cls.coposinormal_falsified = True
        cls.kernel_evidence.append(
            {"vector": "e_0", "in": "ker(W*)", "not_in": "ker(W)"})

    if injective:
        cls.supraposinormal = "yes"
        cert = shift_posinormal_conditions(w, -1, n - 2)
        cls.posinormal = {"certified": "certified-to-N",
                          "certified-to-N": "certified-to-N",
                          "falsified": "falsified",
                          "inconclusive": "unknown"}[cert.verdict]
        for row in cert.evidence:
            if isinstance(row.index, int):
                cls.ratio_window_sup = row.lhs
        if cert.verdict == "falsified":
            cls.notes.append("weight ratio declared unbounded; posinormality fails")
        return cls

    prefix_end = -1
    while prefix_end + 1 < n and weights[prefix_end + 1] == 0:
        prefix_end += 1
    prefix_shape = all(v != 0 for v in weights[prefix_end + 1:])

    if weights[0] != 0:
        # some later weight vanishes: both kernel inclusions fail
        m = zeros[0]
        cls.supraposinormal = "no"
        cls.posinormal = "falsified"
        cls.kernel_evidence.insert(0, {"vector": "e_%d" % m, "in": "ker(W)",
                                       "not_in": "ker(W*)"})
        cls.notes.append("noninjective with w_0 != 0: no interrupter pair exists")
        return cls

    if prefix_shape:
        cls.supraposinormal = "yes-via-conditions"
        try:
            cert = shift_posinormal_conditions(w, prefix_end, n - 2)
        except ValueError:
            cls.posinormal = "unknown"
            return cls
        cls.posinormal = {"certified": "certified-to-N",
                          "certified-to-N": "certified-to-N",
                          "falsified": "falsified",
                          "inconclusive": "unknown"}[cert.verdict]
        for row in cert.evidence:
            if isinstance(row.index, int):
                cls.ratio_window_sup = row.lhs
        cls.notes.append("zero prefix through index %d; posinormal via the "
                         "prefix-and-bounded-ratio conditions" % prefix_end)
        return cls

    # w_0 = 0 but zeros recur after nonzero weights
    m = next(k for k in zeros if k > 0 and weights[k - 1] != 0)
    m2 = next(k for k in range(n - 1) if weights[k] == 0 and weights[k + 1] != 0)
    cls.supraposinormal = "no"
    cls.posinormal = "falsified"
    cls.kernel_evidence = [
        {"vector": "e_%d" % m, "in": "ker(W)", "not_in": "ker(W*)"},
        {"vector": "e_%d" % (m2 + 1), "in": "ker(W*)", "not_in": "ker(W)"},
    ]
    cls.notes.append("mixed zero pattern: both kernel inclusions fail")
    return cls
