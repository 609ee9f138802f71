"""Dense truncated-operator algebra over a dual scalar backend.

The exact backend stores exact rationals in numpy object arrays; the float
backend stores binary64.  Every identity and certificate check runs on the
exact backend; floats exist only for the falsification lane in `numerics`.
Values are immutable after construction, so sharing across workers is safe.
All scalars are real (the catalog is real and |w|^2 reduces to w^2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from .rationals import RAT
from typing import Callable, Optional

import numpy as np

from .rationals import exact_sqrt
from .sequences import FamilyError, SequenceFamily, WeightSequence

EXACT = "exact"
FLOAT = "float"

_ZERO = RAT(0)


def _exact_grid(n: int) -> np.ndarray:
    grid = np.empty((n, n), dtype=object)
    grid[:] = _ZERO
    return grid


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    """Leading n x n corner of an operator on l2."""

    n: int
    entries: np.ndarray
    backend: str = EXACT
    provenance: str = ""

    def entry(self, i: int, j: int):
        return self.entries[i, j]

    def adjoint(self) -> "TruncatedOperator":
        return TruncatedOperator(self.n, self.entries.T.copy(), self.backend,
                                 "adjoint(%s)" % self.provenance)

    def compression(self, m: int) -> "TruncatedOperator":
        if not (1 <= m <= self.n):
            raise ValueError("compression size out of range")
        return TruncatedOperator(m, self.entries[:m, :m].copy(), self.backend,
                                 "compression(%s, %d)" % (self.provenance, m))

    def to_float(self) -> "TruncatedOperator":
        if self.backend == FLOAT:
            return self
        grid = np.array([[float(x) for x in row] for row in self.entries], dtype=np.float64)
        return TruncatedOperator(self.n, grid, FLOAT, self.provenance)

    def equals(self, other: "TruncatedOperator") -> bool:
        return (
            self.n == other.n
            and self.backend == other.backend
            and bool((self.entries == other.entries).all())
        )

    def scaled(self, alpha) -> "TruncatedOperator":
        return TruncatedOperator(self.n, self.entries * alpha, self.backend,
                                 "scaled(%s)" % self.provenance)

    def __matmul__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        return multiply(self, other)

    @staticmethod
    def from_rows(rows, backend: str = EXACT, provenance: str = "") -> "TruncatedOperator":
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("rows must form a square grid")
        if backend == EXACT:
            grid = _exact_grid(n)
            for i, row in enumerate(rows):
                for j, v in enumerate(row):
                    grid[i, j] = RAT(v)
        else:
            grid = np.array(rows, dtype=np.float64)
        return TruncatedOperator(n, grid, backend, provenance)


def adjoint(a: TruncatedOperator) -> TruncatedOperator:
    return a.adjoint()


def multiply(a: TruncatedOperator, b: TruncatedOperator) -> TruncatedOperator:
    if a.n != b.n:
        raise ValueError("size mismatch: %d vs %d" % (a.n, b.n))
    if a.backend != b.backend:
        raise ValueError("backend mismatch: %s vs %s" % (a.backend, b.backend))
    return TruncatedOperator(a.n, a.entries.dot(b.entries), a.backend,
                             "(%s)*(%s)" % (a.provenance, b.provenance))


@dataclass(frozen=True, eq=False)
class DiagonalOperator:
    """Positive diagonal operator given by an entry generator plus overrides.

    Overrides support mutation testing and user-edited pairs: the base
    generator supplies the (usually closed-form) tail, finitely many indices
    may differ.  Entries are validated on access: never negative, and strictly
    positive in "strict" mode.
    """

    base: Callable[[int], RAT]
    positivity: str = "semidefinite"  # "strict" | "semidefinite"
    overrides: tuple = ()  # ((index, RAT), ...)
    description: str = ""

    def __getitem__(self, k: int) -> RAT:
        value = None
        for idx, v in self.overrides:
            if idx == k:
                value = v
                break
        if value is None:
            value = self.base(k)
        value = RAT(value)
        if value < 0:
            raise ValueError("%s: negative diagonal entry at index %d" % (self.description, k))
        if self.positivity == "strict" and value == 0:
            raise ValueError("%s: zero entry at index %d breaks strict positivity"
                             % (self.description, k))
        return value

    def with_override(self, k: int, value) -> "DiagonalOperator":
        kept = tuple((i, v) for i, v in self.overrides if i != k)
        return DiagonalOperator(self.base, self.positivity,
                                kept + ((k, RAT(value)),), self.description)

    @property
    def override_indices(self) -> tuple:
        return tuple(i for i, _ in self.overrides)

    def window(self, n: int) -> list:
        return [self[k] for k in range(n)]

    def as_operator(self, n: int) -> TruncatedOperator:
        grid = _exact_grid(n)
        for k in range(n):
            grid[k, k] = self[k]
        return TruncatedOperator(n, grid, EXACT, "diag(%s)" % self.description)

    @staticmethod
    def from_values(values, positivity: str = "semidefinite",
                    description: str = "table") -> "DiagonalOperator":
        vals = [RAT(v) for v in values]

        def base(k: int) -> RAT:
            if k >= len(vals):
                raise IndexError("diagonal table has no entry at index %d" % k)
            return vals[k]

        return DiagonalOperator(base, positivity, (), description)

    @staticmethod
    def identity() -> "DiagonalOperator":
        return DiagonalOperator(lambda _k: RAT(1), "strict", (), "I")


def build_factorable(fam: SequenceFamily, n: int) -> TruncatedOperator:
    """Lower-triangular truncation with entry(i, j) = a_i c_j for j <= i."""
    if fam.kind != "factorable":
        raise FamilyError("build_factorable needs a factorable family")
    if n < 1:
        raise ValueError("n must be >= 1")
    grid = _exact_grid(n)
    a = [fam.a(i) for i in range(n)]
    c = [fam.c(j) for j in range(n)]
    for i in range(n):
        for j in range(i + 1):
            grid[i, j] = a[i] * c[j]
    return TruncatedOperator(n, grid, EXACT, "factorable(%s, n=%d)" % (fam.name, n))


def build_shift(w: WeightSequence, n: int) -> TruncatedOperator:
    """Truncated unilateral weighted shift: entry(i+1, i) = w_i."""
    if n < 2:
        raise ValueError("shift truncation needs n >= 2")
    grid = _exact_grid(n)
    for i in range(n - 1):
        grid[i + 1, i] = RAT(w.w(i))
    return TruncatedOperator(n, grid, EXACT, "shift(%s, n=%d)" % (w.name, n))


def sandwich(d: DiagonalOperator, a: TruncatedOperator,
             n: Optional[int] = None) -> TruncatedOperator:
    """sqrt(D) A sqrt(D), entry (i, j) = sqrt(d_i d_j) A(i, j).

    Stays exact when every needed d_k has a rational square root (identity,
    perfect-square windows); otherwise falls back to binary64.  Certificates
    never rely on this materialization; it exists for float cross-checks.
    """
    n = a.n if n is None else n
    if n > a.n:
        raise ValueError("sandwich window exceeds operator size")
    diag = [d[k] for k in range(n)]
    roots = [exact_sqrt(v) for v in diag]
    if a.backend == EXACT and all(r is not None for r in roots):
        grid = _exact_grid(n)
        for i in range(n):
            for j in range(n):
                grid[i, j] = roots[i] * roots[j] * a.entries[i, j]
        return TruncatedOperator(n, grid, EXACT, "sandwich(%s)" % a.provenance)
    af = a.to_float()
    rootf = np.sqrt(np.array([float(v) for v in diag], dtype=np.float64))
    grid = rootf[:, None] * af.entries[:n, :n] * rootf[None, :]
    return TruncatedOperator(n, grid, FLOAT, "sandwich(%s)" % a.provenance)
