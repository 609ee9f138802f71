"""Sequence families behind factorable matrices and weighted shifts.

A factorable family supplies two strictly positive entry generators a_i, c_j
(c constant 1 for terraced families); a shift family supplies one weight
generator w_n.  Generators are pure functions of the index and exact over
Fraction-compatible rationals, so a family is immutable and safe to share across workers.  The
derived ratio rho_k = a_k / c_k drives every certificate downstream: the
catalog families all have rho strictly decreasing to zero, which is what makes
the infinite tail sums finitely checkable.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from .rationals import RAT
from typing import Callable, Optional

from .rationals import format_rational, parse_int, parse_rational


class FamilyError(ValueError):
    """Unknown family name or a parameter outside its admissible range."""


class HypothesisViolation(ValueError):
    """Input data violates a hypothesis a check relies on (e.g. rho not
    strictly decreasing), so the requested verdict cannot be produced."""


_FIB = [RAT(0).numerator, RAT(1).numerator]  # GMP integers when available


def fibonacci(n: int):
    """n-th Fibonacci number with f_0 = 0, f_1 = 1, exact integers."""
    if n < 0:
        raise ValueError("index must be nonnegative")
    while len(_FIB) <= n:
        _FIB.append(_FIB[-1] + _FIB[-2])
    return _FIB[n]


@dataclass(frozen=True)
class DeclaredBounds:
    """Entrywise diagonal limits declared to hold at every index.

    q_lower <= q_k <= q_upper and p_lower <= p_k <= p_upper for the family's
    canonical interrupter pair.  Finite scans verify them on the window; they
    are what upgrades a certified-to-N verdict to a limit statement.
    """

    q_lower: Optional[RAT] = None
    q_upper: Optional[RAT] = None
    p_lower: Optional[RAT] = None
    p_upper: Optional[RAT] = None

    def to_json(self) -> dict:
        out = {}
        for name in ("q_lower", "q_upper", "p_lower", "p_upper"):
            v = getattr(self, name)
            out[name] = None if v is None else format_rational(v)
        return out


@dataclass(frozen=True)
class SquaredTail:
    """Rigorous upper bound for the series tail sum_{k > K} a_k^2."""

    method: str  # "closed-form" | "integral-test" | "geometric-ratio"
    bound: Callable[[int], RAT]
    default_cutoff: int = 512


@dataclass(frozen=True, eq=False)
class SequenceFamily:
    name: str
    kind: str  # always "factorable"; shifts live in WeightSequence
    a: Callable[[int], RAT]
    c: Callable[[int], RAT]
    params: dict = field(default_factory=dict)
    declared_bounds: Optional[DeclaredBounds] = None
    rho_limit_zero: bool = False
    squared_tail: Optional[SquaredTail] = None
    # optional fast float evaluator for a_k^2 over [lo, hi), used by numerics
    a_sq_floats: Optional[Callable[[int, int], list]] = None
    table_len: Optional[int] = None  # generators defined only below this index

    def key(self):
        return (self.name, tuple(sorted(self.params.items())))

    def describe(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "params": {k: format_rational(v) for k, v in sorted(self.params.items())},
            "rho_limit_zero": self.rho_limit_zero,
            "declared_bounds": self.declared_bounds.to_json() if self.declared_bounds else None,
        }


@dataclass(frozen=True, eq=False)
class WeightSequence:
    name: str
    w: Callable[[int], RAT]
    zero_prefix_len: Optional[int] = None  # w_k = 0 for 0 <= k <= this, then nonzero
    ratio_sup: Optional[RAT] = None  # declared closed-form bound on sup |w_k/w_{k+1}|
    ratio_unbounded: bool = False  # declared closed-form divergence of that ratio
    params: dict = field(default_factory=dict)
    table_len: Optional[int] = None

    def describe(self) -> dict:
        return {
            "name": self.name,
            "kind": "shift",
            "params": {k: format_rational(v) for k, v in sorted(self.params.items())},
            "zero_prefix_len": self.zero_prefix_len,
            "ratio_sup": None if self.ratio_sup is None else format_rational(self.ratio_sup),
            "ratio_unbounded": self.ratio_unbounded,
        }


def rho(fam: SequenceFamily, k: int) -> RAT:
    """Exact ratio a_k / c_k."""
    if fam.kind != "factorable":
        raise FamilyError("rho is defined for factorable families only")
    return fam.a(k) / fam.c(k)


# ---------------------------------------------------------------------------
# catalog: factorable families


def _cesaro(params) -> SequenceFamily:
    k = parse_rational(params.get("k", RAT(1)))
    if k <= 0:
        raise FamilyError("cesaro requires k > 0")

    def a(i: int) -> RAT:
        return RAT(1) / (k + i)

    def c(_j: int) -> RAT:
        return RAT(1)

    kf = float(k)

    def a_sq(lo: int, hi: int):
        import numpy as np

        return (1.0 / (np.arange(lo, hi, dtype=np.float64) + kf)) ** 2

    return SequenceFamily(
        name="cesaro",
        kind="factorable",
        a=a,
        c=c,
        params={"k": k},
        declared_bounds=DeclaredBounds(
            q_lower=min(k, RAT(1)),
            q_upper=max(k, RAT(1)),
            p_lower=k / (k + 1),
            p_upper=RAT(1),
        ),
        rho_limit_zero=True,
        # sum_{j > K} 1/(k+j)^2 <= integral_K^inf (k+x)^-2 dx = 1/(k+K)
        squared_tail=SquaredTail("integral-test", lambda K: RAT(1) / (k + K), 100_000),
        a_sq_floats=a_sq,
    )


def _fibonacci_family(params) -> SequenceFamily:
    if params:
        raise FamilyError("fibonacci takes no parameters")

    def a(i: int) -> RAT:
        return RAT(1, fibonacci(i + 1) * fibonacci(i + 2))

    def c(j: int) -> RAT:
        return RAT(fibonacci(j + 1) ** 2)

    # (a_{k+1}/a_k)^2 = (f_{k+1}/f_{k+3})^2 <= 1/4, so the tail past K is
    # dominated by a geometric series with ratio 1/4.
    def tail(K: int) -> RAT:
        return a(K + 1) ** 2 * RAT(4, 3)

    return SequenceFamily(
        name="fibonacci",
        kind="factorable",
        a=a,
        c=c,
        params={},
        declared_bounds=DeclaredBounds(
            q_lower=RAT(1), q_upper=RAT(2), p_lower=RAT(1, 2), p_upper=RAT(4)
        ),
        rho_limit_zero=True,
        squared_tail=SquaredTail("geometric-ratio", tail, 256),
    )


def _toeplitz(params) -> SequenceFamily:
    r = parse_rational(params.get("r", RAT(1, 2)))
    if not (0 < r < 1):
        raise FamilyError("toeplitz requires 0 < r < 1")

    def a(i: int) -> RAT:
        return r**i

    def c(j: int) -> RAT:
        return r**-j

    one_minus = 1 - r * r

    def a_sq(lo: int, hi: int):
        import numpy as np

        return float(r) ** (2 * np.arange(lo, hi, dtype=np.float64))

    return SequenceFamily(
        name="toeplitz",
        kind="factorable",
        a=a,
        c=c,
        params={"r": r},
        declared_bounds=DeclaredBounds(
            q_lower=one_minus, q_upper=RAT(1), p_lower=one_minus, p_upper=one_minus
        ),
        rho_limit_zero=True,
        # exact geometric tail: sum_{k > K} r^{2k} = r^{2(K+1)} / (1 - r^2)
        squared_tail=SquaredTail("closed-form", lambda K: r ** (2 * (K + 1)) / one_minus, 256),
        a_sq_floats=a_sq,
    )


def _q_cesaro(params) -> SequenceFamily:
    q = parse_rational(params.get("q", RAT(2)))
    if q <= 0 or q == 1:
        raise FamilyError("q-cesaro requires q > 0 and q != 1")

    if q > 1:

        def a(i: int) -> RAT:
            return (q - 1) / (q ** (i + 1) - 1)

        def c(j: int) -> RAT:
            return q**j

        # a_{k+1}/a_k = (q^{k+1}-1)/(q^{k+2}-1) <= 1/q
        tail_ratio = 1 / (q * q)
        bounds = DeclaredBounds(
            q_lower=RAT(1), q_upper=q + 1, p_lower=1 / (q + 1), p_upper=RAT(2)
        )
    else:

        def a(i: int) -> RAT:
            return (1 - q) * q**i / (1 - q ** (i + 1))

        def c(j: int) -> RAT:
            return q**-j

        # a_{k+1}/a_k = q (1-q^{k+1})/(1-q^{k+2}) <= q
        tail_ratio = q * q
        bounds = DeclaredBounds(
            q_lower=RAT(1), q_upper=(q + 1) / q, p_lower=q / (q + 1), p_upper=RAT(2)
        )

    def tail(K: int) -> RAT:
        return a(K + 1) ** 2 / (1 - tail_ratio)

    return SequenceFamily(
        name="q-cesaro",
        kind="factorable",
        a=a,
        c=c,
        params={"q": q},
        declared_bounds=bounds,
        rho_limit_zero=True,
        squared_tail=SquaredTail("geometric-ratio", tail, 256),
    )


def _terraced_counterexample(params) -> SequenceFamily:
    if params:
        raise FamilyError("terraced-counterexample takes no parameters")

    def a(i: int) -> RAT:
        return RAT(i + 3, (i + 2) ** 2)

    def c(_j: int) -> RAT:
        return RAT(1)

    def a_sq(lo: int, hi: int):
        import numpy as np

        i = np.arange(lo, hi, dtype=np.float64)
        return ((i + 3.0) / (i + 2.0) ** 2) ** 2

    return SequenceFamily(
        name="terraced-counterexample",
        kind="factorable",
        a=a,
        c=c,
        params={},
        declared_bounds=None,
        rho_limit_zero=True,
        # a_k <= (3/2)/(k+2) gives sum_{k > K} a_k^2 <= (9/4)/(K+2)
        squared_tail=SquaredTail("integral-test", lambda K: RAT(9, 4) / (K + 2), 100_000),
        a_sq_floats=a_sq,
    )


# ---------------------------------------------------------------------------
# catalog: shift weight families


def _ones_shift(params) -> WeightSequence:
    if params:
        raise FamilyError("ones takes no parameters")
    return WeightSequence(
        name="ones",
        w=lambda _k: RAT(1),
        zero_prefix_len=-1,
        ratio_sup=RAT(1),
    )


def _zero_prefix_ones(params) -> WeightSequence:
    n_zero = parse_int(params.get("n_zero", 0))
    if n_zero < 0:
        raise FamilyError("zero-prefix-ones requires n_zero >= 0")
    return WeightSequence(
        name="zero-prefix-ones",
        w=lambda k: RAT(0) if k <= n_zero else RAT(1),
        zero_prefix_len=n_zero,
        ratio_sup=RAT(1),
        params={"n_zero": RAT(n_zero)},
    )


def _alternating_zero(params) -> WeightSequence:
    if params:
        raise FamilyError("alternating-zero takes no parameters")
    return WeightSequence(
        name="alternating-zero",
        w=lambda k: RAT(1) if k % 2 == 0 else RAT(0),
    )


def _alternating_harmonic(params) -> WeightSequence:
    if params:
        raise FamilyError("alternating-harmonic takes no parameters")

    def w(k: int) -> RAT:
        # even weights 1; odd weights w_{2n-1} = 1/n for n >= 1
        if k % 2 == 0:
            return RAT(1)
        return RAT(1, (k + 1) // 2)

    return WeightSequence(
        name="alternating-harmonic",
        w=w,
        zero_prefix_len=-1,
        ratio_unbounded=True,  # w_{2n}/w_{2n+1} = n + 1 diverges
    )


_FACTORABLE_CATALOG = {
    "cesaro": (_cesaro, "terraced generalized Cesaro, a_i = 1/(k+i)"),
    "fibonacci": (_fibonacci_family, "a_i = 1/(f_{i+1} f_{i+2}), c_j = f_{j+1}^2"),
    "toeplitz": (_toeplitz, "a_i = r^i, c_j = r^-j with 0 < r < 1"),
    "q-cesaro": (_q_cesaro, "q-analog Cesaro for q > 1 or 0 < q < 1"),
    "terraced-counterexample": (
        _terraced_counterexample,
        "terraced a_i = (i+3)/(i+2)^2; hyponormal yet delta-window infeasible",
    ),
}

_SHIFT_CATALOG = {
    "ones": (_ones_shift, "unweighted shift, w_n = 1"),
    "zero-prefix-ones": (_zero_prefix_ones, "w_k = 0 for k <= n_zero, then 1"),
    "alternating-zero": (_alternating_zero, "w_{2n} = 1, w_{2n+1} = 0"),
    "alternating-harmonic": (_alternating_harmonic, "w_{2n} = 1, w_{2n-1} = 1/n"),
}


def make_family(name: str, params: Optional[dict] = None) -> SequenceFamily:
    """Instantiate a catalog factorable family with exact rational parameters."""
    try:
        builder, _ = _FACTORABLE_CATALOG[name]
    except KeyError:
        raise FamilyError("unknown factorable family %r" % name) from None
    return builder(dict(params or {}))


def make_shift(name: str, params: Optional[dict] = None) -> WeightSequence:
    """Instantiate a catalog shift weight family."""
    try:
        builder, _ = _SHIFT_CATALOG[name]
    except KeyError:
        raise FamilyError("unknown shift family %r" % name) from None
    return builder(dict(params or {}))


def list_catalog() -> list:
    rows = []
    for name, (_, doc) in sorted(_FACTORABLE_CATALOG.items()):
        rows.append({"name": name, "kind": "factorable", "description": doc})
    for name, (_, doc) in sorted(_SHIFT_CATALOG.items()):
        rows.append({"name": name, "kind": "shift", "description": doc})
    return rows


# ---------------------------------------------------------------------------
# JSON family specs
#
# {"name": str, "kind": "factorable"|"shift",
#  "a": GEN, "c": GEN,            (factorable)
#  "w": GEN,                      (shift)
#  "params": {"k": "1/2", ...},
#  "declared_bounds": {"q_lower": "1", ...} | null,
#  "rho_limit_zero": bool,
#  "zero_prefix_len": int | null, "ratio_sup": "1" | null, "ratio_unbounded": bool}
#
# GEN is {"type": "closed-form", "form": NAME, "params": {...}} or
# {"type": "table", "values": ["p/q", ...], "extend": GEN | null}.


def _closed_form(spec: dict) -> Callable[[int], RAT]:
    form = spec.get("form")
    params = {k: v for k, v in (spec.get("params") or {}).items()}
    if form == "constant":
        value = parse_rational(params.get("value", 1))
        return lambda _i: value
    if form == "reciprocal-offset":
        k = parse_rational(params.get("k", 1))
        return lambda i: RAT(1) / (k + i)
    if form == "power":
        base = parse_rational(params.get("base", RAT(1, 2)))
        if base == 0:
            raise FamilyError("power form needs a nonzero base")
        return lambda i: base**i
    if form == "poly-ratio":
        num = [parse_rational(x) for x in params.get("num", [1])]
        den = [parse_rational(x) for x in params.get("den", [1])]

        def gen(i: int) -> RAT:
            top = sum(cf * i**e for e, cf in enumerate(num))
            bot = sum(cf * i**e for e, cf in enumerate(den))
            if bot == 0:
                raise FamilyError("poly-ratio denominator vanishes at index %d" % i)
            return RAT(top, bot)

        return gen
    if form == "fibonacci-a":
        return lambda i: RAT(1, fibonacci(i + 1) * fibonacci(i + 2))
    if form == "fibonacci-c":
        return lambda j: RAT(fibonacci(j + 1) ** 2)
    if form in ("q-cesaro-a", "q-cesaro-c"):
        fam = _q_cesaro({"q": params.get("q", "2")})
        return fam.a if form == "q-cesaro-a" else fam.c
    raise FamilyError("unknown closed form %r" % form)


def _generator(spec: dict, positive_required: bool):
    """Build an entry generator from a GEN spec; returns (fn, table_len)."""
    if not isinstance(spec, dict) or "type" not in spec:
        raise FamilyError("generator spec must be an object with a 'type'")
    if spec["type"] == "closed-form":
        return _closed_form(spec), None
    if spec["type"] == "table":
        values = [parse_rational(v) for v in spec.get("values", [])]
        if positive_required and any(v <= 0 for v in values):
            raise FamilyError("table entries must be strictly positive here")
        extend = spec.get("extend")
        ext_fn = _closed_form(extend) if extend else None

        def gen(i: int) -> RAT:
            if i < len(values):
                return values[i]
            if ext_fn is None:
                raise FamilyError("table generator has no value at index %d" % i)
            return ext_fn(i)

        return gen, (None if ext_fn else len(values))
    raise FamilyError("unknown generator type %r" % spec["type"])


def family_from_json(obj) -> "SequenceFamily | WeightSequence":
    """Construct a family from a parsed JSON spec (factorable or shift)."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    name = obj.get("name", "user-family")
    kind = obj.get("kind")
    params = {k: parse_rational(v) for k, v in (obj.get("params") or {}).items()}
    if kind == "factorable":
        a, a_len = _generator(obj["a"], positive_required=True)
        c, c_len = _generator(obj["c"], positive_required=True)
        db = obj.get("declared_bounds")
        bounds = None
        if db:
            bounds = DeclaredBounds(
                **{k: (None if db.get(k) is None else parse_rational(db[k]))
                   for k in ("q_lower", "q_upper", "p_lower", "p_upper")}
            )
        lens = [x for x in (a_len, c_len) if x is not None]
        return SequenceFamily(
            name=name,
            kind="factorable",
            a=a,
            c=c,
            params=params,
            declared_bounds=bounds,
            rho_limit_zero=bool(obj.get("rho_limit_zero", False)),
            table_len=min(lens) if lens else None,
        )
    if kind == "shift":
        w, w_len = _generator(obj["w"], positive_required=False)
        ratio_sup = obj.get("ratio_sup")
        zp = obj.get("zero_prefix_len")
        return WeightSequence(
            name=name,
            w=w,
            zero_prefix_len=None if zp is None else int(zp),
            ratio_sup=None if ratio_sup is None else parse_rational(ratio_sup),
            ratio_unbounded=bool(obj.get("ratio_unbounded", False)),
            params=params,
            table_len=w_len,
        )
    raise FamilyError("family kind must be 'factorable' or 'shift'")


def load_catalog_dir(path: Optional[str] = None) -> dict:
    """Load family specs from a directory of JSON files (POSINORM_CATALOG)."""
    path = path or os.environ.get("POSINORM_CATALOG")
    out = {}
    if not path or not os.path.isdir(path):
        return out
    for fname in sorted(os.listdir(path)):
        if not fname.endswith(".json"):
            continue
        with open(os.path.join(path, fname), "r", encoding="utf-8") as fh:
            obj = json.load(fh)
        fam = family_from_json(obj)
        out[fam.name] = fam
    return out


def resolve_family(name: str, params: Optional[dict] = None):
    """Resolve a name against the builtin catalog, then POSINORM_CATALOG."""
    if name in _FACTORABLE_CATALOG:
        return make_family(name, params)
    if name in _SHIFT_CATALOG:
        return make_shift(name, params)
    external = load_catalog_dir()
    if name in external:
        if params:
            raise FamilyError("JSON catalog families do not take --param overrides")
        return external[name]
    raise FamilyError("unknown family %r" % name)
