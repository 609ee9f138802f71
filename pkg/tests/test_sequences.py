"""Catalog closed forms, derived ratios, and JSON family ingestion."""

import json
from fractions import Fraction as F

import pytest

from posinorm import (
    FamilyError,
    family_from_json,
    fibonacci,
    list_catalog,
    make_family,
    make_shift,
    resolve_family,
    rho,
)
from posinorm.sequences import load_catalog_dir


def test_cesaro_closed_form():
    fam = make_family("cesaro", {"k": "1"})
    assert [fam.a(i) for i in range(4)] == [F(1), F(1, 2), F(1, 3), F(1, 4)]
    assert all(fam.c(j) == 1 for j in range(8))


def test_fibonacci_family_head():
    fam = make_family("fibonacci")
    assert fam.a(0) == 1  # 1/(f_1 f_2) with f_1 = f_2 = 1
    assert fam.c(0) == 1
    assert fam.c(0) * fam.a(0) == 1


def test_toeplitz_closed_form():
    fam = make_family("toeplitz", {"r": "1/2"})
    # oracle: direct rational powers
    assert fam.a(3) == F(1, 2) ** 3 == F(1, 8)
    assert fam.c(3) == F(1, 2) ** -3 == 8
    assert rho(fam, 3) == F(1, 64)


def test_q_cesaro_closed_forms():
    fam = make_family("q-cesaro", {"q": "2"})
    assert fam.a(0) == 1 and fam.a(1) == F(1, 3) and fam.c(3) == 8
    low = make_family("q-cesaro", {"q": "1/2"})
    assert low.a(0) == 1  # (1-q) q^0 / (1-q) = 1
    assert low.a(1) == F(1, 2) * F(1, 2) / F(3, 4) == F(1, 3)
    assert low.c(2) == 4


def test_rho_examples():
    assert rho(make_family("cesaro", {"k": "1"}), 4) == F(1, 5)
    # oracle: f_3 = 2, f_4 = 3, so rho_2 = 1/(f_3^3 f_4) = 1/24
    assert rho(make_family("fibonacci"), 2) == F(1, 24)
    fam = make_family("toeplitz", {"r": "1/2"})
    for k in range(6):
        assert rho(fam, k) == F(1, 4) ** k


def test_fibonacci_integers():
    assert fibonacci(0) == 0
    assert fibonacci(1) == 1
    assert fibonacci(10) == 55
    for n in range(89):
        assert fibonacci(n + 2) - fibonacci(n + 1) == fibonacci(n)


@pytest.mark.parametrize(
    "name,params",
    [
        ("cesaro", {"k": "1"}),
        ("cesaro", {"k": "1/2"}),
        ("fibonacci", {}),
        ("toeplitz", {"r": "1/2"}),
        ("q-cesaro", {"q": "2"}),
        ("q-cesaro", {"q": "1/2"}),
        ("terraced-counterexample", {}),
    ],
)
def test_rho_strictly_decreasing_to_scale(name, params):
    fam = make_family(name, params)
    assert fam.rho_limit_zero
    prev = rho(fam, 0)
    for k in range(1, 10_001):
        cur = rho(fam, k)
        assert cur < prev
        prev = cur


def test_terraced_rho_is_a():
    fam = make_family("cesaro", {"k": "7/3"})
    for k in range(50):
        assert rho(fam, k) == fam.a(k)
        if k:
            assert fam.a(k) < fam.a(k - 1)


@pytest.mark.parametrize(
    "name,params",
    [
        ("cesaro", {"k": "0"}),
        ("cesaro", {"k": "-2"}),
        ("toeplitz", {"r": "1"}),
        ("toeplitz", {"r": "3/2"}),
        ("q-cesaro", {"q": "1"}),
        ("q-cesaro", {"q": "-1/2"}),
        ("nosuch", {}),
    ],
)
def test_bad_parameters_rejected(name, params):
    with pytest.raises(FamilyError):
        make_family(name, params)


def test_float_parameters_rejected():
    with pytest.raises(ValueError):
        make_family("cesaro", {"k": 0.5})


def test_alternating_harmonic_indexing():
    w = make_shift("alternating-harmonic")
    assert w.w(0) == 1 and w.w(1) == 1 and w.w(2) == 1
    assert w.w(3) == F(1, 2) and w.w(5) == F(1, 3)
    assert w.ratio_unbounded


def test_shift_catalog_patterns():
    ex1 = make_shift("zero-prefix-ones")
    assert [ex1.w(k) for k in range(4)] == [0, 1, 1, 1]
    ex2 = make_shift("alternating-zero")
    assert [ex2.w(k) for k in range(4)] == [1, 0, 1, 0]
    deep = make_shift("zero-prefix-ones", {"n_zero": "2"})
    assert [deep.w(k) for k in range(5)] == [0, 0, 0, 1, 1]


def test_catalog_listing():
    rows = list_catalog()
    names = {r["name"] for r in rows}
    assert {"cesaro", "fibonacci", "toeplitz", "q-cesaro",
            "terraced-counterexample", "ones", "alternating-zero"} <= names


def test_family_from_json_closed_form_matches_catalog():
    spec = {
        "name": "my-cesaro",
        "kind": "factorable",
        "a": {"type": "closed-form", "form": "reciprocal-offset", "params": {"k": "1/2"}},
        "c": {"type": "closed-form", "form": "constant", "params": {"value": "1"}},
        "params": {"k": "1/2"},
        "rho_limit_zero": True,
    }
    fam = family_from_json(spec)
    ref = make_family("cesaro", {"k": "1/2"})
    for i in range(16):
        assert fam.a(i) == ref.a(i)
        assert fam.c(i) == ref.c(i)


def test_family_from_json_table_and_tail():
    spec = {
        "name": "patched",
        "kind": "factorable",
        "a": {"type": "table", "values": ["1", "1/2"],
              "extend": {"type": "closed-form", "form": "reciprocal-offset",
                         "params": {"k": "1"}}},
        "c": {"type": "closed-form", "form": "constant"},
        "rho_limit_zero": True,
    }
    fam = family_from_json(spec)
    assert fam.a(1) == F(1, 2)
    assert fam.a(5) == F(1, 6)  # tail rule takes over past the table

    bare = family_from_json(
        {"name": "bare", "kind": "factorable",
         "a": {"type": "table", "values": ["1", "1/2"]},
         "c": {"type": "closed-form", "form": "constant"}})
    assert bare.table_len == 2
    with pytest.raises(FamilyError):
        bare.a(2)


def test_family_from_json_rejects_nonpositive_table():
    with pytest.raises(FamilyError):
        family_from_json(
            {"name": "bad", "kind": "factorable",
             "a": {"type": "table", "values": ["1", "0"]},
             "c": {"type": "closed-form", "form": "constant"}})


def test_shift_from_json():
    spec = {
        "name": "my-shift",
        "kind": "shift",
        "w": {"type": "table", "values": ["1", "0", "1", "0"]},
        "zero_prefix_len": None,
    }
    w = family_from_json(spec)
    assert w.w(1) == 0 and w.table_len == 4


def test_poly_ratio_form():
    gen = family_from_json(
        {"name": "cx", "kind": "factorable",
         "a": {"type": "closed-form", "form": "poly-ratio",
               "params": {"num": ["3", "1"], "den": ["4", "4", "1"]}},
         "c": {"type": "closed-form", "form": "constant"},
         "rho_limit_zero": True})
    ref = make_family("terraced-counterexample")
    for i in range(20):
        assert gen.a(i) == ref.a(i)


def test_catalog_dir_and_resolution(tmp_path, monkeypatch):
    spec = {
        "name": "disk-family",
        "kind": "factorable",
        "a": {"type": "closed-form", "form": "power", "params": {"base": "1/3"}},
        "c": {"type": "closed-form", "form": "constant"},
        "rho_limit_zero": True,
    }
    (tmp_path / "fam.json").write_text(json.dumps(spec))
    monkeypatch.setenv("POSINORM_CATALOG", str(tmp_path))
    loaded = load_catalog_dir()
    assert "disk-family" in loaded
    fam = resolve_family("disk-family")
    assert fam.a(2) == F(1, 9)
    with pytest.raises(FamilyError):
        resolve_family("still-not-there")
