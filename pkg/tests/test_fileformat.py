import random

import pytest
from hypothesis import given, settings, strategies as st

from conformal_lab.algebra import HomConformalAlgebra, rank2_example, virasoro
from conformal_lab.errors import DefinitionSyntaxError, RankError, UndeclaredBasis
from conformal_lab.fileformat import (
    DefinitionFile,
    EndoSpec,
    definitions_equal,
    format_endo,
    parse_definition,
    parse_endo,
    print_definition,
)
from conformal_lab.polyring import D, X0, ZERO, MultiPoly

HEADER = "[algebra]\nrank = 2\nbasis = a b\n"


def test_virasoro_fixture(fixtures_dir):
    defn = parse_definition((fixtures_dir / "vir.alg").read_text())
    assert defn.algebra.table == virasoro().table
    assert defn.algebra.table[0][0] == (D + 2 * X0,)
    assert "zero_beta" in defn.modules


def test_rank2_fixture(fixtures_dir):
    A = parse_definition((fixtures_dir / "rank2.alg").read_text()).algebra
    R = rank2_example()
    assert (A.table, A.alpha) == (R.table, R.alpha)


@pytest.mark.parametrize("name", ["vir.alg", "broken.alg", "abelian.alg", "rank2.alg"])
def test_round_trip_fixtures(fixtures_dir, name):
    defn = parse_definition((fixtures_dir / name).read_text())
    text = print_definition(defn)
    again = parse_definition(text)
    assert definitions_equal(again, defn)
    assert print_definition(again) == text


@pytest.mark.parametrize(
    "alg,endo",
    [
        ("vir.alg", "vir_inner.endo"),
        ("vir.alg", "vir_identity.endo"),
        ("vir.alg", "vir_quasi.endo"),
        ("rank2.alg", "rank2_nijenhuis.endo"),
        ("rank2.alg", "rank2_identity.endo"),
        ("rank2.alg", "rank2_quasi.endo"),
    ],
)
def test_round_trip_endo_fixtures(fixtures_dir, alg, endo):
    A = parse_definition((fixtures_dir / alg).read_text()).algebra
    spec = parse_endo((fixtures_dir / endo).read_text(), A)
    text = "\n".join(format_endo(spec, A))
    again = parse_endo(text, A)
    assert (again.map, again.witness, again.witness2) == (spec.map, spec.witness, spec.witness2)


small = st.builds(
    lambda a, b, c: MultiPoly.const(a) + b * D + c * X0,
    st.integers(-3, 3), st.integers(-3, 3), st.fractions(-2, 2, max_denominator=3),
)


@given(st.lists(small, min_size=8, max_size=8), st.lists(st.integers(-2, 2), min_size=4, max_size=4))
@settings(max_examples=40, deadline=None)
def test_round_trip_random_tables(entries, alpha):
    table = ((tuple(entries[0:2]), tuple(entries[2:4])), (tuple(entries[4:6]), tuple(entries[6:8])))
    alpha_m = tuple(tuple(MultiPoly.const(v) + (D if i == 1 else ZERO) for i, v in enumerate(alpha[r * 2:(r + 1) * 2])) for r in range(2))
    A = HomConformalAlgebra(2, table, alpha_m, ("a", "b"), name="random")
    defn = DefinitionFile(A)
    assert definitions_equal(parse_definition(print_definition(defn)), defn)


def test_index_references_and_omitted_entries():
    A = parse_definition(HEADER + "[bracket]\n0 1 -> 0, 1\n1 0 -> 0, -1\n").algebra
    assert A.table[0][1] == (ZERO, MultiPoly.const(1))
    assert A.table[0][0] == (ZERO, ZERO)


def test_out_of_range_index():
    with pytest.raises(RankError):
        parse_definition(HEADER + "[bracket]\n5 0 -> 1, 0\n")


def test_undeclared_name():
    with pytest.raises(UndeclaredBasis):
        parse_definition(HEADER + "[bracket]\na c -> 1, 0\n")


def test_malformed_expression_position():
    with pytest.raises(DefinitionSyntaxError) as exc:
        parse_definition(HEADER + "[bracket]\na b -> d + * x0, 0\n")
    assert exc.value.lineno == 5
    assert exc.value.offset == len("a b -> d + ") + 1
    assert isinstance(exc.value, SyntaxError)


@pytest.mark.parametrize(
    "text",
    [
        "rank = 1\n",
        "[algebra]\nrank = x\n",
        HEADER + "[bracket]\na b 1, 0\n",
        HEADER + "[bracket]\na b -> 1\n",
        HEADER + "[alpha]\na -> x0, 0\n",
        HEADER + "[bracket]\n[bracket]\n",
        HEADER + "[nonsense]\n",
        HEADER + "[endo]\nextension = sideways\na -> 1, 0\n",
        "[algebra]\nrank = 2\nbasis = a a\n",
    ],
)
def test_syntax_errors(text):
    with pytest.raises(DefinitionSyntaxError):
        parse_definition(text)


def test_basis_count_mismatch():
    with pytest.raises(RankError):
        parse_definition("[algebra]\nrank = 2\nbasis = a\n")


def test_endo_error_lines_are_relative():
    A = virasoro()
    with pytest.raises(DefinitionSyntaxError) as exc:
        parse_endo("[endo]\nL -> d +\n", A)
    assert exc.value.lineno == 2


def test_comments_and_blank_lines():
    text = "# header\n\n[algebra]   # the algebra\nrank = 1\nbasis = L\n\n[bracket]\nL L -> d + 2*x0  # Virasoro\n"
    assert parse_definition(text).algebra.table == virasoro().table
