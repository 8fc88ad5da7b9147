import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padic_lfun.cyclo import CycloElement
from padic_lfun.padic import PadicNumber
from padic_lfun.report import (
    format_cyclo,
    format_report,
    format_table,
    parse_cyclo,
    parse_report,
    parse_table,
)

cell = st.text(alphabet=st.characters(blacklist_characters="\t\n\r", blacklist_categories=("Cs",)), max_size=12)


@settings(max_examples=60, deadline=None)
@given(st.lists(cell, min_size=1, max_size=4).flatmap(
    lambda h: st.tuples(st.just(h), st.lists(st.lists(cell, min_size=len(h), max_size=len(h)), max_size=5))))
def test_table_round_trip(data):
    header, rows = data
    text = format_table(header, rows)
    h2, r2 = parse_table(text)
    assert format_table(h2, r2) == text


def test_tabs_rejected():
    with pytest.raises(ValueError):
        format_table(["a"], [["x\ty"]])


def test_report_round_trip():
    text = format_report([("k", 1), ("name", "11a")], ["c", "d"], [[1, 2], [3, 4]])
    block, table = parse_report(text)
    assert block == [("k", "1"), ("name", "11a")]
    assert table == (["c", "d"], [["1", "2"], ["3", "4"]])
    assert format_report(block, *table) == text


@pytest.mark.parametrize("p,m", [(3, 0), (3, 1), (5, 1), (3, 2)])
def test_cyclo_round_trip(p, m):
    n = (p - 1) * p ** (m - 1) if m else 1
    x = CycloElement(p, m, [PadicNumber.from_int_abs(p, 7 * i + 2, 6) for i in range(n)])
    assert format_cyclo(parse_cyclo(format_cyclo(x), p)) == format_cyclo(x)


def test_separator_must_be_its_own_line():
    text = format_report([("note", "x --")], ["a"], [["--"]])
    block, table = parse_report(text)
    assert block == [("note", "x --")] and table == (["a"], [["--"]])
