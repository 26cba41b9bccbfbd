import pytest

from pathcheck.errors import TraceError, UnknownProposition
from pathcheck.trace import Trace, atom_sequence, load_trace, make_trace, to_csv


class TestCsv:
    def test_example(self):
        tr = load_trace("p,q\n1,0\n0,1")
        assert len(tr) == 2
        assert tr.alphabet == ("p", "q")
        assert tr.states == (frozenset({"p"}), frozenset({"q"}))

    def test_round_trip(self):
        tr = load_trace("p,q,r\n1,0,1\n0,0,0\n1,1,1\n")
        assert load_trace(to_csv(tr)) == tr

    def test_strips_cell_whitespace(self):
        tr = load_trace("p, q\n1, 0\n")
        assert tr.alphabet == ("p", "q")

    def test_missing_state_rows(self):
        with pytest.raises(TraceError, match="no state rows"):
            load_trace("p,q\n")

    def test_empty_input(self):
        with pytest.raises(TraceError, match="header"):
            load_trace("")

    def test_ragged_row_reports_line(self):
        with pytest.raises(TraceError, match="line 3"):
            load_trace("p,q\n1,0\n1\n")

    def test_bad_cell_reports_line(self):
        with pytest.raises(TraceError, match="line 2"):
            load_trace("p\n2\n")

    def test_duplicate_header(self):
        with pytest.raises(TraceError, match="duplicate"):
            load_trace("p,p\n1,1\n")

    def test_reserved_name_rejected(self):
        with pytest.raises(TraceError, match="reserved"):
            load_trace("_true\n1\n")

    def test_invalid_name_rejected(self):
        with pytest.raises(TraceError, match="invalid"):
            load_trace("2p\n1\n")


class TestJsonl:
    def test_example_with_header(self):
        tr = load_trace('{"alphabet":["p"]}\n["p"]\n[]', format="jsonl")
        assert len(tr) == 2
        assert tr.alphabet == ("p",)
        assert tr.states == (frozenset({"p"}), frozenset())

    def test_alphabet_from_first_appearance(self):
        tr = load_trace('["q"]\n["p","q"]\n[]', format="jsonl")
        assert tr.alphabet == ("q", "p")

    def test_pinned_alphabet_rejects_unknown(self):
        with pytest.raises(TraceError, match="line 2"):
            load_trace('{"alphabet":["p"]}\n["x"]', format="jsonl")

    def test_invalid_json_reports_line(self):
        with pytest.raises(TraceError, match="line 2"):
            load_trace('["p"]\nnot json', format="jsonl")

    def test_state_must_be_string_array(self):
        with pytest.raises(TraceError, match="array of strings"):
            load_trace("[1,2]", format="jsonl")

    def test_header_only(self):
        with pytest.raises(TraceError, match="no state lines"):
            load_trace('{"alphabet":["p"]}', format="jsonl")

    def test_empty(self):
        with pytest.raises(TraceError):
            load_trace("", format="jsonl")

    def test_bad_header_shape(self):
        with pytest.raises(TraceError, match="header object"):
            load_trace('{"alphabet":["p"],"x":1}\n["p"]', format="jsonl")


def test_unknown_format():
    with pytest.raises(TraceError, match="unknown trace format"):
        load_trace("p\n1\n", format="xml")


class TestMakeTrace:
    def test_default_alphabet_order(self):
        tr = make_trace([["b"], ["a", "b"]])
        assert tr.alphabet == ("b", "a")

    def test_explicit_alphabet(self):
        tr = make_trace([{"a"}], ["a", "b"])
        assert tr.alphabet == ("a", "b")

    def test_empty_rejected(self):
        with pytest.raises(TraceError, match="at least one state"):
            make_trace([])

    def test_unknown_proposition_in_state(self):
        with pytest.raises(TraceError, match="state 1"):
            make_trace([{"a"}, {"x"}], ["a"])


class TestAtomSequence:
    def test_basic_and_negated(self):
        tr = load_trace("p,q\n1,0\n0,1\n1,1\n")
        assert atom_sequence(tr, "p") == (True, False, True)
        assert atom_sequence(tr, "p", negated=True) == (False, True, False)
        assert atom_sequence(tr, "q") == (False, True, True)

    def test_reserved_names(self):
        tr = load_trace("p\n0\n1\n")
        assert atom_sequence(tr, "_true") == (True, True)
        assert atom_sequence(tr, "_false") == (False, False)
        assert atom_sequence(tr, "_false", negated=True) == (True, True)

    def test_unknown_raises(self):
        tr = load_trace("p\n1\n")
        with pytest.raises(UnknownProposition, match="'q'"):
            atom_sequence(tr, "q")
