import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import PISA000, corpus_files, random_script
from smtquery.errors import ParseError
from smtquery.smtlib import (
    content_hash, parse_script, parse_term, print_expr, print_script, structurally_equal,
    translate_25_to_26,
)
from smtquery.smtlib.ast import GENERIC, Kind, Sort
from smtquery.smtlib.reader import decode_string, encode_string, read


def test_pisa000_shape():
    s = parse_script(PISA000.read_text())
    assert s.logic == "QF_SLIA"
    assert s.declarations == [("v1", Sort.STRING), ("v2", Sort.STRING),
                              ("v3", Sort.INTEGER), ("ret", Sort.STRING)]
    assert len(s.assertions) == 3
    assert s.trailing == ["(check-sat)"]
    assert s.check() == []


def test_ids_are_preorder_and_unique():
    s = parse_script(PISA000.read_text())
    ids = [n.id for n in s.nodes()]
    assert ids == list(range(len(ids)))


def test_check_sat_only():
    s = parse_script("(check-sat)")
    assert s.assertions == [] and s.declarations == [] and s.trailing == ["(check-sat)"]


def test_empty_input():
    s = parse_script("")
    assert s.assertions == [] and s.trailing == []


@pytest.mark.parametrize("text", [
    "(assert (= x",
    "(declare-fun x () String) (assert (= x 1))",
    "(assert (str.len))",
    "(declare-fun x () Real)",
    "(push 1)",
    "(assert (forall ((x Int)) true))",
    "(declare-fun f (Int) Int)",
    "(assert (= y \"a\"))",
    '(assert (= "a',
    "(declare-fun x () String) (assert x)",
    "(declare-fun x () String) (declare-fun x () String)",
])
def test_malformed_inputs_raise(text):
    with pytest.raises(ParseError):
        parse_script(text)


def test_parse_error_position():
    with pytest.raises(ParseError) as err:
        parse_script("(set-logic QF_S)\n(declare-fun x () String)\n(assert (= x 1))")
    assert err.value.line == 3
    assert "line 3" in str(err.value)


def test_let_is_expanded():
    s = parse_script("(declare-fun x () String)"
                     "(assert (let ((z (str.++ x x))) (= z z)))")
    assert print_expr(s.assertions[0]) == "(= (str.++ x x) (str.++ x x))"


def test_regex_loop_forms_agree():
    a = parse_script('(declare-fun x () String)(assert (str.in_re x ((_ re.loop 1 3) (str.to_re "a"))))')
    b = parse_script('(declare-fun x () String)(assert (str.in_re x (re.loop (str.to_re "a") 1 3)))')
    assert structurally_equal(a, b)
    assert "(_ re.loop 1 3)" in print_script(a)


def test_nullary_regex_forms():
    a = parse_script("(declare-fun x () String)(assert (str.in_re x re.allchar))")
    b = parse_script("(declare-fun x () String)(assert (str.in_re x (re.allchar)))")
    assert structurally_equal(a, b)


def test_unknown_operator_is_generic():
    s = parse_script("(declare-fun x () String)(assert (str.is_digit x))")
    node = s.assertions[0]
    assert node.decl == GENERIC and node.value == "str.is_digit" and node.sort is Sort.UNKNOWN
    assert print_expr(node) == "(str.is_digit x)"


def test_variables_and_literals():
    s = parse_script('(declare-fun x () String)(assert (= x "a"))')
    eq = s.assertions[0]
    assert eq.children[0].kind is Kind.VARIABLE
    assert eq.children[1].value == "a"


def test_annotation_is_dropped():
    s = parse_script('(declare-fun x () String)(assert (! (= x "a") :named a1))')
    assert print_expr(s.assertions[0]) == '(= x "a")'


def test_set_info_dropped_and_options_kept():
    s = parse_script("(set-info :status sat)(set-option :produce-models true)(check-sat)(get-model)")
    assert s.trailing == ["(set-option :produce-models true)", "(check-sat)", "(get-model)"]
    assert print_script(s).startswith("(set-option :produce-models true)")


def test_string_escapes():
    assert decode_string(r"\u{48}iA") == "HiA"
    assert encode_string('a"b\\') == '"a""b\\u{5c}"'
    s = parse_script('(declare-fun x () String)(assert (= x "q""\\u{e9}"))')
    assert s.assertions[0].children[1].value == 'q"é'


@given(st.text(st.characters(max_codepoint=0x2FFFF), max_size=20))
def test_encode_decode_roundtrip(text):
    encoded = encode_string(text)
    atoms = read(encoded)
    assert atoms[0].value == text


def test_parse_term():
    t = parse_term('(str.++ x "a")', [("x", Sort.STRING)])
    assert t.sort is Sort.STRING


def test_content_hash_is_sha256_of_bytes():
    assert content_hash("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
    assert content_hash("abc") == content_hash(b"abc")


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.name)
def test_fixture_roundtrip(path):
    s = parse_script(path.read_text())
    again = parse_script(print_script(s))
    assert structurally_equal(s, again)
    assert print_script(again) == print_script(s)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_random_roundtrip(seed):
    s = random_script(random.Random(seed))
    assert structurally_equal(parse_script(print_script(s)), s)


def test_deep_nesting_does_not_overflow():
    depth = 5000
    text = "(declare-fun x () String)(assert " + "(not " * depth + '(= x "a")' + ")" * depth + ")"
    s = parse_script(text)
    assert structurally_equal(parse_script(print_script(s)), s)


# --- 2.5 to 2.6 translation ----------------------------------------------------

def test_translate_keywords():
    text = "(assert (str.in.re (int.to.str (str.to.int x)) (re.union (str.to.re \"a\") re.nostr re.empty)))"
    assert translate_25_to_26(text) == (
        "(assert (str.in_re (str.from_int (str.to_int x)) "
        "(re.union (str.to_re \"a\") re.none re.none)))")


def test_translate_escapes():
    assert translate_25_to_26(r'"\x05"') == r'"\u{5}"'
    assert translate_25_to_26(r'"\x41"') == r'"\u{41}"'


def test_translate_leaves_literals_comments_and_quoted_symbols():
    text = '(assert (= x "str.in.re")) ; str.to.re\n(assert |str.to.int|)'
    assert translate_25_to_26(text) == text


def test_translate_partial_symbols():
    text = "(assert (my.str.to.int.x y))"
    assert translate_25_to_26(text) == text


@given(st.text(alphabet='()"; |\\x0aAstr.inre-_\n', max_size=60))
def test_translate_idempotent(text):
    once = translate_25_to_26(text)
    assert translate_25_to_26(once) == once
