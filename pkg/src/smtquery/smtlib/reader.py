"""S-expression reader for SMT-LIB source text."""

from __future__ import annotations

import re
from dataclasses import dataclass

from smtquery.errors import ParseError

SYMBOL_CHARS = frozenset(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
    "~!@$%^&*_-+=<>.?/"
)

_NUMERAL = re.compile(r"(0|[1-9][0-9]*)\Z")
_DECIMAL = re.compile(r"(0|[1-9][0-9]*)\.[0-9]+\Z")
_HEXDIGITS = frozenset("0123456789abcdefABCDEF")


@dataclass
class Atom:
    kind: str  # symbol | keyword | string | numeral | decimal | hex | binary
    text: str
    line: int
    column: int
    value: object = None

    def __repr__(self):
        return self.text


class SList(list):
    """A parenthesised list; remembers where it starts and ends in the source."""

    line = 0
    column = 0
    start = 0
    end = 0


def decode_string(raw: str) -> str:
    """Decode the body of a 2.6 string literal (without surrounding quotes)."""
    raw = raw.replace('""', '"')
    out = []
    i, n = 0, len(raw)
    while i < n:
        c = raw[i]
        if c == "\\" and i + 1 < n and raw[i + 1] == "u":
            j = i + 2
            if j < n and raw[j] == "{":
                k = j + 1
                while k < n and k - j - 1 < 5 and raw[k] in _HEXDIGITS:
                    k += 1
                if k < n and raw[k] == "}" and k > j + 1:
                    cp = int(raw[j + 1:k], 16)
                    if cp <= 0x2FFFF:
                        out.append(chr(cp))
                        i = k + 1
                        continue
            elif j + 4 <= n and all(ch in _HEXDIGITS for ch in raw[j:j + 4]):
                out.append(chr(int(raw[j:j + 4], 16)))
                i = j + 4
                continue
        out.append(c)
        i += 1
    return "".join(out)


def encode_string(value: str) -> str:
    """Inverse of :func:`decode_string`, including the surrounding quotes."""
    out = ['"']
    for c in value:
        if c == '"':
            out.append('""')
        elif c == "\\" or not (0x20 <= ord(c) <= 0x7E):
            out.append("\\u{%x}" % ord(c))
        else:
            out.append(c)
    out.append('"')
    return "".join(out)


def read(text: str) -> list:
    """Read all top-level s-expressions of ``text``.

    Compound expressions are :class:`SList` instances, leaves are :class:`Atom`.
    """
    top = []
    stack = []
    i, n = 0, len(text)
    line, line_start = 1, 0

    def pos(k):
        return line, k - line_start + 1

    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            line_start = i + 1
            i += 1
        elif c in " \t\r\f\v":
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c == "(":
            lst = SList()
            lst.line, lst.column = pos(i)
            lst.start = i
            stack.append(lst)
            i += 1
        elif c == ")":
            if not stack:
                raise ParseError("unbalanced ')'", *pos(i))
            lst = stack.pop()
            lst.end = i + 1
            (stack[-1] if stack else top).append(lst)
            i += 1
        else:
            ln, col = pos(i)
            if c == '"':
                j = i + 1
                while True:
                    if j >= n:
                        raise ParseError("unterminated string literal", ln, col)
                    if text[j] == '"':
                        if j + 1 < n and text[j + 1] == '"':
                            j += 2
                            continue
                        break
                    if text[j] == "\n":
                        line += 1
                        line_start = j + 1
                    j += 1
                raw = text[i + 1:j]
                atom = Atom("string", text[i:j + 1], ln, col, decode_string(raw))
                i = j + 1
            elif c == "|":
                j = text.find("|", i + 1)
                if j < 0:
                    raise ParseError("unterminated quoted symbol", ln, col)
                body = text[i + 1:j]
                line += body.count("\n")
                if "\n" in body:
                    line_start = i + 1 + body.rfind("\n") + 1
                atom = Atom("symbol", text[i:j + 1], ln, col, body)
                i = j + 1
            else:
                j = i
                while j < n and text[j] not in ' \t\r\n\f\v();"|':
                    j += 1
                tok = text[i:j]
                if not tok:
                    raise ParseError(f"unexpected character {c!r}", ln, col)
                atom = _classify(tok, ln, col)
                i = j
            (stack[-1] if stack else top).append(atom)
    if stack:
        lst = stack[-1]
        raise ParseError("unbalanced '('", lst.line, lst.column)
    return top


def _classify(tok, line, col):
    if _NUMERAL.match(tok):
        return Atom("numeral", tok, line, col, int(tok))
    if _DECIMAL.match(tok):
        return Atom("decimal", tok, line, col, tok)
    if tok.startswith("#x"):
        return Atom("hex", tok, line, col, int(tok[2:] or "0", 16))
    if tok.startswith("#b"):
        return Atom("binary", tok, line, col, int(tok[2:] or "0", 2))
    if tok.startswith(":"):
        return Atom("keyword", tok, line, col, tok)
    return Atom("symbol", tok, line, col, tok)


def is_symbol(x, name=None):
    return isinstance(x, Atom) and x.kind == "symbol" and (name is None or x.value == name)


def location(x):
    return x.line, x.column
