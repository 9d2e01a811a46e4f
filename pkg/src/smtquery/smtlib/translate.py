"""Rewrite SMT-LIB 2.5 string-theory syntax to 2.6."""

import re

KEYWORDS_25_TO_26 = {
    "int.to.str": "str.from_int",
    "str.to.int": "str.to_int",
    "str.in.re": "str.in_re",
    "str.to.re": "str.to_re",
    "re.nostr": "re.none",
    "re.empty": "re.none",
}

_TOKEN_BREAK = ' \t\r\n\f\v();"|'
_HEX_ESCAPE = re.compile(r"\\x([0-9a-fA-F]{2})")


def _escape(match):
    digits = match.group(1)
    if digits[0] == "0" and digits[1].isdigit():
        return "\\u{%s}" % digits[1]
    return "\\u{%s}" % digits


def translate_25_to_26(text: str) -> str:
    """Token-aware keyword renaming plus ``\\x`` escape conversion in literals.

    Comments and quoted symbols pass through untouched; keywords are only
    renamed when they form a complete symbol.
    """
    out = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == '"':
            j = i + 1
            while j < n:
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        j += 2
                        continue
                    break
                j += 1
            body = text[i + 1:j]
            out.append('"' + _HEX_ESCAPE.sub(_escape, body))
            if j < n:
                out.append('"')
            i = j + 1
        elif c == ";":
            j = text.find("\n", i)
            j = n if j < 0 else j
            out.append(text[i:j])
            i = j
        elif c == "|":
            j = text.find("|", i + 1)
            j = n - 1 if j < 0 else j
            out.append(text[i:j + 1])
            i = j + 1
        elif c in _TOKEN_BREAK:
            out.append(c)
            i += 1
        else:
            j = i
            while j < n and text[j] not in _TOKEN_BREAK:
                j += 1
            tok = text[i:j]
            out.append(KEYWORDS_25_TO_26.get(tok, tok))
            i = j
    return "".join(out)
