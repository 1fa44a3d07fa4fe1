"""Tokenizer for model source.

`15/4` with no whitespace around the slash lexes as a single rational
literal; with whitespace it is division.  The two agree in value, so
models never observe the difference.  Identifiers may not contain `$`,
which reserves that character for desugar-generated temporaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import LexError
from .nodes import Pos

KEYWORDS = {
    "data", "def", "interface", "class", "implements",
    "if", "then", "else", "while", "return", "skip", "suspend",
    "await", "duration", "new", "get", "case",
    "this", "now", "deadline", "destiny", "null", "True", "False",
}

# longest first so two-char operators win
OPERATORS = [
    "==", "!=", "<=", ">=", "&&", "||", "=>",
    "(", ")", "{", "}", "[", "]", "<", ">",
    ",", ";", ":", "=", "!", "?", ".", "+", "-", "*", "/", "|", "_",
]


@dataclass(frozen=True)
class Token:
    kind: str  # name | int | rat | string | kw | op | eof
    text: str
    pos: Pos
    value: object = None


def tokenize(source: str, filename: str | None = None) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def here() -> Pos:
        return Pos(line, col, filename)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                advance(1)
            continue
        if source.startswith("/*", i):
            start = here()
            advance(2)
            while i < n and not source.startswith("*/", i):
                advance(1)
            if i >= n:
                raise LexError("unterminated block comment", start)
            advance(2)
            continue
        if ch.isdigit():
            start = here()
            j = i
            while j < n and source[j].isdigit():
                j += 1
            numerator = int(source[i:j])
            advance(j - i)
            if i < n and source[i] == "/" and i + 1 < n and source[i + 1].isdigit():
                advance(1)
                j = i
                while j < n and source[j].isdigit():
                    j += 1
                denominator = int(source[i:j])
                text = f"{numerator}/{source[i:j]}"
                advance(j - i)
                if denominator == 0:
                    raise LexError("zero denominator in rational literal", start)
                tokens.append(Token("rat", text, start, Fraction(numerator, denominator)))
            else:
                tokens.append(Token("int", str(numerator), start, Fraction(numerator)))
            continue
        if ch.isalpha() or ch == "_":
            start = here()
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            advance(j - i)
            if word == "_":
                tokens.append(Token("op", "_", start))
            elif word in KEYWORDS:
                tokens.append(Token("kw", word, start))
            else:
                tokens.append(Token("name", word, start))
            continue
        if ch == '"':
            start = here()
            advance(1)
            chars: list[str] = []
            while True:
                if i >= n or source[i] == "\n":
                    raise LexError("unterminated string literal", start)
                c = source[i]
                if c == '"':
                    advance(1)
                    break
                if c == "\\":
                    if i + 1 >= n:
                        raise LexError("unterminated string literal", start)
                    esc = source[i + 1]
                    mapped = {"\\": "\\", '"': '"', "n": "\n", "t": "\t"}.get(esc)
                    if mapped is None:
                        raise LexError(f"unknown escape \\{esc}", here())
                    chars.append(mapped)
                    advance(2)
                    continue
                chars.append(c)
                advance(1)
            text = "".join(chars)
            tokens.append(Token("string", text, start, text))
            continue
        matched = False
        for op in OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token("op", op, here()))
                advance(len(op))
                matched = True
                break
        if not matched:
            raise LexError(f"unexpected character {ch!r}", here())

    tokens.append(Token("eof", "", here()))
    return tokens
