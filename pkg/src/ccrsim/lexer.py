"""Tokenizer for CCRScript source files.

`//` starts a line comment.  String literals use double quotes and may not
span lines; the stored lexeme is the literal's content without the quotes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import LexError

KEYWORDS = frozenset({"robot", "let", "proc", "repeat"})
PUNCT = frozenset("(){},;=+-*/")

IDENTIFIER = "identifier"
NUMBER = "number"
STRING = "string"
PUNCTUATION = "punctuation"
KEYWORD = "keyword"


@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str
    line: int
    column: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == '"':
            j = i + 1
            while j < n and source[j] not in '"\n':
                j += 1
            if j >= n or source[j] != '"':
                raise LexError("unterminated string literal", start_line, start_col)
            tokens.append(Token(STRING, source[i + 1:j], start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (source[j].isdigit() or (source[j] == "." and not seen_dot)):
                seen_dot = seen_dot or source[j] == "."
                j += 1
            tokens.append(Token(NUMBER, source[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            kind = KEYWORD if word in KEYWORDS else IDENTIFIER
            tokens.append(Token(kind, word, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch in PUNCT:
            tokens.append(Token(PUNCTUATION, ch, start_line, start_col))
            i += 1
            col += 1
            continue
        raise LexError(f"invalid character {ch!r}", start_line, start_col)
    return tokens


def detokenize(tokens) -> str:
    """Source-equivalent text: quoting restored, tokens space-separated."""
    parts = []
    for tok in tokens:
        if tok.kind == STRING:
            parts.append(f'"{tok.lexeme}"')
        else:
            parts.append(tok.lexeme)
    return " ".join(parts)
