"""ConfScript lexer."""

from __future__ import annotations

from dataclasses import dataclass

from ..diagnostics import ConfScriptError, Diagnostic

KEYWORDS = {
    "config", "input", "extern", "pure", "benign", "fn", "in", "enum",
    "bool", "int", "if", "else", "while", "bound", "cost", "return",
    "true", "false",
}

PUNCT = (
    "->", ":=", "==", "!=", "<=", ">=", "&&", "||",
    ";", ":", ",", "(", ")", "{", "}", "[", "]",
    "<", ">", "+", "-", "*", "!", "=",
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "keyword", "int", punctuation literal, "eof"
    text: str
    line: int
    col: int

    @property
    def pos(self) -> tuple[int, int]:
        return (self.line, self.col)


def tokenize(source: str, file_name: str = "<string>") -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            kind = "keyword" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, line, col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("int", source[i:j], line, col))
            col += j - i
            i = j
            continue
        for p in PUNCT:
            if source.startswith(p, i):
                tokens.append(Token(p, p, line, col))
                col += len(p)
                i += len(p)
                break
        else:
            raise ConfScriptError([
                Diagnostic(file_name, line, col, "error", f"unexpected character {c!r}")
            ])
    tokens.append(Token("eof", "", line, col))
    return tokens
