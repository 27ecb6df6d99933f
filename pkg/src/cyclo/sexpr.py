"""A small s-expression reader/writer with source positions.

Atoms are :class:`Sym` (a ``str`` carrying ``line``/``col``); lists are
:class:`SList`. ``;`` starts a line comment. Double-quoted strings are read
as symbols with ``quoted`` set.
"""

from __future__ import annotations


class SexprError(ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(where + message)


class Sym(str):
    line: int = 0
    col: int = 0
    quoted: bool = False

    def __new__(cls, value: str, line: int = 0, col: int = 0, quoted: bool = False):
        obj = super().__new__(cls, value)
        obj.line, obj.col, obj.quoted = line, col, quoted
        return obj


class SList(list):
    line: int = 0
    col: int = 0

    def __init__(self, items=(), line: int = 0, col: int = 0):
        super().__init__(items)
        self.line, self.col = line, col


_DELIMS = set("();\"")


def read_all(text: str) -> list:
    """Parse every top-level form in ``text``."""
    forms = []
    stack: list[SList] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def emit(x):
        if stack:
            stack[-1].append(x)
        else:
            forms.append(x)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "(":
            stack.append(SList(line=line, col=col))
            i, col = i + 1, col + 1
            continue
        if ch == ")":
            if not stack:
                raise SexprError("unbalanced ')'", line, col)
            done = stack.pop()
            emit(done)
            i, col = i + 1, col + 1
            continue
        if ch == '"':
            start_line, start_col = line, col
            j = i + 1
            buf = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n:
                    j += 1
                if text[j] == "\n":
                    line, col = line + 1, 0
                buf.append(text[j])
                j += 1
                col += 1
            if j >= n:
                raise SexprError("unterminated string", start_line, start_col)
            emit(Sym("".join(buf), start_line, start_col, quoted=True))
            col += 2
            i = j + 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in _DELIMS:
            j += 1
        emit(Sym(text[i:j], line, col))
        col += j - i
        i = j

    if stack:
        open_ = stack[-1]
        raise SexprError("unclosed '('", open_.line, open_.col)
    return forms


def _atom_text(x: str) -> str:
    quoted = getattr(x, "quoted", False)
    if quoted or x == "" or any(c.isspace() or c in _DELIMS for c in x):
        return '"' + x.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return x


def dumps(x, indent: int | None = None, _level: int = 0) -> str:
    """Write an s-expression. Nested lists (str atoms, list lists).

    With ``indent`` set, a list whose flat form exceeds 72 columns is split
    one element per line.
    """
    if isinstance(x, str):
        return _atom_text(x)
    flat = "(" + " ".join(dumps(e) for e in x) + ")"
    if indent is None or len(flat) + _level * indent <= 72 or len(x) < 2:
        return flat
    pad = " " * ((_level + 1) * indent)
    k = 1
    while k < len(x) and isinstance(x[k], str):
        k += 1
    head = " ".join(dumps(e) for e in x[:k])
    parts = [dumps(e, indent, _level + 1) for e in x[k:]]
    return "(" + head + "".join("\n" + pad + p for p in parts) + ")"
