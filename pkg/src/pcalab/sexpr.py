"""Minimal s-expression reader/writer shared by the term and program syntaxes."""

import re

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


class SexprError(ValueError):
    pass


def read(text: str):
    """Parse one s-expression into nested lists of atoms (str or int)."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SexprError(f"bad character at {pos}")
        pos = m.end()
        tokens.append(m.group(1) or m.group(2) or m.group(3))
        while pos < len(text) and text[pos].isspace():
            pos += 1
    if not tokens:
        raise SexprError("empty input")
    stack = [[]]
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise SexprError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(int(tok) if tok.isdigit() else tok)
    if len(stack) != 1:
        raise SexprError("unbalanced '('")
    if len(stack[0]) != 1:
        raise SexprError("expected exactly one expression")
    return stack[0][0]


def write(node) -> str:
    if isinstance(node, list):
        return "(" + " ".join(write(x) for x in node) + ")"
    return str(node)
