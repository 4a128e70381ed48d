"""Recursive-descent parser for the concrete formula syntax.

Grammar (loosest binding first)::

    iff     := imp ('<->' imp)*
    imp     := or ('->' imp)?
    or      := and ('|' and)*
    and     := unary ('&' unary)*
    unary   := '!' unary | 'X' unary | '[]' unary | '<>' unary
             | ('K' | 'Khat') '[' ag ']' unary
             | ('C' | 'D' | 'Dhat') '[' ags ']' unary
             | primary
    primary := 'true' | 'false' | name '@' ag | name
             | '#' name ('[' param ']')? '(' ags ')'
             | 'dead(' ags ')' | 'alive(' ags ')' | '(' iff ')'
"""

from __future__ import annotations

import re

from . import ast as A

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<vpred>\#(?P<vname>[A-Za-z_]\w*)(?:\[(?P<vparam>[^\]]*)\])?)
  | (?P<op><->|->|<>|[!&|()\[\],@])
  | (?P<name>[A-Za-z0-9_][\w.]*)
    """,
    re.VERBOSE,
)

KEYWORDS = {"true", "false", "X", "K", "Khat", "C", "D", "Dhat", "dead", "alive"}


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}: {text[:pos]}<here>{text[pos:]}")


def tokenize(text: str) -> list[tuple[str, str, int, tuple]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        if m.group("vpred"):
            out.append(("vpred", m.group(0), pos, (m.group("vname"), m.group("vparam"))))
        elif m.group("op"):
            out.append(("op", m.group("op"), pos, ()))
        elif m.group("name"):
            out.append(("name", m.group("name"), pos, ()))
        pos = m.end()
    out.append(("eof", "", len(text), ()))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k: int = 1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def fail(self, msg: str):
        raise ParseError(msg, self.tok[2], self.text)

    def accept(self, value: str) -> bool:
        if self.tok[1] == value and self.tok[0] != "eof":
            self.i += 1
            return True
        return False

    def expect(self, value: str):
        if not self.accept(value):
            got = self.tok[1] or "end of input"
            self.fail(f"expected {value!r}, got {got!r}")

    def agent(self) -> str:
        kind, val, _, _ = self.tok
        if kind != "name":
            self.fail("expected an agent name")
        self.i += 1
        return val

    def agents(self, close: str) -> tuple[str, ...]:
        out = [self.agent()]
        while self.accept(","):
            out.append(self.agent())
        self.expect(close)
        return A.agset(out)

    def parse(self) -> A.Formula:
        phi = self.iff()
        if self.tok[0] != "eof":
            self.fail(f"unexpected {self.tok[1]!r}")
        return phi

    def iff(self):
        phi = self.imp()
        while self.accept("<->"):
            phi = A.Iff(phi, self.imp())
        return phi

    def imp(self):
        phi = self.or_()
        if self.accept("->"):
            return A.Implies(phi, self.imp())
        return phi

    def or_(self):
        phi = self.and_()
        while self.accept("|"):
            phi = A.Or(phi, self.and_())
        return phi

    def and_(self):
        phi = self.unary()
        while self.accept("&"):
            phi = A.And(phi, self.unary())
        return phi

    def unary(self):
        kind, val, _, _ = self.tok
        if self.accept("!"):
            return A.Not(self.unary())
        if self.accept("<>"):
            return A.Diamond(self.unary())
        if val == "[" and self.peek()[1] == "]":
            self.i += 2
            return A.Box(self.unary())
        if kind == "name" and val == "X":
            self.i += 1
            return A.Next(self.unary())
        if kind == "name" and val in ("K", "Khat"):
            self.i += 1
            self.expect("[")
            ag = self.agent()
            self.expect("]")
            return (A.K if val == "K" else A.Khat)(ag, self.unary())
        if kind == "name" and val in ("C", "D", "Dhat"):
            self.i += 1
            self.expect("[")
            ags = self.agents("]")
            return {"C": A.C, "D": A.D, "Dhat": A.Dhat}[val](ags, self.unary())
        return self.primary()

    def primary(self):
        kind, val, _, extra = self.tok
        if self.accept("("):
            phi = self.iff()
            self.expect(")")
            return phi
        if kind == "vpred":
            self.i += 1
            self.expect("(")
            name, param = extra
            return A.ValuePred(name, self.agents(")"), param)
        if kind != "name":
            self.fail(f"expected a formula, got {val or 'end of input'!r}")
        if val in ("true", "false"):
            self.i += 1
            return A.Const(val == "true")
        if val in ("dead", "alive"):
            self.i += 1
            self.expect("(")
            ags = self.agents(")")
            if val == "dead":
                return A.dead_set(ags)
            return A.alive(ags[0]) if len(ags) == 1 else A.alive_set(ags)
        if val in KEYWORDS:
            self.fail(f"{val!r} is reserved")
        self.i += 1
        if self.accept("@"):
            return A.Atom(val, self.agent())
        return A.Atom(val)


def parse(text: str) -> A.Formula:
    return _Parser(text).parse()
