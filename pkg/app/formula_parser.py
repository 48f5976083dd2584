"""Parser for the ASCII formula syntax produced by ``logic.render``."""
import re
from typing import Optional

from algebra import DegreeError, parse_degree
from logic import (And, ConstImplies, Diamond, DistAnd, DistConstImplies, DistFormula,
                   DistImpliesConst, ImpliesConst, Lift, StateFormula, TensorConst, TOP)

_TOKEN_RE = re.compile(r"->|lift\b|[()&*<>]|\d+(?:\.\d+)?(?:/\d+)?|T\b")
_DEGREE_RE = re.compile(r"\d")


class FormulaParseError(ValueError):
    """A formula does not follow the grammar; ``column`` is 1-based."""

    def __init__(self, message: str, column: int):
        super().__init__(f"column {column}: {message}")
        self.column = column


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    # -- Lexing --

    def _skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def error(self, message: str) -> FormulaParseError:
        return FormulaParseError(message, self.pos + 1)

    def peek(self) -> Optional[str]:
        self._skip_ws()
        m = _TOKEN_RE.match(self.text, self.pos)
        return m.group(0) if m else None

    def take(self, expected: Optional[str] = None) -> str:
        tok = self.peek()
        if tok is None:
            found = repr(self.text[self.pos]) if self.pos < len(self.text) else "end of input"
            raise self.error(f"unexpected {found}")
        if expected is not None and tok != expected:
            raise self.error(f"expected '{expected}', found '{tok}'")
        self.pos += len(tok)
        return tok

    def degree(self):
        self._skip_ws()
        start = self.pos
        tok = self.take()
        if not _DEGREE_RE.match(tok):
            self.pos = start
            raise self.error(f"expected a degree, found '{tok}'")
        try:
            return parse_degree(tok)
        except DegreeError as exc:
            self.pos = start
            raise self.error(str(exc)) from None

    def label(self) -> str:
        self.take("<")
        end = self.text.find(">", self.pos)
        if end < 0:
            raise self.error("unterminated label, missing '>'")
        name = self.text[self.pos:end].strip()
        if not name or any(ch.isspace() for ch in name):
            raise self.error("malformed label")
        self.pos = end + 1
        return name

    # -- Grammar --

    def state(self) -> StateFormula:
        tok = self.peek()
        if tok == "T":
            self.take()
            return TOP
        if tok == "<":
            name = self.label()
            return Diamond(name, self.dist())
        if tok == "(":
            self.take("(")
            if _DEGREE_RE.match(self.peek() or ""):
                c = self.degree()
                self.take("->")
                out = ConstImplies(c, self.state())
            else:
                body = self.state()
                op = self.take()
                if op == "&":
                    out = And(body, self.state())
                elif op == "->":
                    out = ImpliesConst(body, self.degree())
                elif op == "*":
                    out = TensorConst(body, self.degree())
                else:
                    self.pos -= len(op)
                    raise self.error(f"expected '&', '->' or '*', found '{op}'")
            self.take(")")
            return out
        raise self.error("expected a state formula")

    def dist(self) -> DistFormula:
        tok = self.peek()
        if tok == "lift":
            self.take()
            self.take("(")
            body = self.state()
            self.take(")")
            return Lift(body)
        if tok == "(":
            self.take("(")
            if _DEGREE_RE.match(self.peek() or ""):
                c = self.degree()
                self.take("->")
                out = DistConstImplies(c, self.dist())
            else:
                body = self.dist()
                op = self.take()
                if op == "&":
                    out = DistAnd(body, self.dist())
                elif op == "->":
                    out = DistImpliesConst(body, self.degree())
                else:
                    self.pos -= len(op)
                    raise self.error(f"expected '&' or '->', found '{op}'")
            self.take(")")
            return out
        raise self.error("expected a distribution formula")

    def finish(self) -> None:
        self._skip_ws()
        if self.pos != len(self.text):
            raise self.error(f"trailing input '{self.text[self.pos:]}'")


def parse_formula(text: str) -> StateFormula:
    """Parse a state formula."""
    p = _Parser(text)
    out = p.state()
    p.finish()
    return out


def parse_dist_formula(text: str) -> DistFormula:
    """Parse a distribution formula."""
    p = _Parser(text)
    out = p.dist()
    p.finish()
    return out
