"""Model formulas: ``response ~ term + term ...`` where a term is a column
name or a ``:``-joined interaction, and ``a*b`` expands to ``a + b + a:b``."""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Tuple

from ..errors import FormulaError

Term = Tuple[str, ...]

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_.]*)|(?P<one>1)|(?P<op>[~+:*]))")


@dataclass(frozen=True)
class Formula:
    response: str
    terms: Tuple[Term, ...]

    @property
    def columns(self):
        seen = []
        for term in self.terms:
            for name in term:
                if name not in seen:
                    seen.append(name)
        return tuple(seen)

    def without(self, term: Term) -> "Formula":
        return Formula(self.response, tuple(t for t in self.terms if t != term))

    def __str__(self):
        return render_formula(self)


def term_label(term: Term) -> str:
    return ":".join(term)


def render_formula(formula: Formula) -> str:
    rhs = " + ".join(term_label(t) for t in formula.terms) or "1"
    return f"{formula.response} ~ {rhs}"


def _tokenize(text):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise FormulaError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, columns):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.columns = None
        if columns is not None:
            self.columns = {c.lower(): c for c in columns}

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, value, pos = self.take()
        if kind != "op" or value != op:
            found = "end of formula" if kind == "end" else repr(value)
            raise FormulaError(f"expected {op!r}, found {found}", pos)

    def name(self):
        kind, value, pos = self.take()
        if kind != "name":
            found = "end of formula" if kind == "end" else repr(value)
            raise FormulaError(f"expected a column name, found {found}", pos)
        if self.columns is not None:
            try:
                return self.columns[value.lower()], pos
            except KeyError:
                raise FormulaError(f"unknown column {value!r}", pos) from None
        return value, pos

    def interaction(self):
        names = []
        name, pos = self.name()
        names.append(name)
        while self.peek()[:2] == ("op", ":"):
            self.take()
            name, npos = self.name()
            if name in names:
                raise FormulaError(f"column {name!r} repeated within an interaction", npos)
            names.append(name)
        return tuple(names), pos

    def product(self):
        factors = [self.interaction()]
        while self.peek()[:2] == ("op", "*"):
            self.take()
            factors.append(self.interaction())
        if len(factors) == 1:
            return [factors[0]]
        expanded = []
        for size in range(1, len(factors) + 1):
            for combo in combinations(factors, size):
                names = []
                for part, _ in combo:
                    names.extend(n for n in part if n not in names)
                expanded.append((tuple(names), combo[-1][1]))
        return expanded

    def parse(self):
        response, _ = self.name()
        self.expect_op("~")
        terms = []
        seen = {}
        if self.peek()[0] == "one":
            self.take()
            if self.peek()[0] != "end":
                if self.peek()[:2] != ("op", "+"):
                    raise FormulaError("expected '+' after intercept", self.peek()[2])
                self.take()
            else:
                return Formula(response, ())
        while True:
            for term, pos in self.product():
                key = frozenset(term)
                if key in seen:
                    raise FormulaError(f"duplicate term {term_label(term)!r}", pos)
                if response in term:
                    raise FormulaError(f"response {response!r} used as a predictor", pos)
                seen[key] = term
                terms.append(term)
            kind, value, pos = self.peek()
            if kind == "end":
                break
            if (kind, value) != ("op", "+"):
                raise FormulaError(f"expected '+' or end of formula, found {value!r}", pos)
            self.take()
        return Formula(response, tuple(terms))


def parse_formula(text: str, columns: Optional[Iterable[str]] = None) -> Formula:
    """Parse formula text; names resolve case-insensitively against `columns`."""
    if not text or not text.strip():
        raise FormulaError("empty formula", 0)
    return _Parser(text, columns).parse()
