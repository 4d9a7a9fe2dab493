"""Reader and printer for the structure and formula text formats.

Structures::

    structure name {
        universe 3;             # or: universe { 0 2 5 };
        rel R/2 { (0,1) (0,2) }
        const c = 0;
    }

Formulas::

    top | bot | P(x, c) | x = y | not F | and { F* } | or { F* }
    exists x . F | all x . F
    splitall (x0 x1) { {} -> F; {0 1} -> G; else -> H; }
    splitex  (x0 x1) { ... }

``#`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .core import Structure, Vocabulary
from .errors import InvalidFormula, OutOfUniverse, SemanticError, SourceSyntaxError, WidthExceeded
from .logic import (
    BOT,
    TOP,
    And,
    Atom,
    Const,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    SplitExists,
    SplitForall,
    Var,
    indices_mask,
    mask_indices,
)

KEYWORDS = {
    "structure", "universe", "rel", "const", "top", "bot", "not", "and", "or",
    "exists", "all", "splitall", "splitex", "else",
}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<arrow>->)
  | (?P<punct>[{}(),;./=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class SourceText:
    text: str
    origin: str = "<string>"

    @classmethod
    def from_path(cls, path) -> "SourceText":
        p = Path(path)
        return cls(p.read_text(encoding="utf-8"), str(p))


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    column: int


def tokenize(src: SourceText) -> list[Token]:
    out = []
    line, col, pos = 1, 1, 0
    text = src.text
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise SourceSyntaxError(f"unexpected character {text[pos]!r}", src.origin, line, col)
        kind = m.lastgroup
        value = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind != "ws":
                if kind == "ident" and value in KEYWORDS:
                    kind = "kw"
                out.append(Token(kind, value, line, col))
            col += len(value)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


class _Parser:
    def __init__(self, src: SourceText):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0

    # token helpers
    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value: str) -> bool:
        t = self.peek()
        return t.kind in ("kw", "punct", "arrow") and t.value == value

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value: str) -> Token:
        t = self.peek()
        if not self.at(value):
            self.syntax(f"expected {value!r}, found {t.value or 'end of input'!r}", t)
        return self.advance()

    def accept(self, value: str) -> bool:
        if self.at(value):
            self.advance()
            return True
        return False

    def ident(self, what: str = "identifier") -> Token:
        t = self.peek()
        if t.kind != "ident":
            self.syntax(f"expected {what}, found {t.value or 'end of input'!r}", t)
        return self.advance()

    def nat(self) -> int:
        t = self.peek()
        if t.kind != "num":
            self.syntax(f"expected a natural number, found {t.value or 'end of input'!r}", t)
        return int(self.advance().value)

    def syntax(self, msg: str, t: Token):
        raise SourceSyntaxError(msg, self.src.origin, t.line, t.column)

    def semantic(self, msg: str, t: Token):
        raise SemanticError(msg, self.src.origin, t.line, t.column)

    # structures
    def structure(self) -> tuple[str | None, Structure]:
        start = self.expect("structure")
        name = self.advance().value if self.peek().kind == "ident" else None
        self.expect("{")
        universe = None
        rels: dict[str, tuple[int, list, Token]] = {}
        consts: dict[str, tuple[int, Token]] = {}
        while not self.at("}"):
            t = self.peek()
            if self.accept("universe"):
                if universe is not None:
                    self.semantic("universe declared twice", t)
                if self.accept("{"):
                    elems = []
                    while not self.at("}"):
                        elems.append(self.nat())
                        self.accept(",")
                    self.expect("}")
                    if len(set(elems)) != len(elems):
                        self.semantic("repeated element in universe", t)
                    universe = elems
                else:
                    n = self.nat()
                    universe = list(range(n))
                if not universe:
                    self.semantic("universe must be nonempty", t)
                self.expect(";")
            elif self.accept("rel"):
                rname = self.ident("relation name")
                self.expect("/")
                arity = self.nat()
                if arity < 1:
                    self.semantic("arity must be at least 1", rname)
                if rname.value in rels or rname.value in consts:
                    self.semantic(f"symbol {rname.value} declared twice", rname)
                self.expect("{")
                tuples = []
                while self.at("("):
                    tt = self.expect("(")
                    tup = [self.nat()]
                    while self.accept(","):
                        tup.append(self.nat())
                    self.expect(")")
                    if len(tup) != arity:
                        self.semantic(f"tuple {tuple(tup)} has arity {len(tup)}, {rname.value} has {arity}", tt)
                    tuples.append((tuple(tup), tt))
                    self.accept(",")
                self.expect("}")
                self.accept(";")
                rels[rname.value] = (arity, tuples, rname)
            elif self.accept("const"):
                cname = self.ident("constant name")
                if cname.value in rels or cname.value in consts:
                    self.semantic(f"symbol {cname.value} declared twice", cname)
                self.expect("=")
                consts[cname.value] = (self.nat(), cname)
                self.expect(";")
            else:
                self.syntax(f"expected universe, rel or const, found {t.value or 'end of input'!r}", t)
        self.expect("}")
        if universe is None:
            self.semantic("structure without universe", start)
        elems = set(universe)
        for rname, (_, tuples, _) in rels.items():
            for tup, tt in tuples:
                bad = [e for e in tup if e not in elems]
                if bad:
                    self.semantic(f"element {bad[0]} of {rname}{tup} out of range", tt)
        for cname, (e, ct) in consts.items():
            if e not in elems:
                self.semantic(f"constant {cname} = {e} out of range", ct)
        vocab = Vocabulary(tuple((n, a) for n, (a, _, _) in rels.items()), tuple(consts))
        try:
            st = Structure.build(
                vocab,
                universe,
                {n: [tup for tup, _ in ts] for n, (_, ts, _) in rels.items()},
                {n: e for n, (e, _) in consts.items()},
            )
        except (ValueError, OutOfUniverse) as exc:
            self.semantic(str(exc), start)
        return name, st

    # formulas
    def formula(self, vocab: Vocabulary | None, bound: frozenset) -> Formula:
        t = self.peek()
        if t.kind == "kw":
            kw = t.value
            if kw == "top":
                self.advance()
                return TOP
            if kw == "bot":
                self.advance()
                return BOT
            if kw == "not":
                self.advance()
                return Not(self.formula(vocab, bound))
            if kw in ("and", "or"):
                self.advance()
                self.expect("{")
                subs = []
                while not self.at("}"):
                    if self.peek().kind == "eof":
                        self.syntax("unterminated junction", t)
                    subs.append(self.formula(vocab, bound))
                self.expect("}")
                return (And if kw == "and" else Or)(subs)
            if kw in ("exists", "all"):
                self.advance()
                v = self.variable(vocab)
                self.expect(".")
                body = self.formula(vocab, bound | {v.value})
                return (Exists if kw == "exists" else Forall)(v.value, body)
            if kw in ("splitall", "splitex"):
                return self.split(vocab, bound, kw)
            self.syntax(f"unexpected keyword {kw!r}", t)
        if t.kind == "ident" and self.peek(1).kind == "punct" and self.peek(1).value == "(":
            return self.relation_atom(vocab)
        if t.kind == "ident":
            left = self.term(vocab)
            self.expect("=")
            right = self.term(vocab)
            return Atom("=", (left, right))
        self.syntax(f"expected a formula, found {t.value or 'end of input'!r}", t)

    def variable(self, vocab: Vocabulary | None) -> Token:
        v = self.ident("variable")
        if vocab is not None and (v.value in vocab.constants or vocab.has_relation(v.value)):
            self.semantic(f"cannot bind {v.value}: it is a vocabulary symbol", v)
        return v

    def term(self, vocab: Vocabulary | None):
        t = self.ident("term")
        if vocab is not None:
            if vocab.has_relation(t.value):
                self.semantic(f"relation {t.value} used as a term", t)
            if t.value in vocab.constants:
                return Const(t.value)
        return Var(t.value)

    def relation_atom(self, vocab: Vocabulary | None) -> Atom:
        name = self.advance()
        if vocab is not None and not vocab.has_relation(name.value):
            self.semantic(f"unknown relation {name.value}", name)
        self.expect("(")
        args = [self.term(vocab)]
        while self.accept(","):
            args.append(self.term(vocab))
        self.expect(")")
        if vocab is not None and vocab.arity(name.value) != len(args):
            self.semantic(f"{name.value} has arity {vocab.arity(name.value)}, got {len(args)} arguments", name)
        return Atom(name.value, args)

    def split(self, vocab: Vocabulary | None, bound: frozenset, kw: str) -> Formula:
        head = self.advance()
        self.expect("(")
        names = []
        while not self.at(")"):
            names.append(self.variable(vocab).value)
        self.expect(")")
        m = len(names)
        if m == 0:
            self.syntax("split binds no variables", head)
        if len(set(names)) != m:
            self.semantic("repeated variable in split", head)
        inner = bound | set(names)
        self.expect("{")
        entries: dict[int, Formula] = {}
        default = None
        while not self.at("}"):
            t = self.peek()
            if self.accept("else"):
                self.expect("->")
                default = self.formula(vocab, inner)
                self.accept(";")
                break
            self.expect("{")
            idx = []
            while not self.at("}"):
                it = self.peek()
                k = self.nat()
                if k >= m:
                    self.semantic(f"index {k} out of range for {m} variables", it)
                idx.append(k)
            self.expect("}")
            mask = indices_mask(idx)
            if len(set(idx)) != len(idx) or mask in entries:
                self.semantic("subset listed twice", t)
            self.expect("->")
            entries[mask] = self.formula(vocab, inner)
            if not self.at("}"):
                self.expect(";")
        self.expect("}")
        table = []
        for mask in range(1 << m):
            if mask in entries:
                table.append(entries[mask])
            elif default is not None:
                table.append(default)
            else:
                self.semantic(f"missing entry for subset {{{' '.join(map(str, mask_indices(mask)))}}}", head)
        cls = SplitForall if kw == "splitall" else SplitExists
        try:
            return cls(names, table)
        except (InvalidFormula, WidthExceeded) as exc:
            self.semantic(str(exc), head)


def _as_source(src) -> SourceText:
    return src if isinstance(src, SourceText) else SourceText(str(src))


def parse_structure(src) -> Structure:
    p = _Parser(_as_source(src))
    _, st = p.structure()
    if p.peek().kind != "eof":
        p.syntax("trailing input after structure", p.peek())
    return st


def parse_corpus(src) -> list[tuple[str | None, Structure]]:
    """A sequence of (optionally named) structure blocks."""
    p = _Parser(_as_source(src))
    out = []
    while p.peek().kind != "eof":
        out.append(p.structure())
    return out


def parse_formula(src, vocab: Vocabulary | None = None) -> Formula:
    p = _Parser(_as_source(src))
    phi = p.formula(vocab, frozenset())
    if p.peek().kind != "eof":
        p.syntax(f"trailing input {p.peek().value!r}", p.peek())
    return phi


def parse_formulas(src, vocab: Vocabulary | None = None) -> list[Formula]:
    """Zero or more formulas in sequence (the grammar is prefix, so no
    separator is needed)."""
    p = _Parser(_as_source(src))
    out = []
    while p.peek().kind != "eof":
        out.append(p.formula(vocab, frozenset()))
    return out


# -- printing ---------------------------------------------------------------


def _subset(mask: int) -> str:
    idx = mask_indices(mask)
    return "{" + " ".join(map(str, idx)) + "}"


def render(phi: Formula, indent: int | None = None) -> str:
    """Concrete syntax for ``phi``; with ``indent`` nested blocks go on
    their own lines."""
    out: list[str] = []
    _render(phi, out, indent, 0)
    return "".join(out)


def _nl(out, indent, depth):
    if indent is None:
        out.append(" ")
    else:
        out.append("\n" + " " * (indent * depth))


def _render(phi: Formula, out: list[str], indent, depth) -> None:
    if isinstance(phi, Atom):
        if phi.pred == "=":
            out.append(f"{phi.args[0]} = {phi.args[1]}")
        else:
            out.append(f"{phi.pred}({', '.join(map(str, phi.args))})")
    elif isinstance(phi, Not):
        out.append("not ")
        _render(phi.sub, out, indent, depth)
    elif isinstance(phi, (And, Or)):
        if not phi.subs:
            out.append("top" if isinstance(phi, And) else "bot")
            return
        out.append("and {" if isinstance(phi, And) else "or {")
        for s in phi.subs:
            _nl(out, indent, depth + 1)
            _render(s, out, indent, depth + 1)
        _nl(out, indent, depth)
        out.append("}")
    elif isinstance(phi, (Exists, Forall)):
        out.append(f"{'exists' if isinstance(phi, Exists) else 'all'} {phi.var} . ")
        _render(phi.sub, out, indent, depth)
    elif isinstance(phi, (SplitForall, SplitExists)):
        kw = "splitall" if isinstance(phi, SplitForall) else "splitex"
        out.append(f"{kw} ({' '.join(phi.bound)}) {{")
        counts = Counter(phi.table)
        default, freq = counts.most_common(1)[0]
        use_default = freq > 1
        for mask, entry in enumerate(phi.table):
            if use_default and entry == default:
                continue
            _nl(out, indent, depth + 1)
            out.append(f"{_subset(mask)} -> ")
            _render(entry, out, indent, depth + 1)
            out.append(";")
        if use_default:
            _nl(out, indent, depth + 1)
            out.append("else -> ")
            _render(default, out, indent, depth + 1)
            out.append(";")
        _nl(out, indent, depth)
        out.append("}")
    else:
        raise TypeError(f"not a formula: {phi!r}")


def render_structure(M: Structure, name: str | None = None) -> str:
    lines = [f"structure {name} {{" if name else "structure {"]
    if M.is_dense():
        lines.append(f"  universe {M.size};")
    else:
        lines.append(f"  universe {{ {' '.join(map(str, M.universe))} }};")
    for (rname, arity), tuples in zip(M.vocab.relations, M.rels):
        body = " ".join("(" + ",".join(map(str, t)) + ")" for t in sorted(tuples))
        lines.append(f"  rel {rname}/{arity} {{ {body} }}" if body else f"  rel {rname}/{arity} {{ }}")
    for cname, e in zip(M.vocab.constants, M.consts):
        lines.append(f"  const {cname} = {e};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_corpus(named: list[tuple[str, Structure]]) -> str:
    return "\n".join(render_structure(M, name) for name, M in named)
