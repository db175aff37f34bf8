"""Reader and writer for the plain TPDB problem format.

The format is a sequence of parenthesized sections.  VAR declares variable
names, RULES holds `lhs -> rhs` pairs, COMMENT is free text, and STRATEGY
may request INNERMOST.  Identifiers are any run of characters outside
``( ) , " | \\ -`` and whitespace.  Undeclared nullary identifiers are
constants.  Names ending in "#", names of the form "c_<k>", and the padding
constant are reserved for the pair transformations and rejected on input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .terms import App, FunSym, PADDING_NAME, Rule, Term, Trs, Var, variables

SECTION_NAMES = ("VAR", "RULES", "COMMENT", "STRATEGY")

_IDENT_RE = re.compile(r'[^(),"|\\\s-]+')
_RESERVED_RE = re.compile(r".*#$|c_[0-9]+$")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Document:
    trs: Trs
    variables: frozenset
    strategy: str | None
    comments: tuple


@dataclass(frozen=True)
class _RawTerm:
    name: str
    args: tuple
    line: int
    col: int


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def location(self, pos: int | None = None) -> tuple[int, int]:
        if pos is None:
            pos = self.pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - self.text.rfind("\n", 0, pos)
        return line, col

    def error(self, message: str, pos: int | None = None) -> ParseError:
        return ParseError(message, *self.location(pos))

    def skip_space(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_space()
        return self.pos >= len(self.text)

    def peek(self) -> str:
        self.skip_space()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            got = self.peek() or "end of input"
            raise self.error(f"expected {ch!r}, found {got!r}")
        self.pos += 1

    def try_arrow(self) -> bool:
        if self.peek() == "-":
            if self.text[self.pos : self.pos + 2] != "->":
                raise self.error("stray '-' (did you mean '->'?)")
            self.pos += 2
            return True
        return False

    def ident(self) -> tuple[str, int, int]:
        self.skip_space()
        m = _IDENT_RE.match(self.text, self.pos)
        if not m:
            got = self.text[self.pos] if self.pos < len(self.text) else "end of input"
            raise self.error(f"expected identifier, found {got!r}")
        line, col = self.location()
        self.pos = m.end()
        return m.group(), line, col

    def raw_until_close(self) -> str:
        """Consume balanced text up to the closing paren of this section."""
        depth = 0
        start = self.pos
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "(":
                depth += 1
            elif ch == ")":
                if depth == 0:
                    return self.text[start : self.pos]
                depth -= 1
            self.pos += 1
        raise self.error("unterminated section")


def _check_name(name: str, line: int, col: int):
    if _RESERVED_RE.match(name) or name == PADDING_NAME:
        raise ParseError(f"reserved name {name!r}", line, col)


def _parse_raw_term(sc: _Scanner) -> _RawTerm:
    name, line, col = sc.ident()
    _check_name(name, line, col)
    args = []
    if sc.peek() == "(":
        sc.expect("(")
        if sc.peek() == ")":
            raise sc.error("empty argument list")
        args.append(_parse_raw_term(sc))
        while sc.peek() == ",":
            sc.expect(",")
            args.append(_parse_raw_term(sc))
        sc.expect(")")
    return _RawTerm(name, tuple(args), line, col)


def parse_document(text: str) -> Document:
    sc = _Scanner(text)
    declared_vars: dict[str, tuple[int, int]] = {}
    raw_rules: list[tuple[_RawTerm, _RawTerm]] = []
    comments: list[str] = []
    strategy: str | None = None
    seen_rules_section = False

    while not sc.at_end():
        sc.expect("(")
        name, line, col = sc.ident()
        if name not in SECTION_NAMES:
            raise ParseError(f"unknown section {name!r}", line, col)
        if name == "COMMENT":
            comments.append(sc.raw_until_close().strip())
            sc.expect(")")
            continue
        if name == "VAR":
            while sc.peek() != ")":
                v, vline, vcol = sc.ident()
                _check_name(v, vline, vcol)
                declared_vars.setdefault(v, (vline, vcol))
            sc.expect(")")
            continue
        if name == "STRATEGY":
            while sc.peek() != ")":
                word, wline, wcol = sc.ident()
                if word != "INNERMOST":
                    raise ParseError(f"unsupported strategy {word!r}", wline, wcol)
                strategy = word
            sc.expect(")")
            continue
        seen_rules_section = True
        while sc.peek() != ")":
            lhs = _parse_raw_term(sc)
            if not sc.try_arrow():
                raise sc.error("expected '->' after left-hand side")
            rhs = _parse_raw_term(sc)
            raw_rules.append((lhs, rhs))
        sc.expect(")")

    if not seen_rules_section:
        raise ParseError("missing RULES section", 1, 1)

    arities: dict[str, tuple[int, int, int]] = {}

    def scan_arities(raw: _RawTerm):
        if raw.name in declared_vars:
            if raw.args:
                raise ParseError(
                    f"variable {raw.name!r} used as function", raw.line, raw.col
                )
            return
        known = arities.get(raw.name)
        if known is None:
            arities[raw.name] = (len(raw.args), raw.line, raw.col)
        elif known[0] != len(raw.args):
            raise ParseError(
                f"symbol {raw.name!r} used with arities {known[0]}"
                f" and {len(raw.args)}",
                raw.line,
                raw.col,
            )
        for a in raw.args:
            scan_arities(a)

    for lhs, rhs in raw_rules:
        scan_arities(lhs)
        scan_arities(rhs)

    symbols = {
        name: FunSym(name, arity) for name, (arity, _, _) in arities.items()
    }

    def build(raw: _RawTerm) -> Term:
        if raw.name in declared_vars:
            return Var(raw.name)
        return App(symbols[raw.name], tuple(build(a) for a in raw.args))

    rules = []
    for lhs_raw, rhs_raw in raw_rules:
        lhs = build(lhs_raw)
        rhs = build(rhs_raw)
        if isinstance(lhs, Var):
            raise ParseError(
                "left-hand side is a variable", lhs_raw.line, lhs_raw.col
            )
        free = variables(rhs) - variables(lhs)
        if free:
            raise ParseError(
                f"free right-hand side variables: {', '.join(sorted(free))}",
                rhs_raw.line,
                rhs_raw.col,
            )
        rules.append(Rule(lhs, rhs))

    return Document(
        trs=Trs.from_rules(rules),
        variables=frozenset(declared_vars),
        strategy=strategy,
        comments=tuple(comments),
    )


def parse_trs(text: str) -> Trs:
    return parse_document(text).trs


def parse_term(text: str, trs: Trs) -> Term:
    """Parse a standalone term against a system's signature.

    Identifiers that are not symbols of the system become variables, so
    "app(xs,nil)" works without a separate VAR header.  Arities are
    checked against the signature.
    """
    sc = _Scanner(text)
    raw = _parse_raw_term(sc)
    if not sc.at_end():
        raise sc.error("trailing input after term")

    def build(node: _RawTerm) -> Term:
        try:
            sym = trs.symbol(node.name)
        except KeyError:
            if node.args:
                raise ParseError(
                    f"unknown symbol {node.name!r}", node.line, node.col
                ) from None
            return Var(node.name)
        if sym.arity != len(node.args):
            raise ParseError(
                f"symbol {node.name!r} expects {sym.arity} arguments,"
                f" got {len(node.args)}",
                node.line,
                node.col,
            )
        return App(sym, tuple(build(a) for a in node.args))

    return build(raw)


def _corpus_dir():
    return resources.files("rcterm").joinpath("corpus")


def corpus_names() -> list[str]:
    return sorted(
        entry.name[:-4]
        for entry in _corpus_dir().iterdir()
        if entry.name.endswith(".trs")
    )


def load_corpus(name: str) -> Trs:
    entry = _corpus_dir().joinpath(f"{name}.trs")
    if not entry.is_file():
        raise KeyError(f"no bundled system named {name!r}")
    return parse_trs(entry.read_text("utf-8"))


def render_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.sym.name
    return f"{t.sym.name}({','.join(render_term(a) for a in t.args)})"


def render_trs(trs: Trs) -> str:
    names: set[str] = set()
    for rule in trs.rules:
        names |= variables(rule.lhs) | variables(rule.rhs)
    var_sec = "(VAR " + " ".join(sorted(names)) + ")"
    if not trs.rules:
        return var_sec + " (RULES )"
    body = "\n".join(
        f"  {render_term(r.lhs)} -> {render_term(r.rhs)}" for r in trs.rules
    )
    return f"{var_sec}\n(RULES\n{body}\n)"
