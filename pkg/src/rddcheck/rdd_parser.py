"""Lexer and recursive-descent parser for RDD documents.

Keywords are case-sensitive upper-case. Prefixed names resolve to absolute
IRIs during parsing; every AST node carries its source location. The parser
also records which grammar productions fired (grammar-coverage testing).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .rdd_ast import (
    ClassConstraint,
    ClassSection,
    ConstraintAtom,
    DomainAtom,
    Key,
    KeyProp,
    Loc,
    MaxAtom,
    MinAtom,
    PartialAtom,
    PathAtom,
    PropEntry,
    PropSection,
    RangeAtom,
    RangeType,
    RddDocument,
    SubPropertyAtom,
    TotalAtom,
)
from .rdf_store import check_absolute_iri

KEYWORDS = frozenset(
    {
        "PREFIX", "OWA", "CWA", "CLASSES", "PROPERTIES", "CLASS", "SUBCLASS",
        "SINGLETON", "KEY", "MIN", "MAX", "DOMAIN", "RANGE", "PATH",
        "SUBPROPERTY", "PARTIAL", "TOTAL", "IRI", "BNODE", "RESOURCE", "LITERAL",
    }
)

MAX_CARDINALITY = 2**16

# subset of SPARQL's PrefixedName: no percent escapes, no ':' inside local names
_PREFIX_RE = re.compile(r"[A-Za-z][A-Za-z0-9_\-]*")
_LOCAL_RE = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_.\-]*")
_INTEGER_RE = re.compile(r"[0-9]+")

_PUNCT = {
    "{": "LBRACE",
    "}": "RBRACE",
    "(": "LPAREN",
    ")": "RPAREN",
    ",": "COMMA",
    ";": "SEMI",
    ":": "COLON",
    "/": "SLASH",
}


class RddParseError(ValueError):
    """Lexical, syntactic, or well-formedness error with a source location."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.reason = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # KW, IRIREF, PNAME, INTEGER, punct kinds, EOF
    value: object
    line: int
    col: int

    def describe(self) -> str:
        if self.kind == "EOF":
            return "end of input"
        if self.kind == "KW":
            return f"keyword {self.value}"
        if self.kind == "PNAME":
            prefix, local = self.value  # type: ignore[misc]
            return f"prefixed name {prefix}:{local}"
        return f"{self.kind} {self.value!r}"


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line = 1
    col = 1
    i = 0
    n = len(text)

    def err(message: str) -> RddParseError:
        return RddParseError(message, line, col)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == "<":
            end = text.find(">", i + 1)
            if end < 0 or "\n" in text[i:end]:
                raise err("unterminated IRI (missing '>')")
            raw = text[i + 1 : end]
            if any(c in raw for c in ' <"{}|^`'):
                raise err("illegal character inside IRI")
            if not check_absolute_iri(raw):
                raise err(f"relative IRI <{raw}> not allowed")
            tokens.append(Token("IRIREF", raw, start_line, start_col))
            col += end - i + 1
            i = end + 1
            continue
        if ch in _PUNCT and ch != ":":
            tokens.append(Token(_PUNCT[ch], ch, start_line, start_col))
            i += 1
            col += 1
            continue
        if ch == ":":
            m = _LOCAL_RE.match(text, i + 1)
            if m:  # default-prefix name like ":local"
                tokens.append(Token("PNAME", ("", m.group()), start_line, start_col))
                col += m.end() - i
                i = m.end()
            else:
                tokens.append(Token("COLON", ch, start_line, start_col))
                i += 1
                col += 1
            continue
        if ch.isdigit():
            m = _INTEGER_RE.match(text, i)
            assert m is not None
            tokens.append(Token("INTEGER", int(m.group()), start_line, start_col))
            col += m.end() - i
            i = m.end()
            continue
        m = _PREFIX_RE.match(text, i)
        if m:
            name = m.group()
            j = m.end()
            if j < n and text[j] == ":":
                lm = _LOCAL_RE.match(text, j + 1)
                local = lm.group() if lm else ""
                end = lm.end() if lm else j + 1
                tokens.append(Token("PNAME", (name, local), start_line, start_col))
                col += end - i
                i = end
                continue
            if name in KEYWORDS:
                tokens.append(Token("KW", name, start_line, start_col))
                col += j - i
                i = j
                continue
            raise err(f"unknown token {name!r} (keywords are upper-case; IRIs need a prefix or <...>)")
        raise err(f"unexpected character {ch!r}")
    tokens.append(Token("EOF", None, line, col))
    return tokens


# atom kind tags used by duplicate detection and error messages
_ATOM_TAG = {
    MinAtom: "MIN", MaxAtom: "MAX", DomainAtom: "DOMAIN", RangeAtom: "RANGE",
    PathAtom: "PATH", SubPropertyAtom: "SUBPROPERTY", PartialAtom: "PARTIAL",
    TotalAtom: "TOTAL",
}


class _Parser:
    def __init__(self, tokens: list[Token], prefixes: Optional[dict[str, str]] = None):
        self.tokens = tokens
        self.pos = 0
        self.prefixes: dict[str, str] = dict(prefixes or {})
        self.productions: set[str] = set()

    # -- token plumbing -----------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at_kw(self, *names: str) -> bool:
        tok = self.peek()
        return tok.kind == "KW" and tok.value in names

    def expect_kw(self, name: str, rule: str) -> Token:
        tok = self.peek()
        if tok.kind != "KW" or tok.value != name:
            raise self.err(f"in {rule}: expected keyword {name}, found {tok.describe()}")
        return self.advance()

    def expect(self, kind: str, what: str, rule: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise self.err(f"in {rule}: expected {what}, found {tok.describe()}")
        return self.advance()

    def err(self, message: str, tok: Optional[Token] = None) -> RddParseError:
        tok = tok or self.peek()
        return RddParseError(message, tok.line, tok.col)

    def fired(self, production: str) -> None:
        self.productions.add(production)

    # -- terminals ----------------------------------------------------------

    def parse_iri(self, rule: str) -> tuple[str, Loc]:
        tok = self.peek()
        if tok.kind == "IRIREF":
            self.advance()
            self.fired("IRI")
            self.fired("IRIREF")
            return tok.value, Loc(tok.line, tok.col)  # type: ignore[return-value]
        if tok.kind == "PNAME":
            self.advance()
            prefix, local = tok.value  # type: ignore[misc]
            if prefix not in self.prefixes:
                raise self.err(f"unresolved prefix {prefix!r}", tok)
            self.fired("IRI")
            self.fired("PrefixedName")
            return self.prefixes[prefix] + local, Loc(tok.line, tok.col)
        raise self.err(f"in {rule}: expected an IRI, found {tok.describe()}")

    def parse_integer(self, rule: str) -> int:
        tok = self.expect("INTEGER", "an integer", rule)
        self.fired("INTEGER")
        return tok.value  # type: ignore[return-value]

    # -- grammar rules ------------------------------------------------------

    def parse_document(self, source_name: str) -> RddDocument:
        self.fired("RDD")
        while self.at_kw("PREFIX"):
            self.parse_prefix_decl()
        class_section = self.parse_class_section()
        prop_section = self.parse_prop_section()
        tok = self.peek()
        if tok.kind != "EOF":
            raise self.err(f"expected end of input, found {tok.describe()}")
        return RddDocument(
            class_section=class_section,
            prop_section=prop_section,
            prefixes=tuple(self.prefixes.items()),
            source_name=source_name,
        )

    def parse_prefix_decl(self) -> None:
        self.fired("PrefixDecl")
        self.expect_kw("PREFIX", "PrefixDecl")
        tok = self.peek()
        if tok.kind == "PNAME" and tok.value[1] == "":  # type: ignore[index]
            self.advance()
            name = tok.value[0]  # type: ignore[index]
        elif tok.kind == "COLON":
            self.advance()
            name = ""
        else:
            raise self.err(f"in PrefixDecl: expected 'name:', found {tok.describe()}")
        iri_tok = self.expect("IRIREF", "an <IRI>", "PrefixDecl")
        self.prefixes[name] = iri_tok.value  # type: ignore[assignment]

    def parse_wa(self, rule: str) -> bool:
        self.fired("WA")
        tok = self.peek()
        if self.at_kw("OWA"):
            self.advance()
            return True
        if self.at_kw("CWA"):
            self.advance()
            return False
        raise self.err(f"in {rule}: expected OWA or CWA, found {tok.describe()}")

    def parse_class_section(self) -> ClassSection:
        self.fired("ClassConstraintSec")
        head = self.peek()
        is_owa = self.parse_wa("ClassConstraintSec")
        self.expect_kw("CLASSES", "ClassConstraintSec")
        self.expect("LBRACE", "'{'", "ClassConstraintSec")
        classes: list[ClassConstraint] = []
        seen: dict[str, Loc] = {}
        while not self.peek().kind == "RBRACE":
            cc = self.parse_class_constraint()
            if cc.class_iri in seen:
                raise RddParseError(
                    f"duplicate definition of class <{cc.class_iri}>",
                    cc.loc.line, cc.loc.col,
                )
            seen[cc.class_iri] = cc.loc
            classes.append(cc)
        self.expect("RBRACE", "'}'", "ClassConstraintSec")
        return ClassSection(is_owa=is_owa, classes=tuple(classes), loc=Loc(head.line, head.col))

    def parse_class_constraint(self) -> ClassConstraint:
        self.fired("ClassConstraint")
        head = self.peek()
        is_owa = self.parse_wa("ClassConstraint")
        is_singleton = False
        if self.at_kw("SINGLETON"):
            self.advance()
            is_singleton = True
        self.expect_kw("CLASS", "ClassConstraint")
        class_iri, _ = self.parse_iri("ClassConstraint")
        sub_classes: list[str] = []
        if self.at_kw("SUBCLASS"):
            self.advance()
            sub_classes = self.parse_iri_list("ClassConstraint")
            dup = _first_duplicate(sub_classes)
            if dup is not None:
                raise self.err(f"duplicate SUBCLASS entry <{dup}>", head)
        self.expect("LBRACE", "'{'", "ClassConstraint")
        keys: list[Key] = []
        qpcs: list[PropEntry] = []
        while self.peek().kind != "RBRACE":
            if self.at_kw("KEY"):
                keys.append(self.parse_key())
            else:
                qpcs.append(self.parse_prop_entry())
        self.expect("RBRACE", "'}'", "ClassConstraint")
        return ClassConstraint(
            class_iri=class_iri,
            is_owa=is_owa,
            is_singleton=is_singleton,
            sub_classes=tuple(sub_classes),
            keys=tuple(keys),
            qpcs=tuple(qpcs),
            loc=Loc(head.line, head.col),
        )

    def parse_key(self) -> Key:
        self.fired("Key")
        head = self.expect_kw("KEY", "Key")
        props = [self.parse_iri_with_range_type("Key")]
        self.fired("IRIWithRangeTypeList")
        while self.peek().kind == "COMMA":
            self.advance()
            props.append(self.parse_iri_with_range_type("Key"))
        self.expect("SEMI", "';'", "Key")
        dup = _first_duplicate([kp.prop for kp in props])
        if dup is not None:
            raise self.err(f"duplicate key property <{dup}>", head)
        return Key(props=tuple(props), loc=Loc(head.line, head.col))

    def parse_iri_with_range_type(self, rule: str) -> KeyProp:
        self.fired("IRIWithRangeType")
        iri, _ = self.parse_iri(rule)
        rt = None
        if self.peek().kind == "COLON":
            self.advance()
            rt = self.parse_range_type()
        return KeyProp(prop=iri, range_type=rt)

    def parse_range_type(self) -> RangeType:
        self.fired("RangeType")
        tok = self.peek()
        if self.at_kw("IRI", "BNODE", "RESOURCE"):
            self.advance()
            return RangeType(kind=tok.value)  # type: ignore[arg-type]
        if self.at_kw("LITERAL"):
            self.advance()
            datatype = None
            if self.peek().kind == "LPAREN":
                self.advance()
                datatype, _ = self.parse_iri("RangeType")
                self.expect("RPAREN", "')'", "RangeType")
            return RangeType(kind="LITERAL", datatype=datatype)
        raise self.err(f"in RangeType: expected IRI, BNODE, RESOURCE, or LITERAL, found {tok.describe()}")

    def parse_iri_list(self, rule: str) -> list[str]:
        self.fired("IRIList")
        iris = [self.parse_iri(rule)[0]]
        while self.peek().kind == "COMMA":
            self.advance()
            iris.append(self.parse_iri(rule)[0])
        return iris

    def parse_iri_seq(self, rule: str) -> list[str]:
        self.fired("IRISeq")
        iris = [self.parse_iri(rule)[0]]
        while self.peek().kind == "SLASH":
            self.advance()
            iris.append(self.parse_iri(rule)[0])
        return iris

    _CONSTRAINT_KEYWORDS = ("MIN", "MAX", "DOMAIN", "RANGE", "PATH",
                            "SUBPROPERTY", "PARTIAL", "TOTAL")

    def parse_prop_entry(self) -> PropEntry:
        self.fired("PropConstraint")
        head = self.peek()
        atoms: list[ConstraintAtom] = []
        if self.at_kw(*self._CONSTRAINT_KEYWORDS):
            self.fired("ConstraintList")
            atoms.append(self.parse_constraint_atom())
            while self.peek().kind == "COMMA":
                self.advance()
                atoms.append(self.parse_constraint_atom())
        prop, _ = self.parse_iri("PropConstraint")
        if not atoms and self.at_kw("SUBPROPERTY"):
            # infix sugar: `A SUBPROPERTY B1, ..., Bn ;`
            tok = self.advance()
            subs = self.parse_iri_list("SubPropertyConstraint")
            self.fired("SubPropertyConstraint")
            atoms.append(SubPropertyAtom(sub_props=tuple(subs), loc=Loc(tok.line, tok.col)))
            self.expect("SEMI", "';'", "PropConstraint")
            return PropEntry(prop=prop, atoms=tuple(atoms), range_type=None,
                             loc=Loc(head.line, head.col))
        rt = None
        if self.peek().kind == "COLON":
            self.advance()
            rt = self.parse_range_type()
        self.expect("SEMI", "';'", "PropConstraint")
        entry = PropEntry(prop=prop, atoms=tuple(atoms), range_type=rt,
                          loc=Loc(head.line, head.col))
        self._validate_entry(entry, head)
        return entry

    def parse_constraint_atom(self) -> ConstraintAtom:
        self.fired("Constraint")
        tok = self.peek()
        loc = Loc(tok.line, tok.col)
        if self.at_kw("MIN") or self.at_kw("MAX"):
            kw = self.advance().value
            rule = f"{kw}Constraint"
            self.fired("MinConstraint" if kw == "MIN" else "MaxConstraint")
            self.expect("LPAREN", "'('", rule)
            n = self.parse_integer(rule)
            self.expect("RPAREN", "')'", rule)
            if n > MAX_CARDINALITY:
                raise RddParseError(f"{kw}({n}) exceeds the cardinality cap {MAX_CARDINALITY}",
                                    loc.line, loc.col)
            return MinAtom(n, loc) if kw == "MIN" else MaxAtom(n, loc)
        if self.at_kw("DOMAIN") or self.at_kw("RANGE"):
            kw = self.advance().value
            rule = f"{kw.title()}Constraint"
            self.fired("DomainConstraint" if kw == "DOMAIN" else "RangeConstraint")
            self.expect("LPAREN", "'('", rule)
            cls, _ = self.parse_iri(rule)
            self.expect("RPAREN", "')'", rule)
            return DomainAtom(cls, loc) if kw == "DOMAIN" else RangeAtom(cls, loc)
        if self.at_kw("PATH"):
            self.advance()
            self.fired("PathConstraint")
            self.expect("LPAREN", "'('", "PathConstraint")
            seq = self.parse_iri_seq("PathConstraint")
            self.expect("RPAREN", "')'", "PathConstraint")
            return PathAtom(tuple(seq), loc)
        if self.at_kw("SUBPROPERTY"):
            self.advance()
            self.fired("SubPropertyConstraint")
            self.expect("LPAREN", "'('", "SubPropertyConstraint")
            subs = self.parse_iri_list("SubPropertyConstraint")
            self.expect("RPAREN", "')'", "SubPropertyConstraint")
            return SubPropertyAtom(tuple(subs), loc)
        if self.at_kw("PARTIAL"):
            self.advance()
            self.fired("PartialityConstraint")
            return PartialAtom(loc)
        if self.at_kw("TOTAL"):
            self.advance()
            self.fired("TotalityConstraint")
            return TotalAtom(loc)
        raise self.err(f"in Constraint: expected a constraint keyword, found {tok.describe()}")

    def _validate_entry(self, entry: PropEntry, head: Token) -> None:
        seen: set[str] = set()
        min_n: Optional[int] = None
        max_n: Optional[int] = None
        for atom in entry.atoms:
            tag = _ATOM_TAG[type(atom)]
            if tag in seen:
                raise self.err(f"duplicate {tag} constraint on <{entry.prop}>", head)
            seen.add(tag)
            if isinstance(atom, MinAtom):
                min_n = atom.n
            elif isinstance(atom, MaxAtom):
                max_n = atom.n
        if "PARTIAL" in seen and "TOTAL" in seen:
            raise self.err(f"PARTIAL and TOTAL both given on <{entry.prop}>", head)
        if min_n is not None and max_n is not None and min_n > max_n:
            raise self.err(f"MIN({min_n}) exceeds MAX({max_n}) on <{entry.prop}>", head)

    def parse_prop_section(self) -> PropSection:
        self.fired("PropConstraintSec")
        head = self.peek()
        is_owa = self.parse_wa("PropConstraintSec")
        self.expect_kw("PROPERTIES", "PropConstraintSec")
        self.expect("LBRACE", "'{'", "PropConstraintSec")
        entries: list[PropEntry] = []
        while self.peek().kind != "RBRACE":
            entries.append(self.parse_prop_entry())
        self.expect("RBRACE", "'}'", "PropConstraintSec")
        return PropSection(is_owa=is_owa, entries=tuple(entries), loc=Loc(head.line, head.col))


#: all tracked grammar productions; the coverage test asserts each fires at
#: least once across the fixture corpus
ALL_PRODUCTIONS = frozenset(
    {
        "RDD", "PrefixDecl", "ClassConstraintSec", "PropConstraintSec",
        "ClassConstraint", "Key", "PropConstraint", "ConstraintList",
        "Constraint", "MinConstraint", "MaxConstraint", "DomainConstraint",
        "RangeConstraint", "PathConstraint", "SubPropertyConstraint",
        "PartialityConstraint", "TotalityConstraint", "WA", "IRIList",
        "IRISeq", "IRIWithRangeTypeList", "IRIWithRangeType", "RangeType",
        "IRI", "IRIREF", "PrefixedName", "INTEGER",
    }
)


def parse_rdd(
    text: str,
    source_name: str = "<rdd>",
    prefixes: Optional[dict[str, str]] = None,
    productions_out: Optional[set[str]] = None,
) -> RddDocument:
    """Parse RDD text into an AST.

    `prefixes` pre-seeds the prefix table (e.g. the CLI's well-known
    prelude); declarations in the document may override it.
    """
    parser = _Parser(tokenize(text), prefixes)
    doc = parser.parse_document(source_name)
    if productions_out is not None:
        productions_out.update(parser.productions)
    return doc


WELL_KNOWN_PREFIXES = {
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "xsd": "http://www.w3.org/2001/XMLSchema#",
    "foaf": "http://xmlns.com/foaf/0.1/",
    "owl": "http://www.w3.org/2002/07/owl#",
}


def _first_duplicate(items: list[str]) -> Optional[str]:
    seen: set[str] = set()
    for item in items:
        if item in seen:
            return item
        seen.add(item)
    return None
