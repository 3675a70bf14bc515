"""In-memory RDF triple store: terms, N-Triples ingestion, and lookup indexes.

The store keeps, next to the triple set, the four unary relations over the
active domain (IRIs, blank nodes, resources, literals occurring in any
position of any triple) that the constraint checker quantifies over.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDF_LANG_STRING = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString"

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_BNODE_LABEL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_LANG_TAG_RE = re.compile(r"[a-zA-Z]+(?:-[a-zA-Z0-9]+)*")


class NTriplesError(ValueError):
    """Syntax error in N-Triples input; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.reason = message
        self.line = line


@dataclass(frozen=True)
class Iri:
    value: str

    def ntriples(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True)
class BlankNode:
    label: str

    def ntriples(self) -> str:
        return f"_:{self.label}"


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: Optional[str] = None
    language: Optional[str] = None

    def __post_init__(self) -> None:
        # syntactic model: a literal carries a datatype or a language tag, never both
        if self.datatype is not None and self.language is not None:
            raise ValueError("literal cannot carry both a datatype and a language tag")

    def ntriples(self) -> str:
        quoted = '"%s"' % escape_string(self.lexical)
        if self.datatype is not None:
            return f"{quoted}^^<{self.datatype}>"
        if self.language is not None:
            return f"{quoted}@{self.language}"
        return quoted


Term = Union[Iri, BlankNode, Literal]


def term_key(term: Term) -> str:
    """Canonical sort key: the N-Triples token of the term."""
    return term.ntriples()


def escape_string(s: str) -> str:
    return (
        s.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


@dataclass(frozen=True)
class Triple:
    s: Term
    p: Term
    o: Term

    def __post_init__(self) -> None:
        if isinstance(self.s, Literal):
            raise ValueError("triple subject cannot be a literal")
        if not isinstance(self.p, Iri):
            raise ValueError("triple predicate must be an IRI")

    def ntriples(self) -> str:
        return f"{self.s.ntriples()} {self.p.ntriples()} {self.o.ntriples()} ."


def _triple_key(t: Triple) -> tuple[str, str, str]:
    return (t.s.ntriples(), t.p.ntriples(), t.o.ntriples())


class Dataset:
    """Immutable, duplicate-free triple set with SPO/POS/OSP indexes.

    Safe for concurrent reads once constructed. `match` answers any bound/
    unbound pattern using the best-fitting index; results come back in a
    deterministic order (lexicographic over term serialization).
    """

    __slots__ = (
        "_triples",
        "_ordered",
        "_order",
        "_spo",
        "_pos",
        "_osp",
        "_iris",
        "_bnodes",
        "_literals",
        "_resources",
        "_narrow_resources",
    )

    def __init__(self, triples: Iterable[Triple] = ()):
        self._triples = frozenset(triples)
        self._ordered = tuple(sorted(self._triples, key=_triple_key))
        self._order = {t: i for i, t in enumerate(self._ordered)}

        spo: dict[Term, dict[Term, set[Term]]] = {}
        pos: dict[Term, dict[Term, set[Term]]] = {}
        osp: dict[Term, dict[Term, set[Term]]] = {}
        iris: set[Term] = set()
        bnodes: set[Term] = set()
        literals: set[Term] = set()
        narrow: set[Term] = set()
        for t in self._ordered:
            spo.setdefault(t.s, {}).setdefault(t.p, set()).add(t.o)
            pos.setdefault(t.p, {}).setdefault(t.o, set()).add(t.s)
            osp.setdefault(t.o, {}).setdefault(t.s, set()).add(t.p)
            for pos_idx, term in enumerate((t.s, t.p, t.o)):
                if isinstance(term, Iri):
                    iris.add(term)
                elif isinstance(term, BlankNode):
                    bnodes.add(term)
                else:
                    literals.add(term)
                if pos_idx != 1 and not isinstance(term, Literal):
                    narrow.add(term)
        self._spo = spo
        self._pos = pos
        self._osp = osp
        self._iris = frozenset(iris)
        self._bnodes = frozenset(bnodes)
        self._literals = frozenset(literals)
        self._resources = self._iris | self._bnodes
        self._narrow_resources = frozenset(narrow)

    @property
    def triples(self) -> frozenset[Triple]:
        return self._triples

    @property
    def iris(self) -> frozenset[Term]:
        return self._iris

    @property
    def bnodes(self) -> frozenset[Term]:
        return self._bnodes

    @property
    def resources(self) -> frozenset[Term]:
        return self._resources

    @property
    def literals(self) -> frozenset[Term]:
        return self._literals

    @property
    def narrow_resources(self) -> frozenset[Term]:
        """Resources restricted to subject/object occurrences (lenient mode)."""
        return self._narrow_resources

    def all_terms(self) -> frozenset[Term]:
        return self._resources | self._literals

    def unary(self, relation: str) -> frozenset[Term]:
        try:
            return {
                "IRI": self._iris,
                "BNODE": self._bnodes,
                "RESOURCE": self._resources,
                "LITERAL": self._literals,
            }[relation]
        except KeyError:
            raise ValueError(f"unknown unary relation {relation!r}") from None

    def __len__(self) -> int:
        return len(self._ordered)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._ordered)

    def __contains__(self, t: Triple) -> bool:
        return t in self._triples

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self._triples == other._triples

    def __hash__(self) -> int:
        return hash(self._triples)

    def has(self, s: Term, p: Term, o: Term) -> bool:
        return Triple(s, p, o) in self._triples

    def match(
        self,
        s: Optional[Term] = None,
        p: Optional[Term] = None,
        o: Optional[Term] = None,
    ) -> list[Triple]:
        """All triples agreeing with every bound position, deterministically ordered."""
        found: list[Triple]
        if s is not None and p is not None and o is not None:
            t = Triple(s, p, o)
            return [t] if t in self._triples else []
        if s is not None and p is not None:
            objs = self._spo.get(s, {}).get(p, ())
            found = [Triple(s, p, obj) for obj in objs]
        elif p is not None and o is not None:
            subs = self._pos.get(p, {}).get(o, ())
            found = [Triple(sub, p, o) for sub in subs]
        elif s is not None and o is not None:
            preds = self._osp.get(o, {}).get(s, ())
            found = [Triple(s, pred, o) for pred in preds]
        elif s is not None:
            found = [
                Triple(s, pred, obj)
                for pred, objs in self._spo.get(s, {}).items()
                for obj in objs
            ]
        elif p is not None:
            found = [
                Triple(sub, p, obj)
                for obj, subs in self._pos.get(p, {}).items()
                for sub in subs
            ]
        elif o is not None:
            found = [
                Triple(sub, pred, o)
                for sub, preds in self._osp.get(o, {}).items()
                for pred in preds
            ]
        else:
            return list(self._ordered)
        found.sort(key=self._order.__getitem__)
        return found

    def objects(self, s: Term, p: Term) -> frozenset[Term]:
        return frozenset(self._spo.get(s, {}).get(p, ()))

    def subjects_with(self, p: Term, o: Term) -> frozenset[Term]:
        return frozenset(self._pos.get(p, {}).get(o, ()))


def check_absolute_iri(value: str) -> bool:
    return bool(_SCHEME_RE.match(value))


class _LineScanner:
    """Single N-Triples line tokenizer."""

    def __init__(self, text: str, lineno: int):
        self.text = text
        self.pos = 0
        self.lineno = lineno

    def error(self, message: str) -> NTriplesError:
        return NTriplesError(f"{message} (column {self.pos + 1})", self.lineno)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _unescape(self, raw: str, allow_echar: bool) -> str:
        out: list[str] = []
        i = 0
        while i < len(raw):
            ch = raw[i]
            if ch != "\\":
                out.append(ch)
                i += 1
                continue
            if i + 1 >= len(raw):
                raise self.error("dangling escape")
            code = raw[i + 1]
            if code == "u" or code == "U":
                width = 4 if code == "u" else 8
                hexpart = raw[i + 2 : i + 2 + width]
                if len(hexpart) != width or not all(c in "0123456789abcdefABCDEF" for c in hexpart):
                    raise self.error(f"bad \\{code} escape")
                out.append(chr(int(hexpart, 16)))
                i += 2 + width
            elif allow_echar and code in "tbnrf\"'\\":
                out.append({"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f",
                            '"': '"', "'": "'", "\\": "\\"}[code])
                i += 2
            elif code == "\\":
                out.append("\\")
                i += 2
            else:
                raise self.error(f"unknown escape \\{code}")
        return "".join(out)

    def scan_iri(self) -> Iri:
        assert self.peek() == "<"
        end = self.text.find(">", self.pos + 1)
        if end < 0:
            raise self.error("unterminated IRI (missing '>')")
        raw = self.text[self.pos + 1 : end]
        if any(c in raw for c in ' <"{}|^`') or any(ord(c) <= 0x20 for c in raw):
            raise self.error("illegal character inside IRI")
        self.pos = end + 1
        value = self._unescape(raw, allow_echar=False)
        if not check_absolute_iri(value):
            raise self.error(f"relative IRI <{value}> not allowed")
        return Iri(value)

    def scan_bnode(self) -> BlankNode:
        assert self.text.startswith("_:", self.pos)
        m = _BNODE_LABEL_RE.match(self.text, self.pos + 2)
        if not m:
            raise self.error("invalid blank node label")
        self.pos = m.end()
        return BlankNode(m.group())

    def scan_literal(self) -> Literal:
        assert self.peek() == '"'
        i = self.pos + 1
        while i < len(self.text):
            ch = self.text[i]
            if ch == "\\":
                i += 2
                continue
            if ch == '"':
                break
            i += 1
        else:
            raise self.error("unterminated literal (missing closing quote)")
        if i >= len(self.text):
            raise self.error("unterminated literal (missing closing quote)")
        raw = self.text[self.pos + 1 : i]
        lexical = self._unescape(raw, allow_echar=True)
        self.pos = i + 1
        if self.text.startswith("^^", self.pos):
            self.pos += 2
            if self.peek() != "<":
                raise self.error("expected datatype IRI after '^^'")
            dt = self.scan_iri()
            return Literal(lexical, datatype=dt.value)
        if self.peek() == "@":
            m = _LANG_TAG_RE.match(self.text, self.pos + 1)
            if not m:
                raise self.error("invalid language tag")
            self.pos = m.end()
            return Literal(lexical, language=m.group())
        return Literal(lexical)

    def scan_subject(self) -> Term:
        if self.peek() == "<":
            return self.scan_iri()
        if self.text.startswith("_:", self.pos):
            return self.scan_bnode()
        raise self.error("expected IRI or blank node in subject position")

    def scan_predicate(self) -> Term:
        if self.peek() == "<":
            return self.scan_iri()
        raise self.error("expected IRI in predicate position")

    def scan_object(self) -> Term:
        if self.peek() == "<":
            return self.scan_iri()
        if self.text.startswith("_:", self.pos):
            return self.scan_bnode()
        if self.peek() == '"':
            return self.scan_literal()
        raise self.error("expected IRI, blank node, or literal in object position")


def parse_ntriples(text: str) -> Dataset:
    """Parse N-Triples text into a Dataset (set semantics, comments allowed)."""
    triples: list[Triple] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        sc = _LineScanner(raw, lineno)
        sc.skip_ws()
        s = sc.scan_subject()
        sc.skip_ws()
        p = sc.scan_predicate()
        sc.skip_ws()
        o = sc.scan_object()
        sc.skip_ws()
        if sc.peek() != ".":
            raise sc.error("expected terminal '.'")
        sc.pos += 1
        sc.skip_ws()
        if not sc.at_end() and sc.peek() != "#":
            raise sc.error("unexpected trailing characters after '.'")
        triples.append(Triple(s, p, o))
    return Dataset(triples)


def serialize_ntriples(dataset: Dataset) -> str:
    """Canonical N-Triples: sorted by term serialization, LF line endings."""
    lines = [t.ntriples() for t in dataset]
    return "".join(line + "\n" for line in lines)


def merge_datasets(datasets: list[Dataset]) -> Dataset:
    """Union datasets, renaming colliding blank-node labels (document scoping)."""
    triples: list[Triple] = []
    used_labels: set[str] = set()
    for ds in datasets:
        own_labels = {t.label for t in ds.bnodes if isinstance(t, BlankNode)}
        rename: dict[str, str] = {}
        for label in sorted(own_labels):
            if label in used_labels:
                k = 1
                while f"{label}_m{k}" in used_labels or f"{label}_m{k}" in own_labels:
                    k += 1
                rename[label] = f"{label}_m{k}"
        def fix(term: Term) -> Term:
            if isinstance(term, BlankNode) and term.label in rename:
                return BlankNode(rename[term.label])
            return term
        for t in ds:
            triples.append(Triple(fix(t.s), fix(t.p), fix(t.o)))
        used_labels.update(rename.get(lb, lb) for lb in own_labels)
    return Dataset(triples)
