"""AST for RDD documents, plus the canonical pretty-printer.

All IRIs in the AST are absolute (prefixed names are resolved at parse
time); source locations are attached everywhere but excluded from
equality so that round-tripped documents compare equal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

RANGE_TYPE_KINDS = ("IRI", "BNODE", "RESOURCE", "LITERAL")

_LOCAL_NAME_RE = re.compile(r"(?:[A-Za-z0-9_][A-Za-z0-9_.\-]*)?")


@dataclass(frozen=True)
class Loc:
    line: int
    col: int


_NO_LOC = Loc(0, 0)


@dataclass(frozen=True)
class RangeType:
    kind: str  # one of RANGE_TYPE_KINDS
    datatype: Optional[str] = None  # LITERAL only

    def __post_init__(self) -> None:
        if self.kind not in RANGE_TYPE_KINDS:
            raise ValueError(f"unknown range type {self.kind!r}")
        if self.datatype is not None and self.kind != "LITERAL":
            raise ValueError("datatype only allowed on LITERAL range type")


@dataclass(frozen=True)
class MinAtom:
    n: int
    loc: Loc = field(default=_NO_LOC, compare=False)


@dataclass(frozen=True)
class MaxAtom:
    n: int
    loc: Loc = field(default=_NO_LOC, compare=False)


@dataclass(frozen=True)
class DomainAtom:
    cls: str
    loc: Loc = field(default=_NO_LOC, compare=False)


@dataclass(frozen=True)
class RangeAtom:
    cls: str
    loc: Loc = field(default=_NO_LOC, compare=False)


@dataclass(frozen=True)
class PathAtom:
    seq: tuple[str, ...]
    loc: Loc = field(default=_NO_LOC, compare=False)


@dataclass(frozen=True)
class SubPropertyAtom:
    sub_props: tuple[str, ...]
    loc: Loc = field(default=_NO_LOC, compare=False)


@dataclass(frozen=True)
class PartialAtom:
    loc: Loc = field(default=_NO_LOC, compare=False)


@dataclass(frozen=True)
class TotalAtom:
    loc: Loc = field(default=_NO_LOC, compare=False)


ConstraintAtom = Union[
    MinAtom, MaxAtom, DomainAtom, RangeAtom, PathAtom, SubPropertyAtom,
    PartialAtom, TotalAtom,
]


@dataclass(frozen=True)
class PropEntry:
    """One PropConstraint: an optional constraint list over a property."""

    prop: str
    atoms: tuple[ConstraintAtom, ...] = ()
    range_type: Optional[RangeType] = None
    loc: Loc = field(default=_NO_LOC, compare=False)


@dataclass(frozen=True)
class KeyProp:
    prop: str
    range_type: Optional[RangeType] = None


@dataclass(frozen=True)
class Key:
    props: tuple[KeyProp, ...]
    loc: Loc = field(default=_NO_LOC, compare=False)


@dataclass(frozen=True)
class ClassConstraint:
    class_iri: str
    is_owa: bool
    is_singleton: bool = False
    sub_classes: tuple[str, ...] = ()
    keys: tuple[Key, ...] = ()
    qpcs: tuple[PropEntry, ...] = ()
    loc: Loc = field(default=_NO_LOC, compare=False)


@dataclass(frozen=True)
class ClassSection:
    is_owa: bool
    classes: tuple[ClassConstraint, ...] = ()
    loc: Loc = field(default=_NO_LOC, compare=False)


@dataclass(frozen=True)
class PropSection:
    is_owa: bool
    entries: tuple[PropEntry, ...] = ()
    loc: Loc = field(default=_NO_LOC, compare=False)


@dataclass(frozen=True)
class RddDocument:
    class_section: ClassSection
    prop_section: PropSection
    prefixes: tuple[tuple[str, str], ...] = ()
    source_name: str = field(default="<rdd>", compare=False)

    def prefix_map(self) -> dict[str, str]:
        return dict(self.prefixes)


def _shorten(iri: str, prefixes: tuple[tuple[str, str], ...]) -> str:
    """Prefer the longest declared namespace that yields a printable local name."""
    best: Optional[str] = None
    best_len = -1
    for name, ns in prefixes:
        if iri.startswith(ns) and len(ns) > best_len:
            local = iri[len(ns):]
            if _LOCAL_NAME_RE.fullmatch(local) and not local.endswith("."):
                best = f"{name}:{local}"
                best_len = len(ns)
    return best if best is not None else f"<{iri}>"


def _fmt_range_type(rt: RangeType, prefixes: tuple[tuple[str, str], ...]) -> str:
    if rt.kind == "LITERAL" and rt.datatype is not None:
        return f"LITERAL({_shorten(rt.datatype, prefixes)})"
    return rt.kind


def _fmt_atom(atom: ConstraintAtom, prefixes: tuple[tuple[str, str], ...]) -> str:
    if isinstance(atom, MinAtom):
        return f"MIN({atom.n})"
    if isinstance(atom, MaxAtom):
        return f"MAX({atom.n})"
    if isinstance(atom, DomainAtom):
        return f"DOMAIN({_shorten(atom.cls, prefixes)})"
    if isinstance(atom, RangeAtom):
        return f"RANGE({_shorten(atom.cls, prefixes)})"
    if isinstance(atom, PathAtom):
        return "PATH(%s)" % "/".join(_shorten(q, prefixes) for q in atom.seq)
    if isinstance(atom, SubPropertyAtom):
        return "SUBPROPERTY(%s)" % ", ".join(_shorten(q, prefixes) for q in atom.sub_props)
    if isinstance(atom, PartialAtom):
        return "PARTIAL"
    if isinstance(atom, TotalAtom):
        return "TOTAL"
    raise TypeError(f"unknown atom {atom!r}")


def _fmt_entry(entry: PropEntry, prefixes: tuple[tuple[str, str], ...]) -> str:
    parts = [_fmt_atom(a, prefixes) for a in entry.atoms]
    head = ", ".join(parts)
    prop = _shorten(entry.prop, prefixes)
    rt = "" if entry.range_type is None else f" : {_fmt_range_type(entry.range_type, prefixes)}"
    if head:
        return f"{head} {prop}{rt};"
    return f"{prop}{rt};"


def pretty_print(doc: RddDocument) -> str:
    """Canonical RDD text; reparsing yields an AST equal to the input."""
    prefixes = doc.prefixes
    out: list[str] = []
    for name, ns in prefixes:
        out.append(f"PREFIX {name}: <{ns}>")
    if prefixes:
        out.append("")

    cs = doc.class_section
    out.append("%s CLASSES {" % ("OWA" if cs.is_owa else "CWA"))
    for cc in cs.classes:
        singleton = "SINGLETON " if cc.is_singleton else ""
        head = "%s %sCLASS %s" % ("OWA" if cc.is_owa else "CWA", singleton,
                                  _shorten(cc.class_iri, prefixes))
        if cc.sub_classes:
            head += " SUBCLASS " + ", ".join(_shorten(c, prefixes) for c in cc.sub_classes)
        out.append(f"  {head} {{")
        for key in cc.keys:
            keyparts = []
            for kp in key.props:
                rt = "" if kp.range_type is None else f" : {_fmt_range_type(kp.range_type, prefixes)}"
                keyparts.append(f"{_shorten(kp.prop, prefixes)}{rt}")
            out.append("    KEY %s;" % ", ".join(keyparts))
        for entry in cc.qpcs:
            out.append(f"    {_fmt_entry(entry, prefixes)}")
        out.append("  }")
    out.append("}")

    ps = doc.prop_section
    out.append("%s PROPERTIES {" % ("OWA" if ps.is_owa else "CWA"))
    for entry in ps.entries:
        out.append(f"  {_fmt_entry(entry, prefixes)}")
    out.append("}")
    return "\n".join(out) + "\n"
