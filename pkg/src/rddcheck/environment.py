"""Compile-time environment: subclass, subproperty, and class-property maps.

The maps are deliberately non-transitive; transitive inheritance happens
inside the compiler's recursion. Both hierarchies must be acyclic, since
the recursive rules would not terminate otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .rdd_ast import (
    ClassConstraint,
    Key,
    PathAtom,
    PropEntry,
    RddDocument,
    SubPropertyAtom,
)
from .rdf_store import RDF_TYPE


class CycleError(ValueError):
    """A SUBCLASS or SUBPROPERTY hierarchy contains a directed cycle."""

    def __init__(self, relation: str, cycle: list[str]):
        pretty = " -> ".join(f"<{iri}>" for iri in cycle)
        super().__init__(f"{relation} cycle: {pretty}")
        self.relation = relation
        self.cycle = cycle


@dataclass(frozen=True)
class Environment:
    C: dict[str, tuple[str, ...]] = field(default_factory=dict)
    P: dict[str, tuple[str, ...]] = field(default_factory=dict)
    A: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def subclasses(self, cls: str) -> tuple[str, ...]:
        return self.C.get(cls, ())

    def subproperties(self, prop: str) -> tuple[str, ...]:
        return self.P.get(prop, ())

    def class_properties(self, cls: str) -> tuple[str, ...]:
        return self.A.get(cls, ())


def _entry_properties(entry: PropEntry) -> list[str]:
    """Property IRIs mentioned by one entry, in textual order.

    DOMAIN/RANGE arguments are classes, not properties, and stay out.
    """
    props: list[str] = []
    for atom in entry.atoms:
        if isinstance(atom, PathAtom):
            props.extend(atom.seq)
        elif isinstance(atom, SubPropertyAtom):
            props.extend(atom.sub_props)
    props.append(entry.prop)
    return props


def _class_properties(cc: ClassConstraint) -> tuple[str, ...]:
    props: list[str] = []
    for key in cc.keys:
        props.extend(kp.prop for kp in key.props)
    for entry in cc.qpcs:
        props.extend(_entry_properties(entry))
    props.append(RDF_TYPE)  # every instance carries its own typing triple
    return _dedup(props)


def _dedup(items: list[str]) -> tuple[str, ...]:
    seen: set[str] = set()
    out: list[str] = []
    for item in items:
        if item not in seen:
            seen.add(item)
            out.append(item)
    return tuple(out)


def _check_acyclic(relation: str, graph: dict[str, tuple[str, ...]]) -> None:
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[str, int] = {}
    stack_path: list[str] = []

    def visit(node: str) -> None:
        color[node] = GRAY
        stack_path.append(node)
        for nxt in graph.get(node, ()):
            c = color.get(nxt, WHITE)
            if c == GRAY:
                cycle = stack_path[stack_path.index(nxt):] + [nxt]
                raise CycleError(relation, cycle)
            if c == WHITE:
                visit(nxt)
        stack_path.pop()
        color[node] = BLACK

    for start in graph:
        if color.get(start, WHITE) == WHITE:
            visit(start)


def build_environment(doc: RddDocument) -> Environment:
    """Extract the (C, P, A) maps from a parsed document; rejects cycles."""
    C: dict[str, tuple[str, ...]] = {}
    P: dict[str, list[str]] = {}
    A: dict[str, tuple[str, ...]] = {}

    def collect_subprops(entry: PropEntry) -> None:
        subs = [q for atom in entry.atoms if isinstance(atom, SubPropertyAtom)
                for q in atom.sub_props]
        if subs:
            P.setdefault(entry.prop, []).extend(subs)

    for cc in doc.class_section.classes:
        C[cc.class_iri] = cc.sub_classes
        A[cc.class_iri] = _class_properties(cc)
        for entry in cc.qpcs:
            collect_subprops(entry)
    for entry in doc.prop_section.entries:
        collect_subprops(entry)

    P_final = {prop: _dedup(subs) for prop, subs in P.items()}
    _check_acyclic("SUBCLASS", C)
    _check_acyclic("SUBPROPERTY", P_final)
    return Environment(C=C, P=P_final, A=A)


def all_subclasses(env: Environment, cls: str) -> frozenset[str]:
    """Transitive closure of the subclass map from `cls`, excluding `cls`."""
    out: set[str] = set()
    frontier = list(env.subclasses(cls))
    while frontier:
        node = frontier.pop()
        if node not in out:
            out.add(node)
            frontier.extend(env.subclasses(node))
    return frozenset(out)


def all_subproperties(env: Environment, prop: str) -> frozenset[str]:
    """Transitive closure of the subproperty map from `prop`, excluding `prop`."""
    out: set[str] = set()
    frontier = list(env.subproperties(prop))
    while frontier:
        node = frontier.pop()
        if node not in out:
            out.add(node)
            frontier.extend(env.subproperties(node))
    return frozenset(out)
