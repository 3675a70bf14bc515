"""Closed constraint IR and its canonical first-order rendering.

Twelve constraint kinds cover the whole language. A constraint is a kind
plus an optional class qualifier; the rendering substitutes concrete IRIs
into the fixed formula shape of that kind, expanding the pairwise
distinctness/equality shortcuts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class RangeTypeC:
    tag = "RangeTypeC"
    prop: str
    rt_kind: str  # IRI | BNODE | RESOURCE | LITERAL
    rt_datatype: Optional[str] = None

    def params_key(self) -> tuple:
        return (self.prop, self.rt_kind, self.rt_datatype or "")


@dataclass(frozen=True)
class MinC:
    tag = "MinC"
    prop: str
    n: int

    def params_key(self) -> tuple:
        return (self.prop, self.n)


@dataclass(frozen=True)
class MaxC:
    tag = "MaxC"
    prop: str
    n: int

    def params_key(self) -> tuple:
        return (self.prop, self.n)


@dataclass(frozen=True)
class DomainC:
    tag = "DomainC"
    prop: str
    cls: str

    def params_key(self) -> tuple:
        return (self.prop, self.cls)


@dataclass(frozen=True)
class RangeC:
    tag = "RangeC"
    prop: str
    cls: str

    def params_key(self) -> tuple:
        return (self.prop, self.cls)


@dataclass(frozen=True)
class PathC:
    tag = "PathC"
    prop: str
    seq: tuple[str, ...]

    def params_key(self) -> tuple:
        return (self.prop,) + self.seq


@dataclass(frozen=True)
class SubPropC:
    tag = "SubPropC"
    super_prop: str
    sub_prop: str

    def params_key(self) -> tuple:
        return (self.super_prop, self.sub_prop)


@dataclass(frozen=True)
class PropClosure:
    tag = "PropClosure"
    props: tuple[str, ...]

    def params_key(self) -> tuple:
        return self.props


@dataclass(frozen=True)
class ClassClosure:
    tag = "ClassClosure"
    classes: tuple[str, ...]

    def params_key(self) -> tuple:
        return self.classes


@dataclass(frozen=True)
class SingletonExists:
    tag = "SingletonExists"
    cls: str

    def params_key(self) -> tuple:
        return (self.cls,)


@dataclass(frozen=True)
class SingletonUnique:
    tag = "SingletonUnique"
    cls: str

    def params_key(self) -> tuple:
        return (self.cls,)


@dataclass(frozen=True)
class KeyC:
    tag = "KeyC"
    cls: str
    props: tuple[str, ...]

    def params_key(self) -> tuple:
        return (self.cls,) + self.props


ConstraintKind = Union[
    RangeTypeC, MinC, MaxC, DomainC, RangeC, PathC, SubPropC,
    PropClosure, ClassClosure, SingletonExists, SingletonUnique, KeyC,
]

KIND_ORDER = (
    "RangeTypeC", "MinC", "MaxC", "DomainC", "RangeC", "PathC", "SubPropC",
    "PropClosure", "ClassClosure", "SingletonExists", "SingletonUnique", "KeyC",
)
_KIND_RANK = {tag: i for i, tag in enumerate(KIND_ORDER)}


@dataclass(frozen=True)
class Provenance:
    derivation: str
    file: Optional[str] = None
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class Constraint:
    kind: ConstraintKind
    qualifier: Optional[str] = None
    provenance: tuple[Provenance, ...] = field(default=(), compare=False)

    @property
    def fol_text(self) -> str:
        return render_fol(self)

    def sort_key(self) -> tuple:
        return (_KIND_RANK[self.kind.tag], self.qualifier or "", self.kind.params_key())

    def identity(self) -> tuple:
        return (self.kind, self.qualifier)


def _iri(value: str) -> str:
    return f"<{value}>"


def _all_dist(names: list[str]) -> list[str]:
    return [f"{a}≠{b}" for i, a in enumerate(names) for b in names[i + 1:]]


def _some_eq(names: list[str]) -> list[str]:
    return [f"{a}={b}" for i, a in enumerate(names) for b in names[i + 1:]]


def _implication(universals: list[str], body: list[str], conclusion: str) -> str:
    return "∀%s (%s → %s)" % (",".join(universals), " ∧ ".join(body), conclusion)


def render_fol(c: Constraint) -> str:
    """One canonical first-order sentence per constraint."""
    kind = c.kind
    q = c.qualifier
    typed = [f"T(s,rdf:type,{_iri(q)})"] if q is not None else []

    if isinstance(kind, RangeTypeC):
        rel = {"IRI": "IRI", "BNODE": "BNode", "RESOURCE": "Resource",
               "LITERAL": "Literal"}[kind.rt_kind]
        if kind.rt_kind == "LITERAL" and kind.rt_datatype is not None:
            conclusion = f"Literal(o,{_iri(kind.rt_datatype)})"
        else:
            conclusion = f"{rel}(o)"
        body = typed + [f"T(s,{_iri(kind.prop)},o)"]
        return _implication(["s", "o"], body, conclusion)

    if isinstance(kind, MinC):
        names = [f"o{i}" for i in range(1, kind.n + 1)]
        atoms = [f"T(s,{_iri(kind.prop)},{nm})" for nm in names] + _all_dist(names)
        conclusion = "∃%s (%s)" % (",".join(names), " ∧ ".join(atoms))
        body = typed if typed else ["Resource(s)"]
        return _implication(["s"], body, conclusion)

    if isinstance(kind, MaxC):
        names = [f"o{i}" for i in range(1, kind.n + 2)]
        body = typed + [f"T(s,{_iri(kind.prop)},{nm})" for nm in names]
        eqs = _some_eq(names)
        conclusion = " ∨ ".join(eqs) if eqs else "false"
        return _implication(["s"] + names, body, conclusion)

    if isinstance(kind, DomainC):
        body = typed + [f"T(s,{_iri(kind.prop)},o)"]
        return _implication(["s", "o"], body, f"T(s,rdf:type,{_iri(kind.cls)})")

    if isinstance(kind, RangeC):
        body = typed + [f"T(s,{_iri(kind.prop)},o)"]
        return _implication(["s", "o"], body, f"T(o,rdf:type,{_iri(kind.cls)})")

    if isinstance(kind, PathC):
        body = typed + [f"T(s,{_iri(kind.prop)},o)"]
        hops = len(kind.seq)
        inner_names = [f"o{i}" for i in range(1, hops)]
        chain = ["s"] + inner_names + ["o"]
        atoms = [f"T({chain[i]},{_iri(kind.seq[i])},{chain[i + 1]})" for i in range(hops)]
        if inner_names:
            conclusion = "∃%s (%s)" % (",".join(inner_names), " ∧ ".join(atoms))
        else:
            conclusion = atoms[0]
        return _implication(["s", "o"], body, conclusion)

    if isinstance(kind, SubPropC):
        body = typed + [f"T(s,{_iri(kind.sub_prop)},o)"]
        return _implication(["s", "o"], body, f"T(s,{_iri(kind.super_prop)},o)")

    if isinstance(kind, PropClosure):
        body = typed + ["T(s,p,o)"]
        options = [f"p={_iri(p)}" for p in kind.props]
        conclusion = " ∨ ".join(options) if options else "false"
        return _implication(["s", "p", "o"], body, conclusion)

    if isinstance(kind, ClassClosure):
        options = [f"c={_iri(cl)}" for cl in kind.classes]
        conclusion = " ∨ ".join(options) if options else "false"
        return _implication(["s", "c"], ["T(s,rdf:type,c)"], conclusion)

    if isinstance(kind, SingletonExists):
        return f"∃s (T(s,rdf:type,{_iri(kind.cls)}))"

    if isinstance(kind, SingletonUnique):
        body = [f"T(s1,rdf:type,{_iri(kind.cls)})", f"T(s2,rdf:type,{_iri(kind.cls)})"]
        return _implication(["s1", "s2"], body, "s1=s2")

    if isinstance(kind, KeyC):
        names = [f"o{i}" for i in range(1, len(kind.props) + 1)]
        body = [f"T(s1,rdf:type,{_iri(kind.cls)})"]
        body += [f"T(s1,{_iri(p)},{nm})" for p, nm in zip(kind.props, names)]
        body += [f"T(s2,rdf:type,{_iri(kind.cls)})"]
        body += [f"T(s2,{_iri(p)},{nm})" for p, nm in zip(kind.props, names)]
        return _implication(["s1", "s2"] + names, body, "s1=s2")

    raise TypeError(f"unknown constraint kind {kind!r}")


def witness_variables(c: Constraint) -> tuple[str, ...]:
    """Universally quantified variables, i.e. the witness binding names."""
    kind = c.kind
    if isinstance(kind, (RangeTypeC, DomainC, RangeC, PathC, SubPropC)):
        return ("s", "o")
    if isinstance(kind, MinC):
        return ("s",)
    if isinstance(kind, MaxC):
        return ("s",) + tuple(f"o{i}" for i in range(1, kind.n + 2))
    if isinstance(kind, PropClosure):
        return ("s", "p", "o")
    if isinstance(kind, ClassClosure):
        return ("s", "c")
    if isinstance(kind, SingletonExists):
        return ()
    if isinstance(kind, SingletonUnique):
        return ("s1", "s2")
    if isinstance(kind, KeyC):
        return ("s1", "s2") + tuple(f"o{i}" for i in range(1, len(kind.props) + 1))
    raise TypeError(f"unknown constraint kind {kind!r}")
