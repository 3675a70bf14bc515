"""First-order formula shapes and their naive evaluation over a dataset.

Every constraint denotes a sentence of the form `forall X (body -> head)`
(existence constraints have an empty prefix). The reference checker
enumerates the active domain by nested loops over these shapes; the same
machinery re-substitutes reported witnesses to confirm each violation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .constraints import (
    ClassClosure,
    Constraint,
    DomainC,
    KeyC,
    MaxC,
    MinC,
    PathC,
    PropClosure,
    RangeC,
    RangeTypeC,
    SingletonExists,
    SingletonUnique,
    SubPropC,
)
from .rdf_store import (
    Dataset,
    Iri,
    Literal,
    RDF_LANG_STRING,
    RDF_TYPE,
    Term,
    term_key,
)


@dataclass(frozen=True)
class Var:
    name: str


Arg = Union[Var, Iri, Term]


@dataclass(frozen=True)
class TAtom:
    s: Arg
    p: Arg
    o: Arg


@dataclass(frozen=True)
class UnaryAtom:
    relation: str  # IRI | BNODE | RESOURCE | LITERAL
    x: Arg


@dataclass(frozen=True)
class TypedLiteralAtom:
    """Literal with a required datatype IRI (language tags match rdf:langString)."""

    x: Arg
    datatype: str


@dataclass(frozen=True)
class EqAtom:
    a: Arg
    b: Arg


@dataclass(frozen=True)
class NeqAtom:
    a: Arg
    b: Arg


Atom = Union[TAtom, UnaryAtom, TypedLiteralAtom, EqAtom, NeqAtom]


@dataclass(frozen=True)
class AtomHead:
    atom: Atom


@dataclass(frozen=True)
class DisjunctionHead:
    options: tuple[Atom, ...]  # empty tuple means `false`


@dataclass(frozen=True)
class ExistsHead:
    variables: tuple[Var, ...]
    atoms: tuple[Atom, ...]


Head = Union[AtomHead, DisjunctionHead, ExistsHead]


@dataclass(frozen=True)
class Formula:
    universals: tuple[Var, ...]
    body: tuple[Atom, ...]
    head: Head


def constraint_to_formula(c: Constraint) -> Formula:
    kind = c.kind
    s, o, p_var, c_var = Var("s"), Var("o"), Var("p"), Var("c")
    rdf_type = Iri(RDF_TYPE)

    def typed(subject: Arg) -> list[Atom]:
        if c.qualifier is None:
            return []
        return [TAtom(subject, rdf_type, Iri(c.qualifier))]

    if isinstance(kind, RangeTypeC):
        body = typed(s) + [TAtom(s, Iri(kind.prop), o)]
        if kind.rt_kind == "LITERAL" and kind.rt_datatype is not None:
            head: Head = AtomHead(TypedLiteralAtom(o, kind.rt_datatype))
        else:
            head = AtomHead(UnaryAtom(kind.rt_kind, o))
        return Formula((s, o), tuple(body), head)

    if isinstance(kind, MinC):
        names = [Var(f"o{i}") for i in range(1, kind.n + 1)]
        atoms: list[Atom] = [TAtom(s, Iri(kind.prop), nm) for nm in names]
        atoms += [NeqAtom(a, b) for i, a in enumerate(names) for b in names[i + 1:]]
        body = typed(s) or [UnaryAtom("RESOURCE", s)]
        return Formula((s,), tuple(body), ExistsHead(tuple(names), tuple(atoms)))

    if isinstance(kind, MaxC):
        names = [Var(f"o{i}") for i in range(1, kind.n + 2)]
        body = typed(s) + [TAtom(s, Iri(kind.prop), nm) for nm in names]
        eqs = tuple(EqAtom(a, b) for i, a in enumerate(names) for b in names[i + 1:])
        return Formula(tuple([s] + names), tuple(body), DisjunctionHead(eqs))

    if isinstance(kind, DomainC):
        body = typed(s) + [TAtom(s, Iri(kind.prop), o)]
        return Formula((s, o), tuple(body), AtomHead(TAtom(s, rdf_type, Iri(kind.cls))))

    if isinstance(kind, RangeC):
        body = typed(s) + [TAtom(s, Iri(kind.prop), o)]
        return Formula((s, o), tuple(body), AtomHead(TAtom(o, rdf_type, Iri(kind.cls))))

    if isinstance(kind, PathC):
        body = typed(s) + [TAtom(s, Iri(kind.prop), o)]
        hops = len(kind.seq)
        inner = [Var(f"o{i}") for i in range(1, hops)]
        chain: list[Arg] = [s] + list(inner) + [o]
        atoms = tuple(
            TAtom(chain[i], Iri(kind.seq[i]), chain[i + 1]) for i in range(hops)
        )
        if inner:
            return Formula((s, o), tuple(body), ExistsHead(tuple(inner), atoms))
        return Formula((s, o), tuple(body), AtomHead(atoms[0]))

    if isinstance(kind, SubPropC):
        body = typed(s) + [TAtom(s, Iri(kind.sub_prop), o)]
        return Formula((s, o), tuple(body), AtomHead(TAtom(s, Iri(kind.super_prop), o)))

    if isinstance(kind, PropClosure):
        body = typed(s) + [TAtom(s, p_var, o)]
        options = tuple(EqAtom(p_var, Iri(p)) for p in kind.props)
        return Formula((s, p_var, o), tuple(body), DisjunctionHead(options))

    if isinstance(kind, ClassClosure):
        body = [TAtom(s, rdf_type, c_var)]
        options = tuple(EqAtom(c_var, Iri(cl)) for cl in kind.classes)
        return Formula((s, c_var), tuple(body), DisjunctionHead(options))

    if isinstance(kind, SingletonExists):
        return Formula((), (), ExistsHead((s,), (TAtom(s, rdf_type, Iri(kind.cls)),)))

    if isinstance(kind, SingletonUnique):
        s1, s2 = Var("s1"), Var("s2")
        body = [TAtom(s1, rdf_type, Iri(kind.cls)), TAtom(s2, rdf_type, Iri(kind.cls))]
        return Formula((s1, s2), tuple(body), DisjunctionHead((EqAtom(s1, s2),)))

    if isinstance(kind, KeyC):
        s1, s2 = Var("s1"), Var("s2")
        names = [Var(f"o{i}") for i in range(1, len(kind.props) + 1)]
        body = [TAtom(s1, rdf_type, Iri(kind.cls))]
        body += [TAtom(s1, Iri(p), nm) for p, nm in zip(kind.props, names)]
        body += [TAtom(s2, rdf_type, Iri(kind.cls))]
        body += [TAtom(s2, Iri(p), nm) for p, nm in zip(kind.props, names)]
        return Formula(tuple([s1, s2] + names), tuple(body), DisjunctionHead((EqAtom(s1, s2),)))

    raise TypeError(f"unknown constraint kind {kind!r}")


Binding = dict[str, Term]


def _resolve(arg: Arg, binding: Binding) -> Term:
    if isinstance(arg, Var):
        return binding[arg.name]
    return arg


def _atom_vars(atom: Atom) -> frozenset[str]:
    if isinstance(atom, TAtom):
        args: tuple[Arg, ...] = (atom.s, atom.p, atom.o)
    elif isinstance(atom, (UnaryAtom, TypedLiteralAtom)):
        args = (atom.x,)
    else:
        args = (atom.a, atom.b)
    return frozenset(a.name for a in args if isinstance(a, Var))


def eval_atom(atom: Atom, binding: Binding, dataset: Dataset, lenient: bool = False) -> bool:
    if isinstance(atom, TAtom):
        s = _resolve(atom.s, binding)
        p = _resolve(atom.p, binding)
        o = _resolve(atom.o, binding)
        if isinstance(s, Literal) or not isinstance(p, Iri):
            return False
        return dataset.has(s, p, o)
    if isinstance(atom, UnaryAtom):
        x = _resolve(atom.x, binding)
        if atom.relation == "RESOURCE" and lenient:
            return x in dataset.narrow_resources
        return x in dataset.unary(atom.relation)
    if isinstance(atom, TypedLiteralAtom):
        x = _resolve(atom.x, binding)
        if not isinstance(x, Literal):
            return False
        if x.language is not None:
            return atom.datatype == RDF_LANG_STRING
        return x.datatype == atom.datatype
    if isinstance(atom, EqAtom):
        return _resolve(atom.a, binding) == _resolve(atom.b, binding)
    if isinstance(atom, NeqAtom):
        return _resolve(atom.a, binding) != _resolve(atom.b, binding)
    raise TypeError(f"unknown atom {atom!r}")


def _exists(
    variables: tuple[Var, ...],
    atoms: tuple[Atom, ...],
    binding: Binding,
    domain: list[Term],
    dataset: Dataset,
    lenient: bool,
) -> bool:
    positions = {v.name: i for i, v in enumerate(variables)}
    schedule: list[list[Atom]] = [[] for _ in range(len(variables) + 1)]
    for atom in atoms:
        last = max(
            (positions[name] + 1 for name in _atom_vars(atom) if name in positions),
            default=0,
        )
        schedule[last].append(atom)
    if not all(eval_atom(a, binding, dataset, lenient) for a in schedule[0]):
        return False

    def descend(depth: int) -> bool:
        if depth == len(variables):
            return True
        var = variables[depth]
        for term in domain:
            binding[var.name] = term
            if all(eval_atom(a, binding, dataset, lenient) for a in schedule[depth + 1]):
                if descend(depth + 1):
                    binding.pop(var.name, None)
                    return True
        binding.pop(var.name, None)
        return False

    return descend(0)


def eval_head(
    head: Head,
    binding: Binding,
    domain: list[Term],
    dataset: Dataset,
    lenient: bool,
) -> bool:
    if isinstance(head, AtomHead):
        return eval_atom(head.atom, binding, dataset, lenient)
    if isinstance(head, DisjunctionHead):
        return any(eval_atom(a, binding, dataset, lenient) for a in head.options)
    if isinstance(head, ExistsHead):
        return _exists(head.variables, head.atoms, dict(binding), domain, dataset, lenient)
    raise TypeError(f"unknown head {head!r}")


def sorted_domain(dataset: Dataset) -> list[Term]:
    return sorted(dataset.all_terms(), key=term_key)


def find_violations(
    formula: Formula,
    dataset: Dataset,
    lenient: bool = False,
    domain: Optional[list[Term]] = None,
) -> Iterator[Binding]:
    """Yield every universal binding with a true body and a false head."""
    dom = sorted_domain(dataset) if domain is None else domain

    # evaluate each body atom as soon as its last variable gets bound
    schedule: list[list[Atom]] = [[] for _ in range(len(formula.universals) + 1)]
    positions = {v.name: i for i, v in enumerate(formula.universals)}
    for atom in formula.body:
        last = max((positions[name] + 1 for name in _atom_vars(atom)), default=0)
        schedule[last].append(atom)

    binding: Binding = {}

    def descend(depth: int) -> Iterator[Binding]:
        if depth == len(formula.universals):
            if not eval_head(formula.head, binding, dom, dataset, lenient):
                yield dict(binding)
            return
        var = formula.universals[depth]
        for term in dom:
            binding[var.name] = term
            if all(eval_atom(a, binding, dataset, lenient) for a in schedule[depth + 1]):
                yield from descend(depth + 1)
        binding.pop(var.name, None)

    if not all(eval_atom(a, binding, dataset, lenient) for a in schedule[0]):
        return
    yield from descend(0)


def holds_under(
    c: Constraint,
    dataset: Dataset,
    witness: Binding,
    lenient: bool = False,
) -> bool:
    """True iff the witness re-substitution confirms the violation."""
    formula = constraint_to_formula(c)
    expected = {v.name for v in formula.universals}
    if set(witness) != expected:
        return False
    dom = sorted_domain(dataset)
    body_ok = all(eval_atom(a, witness, dataset, lenient) for a in formula.body)
    if not body_ok:
        return False
    return not eval_head(formula.head, witness, dom, dataset, lenient)
