"""Compile a parsed RDD document into the flat constraint set.

Follows the inference-rule structure: sections decompose into per-entry
rules, class bodies replicate onto subclasses (dropping singleton-ness and
closure), keys expand into totality plus a uniqueness dependency, and
subproperty lists expand transitively. Duplicates arising from replication
merge by (kind, qualifier), keeping every derivation path in provenance.
"""

from __future__ import annotations

from typing import Optional

from .constraints import (
    ClassClosure,
    Constraint,
    ConstraintKind,
    KeyC,
    MaxC,
    MinC,
    DomainC,
    PathC,
    PropClosure,
    Provenance,
    RangeC,
    RangeTypeC,
    SingletonExists,
    SingletonUnique,
    SubPropC,
)
from .environment import Environment
from .rdd_ast import (
    ClassSection,
    DomainAtom,
    Key,
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


class _Sink:
    """Accumulates constraints, deduplicating by (kind, qualifier)."""

    def __init__(self) -> None:
        self._by_identity: dict[tuple, list] = {}

    def add(
        self,
        kind: ConstraintKind,
        qualifier: Optional[str],
        derivation: str,
        loc: Loc,
        file: Optional[str],
    ) -> None:
        prov = Provenance(derivation=derivation, file=file, line=loc.line, col=loc.col)
        entry = self._by_identity.setdefault((kind, qualifier), [kind, qualifier, []])
        if prov not in entry[2]:
            entry[2].append(prov)

    def finish(self) -> tuple[Constraint, ...]:
        out = [
            Constraint(kind=kind, qualifier=qualifier, provenance=tuple(provs))
            for kind, qualifier, provs in self._by_identity.values()
        ]
        out.sort(key=Constraint.sort_key)
        return tuple(out)


def _range_type_kind(prop: str, rt: RangeType) -> RangeTypeC:
    return RangeTypeC(prop=prop, rt_kind=rt.kind, rt_datatype=rt.datatype)


def _emit_subproperty(
    sink: _Sink,
    super_prop: str,
    listed: tuple[str, ...],
    env: Environment,
    qualifier: Optional[str],
    derivation: str,
    loc: Loc,
    file: Optional[str],
) -> None:
    # listed subproperties, then everything reachable through the environment
    worklist = list(listed)
    emitted: set[str] = set()
    direct = set(listed)
    while worklist:
        sub = worklist.pop(0)
        if sub in emitted:
            continue
        emitted.add(sub)
        note = derivation if sub in direct else f"{derivation}, transitively via subproperty hierarchy"
        sink.add(SubPropC(super_prop=super_prop, sub_prop=sub), qualifier, note, loc, file)
        worklist.extend(env.subproperties(sub))


def _emit_entry(
    sink: _Sink,
    entry: PropEntry,
    env: Environment,
    qualifier: Optional[str],
    derivation: str,
    file: Optional[str],
) -> None:
    if entry.range_type is not None:
        sink.add(_range_type_kind(entry.prop, entry.range_type), qualifier,
                 derivation, entry.loc, file)
    for atom in entry.atoms:
        if isinstance(atom, MinAtom):
            if atom.n > 0:  # MIN(0) holds vacuously
                sink.add(MinC(entry.prop, atom.n), qualifier, derivation, atom.loc, file)
        elif isinstance(atom, MaxAtom):
            sink.add(MaxC(entry.prop, atom.n), qualifier, derivation, atom.loc, file)
        elif isinstance(atom, DomainAtom):
            sink.add(DomainC(entry.prop, atom.cls), qualifier, derivation, atom.loc, file)
        elif isinstance(atom, RangeAtom):
            sink.add(RangeC(entry.prop, atom.cls), qualifier, derivation, atom.loc, file)
        elif isinstance(atom, PathAtom):
            sink.add(PathC(entry.prop, atom.seq), qualifier, derivation, atom.loc, file)
        elif isinstance(atom, SubPropertyAtom):
            _emit_subproperty(sink, entry.prop, atom.sub_props, env, qualifier,
                              derivation, atom.loc, file)
        elif isinstance(atom, PartialAtom):
            sink.add(MaxC(entry.prop, 1), qualifier, derivation, atom.loc, file)
        elif isinstance(atom, TotalAtom):
            sink.add(MinC(entry.prop, 1), qualifier, derivation, atom.loc, file)
            sink.add(MaxC(entry.prop, 1), qualifier, derivation, atom.loc, file)
        else:
            raise TypeError(f"unknown atom {atom!r}")


def _emit_key(
    sink: _Sink,
    cls: str,
    key: Key,
    derivation: str,
    file: Optional[str],
) -> None:
    for kp in key.props:
        if kp.range_type is not None:
            sink.add(_range_type_kind(kp.prop, kp.range_type), cls,
                     f"{derivation} (key property range type)", key.loc, file)
        sink.add(MinC(kp.prop, 1), cls, f"{derivation} (key property totality)", key.loc, file)
        sink.add(MaxC(kp.prop, 1), cls, f"{derivation} (key property totality)", key.loc, file)
    sink.add(KeyC(cls=cls, props=tuple(kp.prop for kp in key.props)), cls,
             f"{derivation} (key)", key.loc, file)


def _emit_class_constraint(
    sink: _Sink,
    cls: str,
    is_singleton: bool,
    sub_classes: tuple[str, ...],
    keys: tuple[Key, ...],
    qpcs: tuple[PropEntry, ...],
    is_owa: bool,
    env: Environment,
    derivation: str,
    loc: Loc,
    file: Optional[str],
) -> None:
    if is_singleton:
        sink.add(SingletonExists(cls), None, f"{derivation} (SINGLETON existence)", loc, file)
        sink.add(SingletonUnique(cls), None, f"{derivation} (SINGLETON uniqueness)", loc, file)
    # replicas never inherit singleton-ness or the closed-world flag
    for sub in sub_classes:
        _emit_class_constraint(
            sink, sub, False, env.subclasses(sub), keys, qpcs, True, env,
            f"{derivation}, inherited by <{sub}> via SUBCLASS", loc, file,
        )
    for key in keys:
        _emit_key(sink, cls, key, derivation, file)
    for entry in qpcs:
        _emit_entry(sink, entry, env, cls, derivation, file)
    if not is_owa:
        sink.add(PropClosure(env.class_properties(cls)), cls,
                 f"{derivation} (CWA property closure)", loc, file)


def compile_class_section(
    sec: ClassSection,
    env: Environment,
    file: Optional[str] = None,
    sink: Optional[_Sink] = None,
) -> tuple[Constraint, ...]:
    own_sink = sink or _Sink()
    if not sec.is_owa:
        own_sink.add(ClassClosure(tuple(cc.class_iri for cc in sec.classes)), None,
                     "class section closure (CWA)", sec.loc, file)
    for cc in sec.classes:
        _emit_class_constraint(
            own_sink, cc.class_iri, cc.is_singleton, cc.sub_classes, cc.keys,
            cc.qpcs, cc.is_owa, env, f"declared at <{cc.class_iri}>", cc.loc, file,
        )
    return own_sink.finish() if sink is None else ()


def compile_prop_section(
    sec: PropSection,
    env: Environment,
    file: Optional[str] = None,
    sink: Optional[_Sink] = None,
) -> tuple[Constraint, ...]:
    own_sink = sink or _Sink()
    if not sec.is_owa:
        props: list[str] = []
        for entry in sec.entries:
            if entry.prop not in props:
                props.append(entry.prop)
        own_sink.add(PropClosure(tuple(props)), None,
                     "property section closure (CWA)", sec.loc, file)
    for entry in sec.entries:
        _emit_entry(own_sink, entry, env, None, "property section", file)
    return own_sink.finish() if sink is None else ()


def compile_document(doc: RddDocument, env: Environment) -> tuple[Constraint, ...]:
    """The full constraint set of a document: class section plus property section."""
    sink = _Sink()
    compile_class_section(doc.class_section, env, doc.source_name, sink)
    compile_prop_section(doc.prop_section, env, doc.source_name, sink)
    return sink.finish()
