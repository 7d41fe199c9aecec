"""Taint sources and sinks.

Sources are findViewById call sites whose integer argument resolves to a
PI-labeled view. Sinks come from a registry of exact method signatures, each
assigned a destination category and the argument/receiver positions that
leak when tainted.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from importlib import resources

from .errors import BadPosition, MalformedSignature, SinkSyntaxError
from .gui import ViewElement
from .ir import (
    AppBundle,
    AssignAtom,
    FieldRead,
    IntConst,
    InvokeExpr,
    InvokeStmt,
    MethodSig,
    Reg,
    StmtId,
    parse_method_sig,
)
from .pi import PiKind


class DestCategory(Enum):
    NET = "net"
    LOCALSTORE = "localstore"
    LOG = "log"
    FILEIO = "fileio"


@dataclass(frozen=True)
class SinkSpec:
    """One sink signature with its destination and tainted positions.

    Positions are "recv" or "argN" strings; a `*` in the registry file
    expands to the receiver plus every argument at load time.
    """

    category: DestCategory
    sig: MethodSig
    positions: frozenset[str]


@dataclass
class SinkRegistry:
    specs: tuple[SinkSpec, ...]

    def __post_init__(self):
        # exact-signature lookup ignores the return type: dispatch never
        # depends on it and decompilers disagree about covariant returns
        self._index: dict[tuple, list[SinkSpec]] = {}
        for spec in self.specs:
            key = (spec.sig.declaring_class, spec.sig.name, spec.sig.param_types)
            self._index.setdefault(key, []).append(spec)

    def match(self, sig: MethodSig) -> list[SinkSpec]:
        return list(self._index.get((sig.declaring_class, sig.name, sig.param_types), ()))


def _parse_positions(raw: str, arity: int, where: str) -> frozenset[str]:
    raw = raw.strip()
    if raw == "*":
        return frozenset(["recv"] + [f"arg{i}" for i in range(arity)])
    if not raw:
        raise SinkSyntaxError(f"{where}: empty position list")
    positions = set()
    for token in raw.split(","):
        token = token.strip()
        if token == "recv":
            positions.add(token)
        elif token.startswith("arg") and token[3:].isdigit():
            if int(token[3:]) >= arity:
                raise BadPosition(f"{where}: {token} out of range for arity {arity}")
            positions.add(token)
        else:
            raise BadPosition(f"{where}: bad position {token!r}")
    if not positions:
        raise SinkSyntaxError(f"{where}: empty position list")
    return frozenset(positions)


def load_sinks(path) -> SinkRegistry:
    """Load `<category>\\t<signature>\\t<positions>` lines into a registry."""
    specs = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise SinkSyntaxError(
                    f"{path}:{lineno}: expected '<category>\\t<signature>\\t<positions>'"
                )
            cat_name, sig_text, pos_text = (p.strip() for p in parts)
            try:
                category = DestCategory(cat_name)
            except ValueError:
                raise SinkSyntaxError(f"{path}:{lineno}: unknown category {cat_name!r}")
            try:
                sig = parse_method_sig(sig_text)
            except MalformedSignature as e:
                raise SinkSyntaxError(f"{path}:{lineno}: {e.message}")
            if (sig, category) in seen:
                raise SinkSyntaxError(f"{path}:{lineno}: duplicate sink {sig_text}")
            seen.add((sig, category))
            positions = _parse_positions(pos_text, len(sig.param_types), f"{path}:{lineno}")
            specs.append(SinkSpec(category, sig, positions))
    return SinkRegistry(tuple(specs))


def load_default_sinks() -> SinkRegistry:
    with resources.as_file(resources.files(__package__) / "data" / "sinks.tsv") as p:
        return load_sinks(p)


def match_sink(stmt, registry: SinkRegistry) -> list[SinkSpec]:
    """Sink specs whose signature exactly matches an invoke statement's callee."""
    if not isinstance(stmt, InvokeStmt):
        return []
    return registry.match(stmt.expr.sig)


@dataclass(frozen=True)
class SourcePoint:
    """A findViewById call site resolved to a labeled view."""

    stmt: StmtId
    view: ViewElement
    pi: PiKind
    result_reg: str | None


@dataclass
class SourceDiagnostics:
    sites: int = 0
    resolved: int = 0
    unlabeled_id_skips: int = 0
    unresolved_arg_skips: int = 0


def _is_find_view_by_id(expr: InvokeExpr) -> bool:
    # matched by name and arity on any receiver class: decompiled bundles
    # call it through Activity, View, Dialog and arbitrary subclasses
    return expr.sig.name == "findViewById" and expr.sig.param_types == ("int",)


def _constant_candidates(reg: Reg, body, rtable):
    """All integer constants assigned to `reg` anywhere in the method body.

    Returns (values, poisoned): static reads of R$id fields count through the
    resource table; a read of an unknown R$id name poisons resolution.
    """
    values = set()
    poisoned = False
    for s in body.statements:
        match s:
            case AssignAtom(dst=d, src=IntConst(value=v)) if d == reg:
                values.add(v)
            case FieldRead(dst=d, fld=f, base=None) if (
                d == reg and f.simple_class_name == "R$id"
            ):
                num = rtable.lookup(f.name)
                if num is None:
                    poisoned = True
                else:
                    values.add(num)
    return values, poisoned


def _resolve_arg(expr: InvokeExpr, body, rtable) -> int | None:
    arg = expr.args[0]
    if isinstance(arg, IntConst):
        return arg.value
    if not isinstance(arg, Reg) or arg.name == "this":
        return None
    values, poisoned = _constant_candidates(arg, body, rtable)
    if poisoned or len(values) != 1:
        return None
    return next(iter(values))


def resolve_sources(
    bundle: AppBundle, labeled_views: list[ViewElement]
) -> tuple[list[SourcePoint], SourceDiagnostics]:
    """Find findViewById call sites that fetch a PI-labeled view.

    Every call site is accounted for exactly once in the diagnostics:
    sites == resolved + unlabeled_id_skips + unresolved_arg_skips.
    """
    by_id: dict[int, ViewElement] = {}
    for v in labeled_views:
        if v.pi is None or v.numeric_id is None:
            continue
        by_id.setdefault(v.numeric_id, v)

    sources = []
    diag = SourceDiagnostics()
    for _, method, stmt in bundle.iter_statements():
        if not isinstance(stmt, InvokeStmt) or not _is_find_view_by_id(stmt.expr):
            continue
        diag.sites += 1
        value = _resolve_arg(stmt.expr, method, bundle.rtable)
        if value is None:
            diag.unresolved_arg_skips += 1
            continue
        view = by_id.get(value)
        if view is None:
            diag.unlabeled_id_skips += 1
            continue
        diag.resolved += 1
        result = stmt.result.name if stmt.result is not None else None
        sources.append(SourcePoint(stmt.sid, view, view.pi, result))
    return sources, diag
