"""Flow-insensitive, field-based taint propagation.

The taint graph has register nodes (one per method-local register, keyed by
class, method and name) and field cells (one per field signature, shared by
every object instance). Edges are labeled with the statement that induces
them; a leak is the shortest labeled path from a findViewById source to a
tainted position of a registered sink call.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .ir import (
    AppBundle,
    AssignAtom,
    AssignCast,
    FieldRead,
    FieldSig,
    FieldWrite,
    InvokeStmt,
    MethodBody,
    Reg,
    ReturnStmt,
    StmtId,
    method_token,
    render_method_sig,
    resolve_call,
)
from .pi import PiKind
from .sources_sinks import SinkRegistry, SinkSpec, SourcePoint, match_sink


class Party(Enum):
    FIRST = "first"
    THIRD = "third"


PLATFORM_PACKAGE_PREFIXES = (
    "android",
    "androidx",
    "java",
    "javax",
    "kotlin",
    "kotlinx",
    "dalvik",
)

# Node encoding: ("reg", class, method_token, register) | ("field", class, type, name)
Node = tuple


def _reg_node(cls: str, mtok: str, name: str) -> Node:
    return ("reg", cls, mtok, name)


def _field_node(fld: FieldSig) -> Node:
    return ("field", fld.declaring_class, fld.type, fld.name)


@dataclass
class TaintGraph:
    bundle: AppBundle
    adjacency: dict[Node, list[tuple[Node, StmtId]]]
    seeds: dict[SourcePoint, Node]
    sink_feeds: dict[Node, list[tuple[StmtId, SinkSpec]]]
    _reverse: dict[Node, list[tuple[Node, StmtId]]] | None = None

    def reverse_adjacency(self):
        if self._reverse is None:
            rev: dict[Node, list[tuple[Node, StmtId]]] = {}
            for src, edges in self.adjacency.items():
                for dst, label in edges:
                    rev.setdefault(dst, []).append((src, label))
            self._reverse = rev
        return self._reverse


@dataclass(frozen=True)
class Leak:
    """One source-to-sink flow, carrying its shortest witness path."""

    source: SourcePoint
    sink_stmt: StmtId
    sink_spec: SinkSpec
    pi: PiKind
    party: Party
    path: tuple[StmtId, ...]
    path_len: int
    alt_third_party_path: bool = False


def _atom_reg_node(atom, cls, mtok):
    if isinstance(atom, Reg):
        return _reg_node(cls, mtok, atom.name)
    return None


def build_graph(
    bundle: AppBundle, sources: list[SourcePoint], registry: SinkRegistry
) -> TaintGraph:
    """Construct the taint graph for a bundle.

    Edge rules, all flow-insensitive:
      assignments and casts copy operand to destination (constants add no
      edge); field reads and writes go through the signature-keyed cell;
      calls resolved in the bundle bind arguments to parameters, the receiver
      to the callee's `this`, and return atoms to the call result; calls that
      leave the bundle get a conservative summary (arguments and receiver
      taint the result, and arguments taint the receiver).
    """
    edges: dict[Node, set[tuple[Node, StmtId]]] = {}
    feeds: dict[Node, set[tuple[StmtId, SinkSpec]]] = {}

    def add_edge(src: Node, dst: Node, label: StmtId):
        edges.setdefault(src, set()).add((dst, label))

    for unit, method, stmt in bundle.iter_statements():
        cls, mtok = unit.class_name, method.method_token
        reg = lambda atom: _atom_reg_node(atom, cls, mtok)
        match stmt:
            case AssignAtom(sid=sid, dst=d, src=a):
                if (n := reg(a)) is not None:
                    add_edge(n, reg(d), sid)
            case AssignCast(sid=sid, dst=d, src=s):
                add_edge(reg(s), reg(d), sid)
            case FieldRead(sid=sid, dst=d, fld=f):
                add_edge(_field_node(f), reg(d), sid)
            case FieldWrite(sid=sid, fld=f, value=v):
                if (n := reg(v)) is not None:
                    add_edge(n, _field_node(f), sid)
            case InvokeStmt(sid=sid, result=result, expr=expr):
                callee = resolve_call(expr, bundle)
                if callee is not None:
                    _add_call_edges(bundle, sid, expr, result, callee, reg, add_edge)
                else:
                    _add_opaque_edges(sid, expr, result, reg, add_edge)
                for spec in match_sink(stmt, registry):
                    for pos in spec.positions:
                        node = None
                        if pos == "recv":
                            node = reg(expr.receiver) if expr.receiver else None
                        else:
                            node = reg(expr.args[int(pos[3:])])
                        if node is not None:
                            feeds.setdefault(node, set()).add((sid, spec))
            case ReturnStmt():
                pass  # contributes edges only at resolved call sites

    adjacency = {
        src: sorted(targets, key=lambda e: (e[0], e[1]))
        for src, targets in edges.items()
    }
    sink_feeds = {
        node: sorted(
            fs, key=lambda f: (f[0], f[1].category.value, render_method_sig(f[1].sig))
        )
        for node, fs in feeds.items()
    }
    seeds = {}
    for sp in sources:
        if sp.result_reg is not None:
            seeds[sp] = _reg_node(sp.stmt.cls, sp.stmt.method, sp.result_reg)
    return TaintGraph(bundle, adjacency, seeds, sink_feeds)


def _add_call_edges(bundle, sid, expr, result, callee: MethodBody, reg, add_edge):
    ccls = callee.sig.declaring_class
    cmtok = method_token(callee.sig)
    for i, arg in enumerate(expr.args):
        if (n := reg(arg)) is not None:
            add_edge(n, _reg_node(ccls, cmtok, callee.params[i]), sid)
    if expr.receiver is not None and not callee.is_static:
        add_edge(reg(expr.receiver), _reg_node(ccls, cmtok, "this"), sid)
    if result is not None:
        for s in callee.statements:
            # the return statement labels the edge so cross-class hops
            # surface in the witness path
            if isinstance(s, ReturnStmt) and isinstance(s.value, Reg):
                add_edge(_reg_node(ccls, cmtok, s.value.name), reg(result), s.sid)


def _add_opaque_edges(sid, expr, result, reg, add_edge):
    arg_nodes = [n for a in expr.args if (n := reg(a)) is not None]
    recv = reg(expr.receiver) if expr.receiver is not None else None
    if result is not None:
        dst = reg(result)
        for n in arg_nodes:
            add_edge(n, dst, sid)
        if recv is not None:
            add_edge(recv, dst, sid)
    if recv is not None:
        for n in arg_nodes:
            add_edge(n, recv, sid)


def _lexicographic_bfs(adjacency, seed: Node, prefix: tuple[StmtId, ...]):
    """Shortest label paths from seed; equal lengths keep the smallest sequence.

    Returns node -> path, where each path starts with `prefix` and appends
    one statement id per traversed edge. Within one BFS wave every candidate
    has the same length, so plain tuple comparison is the lexicographic rule.
    """
    best = {seed: prefix}
    frontier = {seed: prefix}
    while frontier:
        wave: dict[Node, tuple[StmtId, ...]] = {}
        for node, path in frontier.items():
            for succ, label in adjacency.get(node, ()):
                if succ in best:
                    continue
                cand = path + (label,)
                prev = wave.get(succ)
                if prev is None or cand < prev:
                    wave[succ] = cand
        best.update(wave)
        frontier = wave
    return best


def package_of(class_name: str) -> str:
    return class_name.rsplit(".", 1)[0] if "." in class_name else ""


def _org_prefix(app_package: str) -> str:
    return ".".join(app_package.split(".")[:2])


def _pkg_matches(pkg: str, prefix: str) -> bool:
    return pkg == prefix or pkg.startswith(prefix + ".")


def classify_package(pkg: str, app_package: str) -> str:
    """Classify a package as "platform", "first" or "third" party."""
    for prefix in PLATFORM_PACKAGE_PREFIXES:
        if _pkg_matches(pkg, prefix):
            return "platform"
    if pkg == app_package or _pkg_matches(pkg, _org_prefix(app_package)):
        return "first"
    return "third"


def classify_party(path: tuple[StmtId, ...], app_package: str) -> Party:
    """Third party iff any statement on the path sits in third-party code.

    Only the enclosing class of each path statement matters; the platform
    signature a sink call invokes never affects the verdict.
    """
    for sid in path:
        if classify_package(package_of(sid.cls), app_package) == "third":
            return Party.THIRD
    return Party.FIRST


def _has_third_party_alternative(graph: TaintGraph, seed: Node, sink_key, app_package):
    """Whether some other source-to-sink path crosses third-party code."""
    fwd = set(_reach(graph.adjacency, seed))
    feed_nodes = [
        n for n, fs in graph.sink_feeds.items() if any((s, sp) == sink_key for s, sp in fs)
    ]
    back = set()
    for n in feed_nodes:
        back.update(_reach(graph.reverse_adjacency(), n))
    for src, edge_list in graph.adjacency.items():
        if src not in fwd:
            continue
        for dst, label in edge_list:
            if dst not in back:
                continue
            if classify_package(package_of(label.cls), app_package) == "third":
                return True
    return False


def _reach(adjacency, start: Node):
    seen = {start}
    stack = [start]
    while stack:
        node = stack.pop()
        for succ, _ in adjacency.get(node, ()):
            if succ not in seen:
                seen.add(succ)
                stack.append(succ)
    return seen


def extract_leaks(graph: TaintGraph, registry: SinkRegistry | None = None) -> list[Leak]:
    """All (source, sink statement, sink spec) leaks with shortest witness paths.

    For each pair exactly one leak is reported; among equal-length shortest
    paths the lexicographically smallest statement-id sequence is retained.
    Output is sorted by (source stmt, sink stmt, category, signature).
    """
    app_package = graph.bundle.app_package
    leaks = []
    for sp, seed in graph.seeds.items():
        best = _lexicographic_bfs(graph.adjacency, seed, (sp.stmt,))
        hits: dict[tuple, tuple[StmtId, ...]] = {}
        for node, path in best.items():
            for sink_sid, spec in graph.sink_feeds.get(node, ()):
                cand = path + (sink_sid,)
                key = (sink_sid, spec)
                prev = hits.get(key)
                if prev is None or (len(cand), cand) < (len(prev), prev):
                    hits[key] = cand
        for (sink_sid, spec), path in hits.items():
            party = classify_party(path, app_package)
            alt = party is Party.FIRST and _has_third_party_alternative(
                graph, seed, (sink_sid, spec), app_package
            )
            leaks.append(
                Leak(
                    source=sp,
                    sink_stmt=sink_sid,
                    sink_spec=spec,
                    pi=sp.pi,
                    party=party,
                    path=path,
                    path_len=len(path) - 1,
                    alt_third_party_path=alt,
                )
            )
    leaks.sort(
        key=lambda lk: (
            lk.source.stmt,
            lk.sink_stmt,
            lk.sink_spec.category.value,
            render_method_sig(lk.sink_spec.sig),
        )
    )
    return leaks
