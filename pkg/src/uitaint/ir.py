"""Three-address IR for decompiled app code: model, parser, renderer, bundle loader.

A code unit is one class in a Jimple-like textual form, one statement per line:

    class com.example.Main extends android.app.Activity
    field java.lang.String cached
    method void onCreate(android.os.Bundle b1):
      r0 = this
      $r1 = virtualinvoke r0.<com.example.Main: android.view.View findViewById(int)>(2131230960)
      r0.<com.example.Main: java.lang.String cached> = $r1

There is no control flow in this representation; statement order only matters
for the (class, method, ordinal) statement ids.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    DuplicateClass,
    IrSyntaxError,
    MalformedManifest,
    MalformedSignature,
    MissingManifest,
    RTableSyntaxError,
    UnknownInvokeKind,
    XmlSyntaxError,
)

INVOKE_KINDS = ("virtualinvoke", "interfaceinvoke", "specialinvoke", "staticinvoke")

# Words the statement parser dispatches on; they cannot name a register.
RESERVED = frozenset(
    {"class", "extends", "field", "method", "static", "return", "null", "this"}
    | set(INVOKE_KINDS)
)

MAX_RESOURCE_ID = 0xFFFFFFFF


# ---------------------------------------------------------------------------
# model


@dataclass(frozen=True, order=True)
class StmtId:
    """Unique statement id: (class, method token, ordinal within the body)."""

    cls: str
    method: str
    ordinal: int

    def __str__(self):
        return f"{self.cls}#{self.method}#{self.ordinal}"


@dataclass(frozen=True)
class Reg:
    """A local register. The receiver pseudo-register is spelled "this"."""

    name: str


@dataclass(frozen=True)
class IntConst:
    value: int


@dataclass(frozen=True)
class StrConst:
    value: str


@dataclass(frozen=True)
class NullConst:
    pass


Atom = Reg | IntConst | StrConst | NullConst


@dataclass(frozen=True)
class MethodSig:
    declaring_class: str
    return_type: str
    name: str
    param_types: tuple[str, ...]


@dataclass(frozen=True)
class FieldSig:
    declaring_class: str
    type: str
    name: str

    @property
    def simple_class_name(self):
        return self.declaring_class.rsplit(".", 1)[-1]


@dataclass(frozen=True)
class InvokeExpr:
    kind: str
    receiver: Reg | None
    sig: MethodSig
    args: tuple[Atom, ...]


@dataclass(frozen=True)
class Statement:
    sid: StmtId


@dataclass(frozen=True)
class AssignAtom(Statement):
    dst: Reg
    src: Atom


@dataclass(frozen=True)
class AssignCast(Statement):
    dst: Reg
    cast_type: str
    src: Reg


@dataclass(frozen=True)
class FieldRead(Statement):
    dst: Reg
    fld: FieldSig
    base: Reg | None  # None for static reads


@dataclass(frozen=True)
class FieldWrite(Statement):
    fld: FieldSig
    base: Reg | None
    value: Atom


@dataclass(frozen=True)
class InvokeStmt(Statement):
    result: Reg | None
    expr: InvokeExpr


@dataclass(frozen=True)
class ReturnStmt(Statement):
    value: Atom | None


def method_token(sig: MethodSig) -> str:
    """Short method key used in statement ids; disambiguates overloads."""
    return f"{sig.name}({','.join(sig.param_types)})"


@dataclass
class MethodBody:
    sig: MethodSig
    params: tuple[str, ...]
    is_static: bool
    statements: tuple[Statement, ...]

    @property
    def method_token(self):
        return method_token(self.sig)


@dataclass
class CodeUnit:
    class_name: str
    superclass: str | None
    fields: tuple[FieldSig, ...]
    methods: tuple[MethodBody, ...]

    def find_method(self, name, param_types):
        for m in self.methods:
            if m.sig.name == name and m.sig.param_types == tuple(param_types):
                return m
        return None


@dataclass
class RTable:
    """Resource-id table joining layout id names to integer ids."""

    entries: dict[str, int]

    def lookup(self, name):
        return self.entries.get(name)


@dataclass
class LayoutDoc:
    """A parsed layout XML file; `file` is the name within res/layout/."""

    file: str
    root: ET.Element


@dataclass
class AppBundle:
    app_package: str
    layouts: list[LayoutDoc]
    rtable: RTable
    code_units: dict[str, CodeUnit]
    _stmt_index: dict[StmtId, Statement] | None = field(
        default=None, repr=False, compare=False
    )

    def iter_statements(self):
        """Yield (unit, method, statement) over all code in sorted class order."""
        for name in sorted(self.code_units):
            unit = self.code_units[name]
            for m in unit.methods:
                for s in m.statements:
                    yield unit, m, s

    def statement(self, sid: StmtId) -> Statement:
        if self._stmt_index is None:
            self._stmt_index = {s.sid: s for _, _, s in self.iter_statements()}
        return self._stmt_index[sid]


# ---------------------------------------------------------------------------
# lexer

_PUNCT = set("<>(),:.=[]")
_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_$")
_IDENT_CONT = _IDENT_START | set("0123456789")
_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\"}
_UNESCAPES = {"\n": "\\n", "\t": "\\t", "\r": "\\r", '"': '\\"', "\\": "\\\\"}


@dataclass(frozen=True)
class _Tok:
    kind: str  # ident | int | str | punct | nl | eof
    value: object
    line: int
    col: int


def _lex(text, filename):
    toks = []
    i, n = 0, len(text)
    line, col = 1, 1
    while i < n:
        c = text[i]
        if c in " \t\r":
            i += 1
            col += 1
        elif c == "\n":
            toks.append(_Tok("nl", "\n", line, col))
            i += 1
            line += 1
            col = 1
        elif c in _IDENT_START:
            start = i
            while i < n and text[i] in _IDENT_CONT:
                i += 1
            toks.append(_Tok("ident", text[start:i], line, col))
            col += i - start
        elif c.isdigit() or (c == "-" and i + 1 < n and text[i + 1].isdigit()):
            start = i
            if c == "-":
                i += 1
            if text[i] == "0" and i + 1 < n and text[i + 1] in "xX":
                i += 2
                while i < n and text[i] in "0123456789abcdefABCDEF":
                    i += 1
                try:
                    value = int(text[start:i], 16)
                except ValueError:
                    raise IrSyntaxError("bad hex literal", filename, line, col)
            else:
                while i < n and text[i].isdigit():
                    i += 1
                value = int(text[start:i])
            toks.append(_Tok("int", value, line, col))
            col += i - start
        elif c == '"':
            start_line, start_col = line, col
            i += 1
            col += 1
            buf = []
            while True:
                if i >= n or text[i] == "\n":
                    raise IrSyntaxError(
                        "unterminated string literal", filename, start_line, start_col
                    )
                ch = text[i]
                if ch == '"':
                    i += 1
                    col += 1
                    break
                if ch == "\\":
                    if i + 1 >= n or text[i + 1] not in _ESCAPES:
                        raise IrSyntaxError("bad escape in string", filename, line, col)
                    buf.append(_ESCAPES[text[i + 1]])
                    i += 2
                    col += 2
                else:
                    buf.append(ch)
                    i += 1
                    col += 1
            toks.append(_Tok("str", "".join(buf), start_line, start_col))
        elif c in _PUNCT:
            toks.append(_Tok("punct", c, line, col))
            i += 1
            col += 1
        else:
            raise IrSyntaxError(f"unexpected character {c!r}", filename, line, col)
    toks.append(_Tok("eof", None, line, col))
    return toks


# ---------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, text, filename):
        self.filename = filename
        self.toks = _lex(text, filename)
        self.pos = 0

    # -- token plumbing

    def peek(self, ahead=0):
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self):
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, message, tok=None, cls=IrSyntaxError):
        tok = tok or self.peek()
        raise cls(message, self.filename, tok.line, tok.col)

    def at_punct(self, ch):
        t = self.peek()
        return t.kind == "punct" and t.value == ch

    def at_word(self, word):
        t = self.peek()
        return t.kind == "ident" and t.value == word

    def expect_punct(self, ch, cls=IrSyntaxError):
        if not self.at_punct(ch):
            self.error(f"expected {ch!r}", cls=cls)
        return self.next()

    def expect_word(self, word):
        if not self.at_word(word):
            self.error(f"expected {word!r}")
        return self.next()

    def expect_ident(self, what="identifier", cls=IrSyntaxError):
        t = self.peek()
        if t.kind != "ident":
            self.error(f"expected {what}", cls=cls)
        return self.next().value

    def skip_newlines(self):
        while self.peek().kind == "nl":
            self.next()

    def end_line(self):
        t = self.peek()
        if t.kind == "eof":
            return
        if t.kind != "nl":
            self.error("expected end of line")
        self.skip_newlines()

    # -- small grammar pieces

    def qname(self, cls=IrSyntaxError):
        parts = [self.expect_ident("qualified name", cls=cls)]
        while self.at_punct(".") and self.peek(1).kind == "ident":
            self.next()
            parts.append(self.next().value)
        return ".".join(parts)

    def type_name(self, cls=IrSyntaxError):
        name = self.qname(cls=cls)
        while self.at_punct("["):
            self.next()
            self.expect_punct("]", cls=cls)
            name += "[]"
        return name

    def register(self, what="register"):
        t = self.peek()
        if t.kind != "ident":
            self.error(f"expected {what}")
        if t.value in RESERVED:
            self.error(f"{t.value!r} cannot be used as a {what}")
        return Reg(self.next().value)

    def atom(self):
        t = self.peek()
        if t.kind == "int":
            return IntConst(self.next().value)
        if t.kind == "str":
            return StrConst(self.next().value)
        if t.kind == "ident":
            if t.value == "null":
                self.next()
                return NullConst()
            if t.value == "this":
                self.next()
                return Reg("this")
            return self.register()
        self.error("expected atom")

    def field_sig(self):
        """<QName: Type Name> with the angle brackets."""
        self.expect_punct("<", cls=MalformedSignature)
        cls_name = self.qname(cls=MalformedSignature)
        self.expect_punct(":", cls=MalformedSignature)
        ftype = self.type_name(cls=MalformedSignature)
        fname = self.expect_ident("field name", cls=MalformedSignature)
        self.expect_punct(">", cls=MalformedSignature)
        return FieldSig(cls_name, ftype, fname)

    def method_sig(self):
        """<QName: Type Name(Type, ...)> with the angle brackets."""
        self.expect_punct("<", cls=MalformedSignature)
        cls_name = self.qname(cls=MalformedSignature)
        self.expect_punct(":", cls=MalformedSignature)
        rtype = self.type_name(cls=MalformedSignature)
        mname = self.expect_ident("method name", cls=MalformedSignature)
        self.expect_punct("(", cls=MalformedSignature)
        params = []
        if not self.at_punct(")"):
            params.append(self.type_name(cls=MalformedSignature))
            while self.at_punct(","):
                self.next()
                params.append(self.type_name(cls=MalformedSignature))
        self.expect_punct(")", cls=MalformedSignature)
        self.expect_punct(">", cls=MalformedSignature)
        return MethodSig(cls_name, rtype, mname, tuple(params))

    def invoke_expr(self):
        kind_tok = self.peek()
        kind = self.expect_ident("invoke kind")
        if kind not in INVOKE_KINDS:
            self.error(f"unknown invoke kind {kind!r}", kind_tok, UnknownInvokeKind)
        receiver = None
        if kind == "staticinvoke":
            if not self.at_punct("<"):
                self.error("staticinvoke takes no receiver")
        else:
            t = self.peek()
            if t.kind != "ident":
                self.error("expected receiver register")
            if t.value == "this":
                self.next()
                receiver = Reg("this")
            else:
                receiver = self.register("receiver")
            self.expect_punct(".")
        sig = self.method_sig()
        self.expect_punct("(")
        args = []
        if not self.at_punct(")"):
            args.append(self.atom())
            while self.at_punct(","):
                self.next()
                args.append(self.atom())
        self.expect_punct(")")
        if len(args) != len(sig.param_types):
            self.error(
                f"{len(args)} argument(s) for {len(sig.param_types)} parameter(s)",
                kind_tok,
            )
        return InvokeExpr(kind, receiver, sig, tuple(args))

    # -- statements

    def statement(self, make_sid):
        t = self.peek()
        if t.kind == "ident" and t.value == "return":
            self.next()
            value = None
            if self.peek().kind not in ("nl", "eof"):
                value = self.atom()
            stmt = ReturnStmt(make_sid(), value)
        elif t.kind == "ident" and t.value in INVOKE_KINDS:
            expr = self.invoke_expr()
            stmt = InvokeStmt(make_sid(), None, expr)
        elif t.kind == "ident" and t.value.endswith("invoke"):
            self.error(f"unknown invoke kind {t.value!r}", t, UnknownInvokeKind)
        elif self.at_punct("<"):
            fld = self.field_sig()
            self.expect_punct("=")
            value = self.atom()
            stmt = FieldWrite(make_sid(), fld, None, value)
        elif t.kind == "ident":
            dst = self.register()
            if self.at_punct("="):
                self.next()
                stmt = self.assignment_rhs(dst, make_sid)
            elif self.at_punct("."):
                self.next()
                fld = self.field_sig()
                self.expect_punct("=")
                value = self.atom()
                stmt = FieldWrite(make_sid(), fld, dst, value)
            else:
                self.error("expected '=' or '.' after register")
        else:
            self.error("expected statement")
        self.end_line()
        return stmt

    def assignment_rhs(self, dst, make_sid):
        t = self.peek()
        if t.kind == "ident" and t.value in INVOKE_KINDS:
            expr = self.invoke_expr()
            return InvokeStmt(make_sid(), dst, expr)
        if t.kind == "ident" and t.value.endswith("invoke"):
            self.error(f"unknown invoke kind {t.value!r}", t, UnknownInvokeKind)
        if self.at_punct("("):
            self.next()
            cast_type = self.type_name()
            self.expect_punct(")")
            src = self.register("cast operand")
            return AssignCast(make_sid(), dst, cast_type, src)
        if self.at_punct("<"):
            fld = self.field_sig()
            return FieldRead(make_sid(), dst, fld, None)
        if t.kind == "ident" and self.peek(1).kind == "punct" and self.peek(1).value == ".":
            if self.peek(2).kind == "punct" and self.peek(2).value == "<":
                base = self.register("base register")
                self.next()  # the dot
                fld = self.field_sig()
                return FieldRead(make_sid(), dst, fld, base)
        return AssignAtom(make_sid(), dst, self.atom())

    # -- declarations

    def method_decl(self, class_name, seen_sigs):
        head = self.expect_word("method")
        is_static = False
        if self.at_word("static"):
            self.next()
            is_static = True
        rtype = self.type_name()
        name_tok = self.peek()
        name = self.expect_ident("method name")
        if name in RESERVED:
            self.error(f"{name!r} cannot be used as a method name", name_tok)
        self.expect_punct("(")
        ptypes, pnames = [], []
        if not self.at_punct(")"):
            while True:
                ptypes.append(self.type_name())
                pnames.append(self.register("parameter").name)
                if not self.at_punct(","):
                    break
                self.next()
        self.expect_punct(")")
        self.expect_punct(":")
        self.end_line()
        sig = MethodSig(class_name, rtype, name, tuple(ptypes))
        if (name, sig.param_types) in seen_sigs:
            self.error(f"duplicate method {method_token(sig)}", head)
        seen_sigs.add((name, sig.param_types))
        if len(set(pnames)) != len(pnames):
            self.error("duplicate parameter name", head)

        token = method_token(sig)
        statements = []
        lines = []
        while True:
            self.skip_newlines()
            if self.peek().kind == "eof" or self.at_word("method"):
                break
            if self.at_word("field") or self.at_word("class"):
                self.error("declarations must precede method bodies")
            ordinal = len(statements)
            line = self.peek().line
            stmt = self.statement(lambda: StmtId(class_name, token, ordinal))
            statements.append(stmt)
            lines.append(line)
        body = MethodBody(sig, tuple(pnames), is_static, tuple(statements))
        self._check_registers(body, lines, head)
        return body

    def _check_registers(self, body, lines, head_tok):
        """Every register read must be a parameter, `this`, or assigned somewhere."""
        assigned = set(body.params)
        for s in body.statements:
            match s:
                case AssignAtom(dst=d) | AssignCast(dst=d) | FieldRead(dst=d):
                    assigned.add(d.name)
                case InvokeStmt(result=Reg(name=rn)):
                    assigned.add(rn)

        def reads_of(s):
            out = []
            match s:
                case AssignAtom(src=a) | ReturnStmt(value=a) if isinstance(a, Reg):
                    out.append(a)
                case AssignCast(src=r):
                    out.append(r)
                case FieldRead(base=Reg() as b):
                    out.append(b)
                case FieldWrite(base=b, value=v):
                    if isinstance(b, Reg):
                        out.append(b)
                    if isinstance(v, Reg):
                        out.append(v)
                case InvokeStmt(expr=e):
                    if e.receiver is not None:
                        out.append(e.receiver)
                    out.extend(a for a in e.args if isinstance(a, Reg))
            return out

        for s, line in zip(body.statements, lines):
            for r in reads_of(s):
                if r.name == "this":
                    if body.is_static:
                        raise IrSyntaxError(
                            "'this' read in a static method", self.filename, line, 1
                        )
                    continue
                if r.name not in assigned:
                    raise IrSyntaxError(
                        f"register {r.name!r} is read but never assigned",
                        self.filename,
                        line,
                        1,
                    )

    def code_unit(self):
        self.skip_newlines()
        self.expect_word("class")
        class_name = self.qname()
        superclass = None
        if self.at_word("extends"):
            self.next()
            superclass = self.qname()
        self.end_line()

        fields = []
        while self.at_word("field"):
            self.next()
            ftype = self.type_name()
            fname = self.expect_ident("field name")
            fields.append(FieldSig(class_name, ftype, fname))
            self.end_line()

        methods = []
        seen = set()
        while self.at_word("method"):
            methods.append(self.method_decl(class_name, seen))
            self.skip_newlines()
        if self.peek().kind != "eof":
            self.error("expected 'method' or end of file")
        return CodeUnit(class_name, superclass, tuple(fields), tuple(methods))


def parse_code_unit(text: str, filename: str = "<unit>") -> CodeUnit:
    """Parse one class worth of IR text.

    Raises IrSyntaxError (or its UnknownInvokeKind / MalformedSignature
    refinements) with a file:line:col location on any malformed input.
    """
    return _Parser(text, filename).code_unit()


def parse_method_sig(text: str) -> MethodSig:
    """Parse a canonical `<Class: RetType name(T1,T2)>` signature string."""
    p = _Parser(text, "<signature>")
    p.skip_newlines()
    sig = p.method_sig()
    p.skip_newlines()
    if p.peek().kind != "eof":
        p.error("trailing input after signature", cls=MalformedSignature)
    return sig


# ---------------------------------------------------------------------------
# renderer


def render_method_sig(sig: MethodSig) -> str:
    return f"<{sig.declaring_class}: {sig.return_type} {sig.name}({','.join(sig.param_types)})>"


def render_field_sig(fld: FieldSig) -> str:
    return f"<{fld.declaring_class}: {fld.type} {fld.name}>"


def _escape(s):
    return "".join(_UNESCAPES.get(c, c) for c in s)


def render_atom(atom: Atom) -> str:
    match atom:
        case Reg(name):
            return name
        case IntConst(v):
            return str(v)
        case StrConst(v):
            return f'"{_escape(v)}"'
        case NullConst():
            return "null"
    raise TypeError(f"not an atom: {atom!r}")


def render_invoke(expr: InvokeExpr) -> str:
    recv = f"{expr.receiver.name}." if expr.receiver is not None else ""
    args = ", ".join(render_atom(a) for a in expr.args)
    return f"{expr.kind} {recv}{render_method_sig(expr.sig)}({args})"


def render_statement(stmt: Statement) -> str:
    match stmt:
        case AssignAtom(dst=d, src=a):
            return f"{d.name} = {render_atom(a)}"
        case AssignCast(dst=d, cast_type=t, src=s):
            return f"{d.name} = ({t}) {s.name}"
        case FieldRead(dst=d, fld=f, base=b):
            base = f"{b.name}." if b is not None else ""
            return f"{d.name} = {base}{render_field_sig(f)}"
        case FieldWrite(fld=f, base=b, value=v):
            base = f"{b.name}." if b is not None else ""
            return f"{base}{render_field_sig(f)} = {render_atom(v)}"
        case InvokeStmt(result=r, expr=e):
            lhs = f"{r.name} = " if r is not None else ""
            return f"{lhs}{render_invoke(e)}"
        case ReturnStmt(value=v):
            return "return" if v is None else f"return {render_atom(v)}"
    raise TypeError(f"not a statement: {stmt!r}")


def render_code_unit(unit: CodeUnit) -> str:
    lines = [f"class {unit.class_name}"]
    if unit.superclass:
        lines[0] += f" extends {unit.superclass}"
    for f in unit.fields:
        lines.append(f"field {f.type} {f.name}")
    for m in unit.methods:
        static = "static " if m.is_static else ""
        params = ", ".join(f"{t} {n}" for t, n in zip(m.sig.param_types, m.params))
        lines.append(f"method {static}{m.sig.return_type} {m.sig.name}({params}):")
        for s in m.statements:
            lines.append(f"  {render_statement(s)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# bundle loading


def parse_rtable(text: str, filename: str = "rtable.txt") -> RTable:
    """Parse `id <name> <int>` lines; `#` starts a comment, ints may be hex."""
    entries = {}
    seen_ids = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] != "id":
            raise RTableSyntaxError(f"{filename}:{lineno}: expected 'id <name> <int>'")
        _, name, value = parts
        try:
            num = int(value, 16) if value.lower().startswith("0x") else int(value, 10)
        except ValueError:
            raise RTableSyntaxError(f"{filename}:{lineno}: bad integer {value!r}")
        if not 0 <= num <= MAX_RESOURCE_ID:
            raise RTableSyntaxError(f"{filename}:{lineno}: id out of 32-bit range")
        if name in entries:
            raise RTableSyntaxError(f"{filename}:{lineno}: duplicate name {name!r}")
        if num in seen_ids:
            raise RTableSyntaxError(
                f"{filename}:{lineno}: id {value} already bound to {seen_ids[num]!r}"
            )
        entries[name] = num
        seen_ids[num] = name
    return RTable(entries)


def _parse_manifest(path: Path) -> str:
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as e:
        raise MalformedManifest(f"{path}: {e}")
    pkg = root.get("package")
    if pkg is None:
        raise MalformedManifest(f"{path}: root element has no package attribute")
    segments = pkg.split(".")
    if not pkg or any(not seg for seg in segments):
        raise MalformedManifest(f"{path}: bad package name {pkg!r}")
    return pkg


def parse_bundle(app_dir) -> AppBundle:
    """Load a decompiled app bundle directory into an AppBundle.

    Layout: manifest.xml (required), res/rtable.txt, res/layout/*.xml and
    code/**/*.jtac (all optional; absent means empty). Every file is read
    exactly once and the result is deterministic for a given directory.
    """
    app_dir = Path(app_dir)
    manifest = app_dir / "manifest.xml"
    if not manifest.is_file():
        raise MissingManifest(f"{manifest} not found")
    app_package = _parse_manifest(manifest)

    rtable_path = app_dir / "res" / "rtable.txt"
    if rtable_path.is_file():
        rtable = parse_rtable(
            rtable_path.read_text(encoding="utf-8", errors="replace"),
            str(rtable_path),
        )
    else:
        rtable = RTable({})

    layouts = []
    layout_dir = app_dir / "res" / "layout"
    if layout_dir.is_dir():
        for path in sorted(layout_dir.glob("*.xml")):
            try:
                root = ET.parse(path).getroot()
            except ET.ParseError as e:
                raise XmlSyntaxError(f"{path}: {e}")
            layouts.append(LayoutDoc(path.name, root))

    code_units = {}
    code_dir = app_dir / "code"
    if code_dir.is_dir():
        for path in sorted(code_dir.rglob("*.jtac")):
            rel = str(path.relative_to(app_dir))
            unit = parse_code_unit(
                path.read_text(encoding="utf-8", errors="replace"), rel
            )
            if unit.class_name in code_units:
                raise DuplicateClass(f"{rel}: class {unit.class_name} already defined")
            code_units[unit.class_name] = unit

    return AppBundle(app_package, layouts, rtable, code_units)


def resolve_call(expr: InvokeExpr, bundle: AppBundle) -> MethodBody | None:
    """Resolve a call site to a method body within the bundle, or None.

    The statically named class and its superclass chain are searched for a
    matching (name, parameter types) method; the walk stops as soon as the
    chain leaves the bundle. No subclasses are ever considered.
    """
    name, params = expr.sig.name, expr.sig.param_types
    cls = expr.sig.declaring_class
    seen = set()
    while cls is not None and cls in bundle.code_units and cls not in seen:
        seen.add(cls)
        unit = bundle.code_units[cls]
        found = unit.find_method(name, params)
        if found is not None:
            return found
        cls = unit.superclass
    return None
