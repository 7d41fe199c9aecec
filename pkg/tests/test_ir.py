"""Frontend tests: lexing, parsing, rendering, bundle loading, call resolution."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uitaint.errors import (
    DuplicateClass,
    IrSyntaxError,
    MalformedManifest,
    MalformedSignature,
    MissingManifest,
    RTableSyntaxError,
    UnknownInvokeKind,
    XmlSyntaxError,
)
from uitaint.ir import (
    AssignAtom,
    AssignCast,
    CodeUnit,
    FieldRead,
    FieldSig,
    FieldWrite,
    IntConst,
    InvokeExpr,
    InvokeStmt,
    MethodBody,
    MethodSig,
    NullConst,
    Reg,
    ReturnStmt,
    StmtId,
    StrConst,
    method_token,
    parse_bundle,
    parse_code_unit,
    parse_method_sig,
    parse_rtable,
    render_code_unit,
    render_statement,
    resolve_call,
)
from conftest import write_bundle

SIMPLE = """\
class com.app.Main extends android.app.Activity

field java.lang.String name

method void onCreate(android.os.Bundle b1):
  r0 = this
  $r1 = virtualinvoke r0.<com.app.Main: android.view.View findViewById(int)>(2131230960)
  $r2 = (android.widget.EditText) $r1
  r0.<com.app.Main: java.lang.String name> = "x"
  $r3 = r0.<com.app.Main: java.lang.String name>
  return

method static int answer():
  return 42
"""


def test_parse_simple_unit_shape():
    unit = parse_code_unit(SIMPLE, "Main.jtac")
    assert unit.class_name == "com.app.Main"
    assert unit.superclass == "android.app.Activity"
    assert unit.fields == (FieldSig("com.app.Main", "java.lang.String", "name"),)
    assert [m.sig.name for m in unit.methods] == ["onCreate", "answer"]

    body = unit.methods[0]
    assert body.params == ("b1",)
    assert not body.is_static
    kinds = [type(s).__name__ for s in body.statements]
    assert kinds == [
        "AssignAtom", "InvokeStmt", "AssignCast", "FieldWrite", "FieldRead",
        "ReturnStmt",
    ]
    assert unit.methods[1].is_static
    assert unit.methods[1].statements[0].value == IntConst(42)


def test_statement_ids_are_dense_and_ordered():
    unit = parse_code_unit(SIMPLE)
    body = unit.methods[0]
    sids = [s.sid for s in body.statements]
    assert [s.ordinal for s in sids] == list(range(len(sids)))
    assert all(s.cls == "com.app.Main" for s in sids)
    assert all(s.method == "onCreate(android.os.Bundle)" for s in sids)
    assert sids == sorted(sids)
    assert len(set(sids)) == len(sids)


def test_method_token_includes_param_types():
    sig = parse_method_sig("<a.B: void f(int,java.lang.String[])>")
    assert method_token(sig) == "f(int,java.lang.String[])"
    assert sig.param_types == ("int", "java.lang.String[]")


def test_hex_literals_parse_and_render_decimal():
    unit = parse_code_unit(
        "class a.B\nmethod static int f():\n  r1 = 0x7f0800e5\n  return r1\n"
    )
    stmt = unit.methods[0].statements[0]
    assert stmt.src == IntConst(0x7F0800E5)
    assert render_statement(stmt) == "r1 = 2131230949"


def test_string_escapes_round_trip():
    text = (
        'class a.B\nmethod static void f():\n'
        '  r1 = "a\\nb\\tc\\rd\\"e\\\\f"\n  return\n'
    )
    unit = parse_code_unit(text)
    assert unit.methods[0].statements[0].src == StrConst('a\nb\tc\rd"e\\f')
    reparsed = parse_code_unit(render_code_unit(unit))
    assert reparsed == unit


# ---------------------------------------------------------------------------
# error reporting


@pytest.mark.parametrize(
    "line,exc",
    [
        ("r1 = superinvoke r0.<a.B: void f()>()", UnknownInvokeKind),
        ("superinvoke r0.<a.B: void f()>()", UnknownInvokeKind),
        ("r1 = virtualinvoke r0.<a.B void f()>()", MalformedSignature),
        ("r1 = staticinvoke <a.B: void f(int)>()", IrSyntaxError),
        ("staticinvoke r0.<a.B: void f()>()", IrSyntaxError),
        ("return = 1", IrSyntaxError),
        ("class = 1", IrSyntaxError),
        ('r1 = "unterminated', IrSyntaxError),
        ('r1 = "bad\\q"', IrSyntaxError),
        ("r1 = r9", IrSyntaxError),  # r9 never assigned
    ],
)
def test_statement_errors(line, exc):
    text = f"class a.B\nmethod static void f():\n  r0 = 1\n  {line}\n"
    with pytest.raises(exc):
        parse_code_unit(text)


def test_this_in_static_method_rejected():
    with pytest.raises(IrSyntaxError, match="static"):
        parse_code_unit("class a.B\nmethod static void f():\n  r1 = this\n")


def test_error_carries_location():
    text = "class a.B\nmethod static void f():\n  r1 = superinvoke <a.B: void g()>()\n"
    with pytest.raises(IrSyntaxError) as ei:
        parse_code_unit(text, "Bad.jtac")
    err = ei.value
    assert err.file == "Bad.jtac"
    assert err.line == 3
    assert str(err).startswith("Bad.jtac:3:")


def test_duplicate_method_rejected():
    text = (
        "class a.B\n"
        "method static void f():\n  return\n"
        "method static void f():\n  return\n"
    )
    with pytest.raises(IrSyntaxError, match="duplicate method"):
        parse_code_unit(text)


def test_arg_count_must_match_params():
    text = (
        "class a.B\nmethod static void f():\n"
        "  staticinvoke <a.B: void g(int,int)>(1)\n"
    )
    with pytest.raises(IrSyntaxError, match="argument"):
        parse_code_unit(text)


def test_parse_method_sig_rejects_trailing_junk():
    with pytest.raises(MalformedSignature):
        parse_method_sig("<a.B: void f()> trailing")


# ---------------------------------------------------------------------------
# random round-trip: parse . render . parse == parse


_TYPES = ("int", "boolean", "java.lang.String", "byte[]", "com.gen.Thing",
          "android.view.View", "long[][]")
_CLASSES = ("com.gen.Alpha", "com.gen.sub.Beta", "org.other.Gamma$Inner",
            "io.lib.Delta", "a.b.R$id")
_STRINGS = ("", "plain", "sp ace", 'q"uote', "new\nline", "tab\tsep",
            "back\\slash", "ret\rurn")
_NAMES = ("f0", "f1", "value$x", "m0", "m1", "run2")


class ProgramGen:
    """Seeded generator of random-but-valid code units (models, not text)."""

    def __init__(self, rng: random.Random):
        self.rng = rng

    def atom(self, regs):
        pick = self.rng.random()
        if pick < 0.35 and regs:
            return Reg(self.rng.choice(regs))
        if pick < 0.6:
            return IntConst(self.rng.choice((-7, 0, 1, 42, 0x7F0800E5, -2**31)))
        if pick < 0.8:
            return StrConst(self.rng.choice(_STRINGS))
        return NullConst()

    def field_sig(self):
        return FieldSig(self.rng.choice(_CLASSES), self.rng.choice(_TYPES),
                        self.rng.choice(_NAMES))

    def method_sig(self, n_params):
        return MethodSig(
            self.rng.choice(_CLASSES),
            self.rng.choice(_TYPES + ("void",)),
            self.rng.choice(_NAMES),
            tuple(self.rng.choice(_TYPES) for _ in range(n_params)),
        )

    def statement(self, sid, regs, is_static):
        """Returns (stmt, newly assigned register or None)."""
        rng = self.rng
        dst = Reg(f"$v{sid.ordinal}")
        choice = rng.randrange(6)
        if choice == 0:
            src = Reg("this") if (not is_static and rng.random() < 0.2) \
                else self.atom(regs)
            return AssignAtom(sid, dst, src), dst.name
        if choice == 1 and regs:
            return AssignCast(sid, dst, rng.choice(_TYPES), Reg(rng.choice(regs))), dst.name
        if choice == 2:
            base = Reg(rng.choice(regs)) if regs and rng.random() < 0.5 else None
            return FieldRead(sid, dst, self.field_sig(), base), dst.name
        if choice == 3 and regs:
            base = Reg(rng.choice(regs)) if rng.random() < 0.5 else None
            return FieldWrite(sid, self.field_sig(), base, self.atom(regs)), None
        # invoke
        kind = rng.choice(("virtualinvoke", "interfaceinvoke", "specialinvoke",
                           "staticinvoke"))
        receiver = None if kind == "staticinvoke" else (
            Reg(rng.choice(regs)) if regs else None)
        if kind != "staticinvoke" and receiver is None:
            kind = "staticinvoke"
        sig = self.method_sig(rng.randrange(3))
        args = tuple(self.atom(regs) for _ in sig.param_types)
        result = dst if rng.random() < 0.6 else None
        stmt = InvokeStmt(sid, result, InvokeExpr(kind, receiver, sig, args))
        return stmt, (result.name if result else None)

    def method(self, cls, index):
        rng = self.rng
        n_params = rng.randrange(3)
        sig = MethodSig(cls, rng.choice(_TYPES + ("void",)), f"gen{index}",
                        tuple(rng.choice(_TYPES) for _ in range(n_params)))
        params = tuple(f"p{i}" for i in range(n_params))
        is_static = rng.random() < 0.4
        mtok = method_token(sig)
        regs = list(params)
        statements = []
        for ordinal in range(rng.randrange(1, 9)):
            stmt, new_reg = self.statement(StmtId(cls, mtok, ordinal), regs, is_static)
            statements.append(stmt)
            if new_reg and new_reg not in regs:
                regs.append(new_reg)
        if rng.random() < 0.7:
            value = self.atom(regs) if rng.random() < 0.6 else None
            statements.append(
                ReturnStmt(StmtId(cls, mtok, len(statements)), value)
            )
        return MethodBody(sig, params, is_static, tuple(statements))

    def unit(self):
        rng = self.rng
        cls = rng.choice(_CLASSES)
        superclass = rng.choice((None, "android.app.Activity", "com.gen.Base"))
        fields = tuple(
            FieldSig(cls, rng.choice(_TYPES), f"fld{i}")
            for i in range(rng.randrange(3))
        )
        methods = tuple(self.method(cls, i) for i in range(rng.randrange(1, 5)))
        return CodeUnit(cls, superclass, fields, methods)


@pytest.mark.parametrize("seed", range(60))
def test_round_trip_random_units(seed):
    unit = ProgramGen(random.Random(seed)).unit()
    text = render_code_unit(unit)
    reparsed = parse_code_unit(text)
    assert reparsed == unit, f"round-trip mismatch for seed {seed}:\n{text}"
    assert render_code_unit(reparsed) == text


@settings(max_examples=150, deadline=None)
@given(st.text(alphabet=st.characters(codec="ascii"), max_size=120))
def test_parser_raises_only_frontend_errors(text):
    try:
        parse_code_unit(text)
    except IrSyntaxError:
        pass  # includes UnknownInvokeKind / MalformedSignature subclasses


# ---------------------------------------------------------------------------
# call resolution


CHAIN = {
    "A.jtac": (
        "class com.app.A\n"
        "method void f():\n  return\n"
        "method void g(int x1):\n  return\n"
    ),
    "B.jtac": "class com.app.B extends com.app.A\nmethod void f():\n  return\n",
    "C.jtac": "class com.app.C extends com.app.B\nmethod void h():\n  return\n",
}


def _chain_bundle(tmp_path):
    return parse_bundle(write_bundle(tmp_path / "app", code=CHAIN))


def _call(cls, name, params=()):
    sig = MethodSig(cls, "void", name, tuple(params))
    kind = "virtualinvoke"
    return InvokeExpr(kind, Reg("r0"), sig, tuple(IntConst(0) for _ in params))


def test_resolve_exact_class(tmp_path):
    bundle = _chain_bundle(tmp_path)
    body = resolve_call(_call("com.app.B", "f"), bundle)
    assert body is not None and body.sig.declaring_class == "com.app.B"


def test_resolve_walks_superclass_chain(tmp_path):
    bundle = _chain_bundle(tmp_path)
    body = resolve_call(_call("com.app.C", "g", ("int",)), bundle)
    assert body is not None and body.sig.declaring_class == "com.app.A"
    # nearest override wins
    body = resolve_call(_call("com.app.C", "f"), bundle)
    assert body.sig.declaring_class == "com.app.B"


def test_resolve_outside_bundle_is_opaque(tmp_path):
    bundle = _chain_bundle(tmp_path)
    assert resolve_call(_call("com.app.C", "nothere"), bundle) is None
    assert resolve_call(_call("java.util.List", "add", ("int",)), bundle) is None


def test_resolve_survives_superclass_cycle(tmp_path):
    code = {
        "X.jtac": "class a.X extends a.Y\nmethod void f():\n  return\n",
        "Y.jtac": "class a.Y extends a.X\nmethod void g():\n  return\n",
    }
    bundle = parse_bundle(write_bundle(tmp_path / "app", code=code))
    assert resolve_call(_call("a.X", "nope"), bundle) is None
    assert resolve_call(_call("a.X", "g"), bundle).sig.declaring_class == "a.Y"


# ---------------------------------------------------------------------------
# rtable + bundle loading


def test_parse_rtable_accepts_comments_and_hex():
    table = parse_rtable("# header\nid weightEditText 0x7f0800e5\nid other 7\n")
    assert table.lookup("weightEditText") == 2131230949
    assert table.lookup("other") == 7
    assert table.lookup("missing") is None


@pytest.mark.parametrize(
    "body",
    [
        "id a 1\nid a 2\n",        # duplicate name
        "id a 1\nid b 1\n",        # duplicate value
        "id a 0x100000000\n",      # out of 32-bit range
        "id a -1\n",
        "resource a 1\n",
        "id a\n",
    ],
)
def test_parse_rtable_rejects(body):
    with pytest.raises(RTableSyntaxError):
        parse_rtable(body)


def test_bundle_requires_manifest(tmp_path):
    (tmp_path / "app").mkdir()
    with pytest.raises(MissingManifest):
        parse_bundle(tmp_path / "app")


def test_bundle_rejects_bad_manifest(tmp_path):
    app = tmp_path / "app"
    app.mkdir()
    (app / "manifest.xml").write_text("<manifest/>")
    with pytest.raises(MalformedManifest):
        parse_bundle(app)
    (app / "manifest.xml").write_text('<manifest package="com..app"/>')
    with pytest.raises(MalformedManifest):
        parse_bundle(app)


def test_bundle_rejects_duplicate_class(tmp_path):
    code = {
        "One.jtac": "class a.B\nmethod void f():\n  return\n",
        "Two.jtac": "class a.B\nmethod void g():\n  return\n",
    }
    with pytest.raises(DuplicateClass):
        parse_bundle(write_bundle(tmp_path / "app", code=code))


def test_bundle_rejects_bad_layout_xml(tmp_path):
    app = write_bundle(tmp_path / "app", layouts={"broken.xml": "<a><b></a>"})
    with pytest.raises(XmlSyntaxError):
        parse_bundle(app)


def test_bundle_minimal_is_manifest_only(tmp_path):
    bundle = parse_bundle(write_bundle(tmp_path / "app", package="org.x.y"))
    assert bundle.app_package == "org.x.y"
    assert bundle.layouts == [] and bundle.code_units == {}
    assert bundle.rtable.entries == {}


def test_bundle_orders_classes_and_statements(tmp_path):
    code = {
        "Z.jtac": "class z.Last\nmethod void f():\n  return\n",
        "A.jtac": "class a.First\nmethod void f():\n  r1 = 1\n  return\n",
    }
    bundle = parse_bundle(write_bundle(tmp_path / "app", code=code))
    seen = [(u.class_name, s.sid.ordinal) for u, _, s in bundle.iter_statements()]
    assert seen == [("a.First", 0), ("a.First", 1), ("z.Last", 0)]
    sid = seen and bundle.code_units["a.First"].methods[0].statements[1].sid
    assert isinstance(bundle.statement(sid), ReturnStmt)
