"""Deterministic synthesis of app bundles with planted, annotated leaks.

Each generated bundle carries a ground_truth.tsv listing exactly the leaks the
analyzer must find: same seed, same bytes. Planted flows live in isolated
classes with single-use registers so the flow-insensitive engine can neither
miss them nor smear taint between them; decoys are guaranteed non-flows.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidSpec
from .pi import KIND_ORDER, PiKind
from .sources_sinks import DestCategory

_MAX_SEED = 2**64 - 1

# id-name stem per PI kind; every stem hits the default lexicon.
_ID_STEM = {
    PiKind.EMAIL: "email",
    PiKind.FIRST_NAME: "firstName",
    PiKind.LAST_NAME: "lastName",
    PiKind.PHONE: "phone",
    PiKind.ADDRESS: "address",
    PiKind.ZIP: "zip",
    PiKind.SSN: "ssn",
    PiKind.CREDIT_CARD: "card",
    PiKind.AGE: "birthday",
    PiKind.HEIGHT: "height",
    PiKind.WEIGHT: "weight",
    PiKind.GENDER: "gender",
    PiKind.MEDICAL_HISTORY: "surgery",
    PiKind.MEDICATION: "dosage",
    PiKind.BLOOD: "glucose",
    PiKind.MENTAL_HEALTH: "anxiety",
    PiKind.SMOKE_ALCOHOL: "alcohol",
}

_VIEW_GETTERS = {
    "EditText": "java.lang.String getText()",
    "AutoCompleteTextView": "java.lang.String getText()",
    "CheckBox": "boolean isChecked()",
    "Switch": "boolean isChecked()",
    "RadioButton": "boolean isChecked()",
    "SeekBar": "int getProgress()",
    "Spinner": "java.lang.Object getSelectedItem()",
}
_VIEW_CLASSES = tuple(_VIEW_GETTERS)

_PUT_STRING = (
    "<android.content.SharedPreferences$Editor: "
    "android.content.SharedPreferences$Editor "
    "putString(java.lang.String,java.lang.String)>"
)
_LOG_D = "<android.util.Log: int d(java.lang.String,java.lang.String)>"
_STREAM_WRITE = "<java.io.OutputStream: void write(byte[])>"
_FILE_WRITE = "<java.io.FileWriter: void write(java.lang.String)>"

_SINK_SIG = {
    DestCategory.LOCALSTORE: _PUT_STRING,
    DestCategory.LOG: _LOG_D,
    DestCategory.NET: _STREAM_WRITE,
    DestCategory.FILEIO: _FILE_WRITE,
}

_FLOW_ID_BASE = 0x7F090000
_DECOY_ID_BASE = 0x7F0A0000


@dataclass(frozen=True)
class FixtureSpec:
    """Parameters for one generated bundle."""

    seed: int
    n_sources: int = 5
    pi_mix: dict[str, float] | None = None
    party_mix: float = 0.5
    destination_mix: dict[str, float] | None = None
    n_decoys: int = 3
    chain_len: tuple[int, int] = (1, 3)

    def __post_init__(self):
        if not 0 <= self.seed <= _MAX_SEED:
            raise InvalidSpec(f"seed out of range: {self.seed}")
        if self.n_sources < 0:
            raise InvalidSpec(f"n_sources must be >= 0, got {self.n_sources}")
        if self.n_decoys < 0:
            raise InvalidSpec(f"n_decoys must be >= 0, got {self.n_decoys}")
        if not 0.0 <= self.party_mix <= 1.0:
            raise InvalidSpec(f"party_mix must be in [0, 1], got {self.party_mix}")
        lo, hi = self.chain_len
        if lo < 1 or hi < lo:
            raise InvalidSpec(f"chain_len must satisfy 1 <= lo <= hi, got {self.chain_len}")
        _check_mix("pi_mix", self.pi_mix, {k.value for k in PiKind})
        _check_mix("destination_mix", self.destination_mix,
                   {c.value for c in DestCategory})

    @classmethod
    def from_dict(cls, doc: dict) -> FixtureSpec:
        known = {"seed", "n_sources", "pi_mix", "party_mix", "destination_mix",
                 "n_decoys", "chain_len"}
        extra = set(doc) - known
        if extra:
            raise InvalidSpec(f"unknown spec fields: {sorted(extra)}")
        if "seed" not in doc:
            raise InvalidSpec("spec requires a seed")
        kwargs = dict(doc)
        if "chain_len" in kwargs:
            try:
                lo, hi = kwargs["chain_len"]
            except (TypeError, ValueError):
                raise InvalidSpec(
                    f"chain_len must be a [lo, hi] pair, got {kwargs['chain_len']!r}"
                ) from None
            kwargs["chain_len"] = (lo, hi)
        return cls(**kwargs)


def _check_mix(name: str, mix: dict[str, float] | None, valid: set[str]) -> None:
    if mix is None:
        return
    unknown = set(mix) - valid
    if unknown:
        raise InvalidSpec(f"{name} has unknown keys: {sorted(unknown)}")
    if any(w < 0 for w in mix.values()):
        raise InvalidSpec(f"{name} weights must be nonnegative")
    if not any(w > 0 for w in mix.values()):
        raise InvalidSpec(f"{name} needs at least one positive weight")


@dataclass(frozen=True)
class PlantedLeak:
    pi: PiKind
    party: str  # "first" | "third"
    category: DestCategory
    source_id_name: str
    sink_sig: str

    def as_tuple(self):
        return (self.pi.value, self.party, self.category.value,
                self.source_id_name, self.sink_sig)


@dataclass(frozen=True)
class GroundTruth:
    leaks: tuple[PlantedLeak, ...] = field(default_factory=tuple)

    def tuples(self) -> set[tuple]:
        return {lk.as_tuple() for lk in self.leaks}


def save_ground_truth(gt: GroundTruth, path) -> None:
    lines = ["\t".join(lk.as_tuple()) for lk in gt.leaks]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def load_ground_truth(path) -> GroundTruth:
    leaks = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        pi, party, category, id_name, sink_sig = line.split("\t")
        leaks.append(
            PlantedLeak(PiKind(pi), party, DestCategory(category), id_name, sink_sig)
        )
    return GroundTruth(tuple(leaks))


def detected_tuples(report: dict) -> set[tuple]:
    """Project a per-app report's leaks onto ground-truth tuples."""
    return {
        (leak["pi_kind"], leak["party"], leak["destination"],
         leak["source"]["view"]["id_name"], leak["sink"]["signature"])
        for leak in report.get("leaks", ())
    }


# ---------------------------------------------------------------------------
# generation


def _weighted_kinds(mix: dict[str, float] | None):
    if mix is None:
        return list(PiKind), None
    kinds = sorted((PiKind(k) for k, w in mix.items() if w > 0),
                   key=KIND_ORDER.__getitem__)
    return kinds, [mix[k.value] for k in kinds]


def _weighted_categories(mix: dict[str, float] | None):
    if mix is None:
        return list(DestCategory), None
    cats = [c for c in DestCategory if mix.get(c.value, 0) > 0]
    return cats, [mix[c.value] for c in cats]


@dataclass
class _Flow:
    index: int
    pi: PiKind
    third: bool
    category: DestCategory
    view_class: str
    id_name: str
    numeric_id: int
    chain_hops: int
    literal_arg: bool


def _sink_lines(category: DestCategory, owner: str, value_reg: str):
    """Statements calling the category's sink on value_reg, plus any helper
    methods the owner class must declare."""
    if category is DestCategory.LOCALSTORE:
        stmts = [
            f"$ed = staticinvoke <{owner}: android.content.SharedPreferences$Editor prefs()>()",
            f'interfaceinvoke $ed.{_PUT_STRING}("k", {value_reg})',
        ]
        helpers = [("android.content.SharedPreferences$Editor prefs()", "return null")]
    elif category is DestCategory.LOG:
        stmts = [f'staticinvoke {_LOG_D}("fx", {value_reg})']
        helpers = []
    elif category is DestCategory.NET:
        stmts = [
            f"$by = virtualinvoke {value_reg}.<java.lang.String: byte[] getBytes()>()",
            f"$os = staticinvoke <{owner}: java.io.OutputStream netOut()>()",
            f"virtualinvoke $os.{_STREAM_WRITE}($by)",
        ]
        helpers = [("java.io.OutputStream netOut()", "return null")]
    else:  # fileio
        stmts = [
            f"$fw = staticinvoke <{owner}: java.io.FileWriter fileOut()>()",
            f"virtualinvoke $fw.{_FILE_WRITE}({value_reg})",
        ]
        helpers = [("java.io.FileWriter fileOut()", "return null")]
    return stmts, helpers


def _flow_unit(flow: _Flow, pkg: str) -> tuple[str, str]:
    """Render one planted flow as (class name, jtac text)."""
    cls = f"{pkg}.Flow{flow.index}"
    body = ["  r0 = this"]
    if flow.literal_arg:
        body.append(
            f"  $v = virtualinvoke r0.<{cls}: android.view.View findViewById(int)>"
            f"({flow.numeric_id})"
        )
    else:
        body.append(f"  $id = <{pkg}.R$id: int {flow.id_name}>")
        body.append(
            f"  $v = virtualinvoke r0.<{cls}: android.view.View findViewById(int)>($id)"
        )
    getter = _VIEW_GETTERS[flow.view_class]
    body.append(
        f"  $t0 = virtualinvoke $v.<android.widget.{flow.view_class}: {getter}>()"
    )
    reg = "$t0"
    for hop in range(1, flow.chain_hops + 1):
        body.append(f"  $t{hop} = {reg}")
        reg = f"$t{hop}"
    if flow.third:
        relay = f"io.fakelib.sdk{flow.index}.Relay{flow.index}"
        body.append(
            f"  $u = staticinvoke <{relay}: java.lang.String send(java.lang.String)>({reg})"
        )
        reg = "$u"
    sink_stmts, helpers = _sink_lines(flow.category, cls, reg)
    body.extend("  " + s for s in sink_stmts)

    lines = [f"class {cls} extends android.app.Activity", "", "method void run():"]
    lines.extend(body)
    for sig, ret in helpers:
        lines.append("")
        lines.append(f"method static {sig}:")
        lines.append(f"  {ret}")
    return cls, "\n".join(lines) + "\n"


def _relay_unit(index: int) -> tuple[str, str]:
    cls = f"io.fakelib.sdk{index}.Relay{index}"
    text = (
        f"class {cls}\n\n"
        "method static java.lang.String send(java.lang.String p0):\n"
        "  return p0\n"
    )
    return cls, text


def _decoy_unit(kind: int, index: int, pkg: str, id_name: str, numeric_id: int):
    """Decoy kinds: 0 = labeled view never looked up (no code unit);
    1 = sink fed only constants; 2 = taint stored to a field never read."""
    cls = f"{pkg}.Decoy{index}"
    if kind == 1:
        text = (
            f"class {cls}\n\n"
            "method void noop():\n"
            f"  $ed = staticinvoke <{cls}: android.content.SharedPreferences$Editor prefs()>()\n"
            f'  interfaceinvoke $ed.{_PUT_STRING}("k", "v")\n\n'
            "method static android.content.SharedPreferences$Editor prefs():\n"
            "  return null\n"
        )
        return cls, text
    if kind == 2:
        text = (
            f"class {cls} extends android.app.Activity\n\n"
            "field java.lang.String dead\n\n"
            "method void run():\n"
            "  r0 = this\n"
            f"  $v = virtualinvoke r0.<{cls}: android.view.View findViewById(int)>"
            f"({numeric_id})\n"
            "  $t = virtualinvoke $v.<android.widget.EditText: java.lang.String getText()>()\n"
            f"  r0.<{cls}: java.lang.String dead> = $t\n"
        )
        return cls, text
    return None  # kind 0: layout + rtable only


def generate(spec: FixtureSpec, out_dir) -> tuple[Path, GroundTruth]:
    """Write the bundle described by spec into out_dir.

    Returns the bundle directory and its ground truth; ground_truth.tsv is
    written inside the bundle so the oracle travels with the fixture.
    """
    out_dir = Path(out_dir)
    rng = random.Random(spec.seed)
    pkg = f"com.fx{spec.seed}.app"

    kinds, kind_weights = _weighted_kinds(spec.pi_mix)
    cats, cat_weights = _weighted_categories(spec.destination_mix)
    lo, hi = spec.chain_len

    flows = []
    for i in range(spec.n_sources):
        pi = rng.choices(kinds, weights=kind_weights)[0]
        flows.append(
            _Flow(
                index=i,
                pi=pi,
                third=rng.random() < spec.party_mix,
                category=rng.choices(cats, weights=cat_weights)[0],
                view_class=rng.choice(_VIEW_CLASSES),
                id_name=f"{_ID_STEM[pi]}Input{i}",
                numeric_id=_FLOW_ID_BASE + i,
                chain_hops=rng.randint(lo, hi),
                literal_arg=rng.random() < 0.5,
            )
        )

    decoys = []
    stems = sorted(_ID_STEM.values())
    for j in range(spec.n_decoys):
        kind = j % 3
        stem = rng.choice(stems)
        suffix = "Shown" if kind == 0 else "Dead"
        decoys.append((kind, j, f"{stem}{suffix}{j}", _DECOY_ID_BASE + j))

    # --- write the bundle
    (out_dir / "res" / "layout").mkdir(parents=True, exist_ok=True)
    (out_dir / "code").mkdir(parents=True, exist_ok=True)

    (out_dir / "manifest.xml").write_text(
        f'<?xml version="1.0" encoding="utf-8"?>\n<manifest package="{pkg}"/>\n',
        encoding="utf-8",
    )

    rtable_lines = [f"id {f.id_name} 0x{f.numeric_id:08x}" for f in flows]
    rtable_lines += [
        f"id {name} 0x{num:08x}" for kind, _, name, num in decoys if kind != 1
    ]
    (out_dir / "res" / "rtable.txt").write_text(
        "".join(line + "\n" for line in rtable_lines), encoding="utf-8"
    )

    layout = ['<?xml version="1.0" encoding="utf-8"?>']
    layout.append('<LinearLayout xmlns:android="http://schemas.android.com/apk/res/android">')
    for f in flows:
        layout.append(f'  <{f.view_class} android:id="@+id/{f.id_name}" />')
    for kind, _, name, _num in decoys:
        if kind != 1:
            layout.append(f'  <EditText android:id="@+id/{name}" />')
    layout.append("</LinearLayout>")
    (out_dir / "res" / "layout" / "main.xml").write_text(
        "\n".join(layout) + "\n", encoding="utf-8"
    )

    for f in flows:
        cls, text = _flow_unit(f, pkg)
        (out_dir / "code" / f"Flow{f.index}.jtac").write_text(text, encoding="utf-8")
        if f.third:
            _, relay_text = _relay_unit(f.index)
            (out_dir / "code" / f"Relay{f.index}.jtac").write_text(
                relay_text, encoding="utf-8"
            )
    for kind, j, name, num in decoys:
        unit = _decoy_unit(kind, j, pkg, name, num)
        if unit is not None:
            (out_dir / "code" / f"Decoy{j}.jtac").write_text(unit[1], encoding="utf-8")

    gt = GroundTruth(
        tuple(
            PlantedLeak(
                pi=f.pi,
                party="third" if f.third else "first",
                category=f.category,
                source_id_name=f.id_name,
                sink_sig=_SINK_SIG[f.category],
            )
            for f in flows
        )
    )
    save_ground_truth(gt, out_dir / "ground_truth.tsv")
    return out_dir, gt
