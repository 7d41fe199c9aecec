"""Shared helpers: throwaway bundles, random mini-programs, a path oracle."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from uitaint.gui import ViewElement
from uitaint.ir import AppBundle, RTable, parse_code_unit
from uitaint.pi import PiKind

DATA = Path(__file__).parent / "data"

MANIFEST = '<?xml version="1.0" encoding="utf-8"?>\n<manifest package="{pkg}"/>\n'


def write_bundle(
    root: Path,
    package: str = "com.example.app",
    rtable: str | None = None,
    layouts: dict[str, str] | None = None,
    code: dict[str, str] | None = None,
) -> Path:
    """Lay out a bundle directory under root and return it.

    layouts maps file name -> XML body; code maps file name -> JTAC text.
    """
    root.mkdir(parents=True, exist_ok=True)
    (root / "manifest.xml").write_text(MANIFEST.format(pkg=package), encoding="utf-8")
    if rtable is not None:
        (root / "res").mkdir(exist_ok=True)
        (root / "res" / "rtable.txt").write_text(rtable, encoding="utf-8")
    for name, xml in (layouts or {}).items():
        layout_dir = root / "res" / "layout"
        layout_dir.mkdir(parents=True, exist_ok=True)
        (layout_dir / name).write_text(xml, encoding="utf-8")
    for name, text in (code or {}).items():
        (root / "code").mkdir(exist_ok=True)
        (root / "code" / name).write_text(text, encoding="utf-8")
    return root


@pytest.fixture
def bundle_dir(tmp_path):
    """Factory fixture: call with the same arguments as write_bundle."""

    def factory(**kwargs) -> Path:
        return write_bundle(tmp_path / "app", **kwargs)

    return factory


# ---------------------------------------------------------------------------
# random mini-programs: single-class bundles for shortest-path checking


MINI_CLS = "com.mini.app.M"
MINI_IDS = (100, 101)
_LOG_D = "<android.util.Log: int d(java.lang.String,java.lang.String)>"
_FIND = f"<{MINI_CLS}: android.view.View findViewById(int)>"


def mini_labeled_views():
    return [
        ViewElement("EditText", f"emailField{n}", n, None, None, "main.xml",
                    PiKind.EMAIL)
        for n in MINI_IDS
    ]


def random_mini_bundle(rng: random.Random, n_statements: int = 12) -> AppBundle:
    """One in-memory class of up to n_statements random statements.

    Sources are findViewById calls on the ids of mini_labeled_views, sinks
    are Log.d calls; copies, static-field traffic and opaque library calls
    provide the plumbing in between.
    """
    lines = ["  r0 = this"]
    regs = ["r0"]
    fresh = 0
    for _ in range(rng.randint(1, n_statements)):
        roll = rng.random()
        pick = lambda: rng.choice(regs)
        if roll < 0.2:
            fresh += 1
            lines.append(
                f"  $s{fresh} = virtualinvoke r0.{_FIND}({rng.choice(MINI_IDS)})"
            )
            regs.append(f"$s{fresh}")
        elif roll < 0.45:
            fresh += 1
            lines.append(f"  $c{fresh} = {pick()}")
            regs.append(f"$c{fresh}")
        elif roll < 0.6:
            lines.append(
                f"  <{MINI_CLS}: java.lang.String f{rng.randrange(3)}> = {pick()}"
            )
        elif roll < 0.75:
            fresh += 1
            lines.append(
                f"  $c{fresh} = <{MINI_CLS}: java.lang.String f{rng.randrange(3)}>"
            )
            regs.append(f"$c{fresh}")
        elif roll < 0.9:
            lines.append(f'  staticinvoke {_LOG_D}("t", {pick()})')
        else:
            fresh += 1
            lines.append(
                f"  $c{fresh} = virtualinvoke {pick()}."
                f"<ext.lib.Util: java.lang.String via(java.lang.String)>({pick()})"
            )
            regs.append(f"$c{fresh}")
    fields = "".join(f"field java.lang.String f{i}\n" for i in range(3))
    text = (
        f"class {MINI_CLS} extends android.app.Activity\n\n{fields}\n"
        "method void run():\n" + "\n".join(lines) + "\n"
    )
    unit = parse_code_unit(text, "M.jtac")
    return AppBundle("com.mini.app", [], RTable({}), {MINI_CLS: unit})


def enumerate_min_paths(graph, seed_node, prefix):
    """Brute-force oracle: minimal (length, lexicographic) witness per sink.

    Enumerates every simple path from seed_node and returns
    {(sink_sid, spec): full statement-id path} exactly as extract_leaks
    should choose it. Shortest paths never revisit a node, so restricting to
    simple paths is lossless.
    """
    best: dict[tuple, tuple] = {}

    def visit(node, labels, visited):
        for sink_sid, spec in graph.sink_feeds.get(node, ()):
            cand = prefix + labels + (sink_sid,)
            key = (sink_sid, spec)
            prev = best.get(key)
            if prev is None or (len(cand), cand) < (len(prev), prev):
                best[key] = cand
        for succ, label in graph.adjacency.get(node, ()):
            if succ not in visited:
                visit(succ, labels + (label,), visited | {succ})

    visit(seed_node, (), frozenset({seed_node}))
    return best
