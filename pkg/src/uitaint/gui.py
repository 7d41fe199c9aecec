"""GUI element extraction from layout XML files.

Walks layout documents in document order, keeps the elements that can accept
user input according to a widget registry, and joins their id names against
the bundle's resource-id table.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import resources

from .errors import WidgetSyntaxError
from .ir import LayoutDoc, RTable

# forward reference to pi.PiKind would be circular; the label field is typed
# loosely and filled in by the classifier.


@dataclass(frozen=True)
class ViewElement:
    """One input-capable element of a layout file."""

    view_class: str
    id_name: str | None
    numeric_id: int | None
    hint: str | None
    text: str | None
    layout_file: str
    pi: object | None = None  # PiKind once classified


@dataclass(frozen=True)
class WidgetRegistry:
    """Known view classes, split into input-capable widgets and containers."""

    known_views: frozenset[str]
    input_capable: frozenset[str]

    def __post_init__(self):
        extra = self.input_capable - self.known_views
        if extra:
            raise WidgetSyntaxError(f"input widgets missing from known set: {sorted(extra)}")

    def is_input(self, tag: str) -> bool:
        # dotted tags are custom views; assume they accept input
        return tag in self.input_capable or "." in tag

    def is_known(self, tag: str) -> bool:
        return tag in self.known_views or "." in tag


def load_widget_registry(path) -> WidgetRegistry:
    """Load a registry file: one `input:Name` or `container:Name` per line."""
    known, inputs = set(), set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            kind, sep, name = line.partition(":")
            name = name.strip()
            kind = kind.strip()
            if not sep or not name or " " in name:
                raise WidgetSyntaxError(f"{path}:{lineno}: expected 'input:Name' or 'container:Name'")
            if kind == "input":
                inputs.add(name)
                known.add(name)
            elif kind == "container":
                known.add(name)
            else:
                raise WidgetSyntaxError(f"{path}:{lineno}: unknown widget kind {kind!r}")
    return WidgetRegistry(frozenset(known), frozenset(inputs))


def default_widget_registry() -> WidgetRegistry:
    with resources.as_file(resources.files(__package__) / "data" / "widgets.txt") as p:
        return load_widget_registry(p)


def _local_name(qualified: str) -> str:
    """Strip an ElementTree `{namespace}` prefix."""
    return qualified.rsplit("}", 1)[-1]


def _attr(element, wanted: str) -> str | None:
    """Fetch an attribute by local name, whatever its namespace prefix."""
    for key, value in element.attrib.items():
        if _local_name(key) == wanted:
            return value
    return None


def _clean_id(value: str) -> str:
    for prefix in ("@+id/", "@id/"):
        if value.startswith(prefix):
            return value[len(prefix):]
    return value


def extract_views(layout: LayoutDoc, registry: WidgetRegistry) -> list[ViewElement]:
    """Collect input-capable view elements from one layout, in document order.

    Container and unknown tags are traversed but not emitted; dotted tags are
    treated as custom views and always emitted.
    """
    views = []
    for element in layout.root.iter():
        if not isinstance(element.tag, str):
            continue
        tag = _local_name(element.tag)
        if not registry.is_input(tag):
            continue
        raw_id = _attr(element, "id")
        views.append(
            ViewElement(
                view_class=tag,
                id_name=_clean_id(raw_id) if raw_id is not None else None,
                numeric_id=None,
                hint=_attr(element, "hint"),
                text=_attr(element, "text"),
                layout_file=layout.file,
            )
        )
    return views


def join_rtable(views: list[ViewElement], rtable: RTable) -> tuple[list[ViewElement], list[str]]:
    """Fill numeric ids from the resource table.

    Returns the same-length view list plus one warning string per view whose
    id name has no table entry.
    """
    joined = []
    warnings = []
    for v in views:
        if v.id_name is None:
            joined.append(v)
            continue
        num = rtable.lookup(v.id_name)
        if num is None:
            warnings.append(v.id_name)
            joined.append(v)
        else:
            joined.append(replace(v, numeric_id=num))
    return joined, warnings
