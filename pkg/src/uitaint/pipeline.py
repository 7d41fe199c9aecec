"""End-to-end analysis of one app bundle: layouts to labeled views to taint
graph to report document."""

from __future__ import annotations

import dataclasses
import logging

from .gui import (
    WidgetRegistry,
    default_widget_registry,
    extract_views,
    join_rtable,
)
from .ir import parse_bundle
from .pi import Lexicon, classify, load_default_lexicon
from .report import emit_report
from .sources_sinks import SinkRegistry, load_default_sinks, resolve_sources
from .taint import build_graph, extract_leaks

log = logging.getLogger(__name__)


def analyze_bundle(
    app_dir,
    widgets: WidgetRegistry | None = None,
    lexicon: Lexicon | None = None,
    sinks: SinkRegistry | None = None,
) -> dict:
    """Analyze the bundle at app_dir and return its report document."""
    widgets = widgets or default_widget_registry()
    lexicon = lexicon or load_default_lexicon()
    sinks = sinks or load_default_sinks()

    bundle = parse_bundle(app_dir)

    views = []
    for layout in bundle.layouts:
        views.extend(extract_views(layout, widgets))
    views, unmatched = join_rtable(views, bundle.rtable)
    views = [
        v if (kind := classify(v, lexicon)) is None else dataclasses.replace(v, pi=kind)
        for v in views
    ]

    sources, diag = resolve_sources(bundle, [v for v in views if v.pi is not None])
    graph = build_graph(bundle, sources, sinks)
    leaks = extract_leaks(graph)

    log.info(
        "%s: %d views (%d labeled), %d sources, %d leaks",
        bundle.app_package,
        len(views),
        sum(1 for v in views if v.pi is not None),
        len(sources),
        len(leaks),
    )
    return emit_report(bundle, views, leaks, diag, unmatched)
