"""Per-app reports and corpus-level aggregation.

Reports are JSON documents with sorted keys so that the same analysis always
produces the same bytes. The analysis timestamp honors SOURCE_DATE_EPOCH so
whole corpus runs can be reproduced bit for bit.
"""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyCorpus
from .gui import ViewElement
from .ir import AppBundle, render_method_sig, render_statement
from .pi import CATEGORY_OF, KIND_ORDER, PI_GROUPS, PiKind
from .sources_sinks import DestCategory, SourceDiagnostics
from .taint import Leak

SCHEMA_VERSION = 1

_CATEGORIES = tuple(c.value for c in DestCategory)
_PARTIES = ("first", "third")


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    stamp = int(epoch) if epoch is not None else int(time.time())
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(stamp))


def _sid_list(sid):
    return [sid.cls, sid.method, sid.ordinal]


def _view_doc(v: ViewElement):
    doc = {
        "layout_file": v.layout_file,
        "view_class": v.view_class,
        "id_name": v.id_name,
        "numeric_id": v.numeric_id,
        "hint": v.hint,
        "text": v.text,
    }
    if v.pi is not None:
        doc["pi_kind"] = v.pi.value
        doc["pi_category"] = CATEGORY_OF[v.pi].value
    return doc


def _leak_doc(leak: Leak, bundle: AppBundle):
    return {
        "pi_kind": leak.pi.value,
        "pi_category": CATEGORY_OF[leak.pi].value,
        "party": leak.party.value,
        "destination": leak.sink_spec.category.value,
        "source": {
            "stmt": _sid_list(leak.source.stmt),
            "view": _view_doc(leak.source.view),
        },
        "sink": {
            "stmt": _sid_list(leak.sink_stmt),
            "signature": render_method_sig(leak.sink_spec.sig),
        },
        "path": [_sid_list(s) for s in leak.path],
        "path_text": [render_statement(bundle.statement(s)) for s in leak.path],
        "path_len": leak.path_len,
        "alt_third_party_path": leak.alt_third_party_path,
    }


def emit_report(
    bundle: AppBundle,
    views: list[ViewElement],
    leaks: list[Leak],
    diagnostics: SourceDiagnostics | None = None,
    unmatched_ids: list[str] | None = None,
) -> dict:
    """Build the per-app report document (plain dict, JSON-serializable)."""
    diagnostics = diagnostics or SourceDiagnostics()
    labeled = [v for v in views if v.pi is not None]
    return {
        "schema_version": SCHEMA_VERSION,
        "app_package": bundle.app_package,
        "analyzed_at": _timestamp(),
        "views_total": len(views),
        "views_labeled": len(labeled),
        "views": [_view_doc(v) for v in labeled],
        "leaks": [_leak_doc(lk, bundle) for lk in leaks],
        "diagnostics": {
            "findviewbyid_sites": diagnostics.sites,
            "sources_resolved": diagnostics.resolved,
            "unlabeled_id_skips": diagnostics.unlabeled_id_skips,
            "unresolved_arg_skips": diagnostics.unresolved_arg_skips,
            "unmatched_rtable_ids": list(unmatched_ids or []),
            "first_party_leaks_with_third_party_alternative": sum(
                1 for lk in leaks if lk.alt_third_party_path
            ),
        },
    }


def serialize_report(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_report(doc: dict, path) -> None:
    Path(path).write_text(serialize_report(doc), encoding="utf-8")


def parse_report(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# aggregation


def _lower_median(values: list[int]):
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def _party_stats(counts: list[int]) -> dict:
    return {
        "median": _lower_median(counts),
        "average": round(sum(counts) / len(counts), 2),
        "max": max(counts),
    }


@dataclass
class CorpusSummary:
    """Corpus-level statistics over a list of per-app reports."""

    n_apps: int
    total_leaks: int
    leak_stats: dict = field(default_factory=dict)
    destinations: list = field(default_factory=list)
    pi_by_destination: list = field(default_factory=list)
    prevalence: list = field(default_factory=list)
    view_types: list = field(default_factory=list)


def aggregate(reports: list[dict]) -> CorpusSummary:
    """Fold per-app reports into a CorpusSummary.

    Leak-count stats use the lower median and are computed twice: over all
    apps and over apps with at least one leak (empty markers when no app
    leaks). The per-PI destination table counts each app at most once per
    (PI, destination) cell; the destination table counts every leak.
    """
    if not reports:
        raise EmptyCorpus("no reports to aggregate")

    per_app_party = []  # (first_count, third_count) per report
    dest_party = {c: {p: 0 for p in _PARTIES} for c in _CATEGORIES}
    pi_dest_apps = {k: {c: set() for c in _CATEGORIES} for k in PiKind}
    collectors = {name: set() for name, _ in PI_GROUPS}
    view_counter: dict[str, dict[PiKind, int]] = {}

    for idx, report in enumerate(reports):
        first = third = 0
        for leak in report.get("leaks", ()):
            party = leak["party"]
            dest = leak["destination"]
            kind = PiKind(leak["pi_kind"])
            dest_party[dest][party] += 1
            pi_dest_apps[kind][dest].add(idx)
            if party == "first":
                first += 1
            else:
                third += 1
        per_app_party.append((first, third))
        for view in report.get("views", ()):
            kind = PiKind(view["pi_kind"])
            for name, kinds in PI_GROUPS:
                if kind in kinds:
                    collectors[name].add(idx)
            counter = view_counter.setdefault(view["view_class"], {})
            counter[kind] = counter.get(kind, 0) + 1

    total_leaks = sum(f + t for f, t in per_app_party)
    n_apps = len(reports)

    leak_stats = {}
    for basis, rows in (
        ("all_apps", per_app_party),
        ("leaking_apps", [(f, t) for f, t in per_app_party if f + t > 0]),
    ):
        if rows:
            leak_stats[basis] = {
                "apps": len(rows),
                "first": _party_stats([f for f, _ in rows]),
                "third": _party_stats([t for _, t in rows]),
                "total": _party_stats([f + t for f, t in rows]),
            }
        else:
            leak_stats[basis] = {"apps": 0, "first": None, "third": None, "total": None}

    destinations = []
    for cat in _CATEGORIES:
        first = dest_party[cat]["first"]
        third = dest_party[cat]["third"]
        leaks = first + third
        pct = round(100.0 * leaks / total_leaks, 2) if total_leaks else 0.0
        destinations.append(
            {"destination": cat, "leaks": leaks, "pct_of_leaks": pct,
             "first": first, "third": third}
        )

    pi_by_destination = []
    for kind in PiKind:
        cells = {c: len(pi_dest_apps[kind][c]) for c in _CATEGORIES}
        pi_by_destination.append(
            {"pi": kind.value, **cells, "total": sum(cells.values())}
        )

    prevalence = [
        {
            "pi": name,
            "apps_collecting": len(collectors[name]),
            "fraction": round(len(collectors[name]) / n_apps, 4),
        }
        for name, _ in PI_GROUPS
    ]

    labeled_total = sum(sum(c.values()) for c in view_counter.values())
    view_types = []
    for view_class in sorted(
        view_counter, key=lambda vc: (-sum(view_counter[vc].values()), vc)
    ):
        counter = view_counter[view_class]
        count = sum(counter.values())
        top = sorted(counter.items(), key=lambda kv: (-kv[1], KIND_ORDER[kv[0]]))[:3]
        view_types.append(
            {
                "view_class": view_class,
                "views": count,
                "share": round(count / labeled_total, 4) if labeled_total else 0.0,
                "top_pi": ";".join(f"{k.value}:{n}" for k, n in top),
            }
        )

    return CorpusSummary(
        n_apps=n_apps,
        total_leaks=total_leaks,
        leak_stats=leak_stats,
        destinations=destinations,
        pi_by_destination=pi_by_destination,
        prevalence=prevalence,
        view_types=view_types,
    )


def summary_doc(summary: CorpusSummary) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "n_apps": summary.n_apps,
        "total_leaks": summary.total_leaks,
        "leak_stats": summary.leak_stats,
        "destinations": summary.destinations,
        "pi_by_destination": summary.pi_by_destination,
        "prevalence": summary.prevalence,
        "view_types": summary.view_types,
    }


def write_summary(summary: CorpusSummary, path) -> None:
    Path(path).write_text(
        json.dumps(summary_doc(summary), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


# ---------------------------------------------------------------------------
# CSV export


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.2f}"
    return str(x)


def export_csv(summary: CorpusSummary, out_dir) -> list[Path]:
    """Write the five corpus CSVs into out_dir; returns the paths written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    path = out_dir / "leak_stats.csv"
    with open(path, "w", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(["basis", "party", "median", "average", "max"])
        for basis in ("all_apps", "leaking_apps"):
            stats = summary.leak_stats[basis]
            for party in ("first", "third", "total"):
                cell = stats[party]
                if cell is None:
                    w.writerow([basis, party, "", "", ""])
                else:
                    w.writerow(
                        [basis, party, cell["median"], _fmt(cell["average"]), cell["max"]]
                    )
    written.append(path)

    path = out_dir / "destinations.csv"
    with open(path, "w", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(["destination", "leaks", "pct_of_leaks", "first", "third"])
        for row in summary.destinations:
            w.writerow(
                [row["destination"], row["leaks"], _fmt(row["pct_of_leaks"]),
                 row["first"], row["third"]]
            )
    written.append(path)

    path = out_dir / "pi_by_destination.csv"
    with open(path, "w", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(["pi", *_CATEGORIES, "total"])
        col_totals = {c: 0 for c in _CATEGORIES}
        for row in summary.pi_by_destination:
            w.writerow([row["pi"], *(row[c] for c in _CATEGORIES), row["total"]])
            for c in _CATEGORIES:
                col_totals[c] += row[c]
        w.writerow(
            ["total", *(col_totals[c] for c in _CATEGORIES), sum(col_totals.values())]
        )
    written.append(path)

    path = out_dir / "prevalence.csv"
    with open(path, "w", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(["pi", "apps_collecting", "fraction"])
        for row in summary.prevalence:
            w.writerow([row["pi"], row["apps_collecting"], f"{row['fraction']:.4f}"])
    written.append(path)

    path = out_dir / "view_types.csv"
    with open(path, "w", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(["view_class", "views", "share", "top_pi"])
        for row in summary.view_types:
            w.writerow(
                [row["view_class"], row["views"], f"{row['share']:.4f}", row["top_pi"]]
            )
    written.append(path)

    return written
