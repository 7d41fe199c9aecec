"""Personal-information semantics for GUI elements.

A view is labeled by tokenizing its id name, hint and text against a keyword
lexicon. Signals are tried in that priority order and the first signal with
at least one lexicon match decides the label.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources

from .errors import DuplicateTerm, LexiconSyntaxError


class PiCategory(Enum):
    IDENTITY = "identity"
    ANTHROPOMETRIC = "anthropometric"
    MEDICAL = "medical"


class PiKind(Enum):
    """Concrete kinds of personal information an input widget can collect.

    FIRST_NAME and LAST_NAME are the two halves of a person's name and are
    folded into a single "name" row by prevalence reporting.
    """

    EMAIL = "email"
    FIRST_NAME = "first_name"
    LAST_NAME = "last_name"
    PHONE = "phone"
    ADDRESS = "address"
    ZIP = "zip"
    SSN = "ssn"
    CREDIT_CARD = "credit_card"
    AGE = "age"
    HEIGHT = "height"
    WEIGHT = "weight"
    GENDER = "gender"
    MEDICAL_HISTORY = "medical_history"
    MEDICATION = "medication"
    BLOOD = "blood"
    MENTAL_HEALTH = "mental_health"
    SMOKE_ALCOHOL = "smoke_alcohol"


KIND_ORDER = {kind: i for i, kind in enumerate(PiKind)}

CATEGORY_OF = {
    PiKind.EMAIL: PiCategory.IDENTITY,
    PiKind.FIRST_NAME: PiCategory.IDENTITY,
    PiKind.LAST_NAME: PiCategory.IDENTITY,
    PiKind.PHONE: PiCategory.IDENTITY,
    PiKind.ADDRESS: PiCategory.IDENTITY,
    PiKind.ZIP: PiCategory.IDENTITY,
    PiKind.SSN: PiCategory.IDENTITY,
    PiKind.CREDIT_CARD: PiCategory.IDENTITY,
    PiKind.AGE: PiCategory.ANTHROPOMETRIC,
    PiKind.HEIGHT: PiCategory.ANTHROPOMETRIC,
    PiKind.WEIGHT: PiCategory.ANTHROPOMETRIC,
    PiKind.GENDER: PiCategory.ANTHROPOMETRIC,
    PiKind.MEDICAL_HISTORY: PiCategory.MEDICAL,
    PiKind.MEDICATION: PiCategory.MEDICAL,
    PiKind.BLOOD: PiCategory.MEDICAL,
    PiKind.MENTAL_HEALTH: PiCategory.MEDICAL,
    PiKind.SMOKE_ALCOHOL: PiCategory.MEDICAL,
}

# The sixteen reportable kinds: name is one entry backed by two halves.
PI_GROUPS: tuple[tuple[str, tuple[PiKind, ...]], ...] = (
    ("email", (PiKind.EMAIL,)),
    ("name", (PiKind.FIRST_NAME, PiKind.LAST_NAME)),
    ("phone", (PiKind.PHONE,)),
    ("address", (PiKind.ADDRESS,)),
    ("zip", (PiKind.ZIP,)),
    ("ssn", (PiKind.SSN,)),
    ("credit_card", (PiKind.CREDIT_CARD,)),
    ("age", (PiKind.AGE,)),
    ("height", (PiKind.HEIGHT,)),
    ("weight", (PiKind.WEIGHT,)),
    ("gender", (PiKind.GENDER,)),
    ("medical_history", (PiKind.MEDICAL_HISTORY,)),
    ("medication", (PiKind.MEDICATION,)),
    ("blood", (PiKind.BLOOD,)),
    ("mental_health", (PiKind.MENTAL_HEALTH,)),
    ("smoke_alcohol", (PiKind.SMOKE_ALCOHOL,)),
)


_CAMEL_LOWER_UPPER = re.compile(r"(?<=[a-z0-9])(?=[A-Z])")
_CAMEL_ACRONYM = re.compile(r"(?<=[A-Z])(?=[A-Z][a-z])")
_NON_ALPHA = re.compile(r"[^A-Za-z]+")


def tokenize(s: str) -> list[str]:
    """Split on camelCase boundaries, digits and separators; lowercase.

    "weightEditText" -> ["weight", "edit", "text"]
    "fear8name"      -> ["fear", "name"]
    """
    s = _CAMEL_ACRONYM.sub(" ", _CAMEL_LOWER_UPPER.sub(" ", s))
    return [t.lower() for t in _NON_ALPHA.split(s) if t]


@dataclass(frozen=True)
class LexEntry:
    tokens: tuple[str, ...]
    kind: PiKind

    @property
    def weight(self) -> int:
        """Character length of the term; longer terms are more specific."""
        return sum(len(t) for t in self.tokens)


@dataclass(frozen=True)
class Lexicon:
    entries: tuple[LexEntry, ...]

    def __post_init__(self):
        missing = [k.value for k in PiKind if not any(e.kind == k for e in self.entries)]
        if missing:
            raise LexiconSyntaxError(f"kinds without terms: {', '.join(missing)}")


def _canonical(entries) -> tuple[LexEntry, ...]:
    return tuple(sorted(entries, key=lambda e: (KIND_ORDER[e.kind], e.tokens)))


def load_lexicon(path) -> Lexicon:
    """Load `<kind>\\t<term>` lines; multi-token terms separate tokens with spaces."""
    entries = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].rstrip("\n")
            if not line.strip():
                continue
            kind_name, sep, term = line.partition("\t")
            if not sep:
                raise LexiconSyntaxError(f"{path}:{lineno}: expected '<kind>\\t<term>'")
            try:
                kind = PiKind(kind_name.strip())
            except ValueError:
                raise LexiconSyntaxError(f"{path}:{lineno}: unknown kind {kind_name!r}")
            tokens = tuple(t.lower() for t in term.split())
            if not tokens or not all(t.isalpha() for t in tokens):
                raise LexiconSyntaxError(f"{path}:{lineno}: bad term {term!r}")
            if (kind, tokens) in seen:
                raise DuplicateTerm(f"{path}:{lineno}: duplicate term {term!r} for {kind.value}")
            seen.add((kind, tokens))
            entries.append(LexEntry(tokens, kind))
    return Lexicon(_canonical(entries))


def save_lexicon(lexicon: Lexicon, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in _canonical(lexicon.entries):
            fh.write(f"{e.kind.value}\t{' '.join(e.tokens)}\n")


def load_default_lexicon() -> Lexicon:
    with resources.as_file(resources.files(__package__) / "data" / "lexicon.tsv") as p:
        return load_lexicon(p)


def _matches(tokens: list[str], entry: LexEntry) -> bool:
    """Whole-token containment; multi-token terms must appear contiguously."""
    k = len(entry.tokens)
    return any(tuple(tokens[i : i + k]) == entry.tokens for i in range(len(tokens) - k + 1))


def classify(view, lexicon: Lexicon) -> PiKind | None:
    """Label one view element, or None if no signal matches the lexicon.

    Signals are tried in priority order id_name > hint > text; the first
    signal with any match decides. Among its matches the longest term wins,
    ties broken by kind declaration order.
    """
    for signal in (view.id_name, view.hint, view.text):
        if not signal:
            continue
        tokens = tokenize(signal)
        if not tokens:
            continue
        matched = [e for e in lexicon.entries if _matches(tokens, e)]
        if matched:
            best = min(matched, key=lambda e: (-e.weight, KIND_ORDER[e.kind]))
            return best.kind
    return None
