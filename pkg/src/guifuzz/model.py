"""Shared value types: view nodes, pages, input widgets, widget context, and
the candidate-constraint catalog."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator

MAX_TREE_DEPTH = 100

INPUT_CLASS_KEYWORDS = ("EditText", "AutoCompleteTextView", "TextInputEditText", "SearchView")


@dataclass(frozen=True)
class ViewNode:
    node_class: str
    resource_id: str = ""
    text: str = ""
    hint_text: str = ""
    bounds: tuple[int, int, int, int] = (0, 0, 0, 0)
    children: tuple["ViewNode", ...] = ()

    def __post_init__(self) -> None:
        left, top, right, bottom = self.bounds
        if left > right or top > bottom:
            raise ValueError(f"degenerate bounds {self.bounds!r}")

    @property
    def identity(self) -> tuple[str, str, tuple[int, int, int, int]]:
        """Key used when differencing two pages; deliberately excludes text."""
        return (self.node_class, self.resource_id, self.bounds)

    @property
    def label(self) -> str:
        return self.text or self.resource_id

    def walk(self, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], "ViewNode"]]:
        """Pre-order traversal yielding (index path, node)."""
        stack = [(path, self)]
        while stack:
            p, node = stack.pop()
            yield p, node
            for i in range(len(node.children) - 1, -1, -1):
                stack.append((p + (i,), node.children[i]))

    def depth(self) -> int:
        best = 0
        for p, _ in self.walk():
            best = max(best, len(p))
        return best + 1


@dataclass(frozen=True)
class GuiPage:
    app_name: str
    activity_name: str
    root: ViewNode

    def __post_init__(self) -> None:
        if not self.app_name or not self.activity_name:
            raise ValueError("app_name and activity_name must be non-empty")

    def node_at(self, path: tuple[int, ...]) -> ViewNode:
        node = self.root
        for i in path:
            node = node.children[i]
        return node

    def parent_path(self, path: tuple[int, ...]) -> tuple[int, ...] | None:
        return path[:-1] if path else None


@dataclass(frozen=True)
class InputWidget:
    widget_id: str
    descriptor: str
    node_path: tuple[int, ...]
    resource_id: str = ""

    def __post_init__(self) -> None:
        if not self.descriptor:
            raise ValueError("widget descriptor must be non-empty")

    @property
    def key(self) -> str:
        """Short name used in assignments: the resource id when present."""
        return self.resource_id or self.widget_id


@dataclass(frozen=True)
class WidgetContext:
    app_name: str
    page_name: str
    input_widget: str
    nearby_widgets: str = ""
    dynamic_hint: str = ""
    hint_provoking_input: str = ""

    def with_hint(self, hint: str, provoking_input: str) -> "WidgetContext":
        return replace(self, dynamic_hint=hint, hint_provoking_input=provoking_input)

    def text(self) -> str:
        """Text fed to the embedder for example retrieval."""
        return " ".join((self.app_name, self.page_name, self.input_widget, self.nearby_widgets))

    def to_dict(self) -> dict[str, str]:
        return {
            "app_name": self.app_name,
            "page_name": self.page_name,
            "input_widget": self.input_widget,
            "nearby_widgets": self.nearby_widgets,
            "dynamic_hint": self.dynamic_hint,
        }


INTRA_EXPLICIT = "intra_explicit"
INTRA_IMPLICIT = "intra_implicit"
INTER = "inter"
CATEGORIES = (INTRA_EXPLICIT, INTRA_IMPLICIT, INTER)


@dataclass(frozen=True)
class ConstraintCatalogEntry:
    category: str
    description: str

    def __post_init__(self) -> None:
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown constraint category {self.category!r}")


def _entries(category: str, *descriptions: str) -> list[ConstraintCatalogEntry]:
    return [ConstraintCatalogEntry(category, d) for d in descriptions]


CATALOG: tuple[ConstraintCatalogEntry, ...] = tuple(
    _entries(
        INTRA_EXPLICIT,
        "Pure text (without special characters)",
        "Pure digits",
        "Decimal number",
        "Date format",
        "Currency amount",
    )
    + _entries(
        INTRA_IMPLICIT,
        "Limited string length",
        "Required character classes (e.g., upper case letter, digit, special character)",
        "Uniqueness (value already in use)",
        "Non-negative value",
        "Bounded value range",
    )
    + _entries(
        INTER,
        "Less-than ordering (e.g., minimum below maximum, diastolic below systolic)",
        "Sum of parts equals the total",
        "Departure and Arrival (date before another date)",
        "Equality of confirmation fields",
        "Non-equality of two fields",
        "Dependent enabling (one field only valid when another is set)",
        "Cross-field format consistency",
    )
)

CATALOG_SIZES = {INTRA_EXPLICIT: 5, INTRA_IMPLICIT: 5, INTER: 7}


def check_catalog(catalog: tuple[ConstraintCatalogEntry, ...] | list[ConstraintCatalogEntry] = CATALOG) -> None:
    counts = {c: 0 for c in CATEGORIES}
    for entry in catalog:
        counts[entry.category] += 1
    if counts != CATALOG_SIZES:
        raise ValueError(f"catalog cardinalities {counts} != {CATALOG_SIZES}")


check_catalog()


@dataclass(frozen=True)
class DynamicHint:
    text: str
    provoking_input: str
    nodes: tuple[ViewNode, ...] = field(default=(), compare=False)
