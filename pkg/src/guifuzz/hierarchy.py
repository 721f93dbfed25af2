"""Page snapshots: JSON (de)serialization, input-widget discovery, local
context extraction and dynamic-hint differencing."""

from __future__ import annotations

import json
from typing import Any

from .model import (
    INPUT_CLASS_KEYWORDS,
    MAX_TREE_DEPTH,
    DynamicHint,
    GuiPage,
    InputWidget,
    ViewNode,
    WidgetContext,
)

NEARBY_SEPARATOR = ";"
HINT_SEPARATOR = "; "
# fraction of the smaller height two vertical intervals must share
SAME_AXIS_OVERLAP = 0.5


class MalformedSnapshot(ValueError):
    pass


class WidgetNotInPage(LookupError):
    pass


_NODE_KEYS = {"class", "resource_id", "text", "hint", "bounds", "children"}


def _str_field(obj: dict, key: str, where: str) -> str:
    value = obj.get(key, "")
    if value is None:
        return ""
    if not isinstance(value, str):
        raise MalformedSnapshot(f"{where}: field {key!r} must be a string")
    return value


def _parse_node(obj: Any, depth: int, where: str) -> ViewNode:
    if depth > MAX_TREE_DEPTH:
        raise MalformedSnapshot(f"tree deeper than {MAX_TREE_DEPTH} levels")
    if not isinstance(obj, dict):
        raise MalformedSnapshot(f"{where}: node must be an object")
    unknown = set(obj) - _NODE_KEYS
    if unknown:
        raise MalformedSnapshot(f"{where}: unknown node fields {sorted(unknown)}")
    node_class = _str_field(obj, "class", where)
    if not node_class:
        raise MalformedSnapshot(f"{where}: node class is required")
    bounds = obj.get("bounds", [0, 0, 0, 0])
    if (
        not isinstance(bounds, list)
        or len(bounds) != 4
        or not all(isinstance(b, int) and not isinstance(b, bool) for b in bounds)
    ):
        raise MalformedSnapshot(f"{where}: bounds must be 4 integers")
    left, top, right, bottom = bounds
    if left > right or top > bottom:
        raise MalformedSnapshot(f"{where}: degenerate bounds {bounds}")
    children = obj.get("children", [])
    if not isinstance(children, list):
        raise MalformedSnapshot(f"{where}: children must be a list")
    return ViewNode(
        node_class=node_class,
        resource_id=_str_field(obj, "resource_id", where),
        text=_str_field(obj, "text", where),
        hint_text=_str_field(obj, "hint", where),
        bounds=(left, top, right, bottom),
        children=tuple(
            _parse_node(child, depth + 1, f"{where}.{i}") for i, child in enumerate(children)
        ),
    )


def parse_hierarchy(snapshot: str | bytes | dict) -> GuiPage:
    """Build a GuiPage from a page snapshot (JSON text or an already-decoded dict)."""
    if isinstance(snapshot, (str, bytes)):
        try:
            doc = json.loads(snapshot)
        except (ValueError, RecursionError) as exc:
            raise MalformedSnapshot(f"not a JSON document: {exc}") from None
    else:
        doc = snapshot
    if not isinstance(doc, dict):
        raise MalformedSnapshot("snapshot must be a JSON object")
    app_name = _str_field(doc, "app_name", "page")
    activity_name = _str_field(doc, "activity_name", "page")
    if not app_name or not activity_name:
        raise MalformedSnapshot("app_name and activity_name are required")
    if "root" not in doc:
        raise MalformedSnapshot("missing root node")
    root = _parse_node(doc["root"], 1, "root")
    return GuiPage(app_name=app_name, activity_name=activity_name, root=root)


def node_to_dict(node: ViewNode) -> dict:
    return {
        "class": node.node_class,
        "resource_id": node.resource_id,
        "text": node.text,
        "hint": node.hint_text,
        "bounds": list(node.bounds),
        "children": [node_to_dict(c) for c in node.children],
    }


def page_to_dict(page: GuiPage) -> dict:
    return {
        "app_name": page.app_name,
        "activity_name": page.activity_name,
        "root": node_to_dict(page.root),
    }


def serialize_page(page: GuiPage, indent: int | None = None) -> str:
    return json.dumps(page_to_dict(page), ensure_ascii=False, indent=indent)


def is_input_node(node: ViewNode) -> bool:
    return bool(node.hint_text) or any(k in node.node_class for k in INPUT_CLASS_KEYWORDS)


def _widget_id(page: GuiPage, node: ViewNode, path: tuple[int, ...]) -> str:
    if node.resource_id:
        return f"{page.activity_name}/{node.resource_id}"
    return f"{page.activity_name}/idx" + ".".join(str(i) for i in path)


def identify_input_widgets(page: GuiPage) -> list[InputWidget]:
    widgets = []
    for path, node in page.root.walk():
        if not is_input_node(node):
            continue
        descriptor = node.hint_text or node.resource_id or node.text
        if not descriptor:
            # nothing textual at all; the short class name is the only clue left
            descriptor = node.node_class.rsplit(".", 1)[-1]
        widgets.append(
            InputWidget(
                widget_id=_widget_id(page, node, path),
                descriptor=descriptor,
                node_path=path,
                resource_id=node.resource_id,
            )
        )
    return widgets


def _vertical_overlap(a: tuple[int, int, int, int], b: tuple[int, int, int, int]) -> bool:
    overlap = min(a[3], b[3]) - max(a[1], b[1])
    smaller = min(a[3] - a[1], b[3] - b[1])
    if smaller <= 0:
        return False
    return overlap >= SAME_AXIS_OVERLAP * smaller


def _locate(page: GuiPage, widget: InputWidget) -> ViewNode:
    try:
        node = page.node_at(widget.node_path)
    except IndexError:
        raise WidgetNotInPage(widget.widget_id) from None
    if _widget_id(page, node, widget.node_path) != widget.widget_id:
        raise WidgetNotInPage(widget.widget_id)
    return node


def extract_widget_context(page: GuiPage, widget: InputWidget) -> WidgetContext:
    node = _locate(page, widget)
    path = widget.node_path
    candidates: list[tuple[tuple[int, ...], ViewNode]] = []
    if path:
        parent_path = path[:-1]
        parent = page.node_at(parent_path)
        candidates.append((parent_path, parent))
        for sub_path, sub in parent.walk(parent_path):
            if sub_path != parent_path and not sub.children:
                candidates.append((sub_path, sub))
    for other_path, other in page.root.walk():
        if not other.children and _vertical_overlap(other.bounds, node.bounds):
            candidates.append((other_path, other))

    labels: list[str] = []
    seen_labels: set[str] = set()
    for cand_path, cand in candidates:
        if cand_path == path:
            continue
        label = cand.label
        if label and label not in seen_labels:
            seen_labels.add(label)
            labels.append(label)
    return WidgetContext(
        app_name=page.app_name,
        page_name=page.activity_name,
        input_widget=widget.descriptor,
        nearby_widgets=NEARBY_SEPARATOR.join(labels),
    )


def diff_pages(before: GuiPage, after: GuiPage, provoking_input: str) -> DynamicHint | None:
    """Texts of nodes that appear in ``after`` but not in ``before``."""
    old = {node.identity for _, node in before.root.walk()}
    fresh = [node for _, node in after.root.walk() if node.identity not in old and node.text]
    if not fresh:
        return None
    return DynamicHint(
        text=HINT_SEPARATOR.join(n.text for n in fresh),
        provoking_input=provoking_input,
        nodes=tuple(fresh),
    )
