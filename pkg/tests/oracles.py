"""Independent reference implementations used to check the package.

Each one is written the slow, obvious way and shares no code path with the
implementation it checks beyond the public data types.
"""

from __future__ import annotations

import math
from decimal import Decimal

from guifuzz.model import GuiPage, ViewNode


def brute_force_top_k(records, query_vec, record_vecs, k: int, decimals: int = 12):
    """Exhaustive cosine scan: score every record with exact-rounded sums,
    round, then sort by (-score, record_id)."""
    qn = math.sqrt(math.fsum(x * x for x in query_vec))
    scored = []
    for rec, vec in zip(records, record_vecs):
        vn = math.sqrt(math.fsum(x * x for x in vec))
        if qn == 0 or vn == 0:
            s = 0.0
        else:
            s = math.fsum(a * b for a, b in zip(query_vec, vec)) / (vn * qn)
        scored.append((round(s, decimals), rec.record_id, rec))
    scored.sort(key=lambda t: (-t[0], t[1]))
    return [(rec, s) for s, _, rec in scored[:k]]


def all_nodes(node: ViewNode):
    out = [node]
    for c in node.children:
        out.extend(all_nodes(c))
    return out


def diff_oracle(before: GuiPage, after: GuiPage) -> str | None:
    """Set difference of node identity tuples, in document order."""
    old = set()
    for n in all_nodes(before.root):
        old.add((n.node_class, n.resource_id, n.bounds))
    texts = [n.text for n in all_nodes(after.root) if (n.node_class, n.resource_id, n.bounds) not in old and n.text]
    return "; ".join(texts) if texts else None


def input_nodes_oracle(node: ViewNode, path=()):
    """Exhaustive recursive walk collecting (path, node) of input widgets."""
    keywords = ("EditText", "AutoCompleteTextView", "TextInputEditText", "SearchView")
    found = []
    if node.hint_text or any(k in node.node_class for k in keywords):
        found.append((path, node))
    for i, c in enumerate(node.children):
        found.extend(input_nodes_oracle(c, path + (i,)))
    return found


def violate_order_oracle(hi: str, delta) -> Decimal:
    return Decimal(hi) + Decimal(str(delta))
