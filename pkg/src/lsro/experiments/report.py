from __future__ import annotations

import math
from collections.abc import Sequence
from pathlib import Path

from jinja2 import StrictUndefined
from jinja2.sandbox import SandboxedEnvironment

from lsro_data.features_io import atomic_write_bytes

from .results import SummaryRow

REPORT_TEMPLATE = """\
LSRO sweep summary ({{ rows | length }} cells, mean +/- std over seeds)

{{ "%-14s %-14s %9s %5s %17s %17s %17s %17s %17s" | format("strategy", "source", "generated", "runs", "rank-1", "rank-5", "rank-10", "mAP", "top-1") }}
{% for r in rows -%}
{{ "%-14s %-14s %9d %5d %17s %17s %17s %17s %17s" | format(r.strategy, r.outlier_source, r.num_generated, r.runs, r.rank1, r.rank5, r.rank10, r.map, r.top1) }}
{% endfor -%}
{% if best %}
best mAP: {{ best.strategy }} / {{ best.outlier_source }} / {{ best.num_generated }} generated
{% endif -%}
"""

_env = SandboxedEnvironment(undefined=StrictUndefined, autoescape=False, keep_trailing_newline=True)


def _cell(mean: float, std: float) -> str:
    if math.isnan(mean):
        return "-"
    return f"{mean:.4f} +/- {std:.4f}"


def render_report(summary: Sequence[SummaryRow]) -> str:
    rows = [
        {
            "strategy": s.strategy,
            "outlier_source": s.outlier_source,
            "num_generated": s.num_generated,
            "runs": s.runs,
            **{m: _cell(s.means[m], s.stds[m]) for m in ("rank1", "rank5", "rank10", "map", "top1")},
        }
        for s in summary
    ]
    best = max(summary, key=lambda s: s.means["map"], default=None)
    return _env.from_string(REPORT_TEMPLATE).render(rows=rows, best=best)


def write_report(path: str | Path, summary: Sequence[SummaryRow]) -> str:
    text = render_report(summary)
    atomic_write_bytes(path, text.encode("utf-8"))
    return text
