from .metrics import absolute_error, absolute_errors, kl_divergence, mean_absolute_error
from .reports import (
    TopKTable,
    render_summary,
    render_topk,
    top_error_types,
    topk_comparison,
    write_records_tsv,
    write_summary_tsv,
    write_text_report,
    write_topk_tsv,
)
from .summary import EvaluationSummary, SystemSummary, summarize

__all__ = [
    "EvaluationSummary",
    "SystemSummary",
    "TopKTable",
    "absolute_error",
    "absolute_errors",
    "kl_divergence",
    "mean_absolute_error",
    "render_summary",
    "render_topk",
    "summarize",
    "top_error_types",
    "topk_comparison",
    "write_records_tsv",
    "write_summary_tsv",
    "write_text_report",
    "write_topk_tsv",
]
