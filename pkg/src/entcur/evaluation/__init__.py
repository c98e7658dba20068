"""Evaluation: class-wise accuracy, device decomposition, result tables."""

from .metrics import (
    EvalReport,
    class_wise_accuracy,
    confusion_matrix,
    evaluate,
    report_from_predictions,
)
from .tables import (
    CURVE_HEADER,
    RESULTS_HEADER,
    RunResult,
    TABLE_HEADER,
    TableFormatError,
    read_curve,
    read_results,
    render_table,
    write_curve,
    write_results,
    write_table,
)

__all__ = [
    "CURVE_HEADER",
    "EvalReport",
    "RESULTS_HEADER",
    "RunResult",
    "TABLE_HEADER",
    "TableFormatError",
    "class_wise_accuracy",
    "confusion_matrix",
    "evaluate",
    "read_curve",
    "read_results",
    "render_table",
    "report_from_predictions",
    "write_curve",
    "write_results",
    "write_table",
]
