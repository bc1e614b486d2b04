"""Teacher-facing analytics: topic weighting and pretest/posttest tests."""

from .hits import (
    ConvergenceError,
    GraphError,
    TopicGraph,
    TopicScore,
    hits,
    ranked_columns,
)
from .special import f_sf, regularized_incomplete_beta, t_two_sided_p
from .stats import (
    AssessmentRecord,
    Cohort,
    Group,
    StatsError,
    TestReport,
    ancova,
    correlation_t,
    two_sample_t,
)
from .tables import (
    CsvFormatError,
    read_edges_csv,
    read_records_csv,
    render_score_table,
    render_test_report,
)

__all__ = [
    "AssessmentRecord",
    "Cohort",
    "ConvergenceError",
    "CsvFormatError",
    "GraphError",
    "Group",
    "StatsError",
    "TestReport",
    "TopicGraph",
    "TopicScore",
    "ancova",
    "correlation_t",
    "f_sf",
    "hits",
    "ranked_columns",
    "read_edges_csv",
    "read_records_csv",
    "regularized_incomplete_beta",
    "render_score_table",
    "render_test_report",
    "t_two_sided_p",
    "two_sample_t",
]
