from .rank_tests import GroupedSamples, TestResult, exact_kruskal_wallis_pvalue, kruskal_wallis, mann_whitney
from .variance import VarianceRow, significance_band, variance_report, write_variance_tsv

__all__ = [
    "GroupedSamples",
    "TestResult",
    "VarianceRow",
    "exact_kruskal_wallis_pvalue",
    "kruskal_wallis",
    "mann_whitney",
    "significance_band",
    "variance_report",
    "write_variance_tsv",
]
