"""Adaptable fast matrix multiplication: products by repeated addition, with baselines and a benchmark harness."""
from .analysis import (CostParams, FitResult, SampleStats, cost_per_addition, effective_mean,
                       fit_power_law, percent_reduction, predict_additions, summarize)
from .kernels import (KernelId, MultiplyResult, OpCounts, afmm_case_a, afmm_case_b, multiply,
                      multiply_ijk, multiply_ikj, multiply_strassen)
from .matrix import (DenseMatrix, GeneratorSpec, Role, approx_equal, density, from_rows, generate,
                     identity, nonzero_mean, overall_mean, zeros)

__version__ = "0.1.0"
