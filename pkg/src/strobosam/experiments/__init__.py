from strobosam.experiments.techniques import benchmark_technique, run_technique
from strobosam.experiments.threshold import threshold_bisection

__all__ = [
    "benchmark_technique",
    "run_technique",
    "threshold_bisection",
]
