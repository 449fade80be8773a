"""Longest light paths in the complete graph with i.i.d. exponential edge weights."""
from .analytics import (INV_E, EventSpec, GammaParams, atypical_union_bound, bridge_lowertail,
                        count_paths, expected_count, first_moment_upper_certificate, gamma_cdf,
                        gamma_log_cdf, gamma_log_pdf, gamma_log_window)
from .deviation import (ConditionedSequenceSpec, DeviationEstimate, check_pinned_conditioning,
                        check_superadditivity, deviation_of, estimate_p, fit_deviation_rate,
                        sample_conditioned)
from .errors import CapacityExceeded, DomainError, InvalidArgument, InvalidPath
from .experiments import ExperimentPlan, ExperimentRecord, fit_scaling, read_records, run_sweep
from .model import Instance, Path, PathStats, generate_instance, path_stats, path_weight
from .overlap import (OverlapProfile, conditional_overlap_bound, counting_bound,
                      counting_bound_exact, enumerate_overlap_histogram, exhaustive_overlap_check,
                      overlap_profile, second_moment_ratio)
from .solvers import (MinWeightProfile, exact_L, heuristic_L, heuristic_search,
                      min_weight_per_length, split_witness)

__version__ = "0.1.0"
