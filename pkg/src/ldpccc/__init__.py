"""Protograph LDPC convolutional codes over erasure channels.

Polynomial ensemble descriptions, density-evolution thresholds for full BP
and windowed decoding, exact stopping-set span analysis, seeded circulant
expansion with peeling/windowed decoders, and Monte Carlo simulation over
memoryless and bursty erasure channels.
"""

from .poly import (Polynomial, boundary, degree_bounds, interleave,
                   modulo_split, monomial, poly, poly_prod, poly_sum, precedes)
from .protograph import (BaseMatrix, Ensemble, WindowProtograph, base_matrix,
                         check_design_rules, classical_ensemble, design_rate,
                         ensemble_from_dict, ensemble_to_dict, load_ensemble,
                         max_span_family, new_ensemble, preset, PRESET_NAMES,
                         save_ensemble, window_subprotograph)
from .dethresh import (DEGraph, DEResult, ThresholdResult, bp_threshold,
                       de_fixed_point, de_graph, de_step,
                       window_config_threshold, windowed_threshold)
from .stopspan import (SpanReport, StoppingSet, check_gcd_monotonicity,
                       is_stopping_set, min_span, span_bound, span_bound_pair,
                       span_report, windowed_min_span, witness_pair)
from .codes import (DecodeOutcome, ExpandedCode, ExpansionError, expand,
                    export_coordinates, mbl_bounds, mbl_search, peel_decode,
                    window_decode)
from .channel import ChannelSpec, burst_lengths, gec_params, sample_pattern
from .bench import (DecoderSpec, ResultRow, SweepConfig, latency_model,
                    run_sweep, singleton_bound, write_csv)

__version__ = "0.1.0"
