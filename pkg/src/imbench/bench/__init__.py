"""Benchmark harness: sweeps, bars, dominance and paired runtime tests."""
from .algorithms import (ALGORITHM_NAMES, FixedSeeds, MockAlgorithm, RealAlgorithm, flip_pair,
                         mock_from_dict, real_algorithm, speedup_pair)
from .compare import (ComparisonReport, PairedTTest, curves_csv, dominance_matrix, flawed_compare,
                      paired_runtime_test, shared_seed_experiment, sound_compare, tune_parameter)
from .curves import (Bar, Flawed, Sound, TradeoffCurve, TradeoffPoint, Verdict, dominance,
                     flawed_bar, sweep, time_to_bar)

__all__ = [
    "ALGORITHM_NAMES", "FixedSeeds", "MockAlgorithm", "RealAlgorithm", "flip_pair", "speedup_pair",
    "mock_from_dict", "real_algorithm", "ComparisonReport", "PairedTTest", "curves_csv",
    "dominance_matrix", "flawed_compare", "paired_runtime_test", "shared_seed_experiment",
    "sound_compare", "tune_parameter", "Bar", "Flawed", "Sound", "TradeoffCurve", "TradeoffPoint",
    "Verdict", "dominance", "flawed_bar", "sweep", "time_to_bar",
]
