"""Seed-selection algorithms."""
from .baselines import degree_select, random_select
from .common import SeedSet, SelectionStats
from .greedy import celf, celf_select, celfpp, celfpp_select, greedy_mc, greedy_select
from .ris import Fixed, Imm, SamplePolicy, ThetaPlan, TimPlus, log_comb, parse_policy, ris_select, theta_for
from .rrsets import RRIndex, generate_rr_set, max_coverage, memory_cap_slots, sample_rr_sets

__all__ = [
    "SeedSet", "SelectionStats", "random_select", "degree_select",
    "greedy_mc", "celf", "celfpp", "greedy_select", "celf_select", "celfpp_select",
    "RRIndex", "generate_rr_set", "sample_rr_sets", "max_coverage", "memory_cap_slots",
    "SamplePolicy", "Fixed", "TimPlus", "Imm", "ThetaPlan", "theta_for", "parse_policy",
    "log_comb", "ris_select",
]
