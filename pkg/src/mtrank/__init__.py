"""Ranks of mapping tori Z^d x| Z: exact decisions, index sequences of powers,
spectral growth checks and Nielsen-class counts."""

from .errors import *  # noqa: F401,F403
from .exact import charpoly, det, hnf, minpoly, snf
from .nielsen import (
    CommutantBasis,
    NielsenReport,
    NielsenVerdict,
    commutant,
    generating_pair_classes,
    infinite_nielsen_probe,
    nielsen_count_d2,
    unit_search,
)
from .polynomials import factor_Z, finite_order, is_cyclotomic
from .powers import (
    DeltaSequence,
    TraceParams2x2,
    cn_2x2,
    delta,
    delta_scan,
    min_2gen_index,
    min_recurrence,
    u_table,
)
from .rank2 import (
    CyclicWitness,
    Verdict,
    companion_of,
    cyclic_search,
    decide_rank2_d2,
    necessary_filters,
    rank_report,
    vrank,
)

__version__ = "0.1.0"
