"""Tensor rank certificates for matrix pencils, rank-n approximation by
simple-spectrum perturbation, and the rank-leap family."""

__version__ = "0.1.0"

from .approximation import (
    LeapFamily,
    PerturbationOutcome,
    build_leap_family,
    perturb_simple_pair,
    rank_n_approximate,
)
from .estimators import BiRankCertifier, CPALS, MultilinearTransform, RankNApproximator
from .group_action import GLTriple, act, compose, continuity_bound
from .oracle import ALSReport, OracleDecision, als_fit, oracle_rank_decision
from .rank import RankCertificate, Verdict, bi_rank_check, max_rank_value, mix_first_slice
from .tensor import CPDecomposition, cp_to_tensor, norm_l1, outer2, outer3

__all__ = [
    "ALSReport",
    "BiRankCertifier",
    "CPALS",
    "CPDecomposition",
    "GLTriple",
    "LeapFamily",
    "MultilinearTransform",
    "OracleDecision",
    "PerturbationOutcome",
    "RankCertificate",
    "RankNApproximator",
    "Verdict",
    "act",
    "als_fit",
    "bi_rank_check",
    "build_leap_family",
    "compose",
    "continuity_bound",
    "cp_to_tensor",
    "max_rank_value",
    "mix_first_slice",
    "norm_l1",
    "oracle_rank_decision",
    "outer2",
    "outer3",
    "perturb_simple_pair",
    "rank_n_approximate",
]
