"""Soundness checking for cyclic induction proofs in first-order logic with
inductive definitions."""

from .checker import SoundnessReport, check_soundness, ih_discharged, pi_derivable
from .digraph import build_digraph, cumulative_list, cumulative_subst, rb_paths
from .ncycles import check_prior_criterion, enumerate_ncycles, redundancy_report
from .normalizer import check_normal_form, normalize
from .ordering import OrderingContext, multiset_less, rpo_less
from .proof_format import load, parse, serialize
from .semantics import approximant, eval_ground_sequent

__version__ = "0.1.0"

__all__ = [
    "OrderingContext", "SoundnessReport", "approximant", "build_digraph", "check_normal_form",
    "check_prior_criterion", "check_soundness", "cumulative_list", "cumulative_subst",
    "enumerate_ncycles", "eval_ground_sequent", "ih_discharged", "load", "multiset_less",
    "normalize", "parse", "pi_derivable", "rb_paths", "redundancy_report", "rpo_less",
    "serialize",
]
