from .kkt import (KktPoint, MfcqCheck, MfcqWitness, ResidualReport, canonical_multipliers,
                  kkt_residuals, mfcq_witness, y_positive_roots)
from .lemmas import HypothesisNotMet, bennet_check, lemma_2eq_solve
from .problem import Constraints, KktProblem, Verdict, constraints, objective, theorem_main2_check
from .sampling import SampleBatch, check_samples, sample_feasible

__all__ = [
    "Constraints", "HypothesisNotMet", "KktPoint", "KktProblem", "MfcqCheck", "MfcqWitness",
    "ResidualReport", "SampleBatch", "Verdict", "bennet_check", "canonical_multipliers",
    "check_samples", "constraints", "kkt_residuals", "lemma_2eq_solve", "mfcq_witness",
    "objective", "sample_feasible", "theorem_main2_check", "y_positive_roots",
]
