"""Certify bipartite qudit entanglement from correlations in two complementary local measurements."""

from .bases import (
    Basis,
    BasisPair,
    MubCollection,
    check_mutually_unbiased,
    computational_basis,
    default_pairs,
    fourier_basis,
    mub_collection_d3,
    mub_collection_d4,
    named_pair,
    sigma_x_basis,
    sigma_y_basis,
)
from .certify import CertificationReport, SweepRecord, Verdict, certify_mi, certify_pearson, sweep
from .measure import CountsTable, JointProbTable, joint_probabilities, normalize_counts, simulate_counts
from .metrics import (
    analytic_mi_sum_rho_c,
    analytic_mi_sum_werner,
    delta_mi,
    mi_sum,
    mutual_information,
    pearson,
    pearson_sum,
    witness_expectation,
)
from .qcore import DensityMatrix, QubitPairMapping, apply_pair_mapping, tensor_product, validate_density
from .states import build_state, classically_correlated, max_entangled, rho_a, rho_b, rho_c, rho_s, rho_w

__version__ = "0.1.0"
