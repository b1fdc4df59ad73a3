"""Orthogonal-group-equivariant spectral node augmentations for graphs.

Two pipelines over the unnormalized graph Laplacian: a per-eigenspace
augmentation that feeds each invariantly encoded eigenspace through a
permutation-invariant set function, and a smooth variant that damps every
eigenvector by its eigenvalue distance so the output admits an explicit
perturbation bound.  Alongside them: the bound itself, an experiment
harness that measures it, and a small-graph distinguishing study.
"""

from .augment import Augmentation, augmentation_from_json_obj
from .config import (RunConfig, config_digest, config_from_dict, load_config,
                     oge_config, vanilla_config)
from .encoders import (EncoderParams, LipschitzEstimate, encode,
                       estimate_lipschitz, make_encoder_params)
from .errors import (CapabilityError, EstimationError, SpectralAugError,
                     ValidationError)
from .graphs import (Graph, Permutation, PerturbSpec, adjacency,
                     apply_permutation, build_laplacian, component_count,
                     graph_to_json, make_graph, parse_graph, perturb)
from .linalg import (GroupedSpectrum, Spectrum, default_group_tau, eig_sym,
                     group_eigenspaces, match_permutation, procrustes_align)
from .setfuncs import LipschitzLedger, SetEncoderParams, compute_ledger
from .smooth import (OgeConfig, SmoothingFn, optimal_delta, pre_bound,
                     smooth_aug, smooth_aug_matrix, smooth_basis,
                     stability_bound)
from .stability import (StabilityReport, check_davis_kahan, check_product_norm,
                        check_weyl, degeneracy_contrast, lemma_sweeps,
                        run_experiment, run_grid, scaling_exponent)
from .isomorphism import (class_graph, distinguishing_study, enumerate_graphs,
                          is_isomorphic, iso_classes)
from .vanilla import (GraphFingerprint, VanillaConfig, universal_readout,
                      vanilla_aug, vanilla_aug_matrix)
from .wl import plain_fingerprint

__version__ = "0.1.0"

__all__ = [
    "Augmentation", "augmentation_from_json_obj",
    "RunConfig", "config_digest", "config_from_dict", "load_config",
    "oge_config", "vanilla_config",
    "EncoderParams", "LipschitzEstimate", "encode", "estimate_lipschitz",
    "make_encoder_params",
    "CapabilityError", "EstimationError", "SpectralAugError", "ValidationError",
    "Graph", "Permutation", "PerturbSpec", "adjacency", "apply_permutation",
    "build_laplacian", "component_count", "graph_to_json", "make_graph",
    "parse_graph", "perturb",
    "GroupedSpectrum", "Spectrum", "default_group_tau", "eig_sym",
    "group_eigenspaces", "match_permutation", "procrustes_align",
    "LipschitzLedger", "SetEncoderParams", "compute_ledger",
    "OgeConfig", "SmoothingFn", "optimal_delta", "pre_bound", "smooth_aug",
    "smooth_aug_matrix", "smooth_basis", "stability_bound",
    "StabilityReport", "check_davis_kahan", "check_product_norm", "check_weyl",
    "degeneracy_contrast", "lemma_sweeps", "run_experiment", "run_grid",
    "scaling_exponent",
    "class_graph", "distinguishing_study", "enumerate_graphs", "is_isomorphic",
    "iso_classes",
    "GraphFingerprint", "VanillaConfig", "universal_readout", "vanilla_aug",
    "vanilla_aug_matrix",
    "plain_fingerprint",
    "__version__",
]
