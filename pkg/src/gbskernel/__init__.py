"""Exact Gaussian-boson-sampling graph features, kernels and benchmark tooling."""

__version__ = "0.1.0"

from ._accel import NUMBA_ENABLED
from .bench import CvProtocol, cross_validate_gram, double_cross_validate, gbs_feature_as_squared_matchings, graphlet_count_features, svm_train
from .datasets import DatasetBundle, load_tu_dataset, parse_tu_dataset, preprocess, write_tu_dataset
from .distribution import (
    MetaOrbit,
    Orbit,
    enumerate_meta_orbits,
    enumerate_orbits,
    event_probability,
    lossy_event_probability,
    meta_orbit_probability,
    orbit_probability,
    truncated_mass,
)
from .encoding import GbsEncoding, apply_loss, encode, lossy_a_via_eigen
from .features import (
    FeatureConfig,
    FeatureVector,
    GramMatrix,
    empirical_features,
    feature_vector,
    gram_matrix,
    linear_kernel,
    rbf_kernel,
    required_samples,
    sample_events,
)
from .graphcore import Graph, PhotonEvent, ScaledGraph, dataset_scale_factor, doubled_adjacency, extended_subgraph, validate_graph
from .hafnian import (
    count_r_matchings,
    gbs_polynomial,
    hafnian,
    isserlis_moment,
    loop_hafnian,
    matching_polynomial,
    pair_partitions,
    partitions_up_to_two,
)
