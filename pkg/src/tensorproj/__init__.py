"""Khatri-Rao structured random projections and sketching benchmarks."""

from .distributions import (
    EntryDistribution,
    SeedSpec,
    derive_seed,
    fourth_moment,
    per_factor,
    sample_matrix,
    very_sparse_delta,
    very_sparse_family,
)
from .linalg import (
    QrFactor,
    khatri_rao,
    kron_vec,
    linear_to_multi_index,
    mode_n_unfold,
    multi_index_to_linear,
    qr_factor,
    qr_orthonormal,
)
from .maps import (
    ConventionalRp,
    TensorRandomProjection,
    TrpEnsemble,
    build_conventional,
    build_ensemble,
    build_trp,
    make_factory,
)
from .stats import (
    CosineRmse,
    DistortionReport,
    IsometryStats,
    MomentAccumulator,
    cosine_similarity_rmse,
    empirical_isometry,
    isometry_stats,
    pairwise_distance_ratio,
    polarization_check,
    squared_norm_samples,
    tail_exceedance,
    theoretical_variance,
)
from .sketch import (
    RankDeficiencyWarning,
    SketchConfig,
    averaged_low_rank_approx,
    low_rank_approx,
    multi_mode_product,
    relative_error,
    tucker_synthetic,
)
from .data import IdxFormatError, gen_synthetic, load_mnist
from .experiments import (
    ConfigError,
    ExperimentConfig,
    ExperimentRecord,
    read_csv,
    run_experiment,
    write_csv,
)

__all__ = [
    "ConfigError",
    "ConventionalRp",
    "CosineRmse",
    "DistortionReport",
    "EntryDistribution",
    "ExperimentConfig",
    "ExperimentRecord",
    "IdxFormatError",
    "IsometryStats",
    "MomentAccumulator",
    "QrFactor",
    "RankDeficiencyWarning",
    "SeedSpec",
    "SketchConfig",
    "TensorRandomProjection",
    "TrpEnsemble",
    "averaged_low_rank_approx",
    "build_conventional",
    "build_ensemble",
    "build_trp",
    "cosine_similarity_rmse",
    "derive_seed",
    "empirical_isometry",
    "fourth_moment",
    "gen_synthetic",
    "isometry_stats",
    "khatri_rao",
    "kron_vec",
    "linear_to_multi_index",
    "load_mnist",
    "low_rank_approx",
    "make_factory",
    "mode_n_unfold",
    "multi_index_to_linear",
    "multi_mode_product",
    "pairwise_distance_ratio",
    "per_factor",
    "polarization_check",
    "qr_factor",
    "qr_orthonormal",
    "read_csv",
    "relative_error",
    "run_experiment",
    "sample_matrix",
    "squared_norm_samples",
    "tail_exceedance",
    "theoretical_variance",
    "tucker_synthetic",
    "very_sparse_delta",
    "very_sparse_family",
    "write_csv",
]

__version__ = "0.1.0"
