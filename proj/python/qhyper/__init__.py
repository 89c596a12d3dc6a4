"""Python bindings for the qhyper C++ library."""

from ._qhyper import (
    BabyFock,
    C_of_mu,
    ConstructionError,
    InvalidArgument,
    SignTable,
    __version__,
    asym_convexity_check,
    bcl_check,
    choi_matrix,
    choi_min_eigenvalue,
    clt_estimate,
    dual_convexity_check,
    fock_moment,
    gram_entry,
    is_cp,
    necessary_time,
    pair_partition_moment,
    run_cli,
    schatten_norm,
    sufficient_time,
    time_for_threshold,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
