"""Fixed-point proximity solvers for l0/l1 sparse regularization."""

from ._core import (  # noqa: F401
    DctFrameletOp,
    DenseOp,
    ErrorSequence,
    Fidelity,
    FirstDifferenceOp,
    IdentityOp,
    Image,
    IterationRecord,
    L0Config,
    L0Result,
    L0State,
    L1Config,
    L1IterationRecord,
    L1Result,
    LinearOp,
    MotionBlurOp,
    accuracy,
    add_gaussian_noise,
    default_l0_state,
    estimate_spectral_norm,
    gaussian_kernel_matrix,
    grad_H,
    grad_T,
    hard_threshold,
    mse,
    nnz,
    objective_F,
    predict_classification,
    predict_regression,
    project_support,
    psnr,
    read_libsvm,
    read_pgm,
    sample_poisson,
    soft_threshold,
    solve_l0,
    solve_l1_general,
    solve_l1_identity,
    support,
    write_pgm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
