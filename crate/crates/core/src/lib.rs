//! Estimation of the time-dependent (Rihaczek) spectrum of underspread,
//! time-frequency-sparse nonstationary random processes from subsampled
//! ambiguity-function values.
//!
//! The crate is organized bottom-up:
//!
//! * [`grid`] — periodic N×N complex grids, lag-support geometry, and the
//!   symplectic 2D DFT pair.
//! * [`spectra`] — ambiguity function / Rihaczek distribution and their
//!   expectations, plus the minimum-variance-unbiased (MVU) smoothed
//!   estimator.
//! * [`solver`] — equality-constrained complex ℓ1 minimization (basis
//!   pursuit) via ADMM.
//! * [`compress`] — lag packing, the structured measurement operator,
//!   compressive and symmetrized Rihaczek-spectrum estimators.
//! * [`processes`] — OFDM and two-component chirp process models and a
//!   Gaussian sampler for arbitrary correlation matrices.
//! * [`analysis`] — bias/variance/MSE formulas, sparsity descriptors, and
//!   the time-frequency shift-operator machinery used to validate them.

pub mod analysis;
pub mod compress;
pub mod grid;
pub mod processes;
pub mod solver;
pub mod spectra;

pub use analysis::{
    basic_mse_bound, bias_sq_mvu, bound_report, chi_kernel, combined_mse_bounds, eaf_moment,
    excess_mse_bounds, h_approx, h_exact, mse_mvu, sparsity_profile, tf_shift_matrix,
    tf_sparsity_moment, twisted_convolution, variance_mvu_exact, AnalysisError, BoundReport,
    MseBreakdown,
};
pub use compress::{
    build_u, compressive_estimate, compressive_solution, measurement_matrix, pack_lags,
    reconstruct_rs, sample_measurements, subsample_rs, symmetrize_eaf,
    symmetrized_compressive_estimate, symmetrized_from_subsampled, unpack_to_grid, CompressError,
    CsProblem, PackedLagMatrix, SubsampledRs,
};
pub use grid::{make_lag_support, symplectic_dft, symplectic_idft, GridError, LagSupport, TfMatrix};
pub use processes::{
    chirp_correlation, derive_seed, dir_kernel, gaussian_realization, ofdm_closed_eaf,
    ofdm_closed_rs, ofdm_correlation, ofdm_realization, ChirpParams, GaussianSampler, OfdmParams,
    ProcessError,
};
pub use solver::{basis_pursuit, BpConfig, BpSolution, SolverError};
pub use spectra::{
    ambiguity_function, eaf_from_corr, expected_mvu, masked_af, mvu_estimate, mvu_smoothing_kernel,
    mvu_window, rihaczek_distribution, rs_from_corr, CorrelationMatrix, SignalVector, SpectraError,
};
