//! Equality-constrained complex ℓ1 minimization (basis pursuit):
//! `min ‖z‖₁ subject to M z = b`, with ‖z‖₁ the sum of entry moduli.
//!
//! Solved by ADMM on the split form `min ‖w‖₁ s.t. Mz = b, w = z`. The
//! z-update is an exact projection onto the affine constraint set,
//! `z = v − Mᴴ(MMᴴ)⁻¹(Mv − b)`, which is cheap because the measurement
//! matrices arising in this crate are row subsets of a scaled-unitary matrix
//! (`MMᴴ = (1/S′)·I`); the w-update is complex soft-thresholding (modulus
//! shrinkage preserving phase). Every iterate `z` is exactly feasible, so the
//! reported primal residual is the consensus gap `‖z − w‖₂`.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Basis-pursuit failure modes.
#[derive(Debug, Error)]
pub enum SolverError {
    /// Residuals did not meet tolerances within the iteration budget.
    #[error(
        "basis pursuit did not converge in {iters} iterations \
         (primal residual {primal:.3e}, dual residual {dual:.3e})"
    )]
    MaxIterations {
        /// Iterations performed.
        iters: usize,
        /// Final consensus (primal) residual ‖z−w‖₂.
        primal: f64,
        /// Final dual residual ρ‖w − w_prev‖₂.
        dual: f64,
    },
    /// MMᴴ is numerically rank deficient; the affine projection is undefined.
    #[error("measurement matrix is rank deficient (Cholesky of MMᴴ failed)")]
    RankDeficient,
    /// Shape mismatch between the matrix and right-hand side.
    #[error("shape mismatch: M is {rows}×{cols}, b has length {b_len}")]
    ShapeMismatch {
        /// Rows of M.
        rows: usize,
        /// Columns of M.
        cols: usize,
        /// Length of b.
        b_len: usize,
    },
}

/// ADMM configuration for [`basis_pursuit`].
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct BpConfig {
    /// Feasibility/consensus tolerance, scaled by ‖b‖₂ (default 1e−8).
    pub feas_tol: f64,
    /// Relative objective-change tolerance (default 1e−8).
    pub rel_obj_tol: f64,
    /// Iteration budget (default 2 000 000; signal-derived instances at high
    /// compression can need a few hundred thousand iterations).
    pub max_iters: usize,
    /// Initial penalty parameter ρ (default 1.0); adapted by residual
    /// balancing during the run.
    pub rho: f64,
}

impl Default for BpConfig {
    fn default() -> Self {
        BpConfig {
            feas_tol: 1e-8,
            rel_obj_tol: 1e-8,
            max_iters: 2_000_000,
            rho: 1.0,
        }
    }
}

/// Result of a successful [`basis_pursuit`] solve.
#[derive(Debug, Clone)]
pub struct BpSolution {
    /// Minimizer (exactly feasible by construction of the z-update).
    pub z_hat: DVector<Complex64>,
    /// Iterations used.
    pub iters: usize,
    /// Final consensus residual ‖z − w‖₂.
    pub primal_residual: f64,
    /// Final dual residual ρ‖w − w_prev‖₂.
    pub dual_residual: f64,
    /// Objective value ‖z_hat‖₁ (sum of moduli).
    pub objective: f64,
}

/// Sum of entry moduli.
pub fn l1_norm(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|z| z.norm()).sum()
}

/// Complex soft-thresholding: shrinks the modulus of each entry by `kappa`,
/// preserving phase; entries with modulus ≤ `kappa` map to zero.
pub fn soft_threshold(v: &DVector<Complex64>, kappa: f64) -> DVector<Complex64> {
    v.map(|z| {
        let r = z.norm();
        if r <= kappa {
            Complex64::new(0.0, 0.0)
        } else {
            z * ((r - kappa) / r)
        }
    })
}

/// Solves `min ‖z‖₁ s.t. M z = b` to within the configured tolerances.
///
/// Requires `P ≤ S′` and full row rank (guaranteed for row subsets of the
/// scaled-unitary measurement basis). Deterministic given inputs.
pub fn basis_pursuit(
    m_rows: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
    cfg: &BpConfig,
) -> Result<BpSolution, SolverError> {
    let (p, s) = (m_rows.nrows(), m_rows.ncols());
    if b.len() != p {
        return Err(SolverError::ShapeMismatch {
            rows: p,
            cols: s,
            b_len: b.len(),
        });
    }
    let b_norm = b.norm();
    if b_norm == 0.0 {
        // Unique minimizer of ‖·‖₁ over the nullspace translate through 0.
        return Ok(BpSolution {
            z_hat: DVector::zeros(s),
            iters: 0,
            primal_residual: 0.0,
            dual_residual: 0.0,
            objective: 0.0,
        });
    }

    // Factor MMᴴ once; reused every iteration by the affine projection.
    let gram = m_rows * m_rows.adjoint();
    let chol = Cholesky::new(gram).ok_or(SolverError::RankDeficient)?;
    // Cholesky can succeed on a numerically singular Gram matrix with tiny
    // positive pivots; reject those explicitly.
    {
        let diag = chol.l_dirty();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..p {
            let d = diag[(i, i)].norm();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        // Pivot ratio is the square root of the Gram condition number;
        // reject condition numbers worse than ~1e12.
        if lo <= 1e-6 * hi {
            return Err(SolverError::RankDeficient);
        }
    }
    let project = |v: &DVector<Complex64>| -> DVector<Complex64> {
        let resid = m_rows * v - b;
        let y = chol.solve(&resid);
        v - m_rows.adjoint() * y
    };

    let mut rho = cfg.rho;
    let mut w: DVector<Complex64> = DVector::zeros(s);
    let mut u: DVector<Complex64> = DVector::zeros(s);
    let mut z = project(&w);
    let mut objective = l1_norm(&z);
    let eps = cfg.feas_tol * b_norm.max(1.0);

    for iter in 1..=cfg.max_iters {
        let w_prev = w.clone();
        let obj_prev = objective;

        z = project(&(&w - &u));
        w = soft_threshold(&(&z + &u), 1.0 / rho);
        u += &z - &w;

        let primal = (&z - &w).norm();
        let dual = rho * (&w - &w_prev).norm();
        objective = l1_norm(&z);

        if primal <= eps
            && dual <= eps
            && (objective - obj_prev).abs() <= cfg.rel_obj_tol * (1.0 + objective)
        {
            return Ok(BpSolution {
                z_hat: z,
                iters: iter,
                primal_residual: primal,
                dual_residual: dual,
                objective,
            });
        }

        // Residual balancing: keep the primal and dual residuals within a
        // factor of 10 of each other. Rescale u (the scaled dual variable)
        // when ρ changes. Adapting only every 10th iteration avoids the
        // limit cycles that per-iteration factor-2 rescaling can induce.
        if iter % 10 == 0 {
            if primal > 10.0 * dual {
                rho *= 2.0;
                u /= Complex64::new(2.0, 0.0);
            } else if dual > 10.0 * primal {
                rho /= 2.0;
                u *= Complex64::new(2.0, 0.0);
            }
        }

        if iter == cfg.max_iters {
            return Err(SolverError::MaxIterations {
                iters: iter,
                primal,
                dual,
            });
        }
    }
    unreachable!("loop returns on success or at the iteration cap");
}
