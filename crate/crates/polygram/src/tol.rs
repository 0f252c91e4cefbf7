//! Tolerance contracts shared across the crate.
//!
//! All residual checks are relative: a residual `r` of an operation on
//! operands with Frobenius norms `a, b` passes when `r <= eps * (a * b + 1)`
//! (or the analogous one-operand form). The defaults target double precision
//! dense matrices of dimension up to a few tens.

/// Bundle of the crate's tolerance knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Symmetry check on inputs claimed symmetric.
    pub eps_sym: f64,
    /// Orthonormality residuals (`V^T V - I`, row orthogonality).
    pub eps_orth: f64,
    /// Reconstruction residual of eigendecompositions.
    pub eps_recon: f64,
    /// Singular-value cutoff for rank and nullspace, relative to the top
    /// singular value.
    pub rank_tol: f64,
    /// Maximum relative imaginary magnitude for a Gramian to count as real.
    pub eps_real: f64,
    /// Residual of the block-Toeplitz constraint `W R = 0`.
    pub eps_cons: f64,
    /// Minimum relative spectral gap for canonical forms to be well defined.
    pub eps_gap: f64,
    /// Threshold on the normalized W norm separating real-factorable from
    /// complex-only verdicts. Deliberately looser than the generation
    /// tolerances; the margin is always reported alongside the verdict.
    pub classify_tol: f64,
    /// Relative step for finite-difference Jacobians.
    pub fd_step: f64,
    /// Rank cutoff for finite-difference Jacobians; looser than `rank_tol`
    /// because differencing injects O(step^2) noise.
    pub jac_rank_tol: f64,
    /// Retry budget for the rank rejection loop in the sampler.
    pub max_retries: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_sym: 1e-8,
            eps_orth: 1e-10,
            eps_recon: 1e-10,
            rank_tol: 1e-9,
            eps_real: 1e-9,
            eps_cons: 1e-9,
            eps_gap: 1e-8,
            classify_tol: 1e-7,
            fd_step: 1e-5,
            jac_rank_tol: 1e-6,
            max_retries: 16,
        }
    }
}

impl Tolerances {
    /// Scale every tolerance by a common factor, preserving their ratios.
    /// The finite-difference step and the retry budget are not tolerances
    /// and stay fixed.
    pub fn scaled(&self, factor: f64) -> Self {
        Tolerances {
            eps_sym: self.eps_sym * factor,
            eps_orth: self.eps_orth * factor,
            eps_recon: self.eps_recon * factor,
            rank_tol: self.rank_tol * factor,
            eps_real: self.eps_real * factor,
            eps_cons: self.eps_cons * factor,
            eps_gap: self.eps_gap * factor,
            classify_tol: self.classify_tol * factor,
            fd_step: self.fd_step,
            jac_rank_tol: self.jac_rank_tol * factor,
            max_retries: self.max_retries,
        }
    }

    /// Defaults, with the `POLYGRAM_TOL` environment variable (if set and
    /// parseable) applied as a global multiplicative scale.
    pub fn from_env() -> Self {
        let base = Tolerances::default();
        match std::env::var("POLYGRAM_TOL") {
            Ok(s) => match s.trim().parse::<f64>() {
                Ok(f) if f > 0.0 && f.is_finite() => base.scaled(f),
                _ => base,
            },
            Err(_) => base,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_preserves_ratios() {
        let t = Tolerances::default().scaled(10.0);
        assert_eq!(t.eps_sym, 1e-7);
        assert_eq!(t.classify_tol, 1e-6);
        assert_eq!(t.fd_step, 1e-5);
        assert_eq!(t.max_retries, 16);
    }
}
